#include "idfield/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idfield/errors.hpp"
#include "idfield/parallel.hpp"
#include "idfield/stats.hpp"

namespace idfield {

namespace {

std::int64_t coord_margin(const GroupSpec& spec,
                          const std::vector<GroupElement>& coords) {
  std::int64_t m = 0;
  for (const auto& c : coords) m = std::max(m, sup_norm(spec, c));
  return m;
}

}  // namespace

double Observable::eval_shifted(const GroupSpec& spec, const Trace& trace,
                                const GroupElement& g) const {
  const GroupElement ginv = inverse(spec, g);
  Eigen::MatrixXd values(coords.size(), trace.values.cols());
  for (std::size_t i = 0; i < coords.size(); ++i)
    values.row(i) = trace.at(spec, group_op(spec, ginv, coords[i]));
  return map(values);
}

double Observable::eval(const GroupSpec& spec, const Trace& trace) const {
  return eval_shifted(spec, trace, identity(spec));
}

Observable obs_indicator_box(std::vector<GroupElement> coords,
                             Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (coords.size() != std::size_t(lo.size()) || lo.size() != hi.size())
    throw DimensionMismatch("box must match coordinates");
  Observable o;
  o.coords = std::move(coords);
  o.bound = 1.0;
  o.description = "indicator_box";
  o.map = [lo = std::move(lo), hi = std::move(hi)](const Eigen::MatrixXd& v) {
    return ((v.col(0).array() >= lo.array()) && (v.col(0).array() <= hi.array()))
                   .all()
               ? 1.0
               : 0.0;
  };
  return o;
}

Observable obs_clipped_coordinate(GroupElement coord, double clip) {
  if (!(clip > 0.0)) throw InvalidSpec("clip bound must be > 0");
  Observable o;
  o.coords = {std::move(coord)};
  o.bound = clip;
  o.description = "clipped_coordinate";
  o.map = [clip](const Eigen::MatrixXd& v) {
    return std::clamp(v(0, 0), -clip, clip);
  };
  return o;
}

Observable obs_cosine(GroupElement coord, double a) {
  Observable o;
  o.coords = {std::move(coord)};
  o.bound = 1.0;
  o.description = "cosine";
  o.map = [a](const Eigen::MatrixXd& v) { return std::cos(a * v(0, 0)); };
  return o;
}

Observable obs_product(const Observable& a, const Observable& b, int left_dim,
                       int right_dim) {
  Observable o;
  // Union of coordinate lists; remember each factor's row positions.
  std::vector<GroupElement> coords = a.coords;
  for (const auto& c : b.coords)
    if (std::find(coords.begin(), coords.end(), c) == coords.end())
      coords.push_back(c);
  std::vector<Eigen::Index> arows, brows;
  for (const auto& c : a.coords)
    arows.push_back(std::find(coords.begin(), coords.end(), c) - coords.begin());
  for (const auto& c : b.coords)
    brows.push_back(std::find(coords.begin(), coords.end(), c) - coords.begin());
  o.coords = std::move(coords);
  o.bound = a.bound * b.bound;
  o.description = a.description + "*" + b.description;
  o.map = [a, b, arows, brows, left_dim, right_dim](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd va(arows.size(), left_dim), vb(brows.size(), right_dim);
    for (std::size_t i = 0; i < arows.size(); ++i)
      va.row(i) = v.row(arows[i]).head(left_dim);
    for (std::size_t i = 0; i < brows.size(); ++i)
      vb.row(i) = v.row(brows[i]).tail(right_dim);
    return a.map(va) * b.map(vb);
  };
  return o;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ConsistentWithErgodic: return "ConsistentWithErgodic";
    case Verdict::InconsistentWithErgodic: return "InconsistentWithErgodic";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

Verdict combine_verdicts(const std::vector<Verdict>& vs) {
  Verdict out = Verdict::ConsistentWithErgodic;
  for (Verdict v : vs) {
    if (v == Verdict::InconsistentWithErgodic) return v;
    if (v == Verdict::Inconclusive) out = v;
  }
  return out;
}

ErgodicityReport ergodic_average(const ProcessModel& model, const Observable& f,
                                 const Observable& h, const ErgodicOptions& opts,
                                 const RngStream& rng) {
  if (opts.radii.empty()) throw InvalidSpec("need >= 1 radius");
  if (opts.replicas < 2) throw InvalidSpec("need >= 2 replicas");
  std::vector<std::int64_t> radii = opts.radii;
  std::sort(radii.begin(), radii.end());

  const GroupSpec& spec = model.group();
  const std::int64_t margin =
      std::max(coord_margin(spec, f.coords), coord_margin(spec, h.coords));
  const std::int64_t max_radius = radii.back();
  const FolnerWindow trace_window = folner_window(spec, max_radius + margin);
  const FolnerWindow shift_window = folner_window(spec, max_radius);

  const std::int64_t n = opts.replicas;
  const std::size_t nr = radii.size();
  std::vector<double> fs(n), hs(n);
  std::vector<std::vector<double>> as(nr, std::vector<double>(n));

  // Per-radius shift sets, as positions into the max window's enumeration.
  std::vector<std::vector<std::size_t>> radius_positions(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    const FolnerWindow w = folner_window(spec, radii[ri]);
    for (const auto& g : w.elements)
      radius_positions[ri].push_back(
          std::size_t(window_position(spec, max_radius, g)));
  }

  parallel_for(n, [&](std::int64_t r) {
    const Trace trace = simulate_trace(model, trace_window, rng.child(r), opts.eps);
    fs[r] = f.eval(spec, trace);
    hs[r] = h.eval(spec, trace);
    std::vector<double> u(shift_window.elements.size());
    for (std::size_t i = 0; i < shift_window.elements.size(); ++i)
      u[i] = f.eval_shifted(spec, trace, shift_window.elements[i]);
    for (std::size_t ri = 0; ri < nr; ++ri) {
      double sum = 0.0;
      for (std::size_t pos : radius_positions[ri]) sum += u[pos];
      as[ri][r] = hs[r] * sum / double(radius_positions[ri].size());
    }
  });

  ErgodicityReport rep;
  rep.replicas = n;
  rep.seed = rng.seed();
  rep.stream = rng.stream();

  const double fbar = std::accumulate(fs.begin(), fs.end(), 0.0) / double(n);
  const double hbar = std::accumulate(hs.begin(), hs.end(), 0.0) / double(n);
  rep.mean_f = fbar;
  rep.mean_h = hbar;

  for (std::size_t ri = 0; ri < nr; ++ri) {
    RadiusStats st;
    st.radius = radii[ri];
    const double abar =
        std::accumulate(as[ri].begin(), as[ri].end(), 0.0) / double(n);
    st.average = abar;
    st.gap = abar - fbar * hbar;
    // Delta-method standard error of A_N - Ef Eh via the influence values.
    double ss = 0.0;
    for (std::int64_t r = 0; r < n; ++r) {
      const double inf = (as[ri][r] - abar) - fbar * (hs[r] - hbar) -
                         hbar * (fs[r] - fbar);
      ss += inf * inf;
    }
    st.std_error = std::sqrt(ss / double(n - 1) / double(n));
    rep.per_radius.push_back(st);
  }

  const RadiusStats& last = rep.per_radius.back();
  if (std::abs(last.gap) <= opts.bands.consistent_se * last.std_error) {
    rep.verdict = Verdict::ConsistentWithErgodic;
  } else {
    bool stable_above = true;
    const std::size_t from = nr >= 2 ? nr - 2 : nr - 1;
    for (std::size_t ri = from; ri < nr; ++ri)
      stable_above = stable_above &&
                     std::abs(rep.per_radius[ri].gap) >=
                         opts.bands.inconsistent_se * rep.per_radius[ri].std_error;
    rep.verdict = stable_above ? Verdict::InconsistentWithErgodic
                               : Verdict::Inconclusive;
  }
  return rep;
}

ErgodicityReport weak_mixing_report(const ProcessModel& model,
                                    const Observable& f, const Observable& h,
                                    const ErgodicOptions& opts,
                                    const RngStream& rng) {
  const ProcessModel pair = combine_pair(model, model);
  const Observable ff = obs_product(f, f, model.dim(), model.dim());
  const Observable hh = obs_product(h, h, model.dim(), model.dim());
  return ergodic_average(pair, ff, hh, opts, rng);
}

MonteCarloEstimate symm_diff_functional(const ProcessModel& model,
                                        const CylinderFunction& event,
                                        const GroupElement& g,
                                        std::int64_t samples,
                                        const RngStream& rng, double eps) {
  if (event.kind != CylinderFunction::Kind::Indicator)
    throw InvalidSpec("event must be an indicator cylinder");
  if (model.dim() != 1)
    throw DimensionMismatch("symmetric-difference probe expects scalar fields");
  const GroupSpec& spec = model.group();
  const std::int64_t radius =
      coord_margin(spec, event.coords) + sup_norm(spec, g);
  const FolnerWindow window = folner_window(spec, radius);
  const GroupElement ginv = inverse(spec, g);

  std::vector<double> diffs(samples);
  parallel_for(samples, [&](std::int64_t r) {
    const Trace t = simulate_trace(model, window, rng.child(r), eps);
    Eigen::VectorXd base(event.coords.size()), shifted(event.coords.size());
    for (std::size_t i = 0; i < event.coords.size(); ++i) {
      base[i] = t.at(spec, event.coords[i])(0);
      shifted[i] = t.at(spec, group_op(spec, ginv, event.coords[i]))(0);
    }
    diffs[r] = std::abs(event(base) - event(shifted));
  });
  const SampleSummary s = summarize(diffs);
  return MonteCarloEstimate{s.mean, s.std_error, samples};
}

namespace {

std::complex<double> leaf_codifference(const GroupSpec& spec,
                                       const LeafModel& leaf,
                                       const GroupElement& g) {
  std::complex<double> tau = 0.0;
  if (leaf.gaussian)
    tau += std::complex<double>(gaussian_covariance(spec, *leaf.gaussian, g), 0.0);
  if (leaf.idp && !leaf.idp->levy.zero_measure()) {
    // The compensator bands cancel in tau's defining combination, leaving
    // int (e^{i(x_g - x_e)} - e^{i x_g} - e^{-i x_e} + 1) dl. Atom-aligned
    // summation makes each term vanish exactly whenever the atom touches
    // only one of the two coordinates.
    const FinDimLevy marg =
        coordinate_marginal(leaf.idp->levy, {g, identity(spec)});
    for (const auto& [v, mass] : marg.atoms) {
      const std::complex<double> term =
          std::complex<double>(std::cos(v[0] - v[1]), std::sin(v[0] - v[1])) -
          std::complex<double>(std::cos(v[0]), std::sin(v[0])) -
          std::complex<double>(std::cos(v[1]), -std::sin(v[1])) + 1.0;
      tau += mass * term;
    }
  }
  return tau;
}

std::complex<double> codifference_rec(const ProcessModel& model,
                                      const GroupElement& g) {
  switch (model.type()) {
    case ProcessModel::Type::Leaf:
      return leaf_codifference(model.group(), model.leaf_model(), g);
    case ProcessModel::Type::Sum:
      return codifference_rec(model.left(), g) +
             codifference_rec(model.right(), g);
    case ProcessModel::Type::Pair:
      throw DimensionMismatch("codifference expects scalar coordinates");
  }
  return 0.0;
}

}  // namespace

std::complex<double> codifference(const ProcessModel& model,
                                  const GroupElement& g) {
  if (model.dim() != 1)
    throw DimensionMismatch("codifference expects scalar coordinates");
  const GroupElement e = identity(model.group());
  if (g == e) {
    Eigen::VectorXd t1(1), t2(1);
    t1 << 1.0;
    t2 << -1.0;
    return -marginal_log_charfn(model, {e}, t1) -
           marginal_log_charfn(model, {e}, t2);
  }
  return codifference_rec(model, g);
}

CodifferenceMc codifference_mc(const ProcessModel& model, const GroupElement& g,
                               std::int64_t samples, int batches,
                               const RngStream& rng, double eps) {
  if (model.dim() != 1)
    throw DimensionMismatch("codifference expects scalar coordinates");
  if (batches < 2 || samples < 2 * batches)
    throw InvalidSpec("need >= 2 batches and >= 2 samples per batch");
  const GroupSpec& spec = model.group();
  const GroupElement e = identity(spec);
  const FolnerWindow window = folner_window(spec, sup_norm(spec, g));

  std::vector<double> xg(samples), xe(samples);
  parallel_for(samples, [&](std::int64_t r) {
    const Trace t = simulate_trace(model, window, rng.child(r), eps);
    xg[r] = t.at(spec, g)(0);
    xe[r] = t.at(spec, e)(0);
  });

  std::vector<std::complex<double>> taus;
  const std::int64_t per = samples / batches;
  for (int b = 0; b < batches; ++b) {
    std::complex<double> pd = 0.0, pg = 0.0, pe = 0.0;
    const std::int64_t lo = b * per, hi = (b + 1 == batches) ? samples : lo + per;
    for (std::int64_t r = lo; r < hi; ++r) {
      pd += std::complex<double>(std::cos(xg[r] - xe[r]), std::sin(xg[r] - xe[r]));
      pg += std::complex<double>(std::cos(xg[r]), std::sin(xg[r]));
      pe += std::complex<double>(std::cos(-xe[r]), std::sin(-xe[r]));
    }
    const double m = double(hi - lo);
    taus.push_back(std::log(pd / m) - std::log(pg / m) - std::log(pe / m));
  }
  std::complex<double> mean = 0.0;
  for (const auto& t : taus) mean += t;
  mean /= double(taus.size());
  double vr = 0.0, vi = 0.0;
  for (const auto& t : taus) {
    vr += (t.real() - mean.real()) * (t.real() - mean.real());
    vi += (t.imag() - mean.imag()) * (t.imag() - mean.imag());
  }
  const double nb = double(taus.size());
  CodifferenceMc out;
  out.value = mean;
  out.std_error = std::sqrt((vr + vi) / (nb - 1.0) / nb);
  return out;
}

std::pair<LevySpec, double> merged_idp(const ProcessModel& model) {
  switch (model.type()) {
    case ProcessModel::Type::Leaf: {
      LevySpec spec;
      spec.group = model.group();
      double drift = 0.0;
      if (model.leaf_model().idp) {
        spec.components = model.leaf_model().idp->levy.spec().components;
        drift = model.leaf_model().idp->drift;
      }
      return {spec, drift};
    }
    case ProcessModel::Type::Sum: {
      auto [l, dl] = merged_idp(model.left());
      auto [r, dr] = merged_idp(model.right());
      for (auto& c : r.components) l.components.push_back(std::move(c));
      return {std::move(l), dl + dr};
    }
    case ProcessModel::Type::Pair:
      throw DimensionMismatch("probe expects scalar fields");
  }
  return {LevySpec{}, 0.0};
}

namespace {

bool atoms_only(const LevySpec& spec) {
  return std::all_of(spec.components.begin(), spec.components.end(),
                     [](const LevyComponent& c) {
                       return std::holds_alternative<FixedPointAtoms>(c);
                     });
}

bool model_has_gaussian(const ProcessModel& model) {
  for (const auto* l : model.leaves())
    if (l->gaussian) return true;
  return false;
}

}  // namespace

InvariantProbeReport invariant_event_probe(const ProcessModel& model,
                                           const ProbeOptions& opts,
                                           const RngStream& rng) {
  if (opts.radii.empty()) throw InvalidSpec("need >= 1 radius");
  if (opts.replicas < 2) throw InvalidSpec("need >= 2 replicas");
  const auto merged_pair = merged_idp(model);
  const LevySpec& merged_spec = merged_pair.first;
  const double drift = merged_pair.second;
  const ValidatedLevy merged = validate_levy(merged_spec);
  const NullityVerdict verdict = classify_nullity(merged);
  if (verdict.is_null)
    throw NullModel("model's Lévy measure admits no invariant witness");
  const auto split = split_by_invariant(merged, verdict);
  const ValidatedLevy& lprime = split.first;

  InvariantProbeReport rep;
  rep.lambda = verdict.witness_mass;
  rep.floor = std::exp(-rep.lambda);
  rep.replicas = opts.replicas;
  const GroupSpec& spec = model.group();
  const GroupElement e = identity(spec);
  const double c_eps =
      compensator(lprime, CylinderFunction::projection(e), opts.eps);
  rep.reference_constant = drift - c_eps;

  const ProcessModel xprime = ProcessModel::leaf(
      spec, std::nullopt, IdpSpec{lprime.spec(), drift});
  const bool exact_prime = atoms_only(lprime.spec());
  const bool exact_full =
      atoms_only(merged_spec) && !model_has_gaussian(model);

  std::vector<std::int64_t> radii = opts.radii;
  std::sort(radii.begin(), radii.end());
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const FolnerWindow window = folner_window(spec, radii[ri]);
    const RngStream base = rng.child(ri);
    std::vector<double> wit(opts.replicas), full(opts.replicas);
    parallel_for(opts.replicas, [&](std::int64_t r) {
      const Trace tp = simulate_trace(xprime, window, base.child(2 * r), opts.eps);
      const double dev =
          (tp.values.col(0).array() - rep.reference_constant).abs().maxCoeff();
      wit[r] = (exact_prime ? dev == 0.0 : dev <= opts.constancy_tol) ? 1.0 : 0.0;
      const Trace tf =
          simulate_trace(model, window, base.child(2 * r + 1), opts.eps);
      const double spread =
          tf.values.col(0).maxCoeff() - tf.values.col(0).minCoeff();
      full[r] = (exact_full ? spread == 0.0 : spread <= opts.constancy_tol) ? 1.0
                                                                            : 0.0;
    });
    ProbeRadiusStats st;
    st.radius = radii[ri];
    const SampleSummary sw = summarize(wit);
    const SampleSummary sf = summarize(full);
    st.p_witness_constant = sw.mean;
    st.se_witness = sw.std_error;
    st.p_full_constant = sf.mean;
    st.se_full = sf.std_error;
    rep.per_radius.push_back(st);
  }
  rep.limit_estimate = rep.per_radius.back().p_witness_constant;
  rep.within_band = rep.limit_estimate >= rep.floor - opts.tol &&
                    rep.limit_estimate <= 1.0 - opts.delta;
  return rep;
}

DecomposeReport mixture_decomposition_check(const ProcessModel& model_a,
                                            const ProcessModel& model_b,
                                            const DecomposeOptions& opts,
                                            const RngStream& rng) {
  if (opts.tgrid.empty()) throw InvalidSpec("need a t-grid");
  if (model_a.type() != ProcessModel::Type::Leaf)
    throw UnsupportedDescriptor("decompose expects a single-leaf model A");
  if (model_a.dim() != 1 || model_b.dim() != 1)
    throw DimensionMismatch("decompose expects scalar fields");
  if (!(model_a.group() == model_b.group()))
    throw GroupMismatch("A and B must share the group");
  const LeafModel& la = model_a.leaf_model();
  if (!la.idp || la.idp->nullity.is_null)
    throw NoInvariantEvent("A has no detectable invariant event");
  const auto split = split_by_invariant(la.idp->levy, la.idp->nullity);
  const ValidatedLevy& lprime = split.first;
  const ValidatedLevy& lrest = split.second;

  DecomposeReport rep;
  rep.p_event = std::exp(-la.idp->nullity.witness_mass);
  if (!(rep.p_event > 0.0 && rep.p_event < 1.0))
    throw NoInvariantEvent("event probability degenerate");

  const GroupSpec& spec = model_a.group();
  const GroupElement e = identity(spec);
  const FolnerWindow window0 = folner_window(spec, 0);
  const double c_eps =
      compensator(lprime, CylinderFunction::projection(e), opts.eps);

  // A | E analytically: the witnessed part frozen at its compensator.
  const ProcessModel a_cond_e = ProcessModel::leaf(
      spec, la.gaussian,
      IdpSpec{lrest.spec(), la.idp->drift - c_eps});

  // Monte Carlo with branch bookkeeping (every sample falls in one branch).
  const std::int64_t n = opts.replicas;
  std::vector<double> xs(n);
  std::vector<std::uint8_t> in_event(n);
  parallel_for(n, [&](std::int64_t r) {
    RngStream stream = rng.child(r);
    RngStream theta_rng = stream.child(0);
    const PointConfiguration theta_prime =
        sample_point_config(lprime, window0, theta_rng);
    const double xi = stochastic_integral(
        theta_prime, CylinderFunction::projection(e), lprime, opts.eps);
    const Trace rest =
        simulate_trace(a_cond_e, window0, stream.child(1), opts.eps);
    const Trace tb = simulate_trace(model_b, window0, stream.child(2), opts.eps);
    // a_cond_e already carries drift - c_eps; xi carries its own -c_eps, so
    // add it back to avoid double compensation.
    xs[r] = xi + c_eps + rest.at(spec, e)(0) + tb.at(spec, e)(0);
    in_event[r] = theta_prime.total_count() == 0 ? 1 : 0;
  });

  std::int64_t n1 = 0;
  for (std::int64_t r = 0; r < n; ++r) n1 += in_event[r];
  rep.n_event = n1;
  rep.n_complement = n - n1;
  if (rep.n_event == 0 || rep.n_complement == 0)
    throw NoInvariantEvent("one branch received no samples");

  Eigen::VectorXd t1(1);
  double best_ratio = -1.0;
  for (double t : opts.tgrid) {
    DecomposeRow row;
    row.t = t;
    t1 << t;
    row.mix_analytic = marginal_charfn(model_a, {e}, t1) *
                       marginal_charfn(model_b, {e}, t1);
    const std::complex<double> phi_ae =
        marginal_charfn(a_cond_e, {e}, t1) * marginal_charfn(model_b, {e}, t1);
    row.phi1_exact = phi_ae;
    row.phi2_exact =
        (row.mix_analytic - rep.p_event * phi_ae) / (1.0 - rep.p_event);

    std::complex<double> s1 = 0.0, s2 = 0.0;
    for (std::int64_t r = 0; r < n; ++r) {
      const std::complex<double> z(std::cos(t * xs[r]), std::sin(t * xs[r]));
      (in_event[r] ? s1 : s2) += z;
    }
    row.phi1_mc = s1 / double(rep.n_event);
    row.phi2_mc = s2 / double(rep.n_complement);
    row.residual = std::abs(row.mix_analytic -
                            (rep.p_event * row.phi1_mc +
                             (1.0 - rep.p_event) * row.phi2_mc));
    rep.max_residual = std::max(rep.max_residual, row.residual);

    const double gap = std::abs(row.phi1_mc - row.phi2_mc);
    const double se = std::sqrt(
        std::max(0.0, 1.0 - std::norm(row.phi1_mc)) / double(rep.n_event) +
        std::max(0.0, 1.0 - std::norm(row.phi2_mc)) / double(rep.n_complement));
    if (se > 0.0 && gap / se > best_ratio) {
      best_ratio = gap / se;
      rep.witness_t = t;
      rep.witness_gap = gap;
      rep.witness_se = se;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace idfield
