#include "idfield/processes.hpp"

#include <cmath>
#include <map>

#include "idfield/errors.hpp"

namespace idfield {

double gaussian_covariance(const GroupSpec& spec, const GaussianSpec& gauss,
                           const GroupElement& lag) {
  check_element(spec, lag);
  double rho = 0.0;
  for (const auto& [h, c] : gauss.kernel.support)
    rho += c * gauss.kernel.coeff(group_op(spec, h, lag));
  return rho;
}

ProcessModel ProcessModel::leaf(GroupSpec group,
                                std::optional<GaussianSpec> gaussian,
                                std::optional<IdpSpec> idp,
                                QuadratureOptions quad) {
  if (!gaussian && !idp)
    throw InvalidSpec("leaf needs a Gaussian or an IDP part");
  ProcessModel m;
  m.group_ = group;
  m.type_ = Type::Leaf;
  m.dim_ = 1;
  auto lm = std::make_shared<LeafModel>();
  if (gaussian) {
    for (const auto& [h, c] : gaussian->kernel.support) check_element(group, h);
    lm->gaussian = std::move(gaussian);
  }
  if (idp) {
    if (!(idp->levy.group == group))
      throw GroupMismatch("IDP part indexes a different group");
    ValidatedIdp v{validate_levy(std::move(idp->levy), quad), idp->drift, {}};
    v.nullity = classify_nullity(v.levy);
    lm->idp = std::move(v);
  }
  m.leaf_ = std::move(lm);
  return m;
}

std::vector<const LeafModel*> ProcessModel::leaves() const {
  std::vector<const LeafModel*> out;
  if (type_ == Type::Leaf) {
    out.push_back(leaf_.get());
  } else {
    for (const auto* l : left_->leaves()) out.push_back(l);
    for (const auto* l : right_->leaves()) out.push_back(l);
  }
  return out;
}

ProcessModel combine_sum(const ProcessModel& a, const ProcessModel& b) {
  if (!(a.group() == b.group())) throw GroupMismatch("sum needs one group");
  if (a.dim() != b.dim())
    throw DimensionMismatch("sum needs equal coordinate dimensions");
  ProcessModel m;
  m.group_ = a.group();
  m.type_ = ProcessModel::Type::Sum;
  m.dim_ = a.dim();
  m.left_ = std::make_shared<ProcessModel>(a);
  m.right_ = std::make_shared<ProcessModel>(b);
  return m;
}

ProcessModel combine_pair(const ProcessModel& a, const ProcessModel& b) {
  if (!(a.group() == b.group())) throw GroupMismatch("pair needs one group");
  ProcessModel m;
  m.group_ = a.group();
  m.type_ = ProcessModel::Type::Pair;
  m.dim_ = a.dim() + b.dim();
  m.left_ = std::make_shared<ProcessModel>(a);
  m.right_ = std::make_shared<ProcessModel>(b);
  return m;
}

Eigen::Index Trace::index_of(const GroupSpec& spec, const GroupElement& g) const {
  return Eigen::Index(window_position(spec, window.radius, g));
}

namespace {

// Trace of a single leaf (one column). Streams: child(0) for the point
// configuration, child(1) for the Gaussian noise field.
Eigen::VectorXd leaf_trace(const GroupSpec& spec, const LeafModel& leaf,
                           const FolnerWindow& window, RngStream rng,
                           double eps) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(window.elements.size());
  if (leaf.idp) {
    RngStream theta_rng = rng.child(0);
    const PointConfiguration theta =
        sample_point_config(leaf.idp->levy, window, theta_rng);
    if (!leaf.idp->levy.zero_measure()) {
      values =
          thresholded_field(theta, leaf.idp->levy, window.elements, eps);
      const double comp = compensator(
          leaf.idp->levy, CylinderFunction::projection(identity(spec)), eps);
      values.array() -= comp;
    }
    values.array() += leaf.idp->drift;
  }
  if (leaf.gaussian) {
    RngStream noise_rng = rng.child(1);
    const SampleRegion region =
        kernel_extended_region(spec, &leaf.gaussian->kernel, window);
    const auto sites = region_elements(spec, region);
    // Scatter k(h) W_s onto coordinate s h; sites in lexicographic order.
    std::map<GroupElement, Eigen::Index> index;
    for (std::size_t i = 0; i < window.elements.size(); ++i)
      index.emplace(window.elements[i], Eigen::Index(i));
    for (const auto& s : sites) {
      const double w = noise_rng.normal();
      for (const auto& [h, c] : leaf.gaussian->kernel.support) {
        const auto it = index.find(group_op(spec, s, h));
        if (it != index.end()) values[it->second] += c * w;
      }
    }
  }
  return values;
}

void fill_trace(const ProcessModel& model, const FolnerWindow& window,
                const RngStream& rng, double eps, Eigen::MatrixXd& values,
                Eigen::Index col, int& leaf_counter) {
  switch (model.type()) {
    case ProcessModel::Type::Leaf:
      values.col(col) += leaf_trace(model.group(), model.leaf_model(), window,
                                    rng.child(std::uint64_t(leaf_counter++)), eps);
      return;
    case ProcessModel::Type::Sum:
      fill_trace(model.left(), window, rng, eps, values, col, leaf_counter);
      fill_trace(model.right(), window, rng, eps, values, col, leaf_counter);
      return;
    case ProcessModel::Type::Pair:
      fill_trace(model.left(), window, rng, eps, values, col, leaf_counter);
      fill_trace(model.right(), window, rng, eps, values,
                 col + model.left().dim(), leaf_counter);
      return;
  }
}

}  // namespace

Trace simulate_trace(const ProcessModel& model, const FolnerWindow& window,
                     const RngStream& rng, double eps) {
  if (window.elements.empty()) throw InvalidSpec("window must be nonempty");
  Trace t;
  t.window = window;
  t.seed = rng.seed();
  t.stream = rng.stream();
  t.values = Eigen::MatrixXd::Zero(window.elements.size(), model.dim());
  int leaf_counter = 0;
  fill_trace(model, window, rng, eps, t.values, 0, leaf_counter);
  return t;
}

namespace {

std::complex<double> leaf_log_charfn(const GroupSpec& spec,
                                     const LeafModel& leaf,
                                     const std::vector<GroupElement>& coords,
                                     const Eigen::VectorXd& t) {
  std::complex<double> a = 0.0;
  if (leaf.gaussian) {
    double quad = 0.0;
    for (Eigen::Index j = 0; j < t.size(); ++j)
      for (Eigen::Index k = 0; k < t.size(); ++k)
        quad += t[j] * t[k] *
                gaussian_covariance(
                    spec, *leaf.gaussian,
                    group_op(spec, inverse(spec, coords[j]), coords[k]));
    a += std::complex<double>(-0.5 * quad, 0.0);
  }
  if (leaf.idp) {
    a += std::complex<double>(0.0, leaf.idp->drift * t.sum());
    if (!leaf.idp->levy.zero_measure()) {
      // Joint law of the per-coordinate integrals: each coordinate carries
      // its own compensator band, so the integrand is
      // e^{i<t,x>} - 1 - i sum_j t_j x_j 1_{|x_j| <= 1}.
      const FinDimLevy marg = coordinate_marginal(leaf.idp->levy, coords);
      for (const auto& [v, mass] : marg.atoms) {
        const double phase = t.dot(v);
        std::complex<double> term(std::cos(phase) - 1.0, std::sin(phase));
        double comp = 0.0;
        for (Eigen::Index j = 0; j < t.size(); ++j)
          if (std::abs(v[j]) <= 1.0) comp += t[j] * v[j];
        term -= std::complex<double>(0.0, comp);
        a += mass * term;
      }
    }
  }
  return a;
}

}  // namespace

std::complex<double> marginal_log_charfn(const ProcessModel& model,
                                         const std::vector<GroupElement>& coords,
                                         const Eigen::VectorXd& tvec) {
  if (coords.empty()) throw InvalidSpec("need >= 1 coordinate");
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j)
      if (coords[i] == coords[j]) throw DuplicateCoords("repeated coordinate");
  if (tvec.size() != Eigen::Index(coords.size()) * model.dim())
    throw DimensionMismatch("tvec must have dim entries per coordinate");

  switch (model.type()) {
    case ProcessModel::Type::Leaf:
      return leaf_log_charfn(model.group(), model.leaf_model(), coords, tvec);
    case ProcessModel::Type::Sum:
      return marginal_log_charfn(model.left(), coords, tvec) +
             marginal_log_charfn(model.right(), coords, tvec);
    case ProcessModel::Type::Pair: {
      const int dl = model.left().dim(), dr = model.right().dim();
      const Eigen::Index k = Eigen::Index(coords.size());
      Eigen::VectorXd tl(k * dl), tr(k * dr);
      for (Eigen::Index j = 0; j < k; ++j) {
        tl.segment(j * dl, dl) = tvec.segment(j * (dl + dr), dl);
        tr.segment(j * dr, dr) = tvec.segment(j * (dl + dr) + dl, dr);
      }
      return marginal_log_charfn(model.left(), coords, tl) +
             marginal_log_charfn(model.right(), coords, tr);
    }
  }
  return 0.0;
}

std::complex<double> marginal_charfn(const ProcessModel& model,
                                     const std::vector<GroupElement>& coords,
                                     const Eigen::VectorXd& tvec) {
  return std::exp(marginal_log_charfn(model, coords, tvec));
}

MonteCarloEstimate canonical_metric(const ProcessModel& model,
                                    const GroupElement& g, const GroupElement& h,
                                    std::int64_t samples, const RngStream& rng,
                                    double eps) {
  if (samples < 1) throw InvalidSpec("need >= 1 sample");
  const std::int64_t radius =
      std::max(sup_norm(model.group(), g), sup_norm(model.group(), h));
  const FolnerWindow window = folner_window(model.group(), radius);
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t r = 0; r < samples; ++r) {
    const Trace t = simulate_trace(model, window, rng.child(r), eps);
    const double d =
        std::min((t.at(model.group(), g) - t.at(model.group(), h)).norm(), 1.0);
    sum += d;
    sumsq += d * d;
  }
  MonteCarloEstimate est;
  est.samples = samples;
  est.value = sum / double(samples);
  const double var =
      samples > 1
          ? std::max(0.0, (sumsq - sum * sum / double(samples)) /
                              double(samples - 1))
          : 0.0;
  est.std_error = std::sqrt(var / double(samples));
  return est;
}

}  // namespace idfield
