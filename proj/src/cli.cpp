#include "idfield/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "idfield/config.hpp"
#include "idfield/errors.hpp"
#include "idfield/finite_exact.hpp"
#include "idfield/parallel.hpp"
#include "idfield/stats.hpp"

namespace idfield::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSignConvention =
    "log E exp(+i t I(f)) = int (exp(+i t f) - 1 - i t f 1_{|f|<=1}) dLevy";

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  std::string expect;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  std::int64_t replicas_override = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON experiment config")
      ->required();
  cmd->add_option("--out", a.out_override, "output directory (overrides config)");
  cmd->add_option("--expect", a.expect,
                  "assert the verdict: ergodic|nonergodic|wm|notwm")
      ->check(CLI::IsMember({"ergodic", "nonergodic", "wm", "notwm"}));
  auto* seed = cmd->add_option("--seed", a.seed_override,
                               "seed override (bit-reproducible runs)");
  cmd->callback([seed, &a] { a.has_seed_override = seed->count() > 0; });
  cmd->add_option("--replicas", a.replicas_override, "replica count override");
}

ExperimentConfig load(const CommonArgs& a) {
  ExperimentConfig cfg = load_config(a.config_path);
  if (a.has_seed_override) cfg.seed = a.seed_override;
  if (!a.out_override.empty()) cfg.out_dir = a.out_override;
  if (a.replicas_override > 0) cfg.replicas = a.replicas_override;
  return cfg;
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / name);
  if (!out) throw ConfigError("cannot write to " + cfg.out_dir + "/" + name);
  out << std::setprecision(17);
  return out;
}

void write_json(const ExperimentConfig& cfg, const std::string& name,
                const json& j) {
  auto out = open_out(cfg, name);
  out << j.dump(2) << '\n';
}

const ProcessModel& need_model(const ExperimentConfig& cfg) {
  if (!cfg.model) throw ConfigError("this command needs a 'model'");
  return *cfg.model;
}

std::vector<GroupElement> charfn_coords(const ExperimentConfig& cfg) {
  if (!cfg.coords.empty()) return cfg.coords;
  return {identity(cfg.group)};
}

int check_expect(const std::string& expect, Verdict v) {
  if (expect.empty()) return 0;
  const bool want_consistent = expect == "ergodic" || expect == "wm";
  const bool got_consistent = v == Verdict::ConsistentWithErgodic;
  const bool got_inconsistent = v == Verdict::InconsistentWithErgodic;
  if (want_consistent && !got_consistent) return 2;
  if (!want_consistent && !got_inconsistent) return 2;
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  if (cfg.radii.empty()) throw ConfigError("simulate needs 'radii'");
  const FolnerWindow window = folner_window(cfg.group, cfg.radii.front());
  const RngStream base(cfg.seed, 0);
  std::vector<Trace> traces(cfg.replicas,
                            Trace{window, Eigen::MatrixXd(), 0, 0});
  parallel_for(cfg.replicas, [&](std::int64_t r) {
    traces[r] = simulate_trace(model, window, base.child(r), cfg.epsilon);
  });
  for (std::int64_t r = 0; r < cfg.replicas; ++r) {
    std::ostringstream name;
    name << "trace_" << std::setw(4) << std::setfill('0') << r << ".csv";
    auto out = open_out(cfg, name.str());
    for (int i = 0; i < cfg.group.arity(); ++i) out << 'c' << i << ',';
    for (int d = 0; d < model.dim(); ++d)
      out << 'v' << d << (d + 1 == model.dim() ? '\n' : ',');
    for (std::size_t i = 0; i < window.elements.size(); ++i) {
      for (std::int64_t c : window.elements[i].coords) out << c << ',';
      for (int d = 0; d < model.dim(); ++d)
        out << traces[r].values(i, d) << (d + 1 == model.dim() ? '\n' : ',');
    }
  }
  json j{{"command", "simulate"},
         {"replicas", cfg.replicas},
         {"radius", cfg.radii.front()},
         {"seed", cfg.seed},
         {"epsilon", cfg.epsilon}};
  write_json(cfg, "simulate.json", j);
  return 0;
}

int cmd_charfn(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  if (cfg.tgrid.empty()) throw ConfigError("charfn needs 'tgrid'");
  const auto coords = charfn_coords(cfg);
  const std::int64_t n = cfg.samples;
  std::int64_t margin = 0;
  for (const auto& c : coords) margin = std::max(margin, sup_norm(cfg.group, c));
  const FolnerWindow window = folner_window(cfg.group, margin);
  const RngStream base(cfg.seed, 0);

  std::vector<double> xs(n);
  parallel_for(n, [&](std::int64_t r) {
    const Trace t = simulate_trace(model, window, base.child(r), cfg.epsilon);
    double v = 0.0;
    for (const auto& c : coords) v += t.at(cfg.group, c).sum();
    xs[r] = v;
  });

  auto csv = open_out(cfg, "charfn.csv");
  csv << "t,re_analytic,im_analytic,re_empirical,im_empirical,abs_gap\n";
  double sup_gap = 0.0;
  const Eigen::VectorXd ones =
      Eigen::VectorXd::Ones(Eigen::Index(coords.size()) * model.dim());
  for (double t : cfg.tgrid) {
    const std::complex<double> analytic = marginal_charfn(model, coords, t * ones);
    std::complex<double> emp = 0.0;
    for (std::int64_t r = 0; r < n; ++r)
      emp += std::complex<double>(std::cos(t * xs[r]), std::sin(t * xs[r]));
    emp /= double(n);
    const double gap = std::abs(emp - analytic);
    sup_gap = std::max(sup_gap, gap);
    csv << t << ',' << analytic.real() << ',' << analytic.imag() << ','
        << emp.real() << ',' << emp.imag() << ',' << gap << '\n';
  }
  // Reported small-jump truncation bias of the finite-eps evaluation.
  double bias = 0.0;
  const auto merged = model.dim() == 1
                          ? merged_idp(model)
                          : std::pair<LevySpec, double>{LevySpec{cfg.group, {}}, 0.0};
  if (!merged.first.components.empty()) {
    const ValidatedLevy levy = validate_levy(merged.first, cfg.quadrature);
    for (const auto& c : coords)
      bias = std::max(
          bias, truncation_bias_bound(levy, CylinderFunction::projection(c),
                                      cfg.epsilon));
  }
  json j{{"command", "charfn"},
         {"samples", n},
         {"supGap", sup_gap},
         {"bound", 5.0 / std::sqrt(double(n))},
         {"truncationBiasBound", bias},
         {"epsilon", cfg.epsilon},
         {"seed", cfg.seed},
         {"signConvention", kSignConvention}};
  write_json(cfg, "charfn.json", j);
  std::cout << "charfn supGap=" << sup_gap << " bound=" << 5.0 / std::sqrt(double(n))
            << "\n";
  return 0;
}

json report_to_json(const ErgodicityReport& rep) {
  json radii = json::array();
  for (const auto& st : rep.per_radius)
    radii.push_back({{"radius", st.radius},
                     {"average", st.average},
                     {"gap", st.gap},
                     {"stdError", st.std_error}});
  return {{"verdict", verdict_name(rep.verdict)},
          {"meanF", rep.mean_f},
          {"meanH", rep.mean_h},
          {"replicas", rep.replicas},
          {"stream", rep.stream},
          {"radii", radii}};
}

int cmd_ergodicity(const ExperimentConfig& cfg, bool weak_mixing,
                   const std::string& expect) {
  const ProcessModel& model = need_model(cfg);
  if (cfg.observables.empty())
    throw ConfigError("this command needs 'observables'");
  if (cfg.radii.empty()) throw ConfigError("this command needs 'radii'");
  ErgodicOptions opts;
  opts.radii = cfg.radii;
  opts.replicas = cfg.replicas;
  opts.eps = cfg.epsilon;
  opts.bands = cfg.bands;

  json pairs = json::array();
  std::vector<Verdict> verdicts;
  auto csv = open_out(cfg,
                      weak_mixing ? "weakmixing_radii.csv" : "ergodicity_radii.csv");
  csv << "f,h,radius,average,gap,stdError\n";
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < cfg.observables.size(); ++i)
    for (std::size_t k = i; k < cfg.observables.size(); ++k) {
      const RngStream rng(cfg.seed, stream++);
      const ErgodicityReport rep =
          weak_mixing
              ? weak_mixing_report(model, cfg.observables[i], cfg.observables[k],
                                   opts, rng)
              : ergodic_average(model, cfg.observables[i], cfg.observables[k],
                                opts, rng);
      verdicts.push_back(rep.verdict);
      json pj = report_to_json(rep);
      pj["f"] = cfg.observables[i].description;
      pj["h"] = cfg.observables[k].description;
      pairs.push_back(pj);
      for (const auto& st : rep.per_radius)
        csv << cfg.observables[i].description << ','
            << cfg.observables[k].description << ',' << st.radius << ','
            << st.average << ',' << st.gap << ',' << st.std_error << '\n';
    }
  const Verdict verdict = combine_verdicts(verdicts);
  json j{{"command", weak_mixing ? "weakmixing" : "ergodicity"},
         {"verdict", verdict_name(verdict)},
         {"seed", cfg.seed},
         {"replicas", cfg.replicas},
         {"epsilon", cfg.epsilon},
         {"thresholds",
          {{"consistentSe", cfg.bands.consistent_se},
           {"inconsistentSe", cfg.bands.inconsistent_se}}},
         {"pairs", pairs}};
  write_json(cfg, weak_mixing ? "weakmixing.json" : "ergodicity.json", j);
  std::cout << (weak_mixing ? "weakmixing" : "ergodicity") << " verdict="
            << verdict_name(verdict) << "\n";
  return check_expect(expect, verdict);
}

int cmd_codifference(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  if (cfg.shifts.empty()) throw ConfigError("codifference needs 'shifts'");
  auto csv = open_out(cfg, "codifference.csv");
  csv << "g,re_analytic,im_analytic,re_mc,im_mc,stdError\n";
  json rows = json::array();
  std::uint64_t stream = 0;
  for (const auto& g : cfg.shifts) {
    const std::complex<double> tau = codifference(model, g);
    const CodifferenceMc mc = codifference_mc(
        model, g, cfg.samples, cfg.batches, RngStream(cfg.seed, stream++),
        cfg.epsilon);
    std::string gname;
    for (std::int64_t c : g.coords)
      gname += (gname.empty() ? "" : " ") + std::to_string(c);
    csv << gname << ',' << tau.real() << ',' << tau.imag() << ','
        << mc.value.real() << ',' << mc.value.imag() << ',' << mc.std_error
        << '\n';
    rows.push_back({{"g", g.coords},
                    {"analytic", {tau.real(), tau.imag()}},
                    {"mc", {mc.value.real(), mc.value.imag()}},
                    {"stdError", mc.std_error}});
  }
  write_json(cfg, "codifference.json",
             json{{"command", "codifference"},
                  {"seed", cfg.seed},
                  {"samples", cfg.samples},
                  {"rows", rows}});
  return 0;
}

int cmd_probe(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  if (cfg.radii.empty()) throw ConfigError("probe-invariant needs 'radii'");
  ProbeOptions opts;
  opts.radii = cfg.radii;
  opts.replicas = cfg.replicas;
  opts.eps = cfg.epsilon;
  opts.tol = cfg.probe_tol;
  opts.delta = cfg.probe_delta;
  opts.constancy_tol = cfg.constancy_tol;
  const InvariantProbeReport rep =
      invariant_event_probe(model, opts, RngStream(cfg.seed, 0));
  json radii = json::array();
  for (const auto& st : rep.per_radius)
    radii.push_back({{"radius", st.radius},
                     {"pWitnessConstant", st.p_witness_constant},
                     {"seWitness", st.se_witness},
                     {"pFullConstant", st.p_full_constant},
                     {"seFull", st.se_full}});
  json j{{"command", "probe-invariant"},
         {"lambda", rep.lambda},
         {"floor", rep.floor},
         {"referenceConstant", rep.reference_constant},
         {"limitEstimate", rep.limit_estimate},
         {"withinBand", rep.within_band},
         {"replicas", rep.replicas},
         {"seed", cfg.seed},
         {"radii", radii}};
  write_json(cfg, "probe_invariant.json", j);
  std::cout << "probe-invariant limit=" << rep.limit_estimate
            << " floor=" << rep.floor << " withinBand=" << rep.within_band
            << "\n";
  return 0;
}

int cmd_decompose(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  if (!cfg.partner) throw ConfigError("decompose needs 'partner'");
  if (cfg.tgrid.empty()) throw ConfigError("decompose needs 'tgrid'");
  DecomposeOptions opts;
  opts.tgrid = cfg.tgrid;
  opts.replicas = cfg.samples;
  opts.eps = cfg.epsilon;
  const DecomposeReport rep = mixture_decomposition_check(
      model, *cfg.partner, opts, RngStream(cfg.seed, 0));
  auto csv = open_out(cfg, "decompose.csv");
  csv << "t,re_mix,im_mix,re_phi1,im_phi1,re_phi2,im_phi2,residual\n";
  for (const auto& row : rep.rows)
    csv << row.t << ',' << row.mix_analytic.real() << ','
        << row.mix_analytic.imag() << ',' << row.phi1_mc.real() << ','
        << row.phi1_mc.imag() << ',' << row.phi2_mc.real() << ','
        << row.phi2_mc.imag() << ',' << row.residual << '\n';
  json j{{"command", "decompose"},
         {"pEvent", rep.p_event},
         {"maxResidual", rep.max_residual},
         {"bound", 5.0 / std::sqrt(double(cfg.samples))},
         {"witnessT", rep.witness_t},
         {"witnessGap", rep.witness_gap},
         {"witnessSe", rep.witness_se},
         {"nEvent", rep.n_event},
         {"nComplement", rep.n_complement},
         {"seed", cfg.seed}};
  write_json(cfg, "decompose.json", j);
  std::cout << "decompose maxResidual=" << rep.max_residual << " witnessT="
            << rep.witness_t << " witnessGap=" << rep.witness_gap << " ("
            << rep.witness_gap / rep.witness_se << " SE)\n";
  return 0;
}

int cmd_finite(const ExperimentConfig& cfg, int max_states_flag) {
  const int max_states =
      max_states_flag > 0 ? max_states_flag : cfg.finite_max_states;
  const EquivalenceReport rep = check_double_ergodicity_equivalence(
      max_states, cfg.finite_max_maps, cfg.finite_max_denominator);
  json j{{"command", "finite-bruteforce"},
         {"scope",
          {{"maxStates", max_states},
           {"maxMaps", cfg.finite_max_maps},
           {"maxDenominator", cfg.finite_max_denominator}}},
         {"enumerated", rep.enumerated},
         {"ergodicCount", rep.ergodic_count},
         {"wmCount", rep.wm_count},
         {"checks", rep.checks},
         {"counterexamples", rep.counterexamples}};
  write_json(cfg, "finite_bruteforce.json", j);
  std::cout << "finite-bruteforce enumerated=" << rep.enumerated
            << " counterexamples=" << rep.counterexamples.size() << "\n";
  return rep.counterexamples.empty() ? 0 : 2;
}

int cmd_nullity(const ExperimentConfig& cfg) {
  const ProcessModel& model = need_model(cfg);
  const auto merged = merged_idp(model);
  const ValidatedLevy levy = validate_levy(merged.first, cfg.quadrature);
  const NullityVerdict verdict = classify_nullity(levy);
  json j{{"command", "nullity"},
         {"verdict", verdict.is_null ? "Null" : "NonNull"},
         {"lambda", verdict.witness_mass},
         {"witnessComponents", verdict.witness_components},
         {"componentMass", levy.component_mass()},
         {"integrabilityConstant", levy.integrability_constant()}};
  write_json(cfg, "nullity.json", j);
  std::cout << "nullity verdict=" << (verdict.is_null ? "Null" : "NonNull")
            << " lambda=" << verdict.witness_mass << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"infinitely divisible stationary fields: simulation and "
               "ergodicity verification"};
  app.require_subcommand(1);

  CommonArgs a;
  int max_states_flag = 0;
  auto* simulate = app.add_subcommand("simulate", "simulate traces to CSV");
  auto* charfn = app.add_subcommand("charfn", "analytic vs Monte Carlo "
                                              "characteristic function");
  auto* ergodicity = app.add_subcommand("ergodicity", "ergodic-average verdict");
  auto* weakmixing = app.add_subcommand("weakmixing", "weak-mixing verdict");
  auto* codiff = app.add_subcommand("codifference", "codifference table");
  auto* probe = app.add_subcommand("probe-invariant", "invariant-event probe");
  auto* decompose = app.add_subcommand("decompose", "mixture decomposition");
  auto* finite = app.add_subcommand("finite-bruteforce",
                                    "exhaustive double-ergodicity check");
  auto* nullity = app.add_subcommand("nullity", "Lévy-measure nullity verdict");
  for (auto* cmd : {simulate, charfn, ergodicity, weakmixing, codiff, probe,
                    decompose, finite, nullity})
    add_common(cmd, a);
  finite->add_option("--max-states", max_states_flag, "state budget override");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }

  try {
    const ExperimentConfig cfg = load(a);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (charfn->parsed()) return cmd_charfn(cfg);
    if (ergodicity->parsed()) return cmd_ergodicity(cfg, false, a.expect);
    if (weakmixing->parsed()) return cmd_ergodicity(cfg, true, a.expect);
    if (codiff->parsed()) return cmd_codifference(cfg);
    if (probe->parsed()) return cmd_probe(cfg);
    if (decompose->parsed()) return cmd_decompose(cfg);
    if (finite->parsed()) return cmd_finite(cfg, max_states_flag);
    if (nullity->parsed()) return cmd_nullity(cfg);
    return 1;
  } catch (const Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
}

}  // namespace idfield::cli
