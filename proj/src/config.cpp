#include "idfield/config.hpp"

#include <fstream>

#include "idfield/errors.hpp"

namespace idfield {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key) {
  if (!j.contains(key))
    throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

GroupSpec parse_group(const json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "lattice") return GroupSpec::lattice(need(j, "dim").get<int>());
  if (kind == "cyclic")
    return GroupSpec::cyclic(
        need(j, "moduli").get<std::vector<std::int64_t>>());
  throw ConfigError("group kind must be 'lattice' or 'cyclic'");
}

GroupElement parse_element(const GroupSpec& spec, const json& j) {
  GroupElement g(j.get<std::vector<std::int64_t>>());
  check_element(spec, g);
  return g;
}

Kernel parse_kernel(const GroupSpec& spec, const json& j) {
  std::vector<std::pair<GroupElement, double>> entries;
  for (const auto& e : j)
    entries.emplace_back(parse_element(spec, need(e, "offset")),
                         need(e, "coeff").get<double>());
  return Kernel::from(spec, std::move(entries));
}

MarkDistribution parse_marks(const json& j) {
  const std::string type = need(j, "type").get<std::string>();
  if (type == "discrete") {
    DiscreteAtoms d;
    for (const auto& a : need(j, "atoms"))
      d.atoms.emplace_back(need(a, "value").get<double>(),
                           need(a, "prob").get<double>());
    return d;
  }
  if (type == "gaussian")
    return GaussianMark{need(j, "mean").get<double>(),
                        need(j, "stddev").get<double>()};
  if (type == "pareto")
    return TwoSidedPareto{need(j, "alpha").get<double>(),
                          get_or(j, "scale", 1.0),
                          need(j, "cutoff").get<double>()};
  throw ConfigError("marks type must be discrete/gaussian/pareto");
}

LevySpec parse_levy(const GroupSpec& spec, const json& j) {
  LevySpec levy;
  levy.group = spec;
  for (const auto& c : get_or(j, "components", json::array())) {
    const std::string type = need(c, "type").get<std::string>();
    if (type == "kernel") {
      DissipativeKernel dk;
      dk.kernel = parse_kernel(spec, need(c, "kernel"));
      dk.marks = parse_marks(need(c, "marks"));
      dk.rate = need(c, "rate").get<double>();
      levy.components.push_back(std::move(dk));
    } else if (type == "atoms") {
      FixedPointAtoms fa;
      for (const auto& a : need(c, "atoms"))
        fa.atoms.emplace_back(need(a, "value").get<double>(),
                              need(a, "mass").get<double>());
      levy.components.push_back(std::move(fa));
    } else {
      throw ConfigError("levy component type must be 'kernel' or 'atoms'");
    }
  }
  return levy;
}

ProcessModel parse_model(const GroupSpec& spec, const json& j,
                         const QuadratureOptions& quad) {
  const std::string type = get_or<std::string>(j, "type", "leaf");
  if (type == "sum")
    return combine_sum(parse_model(spec, need(j, "left"), quad),
                       parse_model(spec, need(j, "right"), quad));
  if (type == "pair")
    return combine_pair(parse_model(spec, need(j, "left"), quad),
                        parse_model(spec, need(j, "right"), quad));
  if (type != "leaf") throw ConfigError("model type must be leaf/sum/pair");
  std::optional<GaussianSpec> gauss;
  if (j.contains("gaussian"))
    gauss = GaussianSpec{parse_kernel(spec, need(j.at("gaussian"), "kernel"))};
  std::optional<IdpSpec> idp;
  if (j.contains("idp")) {
    IdpSpec i;
    i.levy = parse_levy(spec, need(j.at("idp"), "levy"));
    i.drift = get_or(j.at("idp"), "drift", 0.0);
    idp = std::move(i);
  }
  return ProcessModel::leaf(spec, std::move(gauss), std::move(idp), quad);
}

Observable parse_observable(const GroupSpec& spec, const json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "indicator") {
    std::vector<GroupElement> coords;
    for (const auto& c : need(j, "coords")) coords.push_back(parse_element(spec, c));
    const auto lo = need(j, "lo").get<std::vector<double>>();
    const auto hi = need(j, "hi").get<std::vector<double>>();
    return obs_indicator_box(
        std::move(coords),
        Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size()),
        Eigen::Map<const Eigen::VectorXd>(hi.data(), hi.size()));
  }
  if (kind == "clip")
    return obs_clipped_coordinate(parse_element(spec, need(j, "coord")),
                                  need(j, "bound").get<double>());
  if (kind == "cos")
    return obs_cosine(parse_element(spec, need(j, "coord")),
                      get_or(j, "a", 1.0));
  throw ConfigError("observable kind must be indicator/clip/cos");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  const int version = get_or(j, "schemaVersion", 1);
  if (version != 1) throw ConfigError("unsupported schemaVersion");
  if (!j.contains("seed")) throw ConfigError("seed is mandatory");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.group = parse_group(need(j, "group"));

  if (j.contains("quadrature")) {
    cfg.quadrature.cells = get_or(j.at("quadrature"), "cells", 2048);
    cfg.quadrature.tail_mass = get_or(j.at("quadrature"), "tailMass", 1e-8);
  }
  if (j.contains("model"))
    cfg.model = parse_model(cfg.group, j.at("model"), cfg.quadrature);
  if (j.contains("partner"))
    cfg.partner = parse_model(cfg.group, j.at("partner"), cfg.quadrature);

  cfg.epsilon = get_or(j, "epsilon", 1e-3);
  cfg.radii = get_or(j, "radii", std::vector<std::int64_t>{});
  cfg.replicas = get_or<std::int64_t>(j, "replicas", 200);
  cfg.samples = get_or<std::int64_t>(j, "samples", 100000);
  cfg.batches = get_or(j, "batches", 20);
  cfg.out_dir = get_or<std::string>(j, "out", "out");

  if (j.contains("tgrid")) {
    const auto& t = j.at("tgrid");
    if (t.is_array()) {
      cfg.tgrid = t.get<std::vector<double>>();
    } else {
      const double lo = need(t, "min").get<double>();
      const double hi = need(t, "max").get<double>();
      const double step = need(t, "step").get<double>();
      if (!(step > 0.0)) throw ConfigError("tgrid step must be > 0");
      for (double x = lo; x <= hi + step * 0.5; x += step) cfg.tgrid.push_back(x);
    }
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    cfg.bands.consistent_se = get_or(t, "consistentSe", 4.0);
    cfg.bands.inconsistent_se = get_or(t, "inconsistentSe", 6.0);
    cfg.probe_tol = get_or(t, "probeTol", 0.01);
    cfg.probe_delta = get_or(t, "probeDelta", 0.01);
    cfg.constancy_tol = get_or(t, "constancyTol", 1e-9);
  }
  for (const auto& o : get_or(j, "observables", json::array()))
    cfg.observables.push_back(parse_observable(cfg.group, o));
  for (const auto& s : get_or(j, "shifts", json::array()))
    cfg.shifts.push_back(parse_element(cfg.group, s));
  for (const auto& c : get_or(j, "coords", json::array()))
    cfg.coords.push_back(parse_element(cfg.group, c));
  if (j.contains("finite")) {
    const auto& f = j.at("finite");
    cfg.finite_max_states = get_or(f, "maxStates", 4);
    cfg.finite_max_maps = get_or(f, "maxMaps", 2);
    cfg.finite_max_denominator = get_or(f, "maxDenominator", 4);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace idfield
