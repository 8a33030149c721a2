#ifndef IDFIELD_CONFIG_HPP
#define IDFIELD_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "idfield/ergodicity.hpp"

namespace idfield {

// Parsed experiment configuration (JSON, schemaVersion 1). The seed is
// mandatory: runs are bit-reproducible for identical (config, seed)
// regardless of worker count.
struct ExperimentConfig {
  GroupSpec group;
  std::optional<ProcessModel> model;
  std::optional<ProcessModel> partner;  // decompose
  double epsilon = 1e-3;
  std::vector<std::int64_t> radii;
  std::int64_t replicas = 200;
  std::uint64_t seed = 0;
  std::vector<double> tgrid;
  VerdictBands bands;
  double probe_tol = 0.01;
  double probe_delta = 0.01;
  double constancy_tol = 1e-9;
  QuadratureOptions quadrature;
  std::vector<Observable> observables;
  std::vector<GroupElement> shifts;
  std::vector<GroupElement> coords;  // charfn coordinates (default {e})
  std::int64_t samples = 100000;
  int batches = 20;
  int finite_max_states = 4;
  int finite_max_maps = 2;
  int finite_max_denominator = 4;
  std::string out_dir = "out";
  nlohmann::json raw;
};

GroupSpec parse_group(const nlohmann::json& j);
GroupElement parse_element(const GroupSpec& spec, const nlohmann::json& j);
Kernel parse_kernel(const GroupSpec& spec, const nlohmann::json& j);
MarkDistribution parse_marks(const nlohmann::json& j);
LevySpec parse_levy(const GroupSpec& spec, const nlohmann::json& j);
ProcessModel parse_model(const GroupSpec& spec, const nlohmann::json& j,
                         const QuadratureOptions& quad);
Observable parse_observable(const GroupSpec& spec, const nlohmann::json& j);

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace idfield

#endif
