#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "idfield/cli.hpp"
#include "idfield/config.hpp"
#include "idfield/errors.hpp"

using namespace idfield;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("idfield_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

json e2_levy_json() {
  return {{"components",
           {{{"type", "kernel"},
             {"kernel",
              {{{"offset", {0}}, {"coeff", 1.0}},
               {{"offset", {1}}, {"coeff", 0.5}}}},
             {"marks",
              {{"type", "discrete"}, {"atoms", {{{"value", 1.0}, {"prob", 1.0}}}}}},
             {"rate", 1.0}}}}};
}

json e1e2_model_json() {
  json levy = e2_levy_json();
  levy["components"].push_back(
      {{"type", "atoms"}, {"atoms", {{{"value", 2.0}, {"mass", 0.5}}}}});
  return {{"type", "leaf"}, {"idp", {{"levy", levy}, {"drift", 0.0}}}};
}

json base_config(const fs::path& out) {
  json cfg;
  cfg["schemaVersion"] = 1;
  cfg["seed"] = 20240901;
  cfg["group"] = {{"kind", "lattice"}, {"dim", 1}};
  cfg["model"] = {{"type", "leaf"},
                  {"idp", {{"levy", e2_levy_json()}, {"drift", 0.0}}}};
  cfg["epsilon"] = 1e-3;
  cfg["out"] = out.string();
  return cfg;
}

fs::path write_config(const TempDir& dir, const json& cfg,
                      const std::string& name = "config.json") {
  const fs::path p = dir.path / name;
  std::ofstream(p) << cfg.dump(2);
  return p;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("malformed configs exit 1") {
  TempDir dir;
  const fs::path bad = dir.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  CHECK(cli::run({"nullity", "--config", bad.string()}) == 1);

  json noseed = base_config(dir.path / "out");
  noseed.erase("seed");
  CHECK(cli::run({"nullity", "--config",
                  write_config(dir, noseed, "noseed.json").string()}) == 1);

  CHECK(cli::run({"nullity", "--config",
                  (dir.path / "missing.json").string()}) == 1);
}

TEST_CASE("config parsing round trip") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["tgrid"] = {{"min", -1.0}, {"max", 1.0}, {"step", 0.5}};
  cfg["observables"] = {{{"kind", "indicator"},
                         {"coords", {{0}}},
                         {"lo", {-1e300}},
                         {"hi", {0.25}}}};
  const ExperimentConfig parsed =
      load_config(write_config(dir, cfg).string());
  CHECK(parsed.seed == 20240901);
  CHECK(parsed.tgrid.size() == 5);
  CHECK(parsed.observables.size() == 1);
  REQUIRE(parsed.model.has_value());
  CHECK(parsed.model->leaf_model().idp->nullity.is_null);
}

TEST_CASE("nullity command") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  CHECK(cli::run({"nullity", "--config", write_config(dir, cfg).string()}) == 0);
  const json rep = read_json(dir.path / "out" / "nullity.json");
  CHECK(rep.at("verdict") == "Null");

  json mix = cfg;
  mix["model"] = e1e2_model_json();
  CHECK(cli::run({"nullity", "--config",
                  write_config(dir, mix, "mix.json").string()}) == 0);
  const json rep2 = read_json(dir.path / "out" / "nullity.json");
  CHECK(rep2.at("verdict") == "NonNull");
  CHECK(rep2.at("lambda").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("charfn command writes the table and sup gap") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["tgrid"] = {{"min", -2.0}, {"max", 2.0}, {"step", 0.5}};
  cfg["samples"] = 20000;
  CHECK(cli::run({"charfn", "--config", write_config(dir, cfg).string()}) == 0);
  const json rep = read_json(dir.path / "out" / "charfn.json");
  CHECK(rep.at("supGap").get<double>() <
        3.0 * rep.at("bound").get<double>());
  CHECK(rep.contains("signConvention"));
  const std::string csv = slurp(dir.path / "out" / "charfn.csv");
  CHECK(csv.rfind("t,re_analytic,im_analytic,re_empirical,im_empirical,abs_gap",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);  // header + 9 rows
}

TEST_CASE("ergodicity command respects --expect") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["model"] = e1e2_model_json();
  cfg["radii"] = {8, 16};
  cfg["replicas"] = 400;
  cfg["observables"] = {{{"kind", "indicator"},
                         {"coords", {{0}}},
                         {"lo", {-1e300}},
                         {"hi", {0.25}}}};
  const fs::path p = write_config(dir, cfg);
  CHECK(cli::run({"ergodicity", "--config", p.string(), "--expect",
                  "nonergodic"}) == 0);
  CHECK(cli::run({"ergodicity", "--config", p.string(), "--expect",
                  "ergodic"}) == 2);
  const json rep = read_json(dir.path / "out" / "ergodicity.json");
  CHECK(rep.at("verdict") == "InconsistentWithErgodic");
}

TEST_CASE("simulate writes one CSV per replica") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["radii"] = {3};
  cfg["replicas"] = 4;
  CHECK(cli::run({"simulate", "--config", write_config(dir, cfg).string()}) ==
        0);
  for (int r = 0; r < 4; ++r) {
    const fs::path p =
        dir.path / "out" / ("trace_000" + std::to_string(r) + ".csv");
    const std::string csv = slurp(p);
    CHECK(csv.rfind("c0,v0", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 rows
  }
}

TEST_CASE("finite-bruteforce emits the exhaustive report") {
  TempDir dir;
  json cfg;
  cfg["schemaVersion"] = 1;
  cfg["seed"] = 7;
  cfg["group"] = {{"kind", "lattice"}, {"dim", 1}};
  cfg["out"] = (dir.path / "out").string();
  CHECK(cli::run({"finite-bruteforce", "--config",
                  write_config(dir, cfg).string(), "--max-states", "3"}) == 0);
  const json rep = read_json(dir.path / "out" / "finite_bruteforce.json");
  CHECK(rep.at("counterexamples").empty());
  CHECK(rep.at("enumerated").get<std::int64_t>() > 0);
  CHECK(rep.at("ergodicCount").get<std::int64_t>() > 0);
}

TEST_CASE("outputs are bit-identical across runs and worker counts") {
  TempDir dir;
  json cfg = base_config(dir.path / "out1");
  cfg["tgrid"] = {{"min", -1.0}, {"max", 1.0}, {"step", 0.25}};
  cfg["samples"] = 5000;
  const fs::path p = write_config(dir, cfg);
  setenv("IDPE_THREADS", "1", 1);
  CHECK(cli::run({"charfn", "--config", p.string()}) == 0);
  setenv("IDPE_THREADS", "4", 1);
  CHECK(cli::run({"charfn", "--config", p.string(), "--out",
                  (dir.path / "out2").string()}) == 0);
  unsetenv("IDPE_THREADS");
  CHECK(slurp(dir.path / "out1" / "charfn.csv") ==
        slurp(dir.path / "out2" / "charfn.csv"));
}

TEST_CASE("probe and decompose commands") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["model"] = e1e2_model_json();
  cfg["radii"] = {2, 4};
  cfg["replicas"] = 20000;
  CHECK(cli::run({"probe-invariant", "--config",
                  write_config(dir, cfg).string()}) == 0);
  const json probe = read_json(dir.path / "out" / "probe_invariant.json");
  CHECK(probe.at("withinBand").get<bool>());
  CHECK(probe.at("lambda").get<double>() == doctest::Approx(0.5));

  json dec = base_config(dir.path / "out");
  dec["model"] = {{"type", "leaf"},
                  {"idp",
                   {{"levy",
                     {{"components",
                       {{{"type", "atoms"},
                         {"atoms", {{{"value", 2.0}, {"mass", 0.5}}}}}}}}},
                    {"drift", 0.0}}}};
  dec["partner"] = base_config(dir.path / "out")["model"];
  dec["tgrid"] = {{"min", -2.0}, {"max", 2.0}, {"step", 0.5}};
  dec["samples"] = 20000;
  CHECK(cli::run({"decompose", "--config",
                  write_config(dir, dec, "dec.json").string()}) == 0);
  const json rep = read_json(dir.path / "out" / "decompose.json");
  CHECK(rep.at("maxResidual").get<double>() <= rep.at("bound").get<double>());
  CHECK(rep.at("witnessGap").get<double>() >=
        10.0 * rep.at("witnessSe").get<double>());
}

TEST_CASE("codifference command") {
  TempDir dir;
  json cfg = base_config(dir.path / "out");
  cfg["shifts"] = {{1}, {3}};
  cfg["samples"] = 4000;
  cfg["batches"] = 10;
  CHECK(cli::run({"codifference", "--config",
                  write_config(dir, cfg).string()}) == 0);
  const json rep = read_json(dir.path / "out" / "codifference.json");
  REQUIRE(rep.at("rows").size() == 2);
  // |g| beyond the kernel width: exact zero on the analytic path.
  CHECK(rep.at("rows")[1].at("analytic")[0].get<double>() == 0.0);
  CHECK(rep.at("rows")[1].at("analytic")[1].get<double>() == 0.0);
}
