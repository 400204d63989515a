#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "prymtau/experiments.hpp"

using namespace prymtau;

namespace {

enum Exit { kOk = 0, kCheckFailure = 1, kConfigError = 2, kComputationError = 3 };

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

json base_marking(const CurveSpec& spec) {
  const HyperellipticCurve C = spec.curve();
  const SymplecticBasis S = symplectic_basis(base_star(C), C.genus);
  json cyc = json::array();
  for (Eigen::Index j = 0; j < S.cycles.cols(); ++j) {
    json col = json::array();
    for (Eigen::Index e = 0; e < S.cycles.rows(); ++e) col.push_back(S.cycles(e, j));
    cyc.push_back(col);
  }
  return {{"star_center", to_json(S.star.center)}, {"cycles", cyc}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

json error_json(const std::string& code, const std::string& message) {
  return {{"schema", 1}, {"error", code}, {"message", message}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman tau functions on spaces of n-differentials"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run an experiment");

  ExperimentConfig flags;
  std::string config_path;
  std::optional<int> g, n;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> spec, out;
  bool no_cache = false;

  run->add_option("experiment", flags.experiment, "experiment name")->required()->check(
      CLI::IsMember(experiment_names()));
  run->add_option("--spec", spec, "curve spec JSON");
  run->add_option("--g", g, "genus of a synthetic curve");
  run->add_option("--n", n, "order of the differential");
  run->add_option("--seed", seed, "seed for randomized checks and synthetic curves");
  run->add_option("--jobs", jobs, "worker threads");
  run->add_flag("--no-cache", no_cache, "recompute periods");
  run->add_option("--out", out, "output directory");
  run->add_option("--config", config_path, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  ExperimentConfig cfg;
  CurveSpec curve;
  try {
    if (!config_path.empty()) apply_config(read_json_file(config_path), cfg);
    cfg.experiment = flags.experiment;
    if (spec) cfg.spec = *spec;
    if (g) cfg.g = g;
    if (n) cfg.n = n;
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (out) cfg.out = *out;
    if (no_cache) cfg.no_cache = true;
    validate(cfg);
    curve = resolve_spec(cfg);
    curve.ndifferential();
  } catch (const Error& e) {
    std::cerr << error_json("ConfigError", e.what()).dump() << '\n';
    return kConfigError;
  }

  PeriodCache cache;
  cache.dir = cfg.cache_dir;
  cache.enabled = !cfg.no_cache;
  cache.hash = sha256_hex;

  ExperimentReport R;
  try {
    R = run_experiment(cfg, curve, cache);
  } catch (const ConfigError& e) {
    std::cerr << error_json("ConfigError", e.what()).dump() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.what()).dump() << '\n';
    return kComputationError;
  } catch (const std::exception& e) {
    std::cerr << error_json("ComputationError", e.what()).dump() << '\n';
    return kComputationError;
  }

  json report = R.payload;
  const json marking = R.marking.is_null() ? base_marking(curve) : R.marking;
  json failures = json::array(), checks = json::array();
  for (const Check& c : R.checks) {
    checks.push_back(to_json(c));
    if (!c.pass) failures.push_back(c.name);
  }
  report["schema"] = 1;
  report["experiment"] = cfg.experiment;
  report["version"] = PRYMTAU_VERSION;
  report["seed"] = cfg.seed;
  report["spec"] = to_json(curve);
  report["spec_hash"] = sha256_hex(to_json(curve).dump());
  report["marking_hash"] = sha256_hex(marking.dump());
  report["tolerances"] = to_json(cfg.tolerances);
  report["checks"] = checks;
  report["failures"] = failures;
  report["pass"] = R.pass();

  try {
    std::filesystem::create_directories(cfg.out);
    const std::filesystem::path base = std::filesystem::path(cfg.out) / cfg.experiment;
    write_file(base.string() + ".json", report.dump(2) + "\n");
    if (!R.csv.empty()) write_file(base.string() + ".csv", R.csv);
  } catch (const std::exception& e) {
    std::cerr << error_json("ConfigError", e.what()).dump() << '\n';
    return kConfigError;
  }

  std::cout << cfg.experiment << ": " << (R.pass() ? "pass" : "FAIL");
  for (const auto& f : failures) std::cout << ' ' << f.get<std::string>();
  std::cout << '\n';
  return R.pass() ? kOk : kCheckFailure;
}
