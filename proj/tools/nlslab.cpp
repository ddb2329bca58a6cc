// nlslab: experiment runner. Exit codes: 0 all checks pass, 1 a check (or the
// run) failed, 2 bad configuration or command line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "nlslab/error.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/kernels.hpp"

using nlohmann::json;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kConfigError = 2;

int run(const std::string& experiment, const std::string& config_path, const std::optional<std::uint64_t>& seed,
        const std::optional<std::string>& out, const std::optional<double>& L, const std::optional<std::size_t>& N,
        const std::optional<double>& R, const std::optional<int>& threads, bool quiet) {
  json user = json::object();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return kConfigError;
    }
    try {
      user = json::parse(f);
    } catch (const json::exception& e) {
      std::cerr << "error: " << config_path << ": " << e.what() << "\n";
      return kConfigError;
    }
    if (!user.is_object()) {
      std::cerr << "error: config must be a JSON object\n";
      return kConfigError;
    }
    if (user.contains("experiment") && user["experiment"] != experiment) {
      std::cerr << "error: config is for experiment " << user["experiment"] << ", not " << experiment << "\n";
      return kConfigError;
    }
  }
  user["experiment"] = experiment;
  if (seed) user["seed"] = *seed;
  if (out) user["out"] = *out;
  if (L) user["grid"]["L"] = *L;
  if (N) user["grid"]["N"] = *N;
  if (R) user["R"] = *R;
  if (threads) user["threads"] = *threads;

  nlslab::ExperimentConfig cfg;
  try {
    cfg = nlslab::ExperimentConfig::from_json(user);
  } catch (const nlslab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  nlslab::RunReport rep;
  try {
    rep = nlslab::run_experiment(cfg);
  } catch (const nlslab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == nlslab::Errc::ConfigError ? kConfigError : kCheckFailed;
  }
  if (!quiet) {
    std::printf("%s  seed=%llu  out=%s  simd=%s\n", experiment.c_str(), static_cast<unsigned long long>(cfg.seed),
                cfg.out.c_str(), std::string(nlslab::kernels::active().name).c_str());
    for (const auto& c : rep.checks)
      std::printf("  %-4s %-32s %.6g (tol %.6g)\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.value, c.tolerance);
  }
  for (const auto& c : rep.checks)
    if (!c.passed) std::fprintf(stderr, "check failed: %s\n", c.name.c_str());
  return rep.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NLS black-soliton laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> L, R;
  std::optional<std::size_t> N;
  std::optional<int> threads;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "run seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--grid.L", L, "half width of the domain");
  app.add_option("--grid.N", N, "number of grid nodes (odd)");
  app.add_option("--R", R, "window radius for d_R");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_flag("--quiet", quiet, "print nothing on success");

  for (const auto& name : nlslab::experiment_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  return run(app.get_subcommands().front()->get_name(), config_path, seed, out, L, N, R, threads, quiet);
}
