#pragma once
// Experiment recipes behind the command-line tool. Each run writes its files
// into one directory: CSV streams, summary.json, config.resolved.json and
// manifest.json.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlslab/evolution.hpp"

namespace nlslab {

struct Tolerances {
  double profile_ode = 1e-13;
  double conserved_rel = 1e-9;
  double criticality = 1e-6;
  double factorization_rel = 1e-8;
  double form_floor = -1e-9;
  double duhamel_bound = 0.84089641525371454;  // 2^{-1/4}
  double k1 = 1e-6;
  double lamexp = 1e-9;
  double slope = 0.2;
  double bdensity_rel = 1e-10;
  double kplus_eigenvalue = 5e-5;
  double kplus_correlation = 0.9999;
  double kminus_min = -5e-4;
  double kminus_max = 5e-3;
  double coercivity_resolution = 0.05;
  double stability_factor = 10.0;
  double ladder_growth = 1.5;
  double sweep_spread = 1.5;
  double control_collapse = 0.1;
};

struct ExperimentConfig {
  std::string experiment = "verify-lemmas";
  std::uint64_t seed = 1;
  std::string out = "runs/default";
  int threads = 0;  // 0: hardware concurrency
  double L = 40.0;
  std::size_t N = 4001;
  double R = 10.0;

  struct Sim {
    double dt = 0.0;
    double T = 50.0;
    int cadence = 25;
    Boundary boundary = Boundary::Reflecting;
    Scheme scheme = Scheme::Midpoint;
  } sim;
  struct Perturbation {
    std::string kind = "bumps";
    double amplitude = 0.01;  // target d_R
    std::uint64_t seed = 0;   // 0: derived from the run seed
  } perturbation;
  struct Verify {
    int samples = 100;
    int directions = 20;
    bool corrupt_kplus = false;  // negative control
  } verify;
  struct Spectrum {
    int count = 6;
    int eigenvectors = 3;
    bool L_sweep = false;
  } spectrum;
  struct Stability {
    bool ladder = false;
    std::vector<double> deltas{0.02, 0.01, 0.005};
    bool unmodulated_control = true;
  } stability;
  struct Coercivity {
    int samples = 200;
    bool orthogonality = true;
    double dR_min = 1e-3;
    double dR_max = 1e-1;
    bool sweep = false;
  } coercivity;
  struct Simulate {
    std::string initial = "perturbed";  // soliton | perturbed | dark
    double nu = 0.1;
    bool snapshots = false;
  } simulate;
  Tolerances tol;

  nlohmann::json to_json() const;
  /// Starts from the defaults; unknown keys and wrong types raise ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  SimConfig sim_config() const;
  std::uint64_t perturbation_seed() const { return perturbation.seed ? perturbation.seed : seed; }
};

const std::vector<std::string>& experiment_names();

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct RunReport {
  std::string experiment;
  bool passed = true;
  std::vector<Check> checks;
  nlohmann::json summary;
  std::vector<std::string> files;  // relative to the output directory, sorted

  const Check* find(const std::string& name) const;
};

/// Runs cfg.experiment and writes its outputs into cfg.out.
RunReport run_experiment(const ExperimentConfig& cfg);

// Recipes, also callable directly.
RunReport verify_lemmas(const ExperimentConfig& cfg);
RunReport spectrum_experiment(const ExperimentConfig& cfg);
RunReport stability_experiment(const ExperimentConfig& cfg);
RunReport coercivity_experiment(const ExperimentConfig& cfg);
RunReport simulate_experiment(const ExperimentConfig& cfg);

/// f(i) for i in [0, n) on up to `threads` workers. Results must be stored by
/// index; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

/// Independent per-sample seed.
std::uint64_t sample_seed(std::uint64_t run_seed, std::uint64_t index);

/// u0 + s (u + i v) with the real scale
/// s > 0 chosen so that d_R to u0 equals target.
ComplexJet perturb_to_distance(const Grid& g, const RealJet& u, const RealJet& v, double target, double R);

}  // namespace nlslab
