#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"
#include "nlslab/experiments.hpp"

using namespace nlslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = NLSLAB_SCRATCH_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Errc config_code(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(NLSLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

ExperimentConfig small(const std::string& experiment, const std::string& out) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.out = (kScratch / out).string();
  c.L = 20;
  c.N = 1001;
  c.verify.samples = 10;
  c.verify.directions = 4;
  c.coercivity.samples = 12;
  c.sim.T = 1;
  c.sim.cadence = 10;
  return c;
}

}  // namespace

const json kJsonContract = json::parse(slurp(fs::path(NLSLAB_SOURCE_DIR) / "schemas" / "json_schemas.json"));

TEST_CASE("config defaults round trip") {
  const ExperimentConfig d;
  const ExperimentConfig back = ExperimentConfig::from_json(d.to_json());
  CHECK(back.to_json() == d.to_json());
  CHECK(back.N == 4001);
  CHECK(back.sim.boundary == Boundary::Reflecting);
  CHECK(back.tol.kplus_eigenvalue == 5e-5);
  CHECK(ExperimentConfig::from_json(json::object()).to_json() == d.to_json());
}

TEST_CASE("config rejects unknown keys and wrong types") {
  CHECK(config_code({{"bogus", 1}}) == Errc::ConfigError);
  CHECK(config_code({{"grid", {{"M", 3}}}}) == Errc::ConfigError);
  CHECK(config_code({{"grid", {{"N", "many"}}}}) == Errc::ConfigError);
  CHECK(config_code({{"grid", {{"N", 4000}}}}) == Errc::ConfigError);
  CHECK(config_code({{"seed", -3}}) == Errc::ConfigError);
  CHECK(config_code({{"experiment", "dance"}}) == Errc::ConfigError);
  CHECK(config_code({{"sim", {{"boundary", "periodic"}}}}) == Errc::ConfigError);
  CHECK(config_code({{"sim", {{"dt", 0.5}}}}) == Errc::ConfigError);
  CHECK(config_code({{"R", 10.005}}) == Errc::ConfigError);
  CHECK(config_code({{"stability", {{"deltas", {0.01, "x"}}}}}) == Errc::ConfigError);
  const ExperimentConfig c = ExperimentConfig::from_json({{"grid", {{"L", 20}}}, {"sim", {{"T", 5}}}});
  CHECK(c.L == 20.0);
  CHECK(c.sim.T == 5.0);
}

TEST_CASE("csv schemas agree with the published contract") {
  const json contract = json::parse(slurp(fs::path(NLSLAB_SOURCE_DIR) / "schemas" / "csv_schemas.json"));
  CHECK(contract.size() == csv_schemas().size());
  for (const auto& s : csv_schemas()) {
    INFO(std::string(s.name));
    REQUIRE(contract.contains(std::string(s.name)));
    const json& e = contract[std::string(s.name)];
    CHECK(e["version"] == s.version);
    if (!s.header.empty()) {
      std::string joined;
      for (const auto& col : e["columns"]) joined += (joined.empty() ? "" : ",") + col.get<std::string>();
      CHECK(joined == std::string(s.header));
    }
  }
  CHECK(schema_line(csv_schema("probe")) == "# schema: nlslab.probe/1");
  CHECK_THROWS_AS(write_csv(kScratch / "x.csv", "probe", "a,b\n"), Error);
}

TEST_CASE("parallel_for keeps index order and reports the lowest failing index") {
  std::vector<int> out(100);
  parallel_for(100, 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (int i = 0; i < 100; ++i) CHECK(out[static_cast<std::size_t>(i)] == i * i);
  std::string msg;
  try {
    parallel_for(10, 3, [](std::size_t i) {
      if (i == 7 || i == 4) throw std::runtime_error(std::to_string(i));
    });
  } catch (const std::exception& e) {
    msg = e.what();
  }
  CHECK(msg == "4");
  CHECK(sample_seed(1, 0) == sample_seed(1, 0));
  CHECK(sample_seed(1, 0) != sample_seed(1, 1));
  CHECK(sample_seed(1, 0) != sample_seed(2, 0));
}

TEST_CASE("verify-lemmas: pass, negative control, seed independence") {
  const RunReport a = run_experiment(small("verify-lemmas", "v_a"));
  CHECK(a.passed);
  ExperimentConfig other = small("verify-lemmas", "v_b");
  other.seed = 99;
  const RunReport b = run_experiment(other);
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].passed == b.checks[i].passed);

  ExperimentConfig bad = small("verify-lemmas", "v_c");
  bad.verify.corrupt_kplus = true;
  const RunReport c = run_experiment(bad);
  CHECK_FALSE(c.passed);
  for (const auto& ch : c.checks) CHECK(ch.passed == (ch.name != "kplus_factorization"));
}

TEST_CASE("every run writes config, summary, manifest and schema lines") {
  const RunReport r = run_experiment(small("coercivity", "layout"));
  const fs::path dir = kScratch / "layout";
  for (const char* f : {"config.resolved.json", "summary.json", "manifest.json", "probe.csv", "checks.csv"})
    CHECK(fs::exists(dir / f));
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["experiment"] == "coercivity");
  CHECK(m.contains("wall_clock_seconds"));
  CHECK(m["files"].size() == r.files.size());
  CHECK(slurp(dir / "probe.csv").rfind("# schema: nlslab.probe/1\nsample_id,", 0) == 0);
  const json& contract = kJsonContract;
  const json summary = json::parse(slurp(dir / "summary.json"));
  for (const auto& k : contract["manifest"]["required"]) CHECK(m.contains(k.get<std::string>()));
  for (const auto& k : contract["summary"]["required"]) CHECK(summary.contains(k.get<std::string>()));
  for (const auto& k : contract["summary"]["per_experiment"]["coercivity"])
    CHECK(summary.contains(k.get<std::string>()));
  // the resolved copy reproduces the run configuration
  const ExperimentConfig again = ExperimentConfig::load(dir / "config.resolved.json");
  CHECK(again.to_json() == small("coercivity", "layout").to_json());
}

TEST_CASE("same config and seed give byte-identical files") {
  for (const char* exp : {"coercivity", "simulate", "spectrum"}) {
    ExperimentConfig c1 = small(exp, std::string("rep1_") + exp), c2 = small(exp, std::string("rep2_") + exp);
    c2.threads = 3;  // worker count must not matter
    const RunReport r1 = run_experiment(c1), r2 = run_experiment(c2);
    REQUIRE(r1.files == r2.files);
    for (const auto& f : r1.files) {
      INFO(exp << "/" << f);
      if (f == "manifest.json" || f == "config.resolved.json") continue;
      CHECK(slurp(fs::path(c1.out) / f) == slurp(fs::path(c2.out) / f));
    }
    const json summary = json::parse(slurp(fs::path(c1.out) / "summary.json"));
    for (const auto& k : kJsonContract["summary"]["per_experiment"][exp]) CHECK(summary.contains(k.get<std::string>()));
  }
}

TEST_CASE("command line exit codes") {
  const std::string out = (kScratch / "cli").string();
  CHECK(cli("verify-lemmas --grid.L 20 --grid.N 1001 --quiet --out " + out) == 0);
  const fs::path bad = kScratch / "bad.json";
  std::ofstream(bad) << R"({"verify": {"samples": 5, "wrong": true}})";
  CHECK(cli("verify-lemmas --config " + bad.string() + " --out " + out) == 2);
  const fs::path corrupt = kScratch / "corrupt.json";
  std::ofstream(corrupt) << R"({"verify": {"samples": 5, "directions": 2, "corrupt_kplus": true}, "grid": {"L": 20, "N": 1001}})";
  CHECK(cli("verify-lemmas --config " + corrupt.string() + " --out " + out) == 1);
  CHECK(cli("spectrum --grid.N 1000 --out " + out) == 2);
  CHECK(cli("--seed 3") == 2);
  CHECK(cli("simulate --R 30 --out " + out) == 2);
}
