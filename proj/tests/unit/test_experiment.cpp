#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "stablebip/error.hpp"
#include "stablebip/experiment.hpp"

namespace stablebip {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stablebip_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STABLEBIP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

TEST(ParseConfig, Defaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.experiment, "");
  EXPECT_EQ(c.prior.alpha, 1.0);
  EXPECT_EQ(c.chain.steps, 640000u);
  EXPECT_EQ(c.invariance.sizes, (std::vector<std::size_t>{16, 32, 64, 128}));
}

TEST(ParseConfig, ErrorsNameTheLineOrField) {
  try {
    parse_config("{\n  \"seed\": 1,\n  \"prior\": {\n    \"alpha\": ,\n  }\n}");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  try {
    parse_config(R"({"prior": {"alpah": 1.0}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("prior.alpah"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(R"({"seed": "seven"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seed": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"chain": {"quantiles": [0.5, "x"]}})"), ConfigError);
  EXPECT_THROW(parse_config("[]"), ConfigError);
}

TEST(ParseConfig, RoundTrip) {
  const std::string text = slurp(fs::path(STABLEBIP_SOURCE_DIR) / "configs" / "canonical.json");
  const auto c = parse_config(text);
  const std::string once = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(once)), once);
  EXPECT_EQ(c.experiment, "mcmc");
  EXPECT_EQ(c.seed, 20171003u);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
  EXPECT_EQ(exit_code_for(DomainError("x")), 3);
  EXPECT_EQ(exit_code_for(HypothesisError("x")), 3);
  EXPECT_EQ(exit_code_for(FactorizationError("x")), 4);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunExperiment, DegenerateStableSamplesAreConstant) {
  auto c = parse_config(R"({"stable": {"alpha": 1.5, "beta": 0.3, "gamma": 0, "delta": 2.5, "count": 100}})");
  c.experiment = "sample-stable";
  c.output_dir = scratch("degenerate").string();
  const auto r = run_experiment(c);
  std::istringstream csv(slurp(fs::path(c.output_dir) / "samples.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "index,value");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(line.substr(line.find(',') + 1), "2.5");
    ++rows;
  }
  EXPECT_EQ(rows, 100u);
  EXPECT_EQ(r.files.back(), "manifest.json");
}

TEST(RunExperiment, ZeroPotentialGivesUniformWeights) {
  auto c = parse_config(R"({"monte_carlo": {"draws": 50, "potential": "zero"}, "prior": {"grid_size": 16}})");
  c.experiment = "posterior";
  c.output_dir = scratch("uniform").string();
  run_experiment(c);
  std::istringstream csv(slurp(fs::path(c.output_dir) / "weights.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "draw,phi,log_weight,weight");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(std::stod(line.substr(line.rfind(',') + 1)), 1.0 / 50.0);
    ++rows;
  }
  EXPECT_EQ(rows, 50u);
}

TEST(RunExperiment, ManifestCoversEveryArtifact) {
  auto c = parse_config(R"({"monte_carlo": {"draws": 200}, "prior": {"grid_size": 16},
                            "scan": {"steps": [0.02, 0.01]}})");
  c.experiment = "lipschitz-scan";
  c.seed = 4;
  c.output_dir = scratch("manifest").string();
  const auto r = run_experiment(c);
  const json m = json::parse(slurp(fs::path(c.output_dir) / "manifest.json"));
  EXPECT_EQ(m["experiment"], "lipschitz-scan");
  EXPECT_EQ(m["seed"], 4);
  ASSERT_EQ(m["artifacts"].size() + 1, r.files.size());
  for (const auto& a : m["artifacts"]) {
    const std::string body = slurp(fs::path(c.output_dir) / a["file"].get<std::string>());
    EXPECT_EQ(a["bytes"].get<std::size_t>(), body.size());
    EXPECT_EQ(a["sha256"].get<std::string>(), sha256_hex(body));
  }
  const auto resolved = parse_config(slurp(fs::path(c.output_dir) / "config.resolved.json"));
  EXPECT_EQ(config_to_json(resolved), config_to_json(c));
}

TEST(RunExperiment, ValidationFailures) {
  auto c = parse_config(R"({"prior": {"alpha": 2.5}})");
  c.experiment = "sample-prior";
  c.output_dir = scratch("invalid").string();
  try {
    run_experiment(c);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), 3);
  }
  c = parse_config(R"({"prior": {"gamma": {"kind": "power", "scale": 1, "rate": 0.5}}})");
  c.experiment = "sample-prior";
  c.output_dir = scratch("gate").string();
  EXPECT_THROW(run_experiment(c), HypothesisError);
}

TEST(Cli, ExitStatuses) {
  const fs::path dir = scratch("cli");
  const auto good = write_config(dir, R"({"stable": {"count": 10}})");
  EXPECT_EQ(run_cli("sample-stable --config " + good.string() + " --out " + (dir / "a").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "samples.csv"));

  const auto unknown = write_config(dir, R"({"stabel": {}})");
  EXPECT_EQ(run_cli("sample-stable --config " + unknown.string()), 2);
  EXPECT_EQ(run_cli("sample-stable --config " + (dir / "missing.json").string()), 2);
  const auto mismatch = write_config(dir, R"({"experiment": "map"})");
  EXPECT_EQ(run_cli("sample-stable --config " + mismatch.string()), 2);
  const auto invalid = write_config(dir, R"({"stable": {"alpha": 3}})");
  EXPECT_EQ(run_cli("sample-stable --config " + invalid.string() + " --out " + (dir / "b").string()), 3);
  EXPECT_EQ(run_cli("no-such-experiment"), 2);
}

TEST(Cli, SameSeedSameBytes) {
  const fs::path dir = scratch("determinism");
  const auto cfg = write_config(dir, R"({"prior": {"grid_size": 16}, "monte_carlo": {"draws": 300}})");
  ASSERT_EQ(run_cli("posterior --config " + cfg.string() + " --seed 5 --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("posterior --config " + cfg.string() + " --seed 5 --out " + (dir / "b").string()), 0);
  ASSERT_EQ(run_cli("posterior --config " + cfg.string() + " --seed 6 --out " + (dir / "c").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "weights.csv"), slurp(dir / "b" / "weights.csv"));
  EXPECT_NE(slurp(dir / "a" / "weights.csv"), slurp(dir / "c" / "weights.csv"));
  EXPECT_EQ(slurp(dir / "a" / "posterior_summary.csv"), slurp(dir / "b" / "posterior_summary.csv"));
}

TEST(Cli, CanonicalRunMatchesGoldenChecksums) {
  const fs::path src(STABLEBIP_SOURCE_DIR);
  const fs::path dir = scratch("canonical");
  ASSERT_EQ(run_cli("mcmc --config " + (src / "configs" / "canonical.json").string() + " --out " +
                    dir.string()),
            0);
  std::ifstream golden(src / "tests" / "golden" / "canonical.sha256");
  ASSERT_TRUE(golden) << "missing golden checksum file";
  std::string digest, name;
  std::size_t checked = 0;
  while (golden >> digest >> name) {
    EXPECT_EQ(sha256_hex(slurp(dir / name)), digest) << name;
    ++checked;
  }
  EXPECT_GE(checked, 5u);
}

}  // namespace
}  // namespace stablebip
