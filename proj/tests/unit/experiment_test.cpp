#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ucec/experiment.hpp"

namespace ucec {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> cells(const std::string& row) { return detail::split(row, ','); }

ExperimentSpec small_spec(const std::string& scheme = "ucec") {
  ExperimentSpec s;
  s.scheme = scheme;
  s.config.users = 2;
  s.config.nodes = 2;
  s.config.outputs = 2;
  s.config.input_dim = 3;
  s.config.direction_n = 1;
  s.config.seed = 17;
  s.trials = 5;
  return s;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ucec_experiment_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int status;
  std::string out;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + UCEC_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

TEST(ApplyField, SetsEveryKnownField) {
  ExperimentSpec s;
  apply_field(s, "scheme", "tdma");
  apply_field(s, "K", "3");
  apply_field(s, "nodes", "2");
  apply_field(s, "N", "2");
  apply_field(s, "B", "4");
  apply_field(s, "Q", "5");
  apply_field(s, "F", "7");
  apply_field(s, "trials", "9");
  apply_field(s, "seed", "123");
  apply_field(s, "powers", "10,1000");
  apply_field(s, "noiseless", "true");
  apply_field(s, "fault", "leak-cross-term");
  EXPECT_EQ(s.scheme, "tdma");
  EXPECT_EQ(s.config.users, 3u);
  EXPECT_EQ(s.config.nodes, 2u);
  EXPECT_EQ(s.config.direction_n, 2u);
  EXPECT_EQ(s.config.outputs, 4u);
  EXPECT_EQ(s.config.input_dim, 5u);
  EXPECT_EQ(s.block_length, 7u);
  EXPECT_EQ(s.trials, 9u);
  EXPECT_EQ(s.config.seed, 123u);
  EXPECT_EQ(s.powers, (std::vector<double>{10, 1000}));
  EXPECT_TRUE(s.noiseless);
  EXPECT_EQ(s.fault, Fault::kLeakCrossTerm);
}

TEST(ApplyField, RejectsBadValuesWithTheFieldName) {
  ExperimentSpec s;
  try {
    apply_field(s, "trials", "many");
    FAIL();
  } catch (const ConfigInvalid& e) {
    EXPECT_NE(std::string(e.what()).find("trials"), std::string::npos);
  }
  EXPECT_THROW(apply_field(s, "colour", "red"), ConfigInvalid);
  EXPECT_THROW(apply_field(s, "noiseless", "yes"), ConfigInvalid);
  EXPECT_THROW(apply_field(s, "fault", "gremlin"), ConfigInvalid);
}

TEST(SpecFromJson, ReadsMixedTypes) {
  const auto j = nlohmann::json::parse(
      R"({"scheme":"ain22","K":2,"M":2,"B":1,"powers":[100,1e4,1e6],"noiseless":true,
          "csv":"a.csv","seed":"99"})");
  const auto s = spec_from_json(j);
  EXPECT_EQ(s.scheme, "ain22");
  EXPECT_EQ(s.config.outputs, 1u);
  EXPECT_EQ(s.powers.size(), 3u);
  EXPECT_TRUE(s.noiseless);
  EXPECT_EQ(s.csv_path, "a.csv");
  EXPECT_EQ(s.config.seed, 99u);
  EXPECT_THROW(spec_from_json(nlohmann::json::array()), ConfigInvalid);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"K":[1]})")), ConfigInvalid);
}

TEST(Validate, NamesTheReason) {
  auto expect_reason = [](ExperimentSpec s, const std::string& needle) {
    try {
      validate(s);
      ADD_FAILURE() << "accepted: " << needle;
    } catch (const ConfigInvalid& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto s = small_spec();
  s.config.nodes = 3;
  expect_reason(s, "K == M");
  s = small_spec();
  s.powers = {1e2, -1.0};
  expect_reason(s, "power");
  s = small_spec();
  s.trials = 0;
  expect_reason(s, "trials");
  s = small_spec();
  s.scheme = "magic";
  expect_reason(s, "magic");
  s = small_spec("ucec");
  s.block_length = 3;
  expect_reason(s, "F");
  EXPECT_EQ(validate(small_spec("ain22")), 3u);
  EXPECT_EQ(validate(small_spec("zf-ready")), 1u);
}

TEST(RunExperiment, CsvIsReproducible) {
  const auto spec = small_spec();
  const auto a = to_csv(csv_rows(run_experiment(spec)));
  const auto b = to_csv(csv_rows(run_experiment(spec)));
  EXPECT_EQ(a, b);
  auto other = spec;
  other.config.seed = 18;
  EXPECT_NE(a, to_csv(csv_rows(run_experiment(other))));
}

TEST(RunExperiment, CodedSchemeReportsLoadSixteen) {
  const auto rep = run_experiment(small_spec());
  EXPECT_EQ(rep.loads.computation, Rational(16));
  EXPECT_EQ(rep.loads.communication, Rational(16));
  const auto rows = csv_rows(rep);
  ASSERT_EQ(rows.size(), 3u);
  const auto c = cells(rows[0]);
  ASSERT_EQ(c.size(), cells(kCsvHeader).size());
  EXPECT_EQ(c[0], "ucec");
  EXPECT_EQ(c[10], "16");
  EXPECT_EQ(c[11], "1");
  EXPECT_EQ(c[12], "16");
  EXPECT_EQ(c[13], "1");
  ASSERT_TRUE(rep.dof_slope.has_value());
  EXPECT_GT(*rep.dof_slope, 0.5);
}

TEST(RunExperiment, NoiselessAin22) {
  auto spec = small_spec("ain22");
  spec.noiseless = true;
  const auto rep = run_experiment(spec);
  EXPECT_EQ(rep.loads.computation, Rational(1));
  EXPECT_EQ(rep.loads.communication, Rational(4, 3));
  for (const auto& d : rep.distortion) EXPECT_LE(d.mean, 1e-12 * d.signal_scale);
  EXPECT_FALSE(rep.dof_slope.has_value());
  EXPECT_EQ(cells(csv_rows(rep)[0])[15], "nan");
}

TEST(Sweep, DirectionOrderAxis) {
  auto base = small_spec();
  base.config.outputs = 1;
  base.trials = 3;
  base.powers = {1e4};
  const auto csv = sweep_csv(base, {parse_axis("N=1,2,3")});
  std::vector<std::string> rows;
  std::stringstream ss(csv);
  for (std::string line; std::getline(ss, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], kCsvHeader);
  const std::vector<std::pair<std::string, std::string>> want{{"16", "1"}, {"81", "16"},
                                                              {"256", "81"}};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c = cells(rows[i + 1]);
    EXPECT_EQ(c[3], std::to_string(i + 1));
    EXPECT_EQ(c[12], want[i].first);
    EXPECT_EQ(c[13], want[i].second);
  }
}

TEST(Sweep, SchemeAxisAndSeedDerivation) {
  auto base = small_spec();
  base.config.direction_n = 3;
  base.config.outputs = 1;
  base.trials = 2;
  base.powers = {1e4};
  const auto pts = expand_grid(base, {parse_axis("scheme=ucec,tdma")});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].spec.config.seed, seeding::derive(17, 0));
  EXPECT_EQ(pts[1].spec.config.seed, seeding::derive(17, 1));
  const auto coded = run_experiment(pts[0].spec);
  const auto tdma = run_experiment(pts[1].spec);
  EXPECT_EQ(coded.loads.communication, Rational(256, 81));
  EXPECT_EQ(tdma.loads.communication, Rational(2));
  EXPECT_LT(coded.loads.communication, Rational(4));
}

TEST(Sweep, GridErrors) {
  const auto base = small_spec();
  EXPECT_THROW(expand_grid(base, {}), ConfigInvalid);
  EXPECT_THROW(parse_axis("N"), ConfigInvalid);
  EXPECT_THROW(parse_axis("N=1,,2"), ConfigInvalid);
  try {
    expand_grid(base, {parse_axis("M=2,3")});
    FAIL();
  } catch (const ConfigInvalid& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 1 (M=3)"), std::string::npos) << e.what();
  }
}

TEST(RunCommand, WritesReportsAndDumps) {
  const auto dir = scratch_dir("run_command");
  auto spec = small_spec();
  spec.trials = 2;
  spec.csv_path = (dir / "r.csv").string();
  spec.json_path = (dir / "r.json").string();
  spec.dump_dir = (dir / "dump").string();
  const auto rep = run_command(spec);
  EXPECT_EQ(slurp(dir / "r.csv"), to_csv(csv_rows(rep)));
  const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(j.at("version"), kVersion);
  for (const char* f : {"dataset.json", "inputs.json", "channels.json", "transcript.json"}) {
    EXPECT_TRUE(fs::exists(dir / "dump" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, RunIsByteIdenticalAndHonoursOutputDir) {
  const auto dir = scratch_dir("cli_run");
  const std::string env = "UCEC_OUTPUT_DIR=" + dir.string();
  const std::string args = "run --scheme ucec -K 2 -M 2 --N 1 --B 2 --trials 4 --seed 5";
  const auto a = run_cli(args, env);
  const auto b = run_cli(args, env);
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(dir / "report.csv"), a.out);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileAndExitCodes) {
  const auto dir = scratch_dir("cli_codes");
  const std::string env = "UCEC_OUTPUT_DIR=" + dir.string();
  {
    std::ofstream(dir / "cfg.json") << R"({"scheme":"ain22","K":2,"M":2,"B":1,"trials":2,"noiseless":true})";
  }
  const auto ok = run_cli("run --config " + (dir / "cfg.json").string(), env);
  EXPECT_EQ(ok.status, 0);
  EXPECT_NE(ok.out.find("ain22,2,2,"), std::string::npos) << ok.out;
  EXPECT_EQ(run_cli("run --scheme ucec -K 2 -M 3", env).status, 2);
  EXPECT_EQ(run_cli("run --bogus-flag", env).status, 2);
  EXPECT_EQ(run_cli("sweep --trials 1", env).status, 2);
  EXPECT_EQ(run_cli("verify --level quick", env).status, 0);
  EXPECT_EQ(run_cli("verify --level quick --inject-fault flip-exponent", env).status, 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace ucec
