// Command-line front end: run, sweep, verify.
//
// Exit status: 0 ok, 1 verification failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ucec/experiment.hpp"
#include "ucec/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;

/// Raw flag values; applied over the (optional) config file so explicit
/// flags win.
struct SpecFlags {
  std::string config_file;
  std::string scheme;
  std::string users, nodes, n, b, q, f, trials, seed, powers, fault;
  bool noiseless = false;
  std::string csv, json, dump_dir;
};

void add_spec_flags(CLI::App* app, SpecFlags& fl) {
  app->add_option("--config", fl.config_file, "JSON file with the same fields as the flags");
  app->add_option("--scheme", fl.scheme, "ucec | zf-ready | ain22 | tdma | partitioned-ucec");
  app->add_option("--users,-K", fl.users, "number of users K");
  app->add_option("--nodes,-M", fl.nodes, "number of edge nodes M");
  app->add_option("--N", fl.n, "direction lattice parameter N");
  app->add_option("--B", fl.b, "output functions per input");
  app->add_option("--Q", fl.q, "input dimension");
  app->add_option("--F", fl.f, "block length (derived for coded schemes)");
  app->add_option("--powers", fl.powers, "comma-separated transmit powers");
  app->add_option("--trials", fl.trials, "Monte-Carlo trials per power");
  app->add_option("--seed", fl.seed, "master seed");
  app->add_option("--inject-fault", fl.fault, "none | flip-exponent | leak-cross-term");
  app->add_flag("--noiseless", fl.noiseless, "zero receiver noise");
  app->add_option("--csv", fl.csv, "CSV output path");
  app->add_option("--json", fl.json, "JSON report path");
  app->add_option("--dump-dir", fl.dump_dir, "write dataset/inputs/channel/transcript dumps");
}

ucec::ExperimentSpec build_spec(const SpecFlags& fl) {
  ucec::ExperimentSpec spec;
  if (!fl.config_file.empty()) {
    std::ifstream is(fl.config_file);
    if (!is) throw ucec::ConfigInvalid("cannot read config file " + fl.config_file);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ucec::ConfigInvalid("config file: " + std::string(e.what()));
    }
    spec = ucec::spec_from_json(j);
  }
  const auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) ucec::apply_field(spec, key, v);
  };
  set("scheme", fl.scheme);
  set("users", fl.users);
  set("nodes", fl.nodes);
  set("N", fl.n);
  set("B", fl.b);
  set("Q", fl.q);
  set("F", fl.f);
  set("powers", fl.powers);
  set("trials", fl.trials);
  set("seed", fl.seed);
  set("fault", fl.fault);
  if (fl.noiseless) spec.noiseless = true;
  if (!fl.csv.empty()) spec.csv_path = fl.csv;
  if (!fl.json.empty()) spec.json_path = fl.json;
  if (!fl.dump_dir.empty()) spec.dump_dir = fl.dump_dir;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded edge computing simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ucec::kVersion);

  SpecFlags run_flags;
  auto* run = app.add_subcommand("run", "run one experiment and write CSV + JSON reports");
  add_spec_flags(run, run_flags);

  SpecFlags sweep_flags;
  std::vector<std::string> vary;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid, one CSV row per point and power");
  add_spec_flags(sweep, sweep_flags);
  sweep->add_option("--vary", vary, "grid axis key=v1,v2,... (repeatable)");

  std::string level = "quick";
  std::string verify_fault = "none";
  auto* verify = app.add_subcommand("verify", "self-check: quick or full");
  verify->add_option("--level", level, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--inject-fault", verify_fault, "none | flip-exponent | leak-cross-term");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      const auto spec = build_spec(run_flags);
      const auto rep = ucec::run_command(spec);
      std::cout << ucec::to_csv(ucec::csv_rows(rep));
      return kExitOk;
    }
    if (*sweep) {
      const auto base = build_spec(sweep_flags);
      std::vector<ucec::GridAxis> axes;
      for (const auto& v : vary) axes.push_back(ucec::parse_axis(v));
      const std::string csv = ucec::sweep_csv(base, axes);
      const auto path = base.csv_path.empty()
                            ? ucec::default_output_dir() / "sweep.csv"
                            : std::filesystem::path(base.csv_path);
      ucec::write_file_atomic(path, csv);
      std::cout << csv;
      return kExitOk;
    }
    if (*verify) {
      const auto results = ucec::run_verification(
          level == "full" ? ucec::VerifyLevel::kFull : ucec::VerifyLevel::kQuick,
          ucec::parse_fault(verify_fault));
      bool ok = true;
      for (const auto& r : results) {
        std::printf("[%s] %s (%.2fs): %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.seconds, r.detail.c_str());
        ok = ok && r.passed;
      }
      return ok ? kExitOk : kExitVerifyFailed;
    }
  } catch (const ucec::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}
