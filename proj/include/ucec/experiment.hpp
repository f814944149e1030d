#pragma once

// Experiment harness behind the CLI: spec parsing and validation, the
// powers x trials loop, and CSV / JSON reporting.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ucec/json_io.hpp"
#include "ucec/metrics.hpp"
#include "ucec/rng.hpp"
#include "ucec/schemes.hpp"
#include "ucec/version.hpp"

namespace ucec {

inline constexpr const char* kOutputDirEnv = "UCEC_OUTPUT_DIR";

struct ExperimentSpec {
  std::string scheme = "ucec";
  SystemConfig config;
  std::optional<std::size_t> block_length;
  std::vector<double> powers{1e2, 1e4, 1e6};
  std::size_t trials = 20;
  bool noiseless = false;
  Fault fault = Fault::kNone;
  std::string csv_path;
  std::string json_path;
  std::string dump_dir;
};

inline std::string fault_name(Fault f) {
  switch (f) {
    case Fault::kNone: return "none";
    case Fault::kFlipExponentSign: return "flip-exponent";
    case Fault::kLeakCrossTerm: return "leak-cross-term";
  }
  return "none";
}

inline Fault parse_fault(std::string_view s) {
  if (s == "none") return Fault::kNone;
  if (s == "flip-exponent") return Fault::kFlipExponentSign;
  if (s == "leak-cross-term") return Fault::kLeakCrossTerm;
  throw ConfigInvalid("unknown fault '" + std::string(s) +
                      "' (expected none, flip-exponent or leak-cross-term)");
}

namespace detail {

inline std::size_t parse_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigInvalid("field '" + std::string(key) + "': '" + std::string(v) +
                        "' is not a non-negative integer");
  }
  return out;
}

inline double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigInvalid("field '" + std::string(key) + "': '" + std::string(v) +
                        "' is not a number");
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t end = std::min(s.find(sep, start), s.size());
    out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

/// Shortest round-trip representation; stable across runs.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

}  // namespace detail

/// Sets one named field from its textual value. Shared by the CLI, JSON
/// config files and sweep grids, so the three accept the same names.
inline void apply_field(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  using detail::parse_count;
  if (key == "scheme") {
    spec.scheme = std::string(value);
  } else if (key == "users" || key == "K") {
    spec.config.users = parse_count(key, value);
  } else if (key == "nodes" || key == "M") {
    spec.config.nodes = parse_count(key, value);
  } else if (key == "N") {
    spec.config.direction_n = parse_count(key, value);
  } else if (key == "B") {
    spec.config.outputs = parse_count(key, value);
  } else if (key == "Q") {
    spec.config.input_dim = parse_count(key, value);
  } else if (key == "F") {
    spec.block_length = parse_count(key, value);
  } else if (key == "trials") {
    spec.trials = parse_count(key, value);
  } else if (key == "seed") {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw ConfigInvalid("field 'seed': '" + std::string(value) + "' is not an integer");
    }
    spec.config.seed = s;
  } else if (key == "powers" || key == "P") {
    spec.powers.clear();
    for (const auto& p : detail::split(value, key == "P" ? ';' : ',')) {
      spec.powers.push_back(detail::parse_real(key, p));
    }
  } else if (key == "noiseless") {
    if (value != "true" && value != "false") {
      throw ConfigInvalid("field 'noiseless' must be true or false");
    }
    spec.noiseless = value == "true";
  } else if (key == "fault") {
    spec.fault = parse_fault(value);
  } else {
    throw ConfigInvalid("unknown field '" + std::string(key) + "'");
  }
}

/// Reads the same fields as the CLI from a JSON object.
inline ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec spec = {}) {
  if (!j.is_object()) throw ConfigInvalid("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "csv") {
      spec.csv_path = value.get<std::string>();
    } else if (key == "json") {
      spec.json_path = value.get<std::string>();
    } else if (key == "dump_dir") {
      spec.dump_dir = value.get<std::string>();
    } else if (key == "powers" && value.is_array()) {
      spec.powers = value.get<std::vector<double>>();
    } else if (value.is_string()) {
      apply_field(spec, key, value.get<std::string>());
    } else if (value.is_boolean()) {
      apply_field(spec, key, value.get<bool>() ? "true" : "false");
    } else if (value.is_number_unsigned() || value.is_number_integer()) {
      apply_field(spec, key, std::to_string(value.get<std::int64_t>()));
    } else if (value.is_number()) {
      apply_field(spec, key, detail::format_real(value.get<double>()));
    } else {
      throw ConfigInvalid("config field '" + key + "' has an unsupported type");
    }
  }
  return spec;
}

/// Full up-front validation; returns the block length F to use.
inline std::size_t validate(const ExperimentSpec& spec) {
  scheme_by_tag(spec.scheme);
  if (spec.trials < 1) throw ConfigInvalid("trials must be >= 1");
  if (spec.powers.empty()) throw ConfigInvalid("power list is empty");
  for (double p : spec.powers) {
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigInvalid("every power must be > 0");
  }
  return validate_scheme_config(spec.scheme, spec.config, spec.block_length);
}

struct ConditionSummary {
  double min = std::nan("");
  double median = std::nan("");
  double max = std::nan("");
};

inline ConditionSummary summarize_conditions(std::vector<double> values) {
  ConditionSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

struct ExperimentReport {
  ExperimentSpec spec;
  std::size_t block_length = 0;
  LoadPair loads;
  std::vector<DistortionReport> distortion;  // one per power, in spec order
  std::optional<double> dof_slope;
  OutputTable per_entry_slopes;
  ConditionSummary conditions;
  std::size_t discarded = 0;
  double wall_clock_seconds = 0.0;
  std::vector<TrialSeeds> seed_schedule;
};

/// Runs every power x trial, all in memory. Nothing touches disk here.
inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.spec = spec;
  rep.block_length = validate(spec);

  const SeedSchedule seeds(spec.config.seed);
  for (std::size_t t = 0; t < spec.trials; ++t) rep.seed_schedule.push_back(seeds.trial(t));

  const DistortionSetup setup{scheme_by_tag(spec.scheme), spec.config, rep.block_length,
                              {spec.noiseless, spec.fault}};
  {
    // Loads come from counters, identical for every trial and independent of
    // decoding; trial 0 suffices.
    SystemConfig cfg = spec.config;
    cfg.power = spec.powers.front();
    Stream ds_stream(seeds.dataset());
    const LinearFunctionFamily fam(generate_dataset(cfg, ds_stream));
    const TrialSeeds ts = seeds.trial(0);
    Stream in(ts.input), ch(ts.channel), noise(ts.noise);
    const InputBlock block = generate_inputs(cfg, rep.block_length, in);
    RunOptions count_only = setup.options;
    count_only.skip_decode = true;
    rep.loads = compute_loads(setup.scheme.run(cfg, fam, block, ch, noise, count_only));
  }

  std::vector<double> all_conditions;
  for (double p : spec.powers) {
    rep.distortion.push_back(measure_distortion(setup, p, spec.trials, seeds));
    rep.discarded += rep.distortion.back().discarded;
    const auto& c = rep.distortion.back().condition_numbers;
    all_conditions.insert(all_conditions.end(), c.begin(), c.end());
  }
  rep.conditions = summarize_conditions(std::move(all_conditions));

  const bool positive = std::all_of(rep.distortion.begin(), rep.distortion.end(),
                                    [](const DistortionReport& d) { return d.mean > 0.0; });
  if (!spec.noiseless && positive && powers_span_slope_fit(spec.powers)) {
    const DofFit fit = fit_dof_slope(rep.distortion);
    rep.dof_slope = fit.slope;
    rep.per_entry_slopes = fit.per_entry_slopes;
  }
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

inline constexpr const char* kCsvHeader =
    "scheme,K,M,N,B,Q,F,P,trials,seed,r_num,r_den,L_num,L_den,mean_distortion,dof_slope,"
    "cond_median,discarded";

/// One CSV row per power.
inline std::vector<std::string> csv_rows(const ExperimentReport& rep) {
  using detail::format_real;
  const auto& s = rep.spec;
  std::vector<std::string> rows;
  for (const auto& d : rep.distortion) {
    std::ostringstream os;
    os << s.scheme << ',' << s.config.users << ',' << s.config.nodes << ','
       << s.config.direction_n << ',' << s.config.outputs << ',' << s.config.input_dim << ','
       << rep.block_length << ',' << format_real(d.power) << ',' << d.trials << ','
       << s.config.seed << ',' << rep.loads.computation.numerator() << ','
       << rep.loads.computation.denominator() << ',' << rep.loads.communication.numerator()
       << ',' << rep.loads.communication.denominator() << ',' << format_real(d.mean) << ','
       << format_real(rep.dof_slope.value_or(std::nan(""))) << ','
       << format_real(summarize_conditions(d.condition_numbers).median) << ','
       << d.discarded;
    rows.push_back(os.str());
  }
  return rows;
}

inline std::string to_csv(const std::vector<std::string>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

inline nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j = {{"scheme", s.scheme},
                      {"users", s.config.users},
                      {"nodes", s.config.nodes},
                      {"N", s.config.direction_n},
                      {"B", s.config.outputs},
                      {"Q", s.config.input_dim},
                      {"powers", s.powers},
                      {"trials", s.trials},
                      {"seed", s.config.seed},
                      {"noiseless", s.noiseless},
                      {"fault", fault_name(s.fault)},
                      {"noise_variance", s.config.noise_variance}};
  if (s.block_length) j["F"] = *s.block_length;
  return j;
}

inline nlohmann::json report_to_json(const ExperimentReport& rep) {
  using nlohmann::json;
  const auto real = [](double v) -> json {
    return std::isfinite(v) ? json(v) : json(detail::format_real(v));
  };
  json distortion = json::array();
  for (const auto& d : rep.distortion) {
    distortion.push_back({{"P", d.power},
                          {"trials", d.trials},
                          {"discarded", d.discarded},
                          {"mean", d.mean},
                          {"signal_scale", d.signal_scale},
                          {"channel_redraws", d.channel_redraws},
                          {"per_entry", io::table_to_json(d.per_entry)}});
  }
  json seeds = json::array();
  for (const auto& t : rep.seed_schedule) {
    seeds.push_back({{"trial", t.trial}, {"input", t.input}, {"channel", t.channel},
                     {"noise", t.noise}});
  }
  const SeedSchedule schedule(rep.spec.config.seed);
  json j = {{"spec", spec_to_json(rep.spec)},
            {"F", rep.block_length},
            {"input_labeling",
             rep.spec.scheme == "ucec" || rep.spec.scheme == "partitioned-ucec"
                 ? "block index i <-> i-th point of the N-lattice in lexicographic order"
                 : "block index i is the i-th input vector"},
            {"loads",
             {{"r", to_string(rep.loads.computation)},
              {"L", to_string(rep.loads.communication)}}},
            {"distortion", distortion},
            {"dof_slope", rep.dof_slope ? json(*rep.dof_slope) : json(nullptr)},
            {"condition_number",
             {{"min", real(rep.conditions.min)},
              {"median", real(rep.conditions.median)},
              {"max", real(rep.conditions.max)}}},
            {"discarded", rep.discarded},
            {"wall_clock_seconds", rep.wall_clock_seconds},
            {"version", kVersion},
            {"seed_schedule",
             {{"master", schedule.master()}, {"dataset", schedule.dataset()},
              {"trials", seeds}}}};
  if (rep.dof_slope) j["per_entry_dof_slopes"] = io::table_to_json(rep.per_entry_slopes);
  return j;
}

/// Writes via a temporary file and rename, so readers never see a partial
/// report.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << text;
  }
  std::filesystem::rename(tmp, path);
}

inline std::filesystem::path default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env != nullptr && *env != '\0' ? std::filesystem::path(env)
                                        : std::filesystem::path(".");
}

/// Debug dumps for trial 0 at the first power: dataset, inputs, transcript
/// and (for the coded scheme) the per-function channels.
inline void write_dumps(const ExperimentSpec& spec, std::size_t block_length,
                        const std::filesystem::path& dir) {
  const SeedSchedule seeds(spec.config.seed);
  SystemConfig cfg = spec.config;
  cfg.power = spec.powers.front();
  Stream ds_stream(seeds.dataset());
  const Dataset ds = generate_dataset(cfg, ds_stream);
  const LinearFunctionFamily fam(ds);
  const TrialSeeds ts = seeds.trial(0);
  Stream in(ts.input), ch(ts.channel), noise(ts.noise);
  const InputBlock block = generate_inputs(cfg, block_length, in);
  const RunOptions opts{spec.noiseless, spec.fault};

  write_file_atomic(dir / "dataset.json", io::dataset_to_json(ds).dump(2));
  write_file_atomic(dir / "inputs.json", io::inputs_to_json(block).dump(2));
  if (spec.scheme == "ucec") {
    const UcecTranscript tr = run_ucec(cfg, fam, block, ch, noise, opts);
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& blk : tr.blocks) channels.push_back(io::channel_to_json(blk.channel));
    write_file_atomic(dir / "channels.json", channels.dump(2));
    write_file_atomic(dir / "transcript.json", io::ucec_transcript_to_json(tr).dump(2));
  } else {
    const SchemeTranscript tr = scheme_by_tag(spec.scheme).run(cfg, fam, block, ch, noise, opts);
    write_file_atomic(dir / "transcript.json", io::transcript_to_json(tr).dump(2));
  }
}

/// Runs and writes CSV + JSON. Paths default to the output directory.
inline ExperimentReport run_command(const ExperimentSpec& spec) {
  const ExperimentReport rep = run_experiment(spec);
  const auto dir = default_output_dir();
  const std::filesystem::path csv = spec.csv_path.empty() ? dir / "report.csv" : std::filesystem::path(spec.csv_path);
  const std::filesystem::path js = spec.json_path.empty() ? dir / "report.json" : std::filesystem::path(spec.json_path);
  const std::string csv_text = to_csv(csv_rows(rep));
  const std::string json_text = report_to_json(rep).dump(2);
  if (!spec.dump_dir.empty()) write_dumps(spec, rep.block_length, spec.dump_dir);
  write_file_atomic(csv, csv_text);
  write_file_atomic(js, json_text);
  return rep;
}

// ---------------------------------------------------------------------------
// sweeps

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

/// "key=v1,v2,..." -> axis.
inline GridAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 >= text.size()) {
    throw ConfigInvalid("grid axis '" + std::string(text) + "' must look like key=v1,v2");
  }
  GridAxis axis{std::string(text.substr(0, eq)), detail::split(text.substr(eq + 1), ',')};
  for (const auto& v : axis.values) {
    if (v.empty()) throw ConfigInvalid("grid axis '" + axis.key + "' has an empty value");
  }
  return axis;
}

struct GridPoint {
  std::vector<std::pair<std::string, std::string>> assignment;
  ExperimentSpec spec;
};

/// Cartesian product, first axis slowest. Point j gets master seed
/// derive(base seed, j). Every point is validated before any is run.
inline std::vector<GridPoint> expand_grid(const ExperimentSpec& base,
                                          const std::vector<GridAxis>& axes) {
  if (axes.empty()) throw ConfigInvalid("sweep grid is empty");
  std::size_t count = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigInvalid("sweep axis '" + a.key + "' is empty");
    count *= a.values.size();
  }
  std::vector<GridPoint> points;
  for (std::size_t j = 0; j < count; ++j) {
    GridPoint pt{{}, base};
    std::size_t rest = j;
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& v = axes[a].values[pick[a]];
      pt.assignment.emplace_back(axes[a].key, v);
      label += (a ? "," : "") + axes[a].key + "=" + v;
    }
    try {
      for (const auto& [k, v] : pt.assignment) apply_field(pt.spec, k, v);
      pt.spec.config.seed = seeding::derive(base.config.seed, static_cast<std::uint64_t>(j));
      validate(pt.spec);
    } catch (const ConfigInvalid& e) {
      throw ConfigInvalid("grid point " + std::to_string(j) + " (" + label + "): " + e.what());
    }
    points.push_back(std::move(pt));
  }
  return points;
}

inline std::string sweep_csv(const ExperimentSpec& base, const std::vector<GridAxis>& axes) {
  std::vector<std::string> rows;
  for (const auto& pt : expand_grid(base, axes)) {
    const auto r = csv_rows(run_experiment(pt.spec));
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return to_csv(rows);
}

}  // namespace ucec
