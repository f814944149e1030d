#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ucec/errors.hpp"
#include "ucec/model.hpp"
#include "ucec/rng.hpp"
#include "ucec/schemes.hpp"
#include "ucec/transcript.hpp"

namespace ucec {

using Rational = boost::rational<std::int64_t>;

/// r = functions computed / (F K B), L = slots / (F B).
struct LoadPair {
  Rational computation;
  Rational communication;

  bool operator==(const LoadPair&) const = default;
};

inline LoadPair compute_loads(const SchemeTranscript& tr) {
  const auto f = static_cast<std::int64_t>(tr.block_length);
  const auto k = static_cast<std::int64_t>(tr.users);
  const auto b = static_cast<std::int64_t>(tr.outputs);
  if (f < 1 || k < 1 || b < 1) throw DimensionMismatch("compute_loads: empty transcript");
  return {Rational(static_cast<std::int64_t>(tr.functions_computed), f * k * b),
          Rational(static_cast<std::int64_t>(tr.slots_used), f * b)};
}

inline std::string to_string(const Rational& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

struct DistortionReport {
  double power = 0.0;
  std::size_t trials = 0;     // trials that contributed
  std::size_t discarded = 0;  // trials dropped on a numerically singular draw
  OutputTable per_entry;      // mean squared error per (k, i, b)
  double mean = 0.0;          // average over all entries
  double signal_scale = 0.0;  // mean squared ground-truth value
  std::vector<double> condition_numbers;
  std::size_t channel_redraws = 0;
};

/// Everything fixed across trials of one experiment.
struct DistortionSetup {
  Scheme scheme;
  SystemConfig config;
  std::size_t block_length = 1;
  RunOptions options;
};

/// Monte-Carlo squared decode error at power P. Trial t draws inputs,
/// channels and noise from the t-th seed triple; the dataset comes from the
/// schedule's dataset stream and is shared by all trials.
inline DistortionReport measure_distortion(const DistortionSetup& setup, double power,
                                           std::size_t trials, const SeedSchedule& seeds) {
  if (trials < 1) throw ConfigInvalid("measure_distortion needs trials >= 1");
  SystemConfig cfg = setup.config;
  cfg.power = power;

  Stream dataset_stream(seeds.dataset());
  const LinearFunctionFamily fam(generate_dataset(cfg, dataset_stream));

  DistortionReport rep;
  rep.power = power;
  rep.per_entry = OutputTable(cfg.users, setup.block_length, cfg.outputs);
  double signal = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const TrialSeeds ts = seeds.trial(t);
    Stream input_stream(ts.input);
    Stream channel_stream(ts.channel);
    Stream noise_stream(ts.noise);
    const InputBlock block = generate_inputs(cfg, setup.block_length, input_stream);
    SchemeTranscript tr;
    try {
      tr = setup.scheme.run(cfg, fam, block, channel_stream, noise_stream, setup.options);
    } catch (const SingularMatrix&) {
      ++rep.discarded;
      continue;
    } catch (const RankDeficient&) {
      ++rep.discarded;
      continue;
    }
    const OutputTable truth = ground_truth(fam, block);
    auto& acc = rep.per_entry.values();
    for (std::size_t j = 0; j < acc.size(); ++j) {
      const double e = tr.decoded.values()[j] - truth.values()[j];
      acc[j] += e * e;
      signal += truth.values()[j] * truth.values()[j];
    }
    rep.condition_numbers.insert(rep.condition_numbers.end(), tr.condition_numbers.begin(),
                                 tr.condition_numbers.end());
    rep.channel_redraws += tr.channel_redraws;
    ++rep.trials;
  }
  if (rep.trials == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double& v : rep.per_entry.values()) v = nan;
    rep.mean = nan;
    rep.signal_scale = nan;
    return rep;
  }
  auto& acc = rep.per_entry.values();
  double total = 0.0;
  for (double& v : acc) {
    v /= static_cast<double>(rep.trials);
    total += v;
  }
  rep.mean = total / static_cast<double>(acc.size());
  rep.signal_scale = signal / static_cast<double>(rep.trials * acc.size());
  return rep;
}

/// Ordinary least-squares slope of ys against xs.
inline double ols_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw DimensionMismatch("ols_slope needs two equal-length series of >= 2 points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxy += (xs[j] - mx) * (ys[j] - my);
    sxx += (xs[j] - mx) * (xs[j] - mx);
  }
  if (sxx == 0.0) throw DimensionMismatch("ols_slope: all x values equal");
  return sxy / sxx;
}

/// Power list usable for a slope fit: >= 3 points spanning >= 4 decades.
inline bool powers_span_slope_fit(std::span<const double> powers) {
  if (powers.size() < 3) return false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double p : powers) {
    if (!(p > 0.0)) return false;
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return std::log10(hi) - std::log10(lo) >= 4.0 - 1e-12;
}

struct DofFit {
  double slope = 0.0;              // fitted on the aggregate mean distortion
  OutputTable per_entry_slopes;    // same fit per (k, i, b)
  std::vector<DistortionReport> reports;
};

/// Slope of log(1/D) against log(P). The same seed schedule is reused at
/// every power so the points differ only in P.
inline DofFit fit_dof_slope(std::span<const DistortionReport> reports) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : reports) {
    xs.push_back(std::log(r.power));
    ys.push_back(-std::log(r.mean));
  }
  DofFit fit;
  fit.slope = ols_slope(xs, ys);
  const auto& shape = reports.front().per_entry;
  fit.per_entry_slopes = OutputTable(shape.users(), shape.block_length(), shape.outputs());
  for (std::size_t j = 0; j < shape.values().size(); ++j) {
    std::vector<double> ye;
    for (const auto& r : reports) ye.push_back(-std::log(r.per_entry.values()[j]));
    fit.per_entry_slopes.values()[j] = ols_slope(xs, ye);
  }
  fit.reports.assign(reports.begin(), reports.end());
  return fit;
}

inline DofFit dof_slope(const DistortionSetup& setup, std::span<const double> powers,
                        std::size_t trials, const SeedSchedule& seeds) {
  if (!powers_span_slope_fit(powers)) {
    throw ConfigInvalid("dof_slope needs >= 3 positive powers spanning >= 4 decades");
  }
  std::vector<DistortionReport> reports;
  for (double p : powers) reports.push_back(measure_distortion(setup, p, trials, seeds));
  return fit_dof_slope(reports);
}

}  // namespace ucec
