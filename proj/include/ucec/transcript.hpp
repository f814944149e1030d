#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ucec/model.hpp"
#include "ucec/numerics.hpp"

namespace ucec {

/// Deliberate defects used as negative controls.
enum class Fault {
  kNone,
  /// Transmitter weights by Q(t)^-p instead of Q(t)^p.
  kFlipExponentSign,
  /// Transmitter zeroes b_{12}(t); the decoder still assumes the exact model,
  /// so one interference term reaches the user and is ignored.
  kLeakCrossTerm,
};

struct RunOptions {
  bool noiseless = false;
  Fault fault = Fault::kNone;
  /// Coded runs only: stop after the communication phase. Counters are
  /// filled as usual; decoded entries stay zero and conditions are NaN.
  bool skip_decode = false;
};

/// Scheme-independent record of one execution: counters for the load
/// definitions, what went over the air, and what each user decoded.
struct SchemeTranscript {
  std::string scheme;
  std::size_t users = 0;
  std::size_t block_length = 0;
  std::size_t outputs = 0;
  std::uint64_t functions_computed = 0;
  std::uint64_t slots_used = 0;
  /// Every computed coded value, in production order. Lets callers check
  /// whether the computation phase depended on the channel.
  std::vector<double> computation_artifacts;
  std::vector<RealMatrix> channel_slots;
  std::vector<RealVector> transmitted;
  std::vector<RealVector> received;
  std::vector<double> gammas;
  std::vector<double> condition_numbers;
  std::size_t channel_redraws = 0;
  OutputTable decoded;
};

/// gamma = sqrt(P / max_m mean_t u_m(t)^2): the largest scale keeping every
/// node's average power over the block at P.
inline double power_factor(std::span<const RealVector> unnormalized, double power) {
  if (unnormalized.empty()) return std::sqrt(power);
  const Eigen::Index nodes = unnormalized.front().size();
  double worst = 0.0;
  for (Eigen::Index m = 0; m < nodes; ++m) {
    double acc = 0.0;
    for (const auto& u : unnormalized) acc += u(m) * u(m);
    worst = std::max(worst, acc / static_cast<double>(unnormalized.size()));
  }
  if (!(worst > 0.0)) return std::sqrt(power);
  return std::sqrt(power / worst);
}

/// max |a - b| / max |b| over the table; absolute error when truth is zero.
inline double max_relative_error(const OutputTable& estimate, const OutputTable& truth) {
  const auto& e = estimate.values();
  const auto& t = truth.values();
  if (e.size() != t.size()) throw DimensionMismatch("output tables differ in shape");
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    err = std::max(err, std::abs(e[j] - t[j]));
    scale = std::max(scale, std::abs(t[j]));
  }
  return scale > 0.0 ? err / scale : err;
}

}  // namespace ucec
