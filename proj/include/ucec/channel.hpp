#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ucec/directions.hpp"
#include "ucec/errors.hpp"
#include "ucec/numerics.hpp"
#include "ucec/rng.hpp"

namespace ucec {

/// H(t) for t = 0..T-1; gains(t)(k, m) is the gain from node m to user k.
struct ChannelRealization {
  std::size_t users = 0;
  std::size_t nodes = 0;
  std::vector<RealMatrix> gains;
  std::size_t redraws = 0;  // near-singular square slots replaced while drawing

  [[nodiscard]] std::size_t slots() const { return gains.size(); }
};

/// i.i.d. standard normal gains. Square slots failing the singularity guard
/// are redrawn in place.
inline ChannelRealization draw_channel(std::size_t users, std::size_t nodes,
                                       std::size_t slots, Stream& stream) {
  if (slots < 1) throw ConfigInvalid("channel needs T >= 1");
  ChannelRealization ch{users, nodes, {}, 0};
  ch.gains.reserve(slots);
  const auto fill = [&](RealMatrix& h) {
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
      for (Eigen::Index m = 0; m < h.cols(); ++m) h(k, m) = standard_normal(stream);
    }
  };
  for (std::size_t t = 0; t < slots; ++t) {
    RealMatrix h(users, nodes);
    fill(h);
    if (users == nodes) {
      while (numerics::is_near_singular(h)) {
        ++ch.redraws;
        fill(h);
      }
    }
    ch.gains.push_back(std::move(h));
  }
  return ch;
}

/// Per-slot received symbols Y(t) = H(t) X(t) + Z(t), Z ~ N(0, 1).
/// The noise stream is untouched when `noiseless` is set.
inline std::vector<RealVector> transmit(const ChannelRealization& ch,
                                        std::span<const RealVector> x, Stream& noise,
                                        bool noiseless) {
  if (x.size() != ch.slots()) {
    throw DimensionMismatch("transmit: " + std::to_string(x.size()) +
                            " symbol vectors for " + std::to_string(ch.slots()) +
                            " slots");
  }
  std::vector<RealVector> y;
  y.reserve(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (static_cast<std::size_t>(x[t].size()) != ch.nodes) {
      throw DimensionMismatch("transmit: symbol vector length != M");
    }
    RealVector yt = ch.gains[t] * x[t];
    if (!noiseless) {
      for (Eigen::Index k = 0; k < yt.size(); ++k) yt(k) += standard_normal(noise);
    }
    y.push_back(std::move(yt));
  }
  return y;
}

/// Channel inverses for the communication phase (square channels only).
/// inverse(t) = H(t)^-1, and b(t, k, m) = inverse(t)(m, k) so that the
/// neutralizing weight of user k's result at node m is b_km(t).
class CsiView {
 public:
  explicit CsiView(const ChannelRealization& ch) : users_(ch.users) {
    if (ch.users != ch.nodes) {
      throw DimensionMismatch("CSI inverse needs a square channel (K == M)");
    }
    inverses_.reserve(ch.slots());
    for (const auto& h : ch.gains) inverses_.push_back(numerics::invert(h));
  }

  [[nodiscard]] std::size_t users() const { return users_; }
  [[nodiscard]] std::size_t slots() const { return inverses_.size(); }
  [[nodiscard]] const RealMatrix& inverse(std::size_t t) const { return inverses_.at(t); }
  [[nodiscard]] double b(std::size_t t, std::size_t k, std::size_t m) const {
    return inverses_.at(t)(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  }

  /// Replace one slot inverse; only fault-injection code uses this.
  void override_inverse(std::size_t t, RealMatrix inv) { inverses_.at(t) = std::move(inv); }

 private:
  std::size_t users_;
  std::vector<RealMatrix> inverses_;
};

namespace detail {
inline double int_pow(double base, int exp) {
  double r = 1.0;
  const bool neg = exp < 0;
  for (int e = neg ? -exp : exp; e > 0; --e) r *= base;
  return neg ? 1.0 / r : r;
}
}  // namespace detail

/// Q(t)^p = prod_{k,m} b_km(t)^{p_km}, with 0^0 = 1.
inline double monomial_q(const CsiView& csi, std::size_t t, const DirectionIndex& p) {
  const std::size_t K = csi.users();
  if (p.coords.size() != K * K) throw DimensionMismatch("monomial_q: direction length != K^2");
  double q = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < K; ++m) {
      q *= detail::int_pow(csi.b(t, k, m), p.coords[k * K + m]);
    }
  }
  return q;
}

}  // namespace ucec
