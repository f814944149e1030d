#pragma once

// Transmit-direction lattice {0, ..., bound-1}^(K*K). Coordinate (k, m) sits
// at position k*K + m, and lattice points are ordered lexicographically with
// the first coordinate most significant. That order is the flat index used
// for input labels, decoding-matrix columns and coded-result tensors.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ucec/errors.hpp"

namespace ucec {

inline constexpr std::size_t kDefaultLatticeCap = 1'000'000;

struct DirectionIndex {
  std::vector<int> coords;
  int bound = 1;

  [[nodiscard]] std::size_t users() const {
    std::size_t k = 0;
    while (k * k < coords.size()) ++k;
    return k;
  }
  [[nodiscard]] int at(std::size_t k, std::size_t m) const {
    return coords.at(k * users() + m);
  }

  bool operator==(const DirectionIndex&) const = default;
};

/// bound^(K*K), or SizeOverflow past `cap`.
inline std::size_t lattice_size(std::size_t users, std::size_t bound,
                                std::size_t cap = kDefaultLatticeCap) {
  if (users < 1 || bound < 1) throw ConfigInvalid("lattice needs K >= 1 and bound >= 1");
  std::size_t n = 1;
  for (std::size_t j = 0; j < users * users; ++j) {
    if (n > cap / bound) {
      throw SizeOverflow("lattice " + std::to_string(bound) + "^" +
                         std::to_string(users * users) + " exceeds cap " +
                         std::to_string(cap));
    }
    n *= bound;
  }
  if (n > cap) throw SizeOverflow("lattice exceeds cap " + std::to_string(cap));
  return n;
}

inline std::vector<DirectionIndex> enumerate_lattice(std::size_t users, std::size_t bound,
                                                     std::size_t cap = kDefaultLatticeCap) {
  const std::size_t count = lattice_size(users, bound, cap);
  const std::size_t len = users * users;
  std::vector<DirectionIndex> out;
  out.reserve(count);
  DirectionIndex p{std::vector<int>(len, 0), static_cast<int>(bound)};
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(p);
    // odometer increment, last coordinate fastest
    for (std::size_t j = len; j-- > 0;) {
      if (++p.coords[j] < static_cast<int>(bound)) break;
      p.coords[j] = 0;
    }
  }
  return out;
}

/// Position of `p` in enumerate_lattice(K, p.bound).
inline std::size_t flat_index(const DirectionIndex& p) {
  std::size_t idx = 0;
  for (int c : p.coords) {
    if (c < 0 || c >= p.bound) throw DimensionMismatch("direction outside its lattice");
    idx = idx * static_cast<std::size_t>(p.bound) + static_cast<std::size_t>(c);
  }
  return idx;
}

/// Shift coordinate (k, m) of a point from the (N+1)-lattice down by one.
/// The result is relabelled into the N-lattice, or nullopt when any
/// coordinate ends up at -1 or >= N (those inputs are taken as zero).
inline std::optional<DirectionIndex> decrement(const DirectionIndex& p, std::size_t k,
                                               std::size_t m) {
  const std::size_t K = p.users();
  if (K * K != p.coords.size() || k >= K || m >= K) {
    throw DimensionMismatch("decrement: (k, m) outside a K x K direction");
  }
  const int n = p.bound - 1;
  DirectionIndex q{p.coords, n};
  q.coords[k * K + m] -= 1;
  for (int c : q.coords) {
    if (c < 0 || c >= n) return std::nullopt;
  }
  return q;
}

}  // namespace ucec
