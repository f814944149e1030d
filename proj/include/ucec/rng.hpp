#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ucec {

/// Every random draw in the library goes through one of these.
using Stream = std::mt19937_64;

inline double standard_normal(Stream& stream) {
  return std::normal_distribution<double>(0.0, 1.0)(stream);
}

namespace seeding {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; only used to turn stream labels into integers.
inline constexpr std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t derive(std::uint64_t parent, std::string_view label) {
  return derive(parent, label_hash(label));
}

}  // namespace seeding

struct TrialSeeds {
  std::uint64_t trial = 0;
  std::uint64_t input = 0;
  std::uint64_t channel = 0;
  std::uint64_t noise = 0;
};

/// master -> dataset stream, master -> trial t -> {input, channel, noise}.
class SeedSchedule {
 public:
  explicit SeedSchedule(std::uint64_t master) : master_(master) {}

  [[nodiscard]] std::uint64_t master() const { return master_; }

  [[nodiscard]] std::uint64_t dataset() const {
    return seeding::derive(master_, "dataset");
  }

  [[nodiscard]] TrialSeeds trial(std::uint64_t index) const {
    const std::uint64_t t = seeding::derive(seeding::derive(master_, "trial"), index);
    return {t, seeding::derive(t, "input"), seeding::derive(t, "channel"),
            seeding::derive(t, "noise")};
  }

 private:
  std::uint64_t master_;
};

}  // namespace ucec
