#pragma once

// Self-check used by `ucec verify`. quick: neutralization and load
// accounting for every scheme. full: adds the Monte-Carlo DoF slopes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ucec/baselines.hpp"
#include "ucec/channel.hpp"
#include "ucec/metrics.hpp"
#include "ucec/schemes.hpp"
#include "ucec/ucec.hpp"

namespace ucec {

enum class VerifyLevel { kQuick, kFull };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace verify_detail {

struct Trial {
  LinearFunctionFamily fam;
  InputBlock block;
};

inline Trial make_trial(const SystemConfig& cfg, std::size_t f, std::uint64_t seed) {
  Stream ds(seeding::derive(seed, "dataset"));
  Stream in(seeding::derive(seed, "input"));
  LinearFunctionFamily fam(generate_dataset(cfg, ds));
  return {std::move(fam), generate_inputs(cfg, f, in)};
}

/// max over users, slots, functions of |Y - gamma sum_q Q^q phi(d_k^q)|,
/// relative to the largest expected magnitude.
inline double neutralization_residual(const UcecTranscript& tr, const LinearFunctionFamily& fam,
                                      const InputBlock& block) {
  const std::size_t K = tr.config.users;
  const auto lattice = enumerate_lattice(K, tr.config.direction_n);
  double err = 0.0;
  double scale = 0.0;
  for (std::size_t b = 0; b < tr.blocks.size(); ++b) {
    const auto& blk = tr.blocks[b];
    const CsiView csi(blk.channel);
    for (std::size_t t = 0; t < blk.received.size(); ++t) {
      for (std::size_t k = 0; k < K; ++k) {
        double expected = 0.0;
        for (std::size_t j = 0; j < lattice.size(); ++j) {
          expected += monomial_q(csi, t, lattice[j]) * fam.evaluate(b, block.at(k, j));
        }
        expected *= blk.gamma;
        err = std::max(err, std::abs(blk.received[t](static_cast<Eigen::Index>(k)) - expected));
        scale = std::max(scale, std::abs(expected));
      }
    }
  }
  return scale > 0.0 ? err / scale : err;
}

template <typename F>
CheckResult timed(std::string name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r{std::move(name), false, {}, 0.0};
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace verify_detail

inline std::vector<CheckResult> run_verification(VerifyLevel level, Fault fault = Fault::kNone) {
  using namespace verify_detail;
  std::vector<CheckResult> out;
  const RunOptions noiseless{true, fault};

  out.push_back(timed("ucec interference neutralization", [&](CheckResult& r) {
    double worst = 0.0;
    double worst_zeroed = 0.0;
    for (std::size_t n : {1, 2}) {
      SystemConfig cfg{2, 2, 2, 3, n, 1e4, 1.0, 0};
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto trial = make_trial(cfg, ucec_block_length(2, n), seed);
        Stream ch(seeding::derive(seed, "channel"));
        Stream noise(seeding::derive(seed, "noise"));
        const auto tr = run_ucec(cfg, trial.fam, trial.block, ch, noise, noiseless);
        worst = std::max(worst, neutralization_residual(tr, trial.fam, trial.block));

        for (auto& v : trial.block.vectors[0]) v.setZero();
        Stream ch2(seeding::derive(seed, "channel"));
        const auto tz = run_ucec(cfg, trial.fam, trial.block, ch2, noise, noiseless);
        double own = 0.0;
        double other = 0.0;
        for (const auto& blk : tz.blocks) {
          for (const auto& y : blk.received) {
            own = std::max(own, std::abs(y(0)));
            other = std::max(other, std::abs(y(1)));
          }
        }
        worst_zeroed = std::max(worst_zeroed, other > 0 ? own / other : own);
      }
    }
    r.passed = worst <= 1e-8 && worst_zeroed <= 1e-8;
    r.detail = "max relative residual " + std::to_string(worst) +
               ", zeroed-user leakage " + std::to_string(worst_zeroed);
  }));

  out.push_back(timed("load accounting", [&](CheckResult& r) {
    bool ok = true;
    std::string detail;
    const auto expect = [&](const std::string& what, const LoadPair& got, Rational rr,
                            Rational ll) {
      if (got.computation != rr || got.communication != ll) {
        ok = false;
        detail += what + " got (" + to_string(got.computation) + ", " +
                  to_string(got.communication) + "); ";
      }
    };
    const auto run = [](const std::string& tag, const SystemConfig& cfg, std::size_t f) {
      auto trial = make_trial(cfg, f, 1);
      Stream ch(11), noise(12);
      return compute_loads(scheme_by_tag(tag).run(cfg, trial.fam, trial.block, ch, noise,
                                                  RunOptions{true, Fault::kNone}));
    };
    for (auto [k, n] : {std::pair<std::size_t, std::size_t>{1, 1}, {1, 3}, {2, 1}, {2, 2}}) {
      SystemConfig cfg{k, k, 2, 2, n, 1e4, 1.0, 0};
      std::int64_t num = 1;
      std::int64_t den = 1;
      for (std::size_t j = 0; j < k * k; ++j) {
        num *= static_cast<std::int64_t>(n + 1);
        den *= static_cast<std::int64_t>(n);
      }
      expect("ucec K=" + std::to_string(k) + " N=" + std::to_string(n),
             run("ucec", cfg, ucec_block_length(k, n)), Rational(num, den), Rational(num, den));
    }
    SystemConfig two{2, 2, 3, 2, 1, 1e4, 1.0, 0};
    expect("zf-ready", run("zf-ready", two, 1), 1, 1);
    expect("ain22", run("ain22", two, 3), 1, Rational(4, 3));
    for (std::size_t k = 1; k <= 3; ++k) {
      SystemConfig cfg{k, k, 2, 2, 1, 1e4, 1.0, 0};
      expect("tdma K=" + std::to_string(k), run("tdma", cfg, 2), 1,
             static_cast<std::int64_t>(k));
    }
    r.passed = ok;
    r.detail = ok ? "all exact" : detail;
  }));

  out.push_back(timed("noiseless recovery, all schemes", [&](CheckResult& r) {
    double worst = 0.0;
    struct Case { std::string tag; SystemConfig cfg; std::size_t f; };
    const std::vector<Case> cases{
        {"ucec", {2, 2, 2, 3, 2, 1e4, 1.0, 0}, 16},
        {"zf-ready", {2, 2, 3, 3, 1, 1e4, 1.0, 0}, 1},
        {"ain22", {2, 2, 3, 3, 1, 1e4, 1.0, 0}, 3},
        {"tdma", {3, 2, 2, 3, 1, 1e4, 1.0, 0}, 2},
        {"partitioned-ucec", {3, 2, 2, 3, 1, 1e4, 1.0, 0}, 1},
    };
    for (const auto& c : cases) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto trial = make_trial(c.cfg, c.f, seed);
        Stream ch(seeding::derive(seed, "channel"));
        Stream noise(seeding::derive(seed, "noise"));
        const auto tr = scheme_by_tag(c.tag).run(c.cfg, trial.fam, trial.block, ch, noise,
                                                 noiseless);
        worst = std::max(worst, max_relative_error(tr.decoded, ground_truth(trial.fam, trial.block)));
      }
    }
    r.passed = worst <= 1e-6;
    r.detail = "max relative error " + std::to_string(worst);
  }));

  if (level == VerifyLevel::kFull) {
    const std::vector<double> powers{1e2, 1e4, 1e6};
    const auto slope_check = [&](const std::string& tag, std::size_t f, Fault slope_fault) {
      SystemConfig cfg{2, 2, 2, 2, 1, 1e4, 1.0, 0};
      const DistortionSetup setup{scheme_by_tag(tag), cfg, f, {false, slope_fault}};
      return dof_slope(setup, powers, 200, SeedSchedule(2024)).slope;
    };
    out.push_back(timed("dof slope ucec K=2 N=1", [&](CheckResult& r) {
      const double s = slope_check("ucec", 1, fault);
      r.passed = s >= 0.85 && s <= 1.1;
      r.detail = "slope " + std::to_string(s);
    }));
    out.push_back(timed("dof slope zf-ready K=2", [&](CheckResult& r) {
      const double s = slope_check("zf-ready", 1, Fault::kNone);
      r.passed = s >= 0.85 && s <= 1.1;
      r.detail = "slope " + std::to_string(s);
    }));
    out.push_back(timed("dof slope negative control", [&](CheckResult& r) {
      const double s = slope_check("ucec", 1, Fault::kLeakCrossTerm);
      r.passed = s < 0.5;
      r.detail = "slope " + std::to_string(s);
    }));
  }
  return out;
}

}  // namespace ucec
