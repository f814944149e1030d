#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucec/baselines.hpp"
#include "ucec/model.hpp"
#include "ucec/transcript.hpp"
#include "ucec/ucec.hpp"

namespace ucec {

using SchemeRunner = std::function<SchemeTranscript(
    const SystemConfig&, const LinearFunctionFamily&, const InputBlock&, Stream& channel,
    Stream& noise, const RunOptions&)>;

struct Scheme {
  std::string tag;
  SchemeRunner run;
};

inline const std::vector<std::string>& scheme_tags() {
  static const std::vector<std::string> tags{"ucec", "zf-ready", "ain22", "tdma",
                                             "partitioned-ucec"};
  return tags;
}

inline Scheme scheme_by_tag(std::string_view tag) {
  if (tag == "ucec") {
    return {"ucec", [](const SystemConfig& cfg, const LinearFunctionFamily& fam,
                       const InputBlock& blk, Stream& ch, Stream& noise,
                       const RunOptions& o) {
              return run_ucec(cfg, fam, blk, ch, noise, o).summary();
            }};
  }
  if (tag == "zf-ready") return {"zf-ready", run_zf_ready};
  if (tag == "ain22") return {"ain22", run_ain22};
  if (tag == "tdma") return {"tdma", run_tdma};
  if (tag == "partitioned-ucec") return {"partitioned-ucec", run_partitioned_ucec};
  throw ConfigInvalid("unknown scheme '" + std::string(tag) +
                      "' (expected ucec, zf-ready, ain22, tdma or partitioned-ucec)");
}

/// Checks the scheme-specific constraints and returns the block length F the
/// scheme will consume. `requested` is an explicit F from the user, if any.
inline std::size_t validate_scheme_config(std::string_view tag, const SystemConfig& cfg,
                                          std::optional<std::size_t> requested = {}) {
  cfg.validate();
  const auto check_f = [&](std::size_t needed, const std::string& rule) {
    if (requested && *requested != needed) {
      throw ConfigInvalid(std::string(tag) + " requires " + rule + " = " +
                          std::to_string(needed) + ", got F=" +
                          std::to_string(*requested));
    }
    return needed;
  };
  if (tag == "ucec") {
    if (cfg.users != cfg.nodes) {
      throw ConfigInvalid("ucec requires K == M (got K=" + std::to_string(cfg.users) +
                          ", M=" + std::to_string(cfg.nodes) + ")");
    }
    try {
      lattice_size(cfg.users, cfg.direction_n + 1);
    } catch (const SizeOverflow& e) {
      throw ConfigInvalid(std::string("ucec lattice too large: ") + e.what());
    }
    return check_f(ucec_block_length(cfg.users, cfg.direction_n), "F = N^(K^2)");
  }
  if (tag == "zf-ready" || tag == "ain22") {
    if (cfg.users != 2 || cfg.nodes != 2) {
      throw ConfigInvalid(std::string(tag) + " requires K = M = 2 (got K=" +
                          std::to_string(cfg.users) + ", M=" + std::to_string(cfg.nodes) +
                          ")");
    }
    return tag == "ain22" ? check_f(3, "F") : check_f(1, "F");
  }
  if (tag == "tdma") {
    if (requested && *requested < 1) throw ConfigInvalid("tdma requires F >= 1");
    return requested.value_or(1);
  }
  if (tag == "partitioned-ucec") {
    const std::size_t largest = std::min(cfg.users, cfg.nodes);
    try {
      lattice_size(largest, cfg.direction_n + 1);
    } catch (const SizeOverflow& e) {
      throw ConfigInvalid(std::string("partitioned-ucec lattice too large: ") + e.what());
    }
    return check_f(partitioned_block_length(cfg.users, cfg.nodes, cfg.direction_n),
                   "F = N^(min(K,M)^2)");
  }
  scheme_by_tag(tag);  // throws with the list of known tags
  return 0;
}

}  // namespace ucec
