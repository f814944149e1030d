#pragma once

// Universal coded edge computing for K users and K edge nodes.
//
// Computation phase: node m forms, for every p in the (N+1)-lattice, the
// coded input L_m^p = sum_k d_k^{p - e_km} (terms leaving the N-lattice are
// dropped) and evaluates every output function on it. No channel is
// involved, so these results can be produced long before transmission.
//
// Communication phase, per function b over d = (N+1)^(K^2) slots:
//   X_m(t) = gamma * sum_p Q(t)^p s_mb^p,  Q(t)^p = prod b_km(t)^p_km,
// which after the channel collapses to
//   Y_k(t) = gamma * sum_{q in N-lattice} Q(t)^q phi_b(d_k^q) + Z_k(t),
// i.e. interference from other users cancels over the air. User k then
// least-squares-solves the d x N^(K^2) system for its own outputs.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ucec/channel.hpp"
#include "ucec/directions.hpp"
#include "ucec/model.hpp"
#include "ucec/numerics.hpp"
#include "ucec/transcript.hpp"

namespace ucec {

/// N^(K^2): the block length the coded scheme consumes per user.
inline std::size_t ucec_block_length(std::size_t users, std::size_t n) {
  return lattice_size(users, n);
}

/// (N+1)^(K^2): slots per function and coded inputs per node.
inline std::size_t ucec_slots_per_function(std::size_t users, std::size_t n) {
  return lattice_size(users, n + 1);
}

struct UcecComputation {
  std::size_t users = 0;
  std::size_t direction_n = 0;
  std::size_t outputs = 0;
  std::vector<DirectionIndex> directions;                      // (N+1)-lattice
  std::vector<std::vector<RealVector>> coded_inputs;           // [m][p]
  std::vector<std::vector<std::vector<double>>> coded_results; // [m][b][p]
  std::uint64_t functions_computed = 0;
};

struct UcecBlock {
  ChannelRealization channel;
  double gamma = 0.0;
  std::vector<RealVector> transmitted;
  std::vector<RealVector> received;
  double condition = 0.0;
};

struct UcecTranscript {
  SystemConfig config;
  UcecComputation computation;
  std::vector<UcecBlock> blocks;  // one per output function
  OutputTable decoded;
  std::uint64_t functions_computed = 0;
  std::uint64_t slots_used = 0;

  [[nodiscard]] SchemeTranscript summary() const {
    SchemeTranscript s;
    s.scheme = "ucec";
    s.users = config.users;
    s.block_length = decoded.block_length();
    s.outputs = config.outputs;
    s.functions_computed = functions_computed;
    s.slots_used = slots_used;
    for (const auto& per_node : computation.coded_results) {
      for (const auto& per_b : per_node) {
        s.computation_artifacts.insert(s.computation_artifacts.end(), per_b.begin(),
                                       per_b.end());
      }
    }
    for (const auto& blk : blocks) {
      s.channel_slots.insert(s.channel_slots.end(), blk.channel.gains.begin(),
                             blk.channel.gains.end());
      s.transmitted.insert(s.transmitted.end(), blk.transmitted.begin(),
                           blk.transmitted.end());
      s.received.insert(s.received.end(), blk.received.begin(), blk.received.end());
      s.gammas.push_back(blk.gamma);
      s.condition_numbers.push_back(blk.condition);
      s.channel_redraws += blk.channel.redraws;
    }
    s.decoded = decoded;
    return s;
  }
};

/// Coded inputs and results for every node and (N+1)-lattice direction.
/// Takes no channel argument: the phase is channel-agnostic by signature.
inline UcecComputation compute_phase(const SystemConfig& cfg,
                                     const LinearFunctionFamily& fam,
                                     const InputBlock& block) {
  const std::size_t K = cfg.users;
  const std::size_t n = cfg.direction_n;
  if (cfg.nodes != K) {
    throw ConfigInvalid("ucec needs K == M (got K=" + std::to_string(K) +
                        ", M=" + std::to_string(cfg.nodes) + ")");
  }
  const std::size_t f = ucec_block_length(K, n);
  if (block.block_length != f || block.users() != K) {
    throw BlockSizeMismatch("ucec needs F = N^(K^2) = " + std::to_string(f) +
                            " inputs per user, got " +
                            std::to_string(block.block_length));
  }

  UcecComputation comp;
  comp.users = K;
  comp.direction_n = n;
  comp.outputs = fam.size();
  comp.directions = enumerate_lattice(K, n + 1);
  const std::size_t d = comp.directions.size();
  comp.coded_inputs.assign(K, std::vector<RealVector>(d, RealVector::Zero(block.input_dim)));
  comp.coded_results.assign(K, std::vector<std::vector<double>>(
                                   fam.size(), std::vector<double>(d, 0.0)));

  for (std::size_t m = 0; m < K; ++m) {
    for (std::size_t j = 0; j < d; ++j) {
      RealVector& coded = comp.coded_inputs[m][j];
      for (std::size_t k = 0; k < K; ++k) {
        if (auto src = decrement(comp.directions[j], k, m)) {
          coded += block.at(k, flat_index(*src));
        }
      }
      for (std::size_t b = 0; b < fam.size(); ++b) {
        comp.coded_results[m][b][j] = fam.evaluate(b, coded);
        ++comp.functions_computed;
      }
    }
  }
  return comp;
}

namespace detail {

/// Per-slot table of Q(t)^p over a lattice, built from a power table so each
/// entry costs K^2 multiplications.
inline std::vector<double> monomials(const CsiView& csi, std::size_t t,
                                     std::span<const DirectionIndex> lattice,
                                     int exponent_sign = 1) {
  const std::size_t K = csi.users();
  int max_exp = 0;
  for (const auto& p : lattice) {
    for (int c : p.coords) max_exp = std::max(max_exp, c);
  }
  std::vector<std::vector<double>> powers(K * K, std::vector<double>(max_exp + 1, 1.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < K; ++m) {
      const double base = exponent_sign > 0 ? csi.b(t, k, m) : 1.0 / csi.b(t, k, m);
      for (int e = 1; e <= max_exp; ++e) {
        powers[k * K + m][e] = powers[k * K + m][e - 1] * base;
      }
    }
  }
  std::vector<double> out(lattice.size(), 1.0);
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    double q = 1.0;
    for (std::size_t c = 0; c < K * K; ++c) q *= powers[c][lattice[j].coords[c]];
    out[j] = q;
  }
  return out;
}

inline CsiView faulty_transmit_csi(const ChannelRealization& ch, const CsiView& csi,
                                   Fault fault) {
  CsiView tx = csi;
  if (fault == Fault::kLeakCrossTerm && csi.users() >= 2) {
    for (std::size_t t = 0; t < ch.slots(); ++t) {
      RealMatrix inv = csi.inverse(t);
      inv(1, 0) = 0.0;  // b_12
      tx.override_inverse(t, std::move(inv));
    }
  }
  return tx;
}

}  // namespace detail

/// Transmit symbols and receptions for function `b` over one d-slot channel.
/// Leaves `condition` unset; decode() fills it.
inline UcecBlock communicate_phase(const UcecComputation& comp, const ChannelRealization& ch,
                                   const CsiView& csi, std::size_t b, double power,
                                   Stream& noise, const RunOptions& opts = {}) {
  const std::size_t K = comp.users;
  const std::size_t d = comp.directions.size();
  if (ch.slots() != d || csi.slots() != d || ch.users != K || ch.nodes != K) {
    throw DimensionMismatch("communicate_phase: channel must be " + std::to_string(K) +
                            "x" + std::to_string(K) + " over " + std::to_string(d) +
                            " slots");
  }
  if (b >= comp.outputs) throw DimensionMismatch("communicate_phase: b out of range");

  const CsiView tx_csi = detail::faulty_transmit_csi(ch, csi, opts.fault);
  const int sign = opts.fault == Fault::kFlipExponentSign ? -1 : 1;

  std::vector<RealVector> u(d, RealVector::Zero(K));
  for (std::size_t t = 0; t < d; ++t) {
    const auto q = detail::monomials(tx_csi, t, comp.directions, sign);
    for (std::size_t m = 0; m < K; ++m) {
      const auto& s = comp.coded_results[m][b];
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += q[j] * s[j];
      u[t](m) = acc;
    }
  }

  UcecBlock blk;
  blk.channel = ch;
  blk.gamma = power_factor(u, power);
  blk.transmitted = std::move(u);
  for (auto& x : blk.transmitted) x *= blk.gamma;
  blk.received = transmit(ch, blk.transmitted, noise, opts.noiseless);
  return blk;
}

struct UcecDecode {
  std::vector<RealVector> estimates;  // [k], indexed by N-lattice flat index
  double condition = 0.0;
};

/// Least-squares recovery of phi_b(d_k^q), q in the N-lattice, for every
/// user from its d received symbols. The coefficient matrix
/// gamma * Q(t)^q is shared by all users, so it is factored once.
inline UcecDecode decode(std::span<const RealVector> received, const CsiView& csi,
                         double gamma, std::size_t direction_n) {
  const std::size_t K = csi.users();
  const auto unknowns = enumerate_lattice(K, direction_n);
  const std::size_t d = received.size();
  if (csi.slots() != d) throw DimensionMismatch("decode: CSI and reception lengths differ");

  RealMatrix coeff(d, unknowns.size());
  for (std::size_t t = 0; t < d; ++t) {
    const auto q = detail::monomials(csi, t, unknowns);
    for (std::size_t j = 0; j < q.size(); ++j) {
      coeff(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = gamma * q[j];
    }
  }
  const numerics::LeastSquaresSolver solver(coeff);

  UcecDecode out;
  out.condition = solver.condition();
  for (std::size_t k = 0; k < K; ++k) {
    RealVector yk(d);
    for (std::size_t t = 0; t < d; ++t) yk(static_cast<Eigen::Index>(t)) = received[t](k);
    out.estimates.push_back(solver.solve(yk));
  }
  return out;
}

/// Full run over pre-drawn channels, one realization of d slots per function.
inline UcecTranscript run_ucec_with_channels(const SystemConfig& cfg,
                                             const LinearFunctionFamily& fam,
                                             const InputBlock& block,
                                             std::span<const ChannelRealization> channels,
                                             Stream& noise, const RunOptions& opts = {}) {
  if (channels.size() != fam.size()) {
    throw DimensionMismatch("ucec: need one channel realization per output function");
  }
  UcecTranscript tr;
  tr.config = cfg;
  tr.computation = compute_phase(cfg, fam, block);
  tr.functions_computed = tr.computation.functions_computed;
  tr.decoded = OutputTable(cfg.users, block.block_length, fam.size());

  for (std::size_t b = 0; b < fam.size(); ++b) {
    const CsiView csi(channels[b]);
    UcecBlock blk = communicate_phase(tr.computation, channels[b], csi, b, cfg.power,
                                      noise, opts);
    if (opts.skip_decode) {
      blk.condition = std::numeric_limits<double>::quiet_NaN();
      tr.slots_used += blk.transmitted.size();
      tr.blocks.push_back(std::move(blk));
      continue;
    }
    const UcecDecode dec = decode(blk.received, csi, blk.gamma, cfg.direction_n);
    blk.condition = dec.condition;
    for (std::size_t k = 0; k < cfg.users; ++k) {
      for (std::size_t i = 0; i < block.block_length; ++i) {
        tr.decoded.at(k, i, b) = dec.estimates[k](static_cast<Eigen::Index>(i));
      }
    }
    tr.slots_used += blk.transmitted.size();
    tr.blocks.push_back(std::move(blk));
  }
  return tr;
}

/// Draws a fresh d-slot channel per output function, then runs.
inline UcecTranscript run_ucec(const SystemConfig& cfg, const LinearFunctionFamily& fam,
                               const InputBlock& block, Stream& channel_stream,
                               Stream& noise, const RunOptions& opts = {}) {
  if (cfg.nodes != cfg.users) throw ConfigInvalid("ucec needs K == M");
  const std::size_t d = ucec_slots_per_function(cfg.users, cfg.direction_n);
  std::vector<ChannelRealization> channels;
  channels.reserve(fam.size());
  for (std::size_t b = 0; b < fam.size(); ++b) {
    channels.push_back(draw_channel(cfg.users, cfg.users, d, channel_stream));
  }
  return run_ucec_with_channels(cfg, fam, block, channels, noise, opts);
}

}  // namespace ucec
