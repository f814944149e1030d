#pragma once

// Reference schemes sharing the SchemeTranscript shape:
//   zf-ready          two users, channel known while computing; loads (1, 1)
//   ain22             two users, F = 3, channel-agnostic computing; (1, 4/3)
//   tdma              uncoded, one function per slot; (1, K)
//   partitioned-ucec  coded scheme on user groups of size <= M

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ucec/channel.hpp"
#include "ucec/model.hpp"
#include "ucec/numerics.hpp"
#include "ucec/transcript.hpp"
#include "ucec/ucec.hpp"

namespace ucec {

namespace detail {

inline double decode_scalar(double gain, double y) {
  RealMatrix a(1, 1);
  a(0, 0) = gain;
  RealVector rhs(1);
  rhs(0) = y;
  return numerics::solve_least_squares(a, rhs)(0);
}

inline void require_two_by_two(const SystemConfig& cfg, const char* scheme) {
  if (cfg.users != 2 || cfg.nodes != 2) {
    throw ConfigInvalid(std::string(scheme) + " needs K = M = 2");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// zero-forcing ready

/// s_[m][b] for slot t = b. Node 0 evaluates a_t.(-h22 d1 + h12 d2), node 1
/// a_t.(h21 d1 - h11 d2). Needs the slot-t channel up front.
inline std::vector<std::vector<double>> zf_ready_compute_phase(
    const LinearFunctionFamily& fam, const InputBlock& block, const ChannelRealization& ch) {
  if (block.users() != 2 || block.block_length != 1) {
    throw BlockSizeMismatch("zf-ready needs two users with F = 1");
  }
  if (ch.slots() != fam.size() || ch.users != 2 || ch.nodes != 2) {
    throw DimensionMismatch("zf-ready needs a 2x2 channel with B slots");
  }
  const RealVector& d1 = block.at(0, 0);
  const RealVector& d2 = block.at(1, 0);
  std::vector<std::vector<double>> s(2, std::vector<double>(fam.size()));
  for (std::size_t t = 0; t < fam.size(); ++t) {
    const RealMatrix& h = ch.gains[t];
    s[0][t] = fam.evaluate(t, -h(1, 1) * d1 + h(0, 1) * d2);
    s[1][t] = fam.evaluate(t, h(1, 0) * d1 - h(0, 0) * d2);
  }
  return s;
}

inline SchemeTranscript run_zf_ready(const SystemConfig& cfg, const LinearFunctionFamily& fam,
                                     const InputBlock& block, Stream& channel_stream,
                                     Stream& noise, const RunOptions& opts = {}) {
  detail::require_two_by_two(cfg, "zf-ready");
  const std::size_t slots = fam.size();
  const ChannelRealization ch = draw_channel(2, 2, slots, channel_stream);
  const auto s = zf_ready_compute_phase(fam, block, ch);

  SchemeTranscript tr;
  tr.scheme = "zf-ready";
  tr.users = 2;
  tr.block_length = 1;
  tr.outputs = fam.size();
  tr.functions_computed = 2 * slots;
  tr.slots_used = slots;
  tr.channel_slots = ch.gains;
  tr.channel_redraws = ch.redraws;

  std::vector<RealVector> u(slots, RealVector(2));
  for (std::size_t t = 0; t < slots; ++t) {
    u[t] << s[0][t], s[1][t];
    tr.computation_artifacts.push_back(s[0][t]);
    tr.computation_artifacts.push_back(s[1][t]);
  }
  const double gamma = power_factor(u, cfg.power);
  tr.gammas.push_back(gamma);
  for (auto& x : u) x *= gamma;
  tr.transmitted = u;
  tr.received = transmit(ch, tr.transmitted, noise, opts.noiseless);

  tr.decoded = OutputTable(2, 1, fam.size());
  for (std::size_t t = 0; t < slots; ++t) {
    const double effective = -gamma * ch.gains[t].determinant();
    for (std::size_t k = 0; k < 2; ++k) {
      tr.decoded.at(k, 0, t) = detail::decode_scalar(effective, tr.received[t](k));
    }
    tr.condition_numbers.push_back(1.0);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// two-user aligned interference neutralization, F = 3

/// One half of the scheme: the "primary" user gets two outputs (positions
/// first, second), the "secondary" user one (position third).
struct Ain22Roles {
  std::size_t primary;
  std::size_t secondary;
  std::size_t first;
  std::size_t second;
  std::size_t third;
};

inline constexpr Ain22Roles kAin22Halves[2] = {
    {0, 1, 0, 1, 0},  // user 1 receives d1[1], d1[2]; user 2 receives d2[1]
    {1, 0, 1, 2, 2},  // roles swapped: d2[2], d2[3] to user 2; d1[3] to user 1
};

/// Node 0 holds L_a = dP[first], L_b = dP[second] + dS[third]; node 1 holds
/// L_c = dP[first] + dS[third]. Values are [half][b] -> (s_a, s_b, s_c).
struct Ain22Computation {
  std::vector<std::vector<std::array<double, 3>>> results;
  std::uint64_t functions_computed = 0;
};

inline Ain22Computation ain22_compute_phase(const LinearFunctionFamily& fam,
                                            const InputBlock& block) {
  if (block.users() != 2 || block.block_length != 3) {
    throw BlockSizeMismatch("ain22 needs two users with F = 3");
  }
  Ain22Computation comp;
  for (const auto& role : kAin22Halves) {
    const RealVector& pa = block.at(role.primary, role.first);
    const RealVector& pb = block.at(role.primary, role.second);
    const RealVector& sc = block.at(role.secondary, role.third);
    const RealVector la = pa;
    const RealVector lb = pb + sc;
    const RealVector lc = pa + sc;
    std::vector<std::array<double, 3>> per_b(fam.size());
    for (std::size_t b = 0; b < fam.size(); ++b) {
      per_b[b] = {fam.evaluate(b, la), fam.evaluate(b, lb), fam.evaluate(b, lc)};
      comp.functions_computed += 3;
    }
    comp.results.push_back(std::move(per_b));
  }
  return comp;
}

/// Transmit directions over a 2-slot block: v2 = (1, 1) and the two
/// zero-forcing constraints H_P1 v12 = -H_P2 v2, H_S1 v11 = -H_S2 v2 solved
/// slot-wise (the per-link matrices are diagonal across slots).
struct Ain22Directions {
  RealVector v11 = RealVector::Zero(2);
  RealVector v12 = RealVector::Zero(2);
  RealVector v2 = RealVector::Ones(2);
};

inline Ain22Directions ain22_directions(const ChannelRealization& ch, const Ain22Roles& role) {
  Ain22Directions v;
  for (Eigen::Index t = 0; t < 2; ++t) {
    const RealMatrix& h = ch.gains[static_cast<std::size_t>(t)];
    const auto P = static_cast<Eigen::Index>(role.primary);
    const auto S = static_cast<Eigen::Index>(role.secondary);
    v.v12(t) = -h(P, 1) * v.v2(t) / h(P, 0);
    v.v11(t) = -h(S, 1) * v.v2(t) / h(S, 0);
  }
  return v;
}

inline SchemeTranscript run_ain22(const SystemConfig& cfg, const LinearFunctionFamily& fam,
                                  const InputBlock& block, Stream& channel_stream,
                                  Stream& noise, const RunOptions& opts = {}) {
  detail::require_two_by_two(cfg, "ain22");
  const Ain22Computation comp = ain22_compute_phase(fam, block);

  SchemeTranscript tr;
  tr.scheme = "ain22";
  tr.users = 2;
  tr.block_length = 3;
  tr.outputs = fam.size();
  tr.functions_computed = comp.functions_computed;
  tr.decoded = OutputTable(2, 3, fam.size());
  for (const auto& half : comp.results) {
    for (const auto& s : half) {
      tr.computation_artifacts.insert(tr.computation_artifacts.end(), s.begin(), s.end());
    }
  }

  for (std::size_t h = 0; h < 2; ++h) {
    const Ain22Roles& role = kAin22Halves[h];
    const auto P = static_cast<Eigen::Index>(role.primary);
    const auto S = static_cast<Eigen::Index>(role.secondary);
    for (std::size_t b = 0; b < fam.size(); ++b) {
      const ChannelRealization ch = draw_channel(2, 2, 2, channel_stream);
      const Ain22Directions v = ain22_directions(ch, role);
      const auto& [sa, sb, sc] = comp.results[h][b];

      std::vector<RealVector> u(2, RealVector(2));
      for (Eigen::Index t = 0; t < 2; ++t) {
        u[static_cast<std::size_t>(t)] << v.v11(t) * sa + v.v12(t) * sb, v.v2(t) * sc;
      }
      const double gamma = power_factor(u, cfg.power);
      for (auto& x : u) x *= gamma;
      const auto y = transmit(ch, u, noise, opts.noiseless);

      RealMatrix a_primary(2, 2);
      RealMatrix a_secondary(2, 2);
      RealVector y_primary(2);
      RealVector y_secondary(2);
      for (Eigen::Index t = 0; t < 2; ++t) {
        const RealMatrix& g = ch.gains[static_cast<std::size_t>(t)];
        a_primary(t, 0) = gamma * (g(P, 0) * v.v11(t) + g(P, 1) * v.v2(t));
        a_primary(t, 1) = gamma * g(P, 0) * v.v12(t);
        a_secondary(t, 0) = gamma * g(S, 0) * v.v12(t);
        a_secondary(t, 1) = gamma * (g(S, 0) * v.v12(t) + g(S, 1) * v.v2(t));
        y_primary(t) = y[static_cast<std::size_t>(t)](P);
        y_secondary(t) = y[static_cast<std::size_t>(t)](S);
      }
      const numerics::LeastSquaresSolver primary(a_primary);
      const numerics::LeastSquaresSolver secondary(a_secondary);
      const RealVector est_p = primary.solve(y_primary);
      const RealVector est_s = secondary.solve(y_secondary);  // (nuisance, wanted)
      tr.decoded.at(role.primary, role.first, b) = est_p(0);
      tr.decoded.at(role.primary, role.second, b) = est_p(1);
      tr.decoded.at(role.secondary, role.third, b) = est_s(1);

      tr.condition_numbers.push_back(primary.condition());
      tr.condition_numbers.push_back(secondary.condition());
      tr.gammas.push_back(gamma);
      tr.channel_redraws += ch.redraws;
      tr.channel_slots.insert(tr.channel_slots.end(), ch.gains.begin(), ch.gains.end());
      tr.transmitted.insert(tr.transmitted.end(), u.begin(), u.end());
      tr.received.insert(tr.received.end(), y.begin(), y.end());
      tr.slots_used += 2;
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// TDMA

inline std::size_t tdma_node(std::size_t user, std::size_t nodes) { return user % nodes; }

/// Each phi_b(d_k[i]) computed once at node k mod M and sent alone in its
/// own slot, slots ordered by (k, i, b).
inline SchemeTranscript run_tdma(const SystemConfig& cfg, const LinearFunctionFamily& fam,
                                 const InputBlock& block, Stream& channel_stream,
                                 Stream& noise, const RunOptions& opts = {}) {
  const std::size_t K = cfg.users;
  const std::size_t M = cfg.nodes;
  const std::size_t F = block.block_length;
  const std::size_t B = fam.size();
  if (block.users() != K) throw BlockSizeMismatch("tdma: block has wrong user count");

  SchemeTranscript tr;
  tr.scheme = "tdma";
  tr.users = K;
  tr.block_length = F;
  tr.outputs = B;
  std::vector<RealVector> u;
  u.reserve(K * F * B);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < F; ++i) {
      for (std::size_t b = 0; b < B; ++b) {
        const double s = fam.evaluate(b, block.at(k, i));
        ++tr.functions_computed;
        tr.computation_artifacts.push_back(s);
        RealVector x = RealVector::Zero(static_cast<Eigen::Index>(M));
        x(static_cast<Eigen::Index>(tdma_node(k, M))) = s;
        u.push_back(std::move(x));
      }
    }
  }
  const ChannelRealization ch = draw_channel(K, M, u.size(), channel_stream);
  const double gamma = power_factor(u, cfg.power);
  for (auto& x : u) x *= gamma;
  tr.gammas.push_back(gamma);
  tr.transmitted = u;
  tr.received = transmit(ch, u, noise, opts.noiseless);
  tr.channel_slots = ch.gains;
  tr.channel_redraws = ch.redraws;
  tr.slots_used = u.size();
  tr.decoded = OutputTable(K, F, B);

  std::size_t t = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto node = static_cast<Eigen::Index>(tdma_node(k, M));
    for (std::size_t i = 0; i < F; ++i) {
      for (std::size_t b = 0; b < B; ++b, ++t) {
        const double gain = gamma * ch.gains[t](static_cast<Eigen::Index>(k), node);
        tr.decoded.at(k, i, b) =
            detail::decode_scalar(gain, tr.received[t](static_cast<Eigen::Index>(k)));
        tr.condition_numbers.push_back(1.0);
      }
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// coded scheme on user partitions

/// Group sizes: one group of K when M >= K, else groups of M followed by a
/// final group of K mod M when that is nonzero.
inline std::vector<std::size_t> user_partitions(std::size_t users, std::size_t nodes) {
  if (nodes >= users) return {users};
  std::vector<std::size_t> sizes(users / nodes, nodes);
  if (users % nodes != 0) sizes.push_back(users % nodes);
  return sizes;
}

/// Shared block length N^(m^2) of the largest group; smaller groups repeat
/// the coded scheme until they have covered it.
inline std::size_t partitioned_block_length(std::size_t users, std::size_t nodes,
                                            std::size_t n) {
  return ucec_block_length(std::min(users, nodes), n);
}

inline SchemeTranscript run_partitioned_ucec(const SystemConfig& cfg,
                                             const LinearFunctionFamily& fam,
                                             const InputBlock& block,
                                             Stream& channel_stream, Stream& noise,
                                             const RunOptions& opts = {}) {
  const std::size_t F = partitioned_block_length(cfg.users, cfg.nodes, cfg.direction_n);
  if (block.block_length != F || block.users() != cfg.users) {
    throw BlockSizeMismatch("partitioned-ucec needs F = N^(min(K,M)^2) = " +
                            std::to_string(F));
  }

  SchemeTranscript tr;
  tr.scheme = "partitioned-ucec";
  tr.users = cfg.users;
  tr.block_length = F;
  tr.outputs = fam.size();
  tr.decoded = OutputTable(cfg.users, F, fam.size());

  std::size_t first_user = 0;
  for (std::size_t group : user_partitions(cfg.users, cfg.nodes)) {
    SystemConfig sub = cfg;
    sub.users = group;
    sub.nodes = group;
    const std::size_t native = ucec_block_length(group, cfg.direction_n);
    for (std::size_t rep = 0; rep < F / native; ++rep) {
      InputBlock part{native, block.input_dim, {}};
      for (std::size_t k = 0; k < group; ++k) {
        const auto& src = block.vectors[first_user + k];
        part.vectors.emplace_back(src.begin() + static_cast<std::ptrdiff_t>(rep * native),
                                  src.begin() + static_cast<std::ptrdiff_t>((rep + 1) * native));
      }
      const SchemeTranscript s =
          run_ucec(sub, fam, part, channel_stream, noise, opts).summary();
      tr.functions_computed += s.functions_computed;
      tr.slots_used += s.slots_used;
      tr.channel_redraws += s.channel_redraws;
      const auto append = [](auto& dst, const auto& src) {
        dst.insert(dst.end(), src.begin(), src.end());
      };
      append(tr.computation_artifacts, s.computation_artifacts);
      append(tr.channel_slots, s.channel_slots);
      append(tr.transmitted, s.transmitted);
      append(tr.received, s.received);
      append(tr.gammas, s.gammas);
      append(tr.condition_numbers, s.condition_numbers);
      for (std::size_t k = 0; k < group; ++k) {
        for (std::size_t i = 0; i < native; ++i) {
          for (std::size_t b = 0; b < fam.size(); ++b) {
            tr.decoded.at(first_user + k, rep * native + i, b) = s.decoded.at(k, i, b);
          }
        }
      }
    }
    first_user += group;
  }
  return tr;
}

}  // namespace ucec
