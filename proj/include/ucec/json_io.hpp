#pragma once

// JSON debug dumps. Matrices are {"rows", "cols", "data"} with data in
// row-major order; doubles round-trip exactly.

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "ucec/channel.hpp"
#include "ucec/model.hpp"
#include "ucec/transcript.hpp"
#include "ucec/ucec.hpp"

namespace ucec::io {

using nlohmann::json;

inline json matrix_to_json(const RealMatrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline RealMatrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw DimensionMismatch("matrix JSON: data length != rows * cols");
  }
  RealMatrix m(rows, cols);
  std::size_t n = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[n++];
  }
  return m;
}

inline std::vector<double> vector_to_std(const RealVector& v) {
  return {v.data(), v.data() + v.size()};
}

inline RealVector vector_from_std(const std::vector<double>& v) {
  return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json vectors_to_json(const std::vector<RealVector>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vector_to_std(v));
  return out;
}

inline json dataset_to_json(const Dataset& ds) { return {{"A", matrix_to_json(ds.matrix)}}; }

inline Dataset dataset_from_json(const json& j) { return {matrix_from_json(j.at("A"))}; }

inline json inputs_to_json(const InputBlock& blk) {
  json users = json::array();
  for (const auto& user : blk.vectors) users.push_back(vectors_to_json(user));
  return {{"F", blk.block_length}, {"Q", blk.input_dim}, {"inputs", users}};
}

inline InputBlock inputs_from_json(const json& j) {
  InputBlock blk{j.at("F").get<std::size_t>(), j.at("Q").get<std::size_t>(), {}};
  for (const auto& user : j.at("inputs")) {
    std::vector<RealVector> vs;
    for (const auto& v : user) {
      vs.push_back(vector_from_std(v.get<std::vector<double>>()));
      if (static_cast<std::size_t>(vs.back().size()) != blk.input_dim) {
        throw DimensionMismatch("inputs JSON: vector length != Q");
      }
    }
    if (vs.size() != blk.block_length) throw DimensionMismatch("inputs JSON: count != F");
    blk.vectors.push_back(std::move(vs));
  }
  return blk;
}

/// {"T", "K", "M", "gains": [[row-major K*M] per slot]}
inline json channel_to_json(const ChannelRealization& ch) {
  json gains = json::array();
  for (const auto& h : ch.gains) gains.push_back(matrix_to_json(h).at("data"));
  return {{"T", ch.slots()}, {"K", ch.users}, {"M", ch.nodes}, {"redraws", ch.redraws},
          {"gains", gains}};
}

inline ChannelRealization channel_from_json(const json& j) {
  ChannelRealization ch;
  ch.users = j.at("K").get<std::size_t>();
  ch.nodes = j.at("M").get<std::size_t>();
  ch.redraws = j.value("redraws", std::size_t{0});
  const auto slots = j.at("T").get<std::size_t>();
  for (const auto& g : j.at("gains")) {
    ch.gains.push_back(matrix_from_json(
        {{"rows", ch.users}, {"cols", ch.nodes}, {"data", g}}));
  }
  if (ch.gains.size() != slots) throw DimensionMismatch("channel JSON: slot count != T");
  return ch;
}

inline json table_to_json(const OutputTable& t) {
  return {{"K", t.users()}, {"F", t.block_length()}, {"B", t.outputs()},
          {"values", t.values()}};
}

inline json transcript_to_json(const SchemeTranscript& tr) {
  json slots = json::array();
  for (const auto& h : tr.channel_slots) slots.push_back(matrix_to_json(h).at("data"));
  return {{"scheme", tr.scheme},
          {"K", tr.users},
          {"F", tr.block_length},
          {"B", tr.outputs},
          {"functions_computed", tr.functions_computed},
          {"slots_used", tr.slots_used},
          {"computation_artifacts", tr.computation_artifacts},
          {"channel", slots},
          {"X", vectors_to_json(tr.transmitted)},
          {"Y", vectors_to_json(tr.received)},
          {"gamma", tr.gammas},
          {"condition_numbers", tr.condition_numbers},
          {"channel_redraws", tr.channel_redraws},
          {"decoded", table_to_json(tr.decoded)}};
}

/// Adds the coded-result tensor [m][b][flat p] and per-function blocks to the
/// generic transcript.
inline json ucec_transcript_to_json(const UcecTranscript& tr) {
  json j = transcript_to_json(tr.summary());
  j["N"] = tr.config.direction_n;
  j["coded_results"] = tr.computation.coded_results;
  json blocks = json::array();
  for (std::size_t b = 0; b < tr.blocks.size(); ++b) {
    const auto& blk = tr.blocks[b];
    blocks.push_back({{"b", b},
                      {"gamma", blk.gamma},
                      {"condition", blk.condition},
                      {"channel", channel_to_json(blk.channel)},
                      {"X", vectors_to_json(blk.transmitted)},
                      {"Y", vectors_to_json(blk.received)}});
  }
  j["blocks"] = blocks;
  return j;
}

}  // namespace ucec::io
