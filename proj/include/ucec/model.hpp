#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ucec/errors.hpp"
#include "ucec/numerics.hpp"
#include "ucec/rng.hpp"

namespace ucec {

/// K users offloading to M edge nodes, each user wanting B linear outputs of
/// Q-dimensional inputs. N only matters for the coded scheme.
struct SystemConfig {
  std::size_t users = 2;
  std::size_t nodes = 2;
  std::size_t outputs = 1;
  std::size_t input_dim = 1;
  std::size_t direction_n = 1;
  double power = 1e4;
  double noise_variance = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (users < 1 || nodes < 1 || outputs < 1 || input_dim < 1) {
      throw ConfigInvalid("users, nodes, outputs and input_dim must be >= 1");
    }
    if (direction_n < 1) throw ConfigInvalid("direction N must be >= 1");
    if (!(power > 0.0)) throw ConfigInvalid("power must be > 0");
  }
};

/// The B x Q matrix stored at every edge node.
struct Dataset {
  RealMatrix matrix;
};

inline Dataset generate_dataset(const SystemConfig& cfg, Stream& stream) {
  Dataset ds{RealMatrix(cfg.outputs, cfg.input_dim)};
  for (Eigen::Index r = 0; r < ds.matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < ds.matrix.cols(); ++c) {
      ds.matrix(r, c) = standard_normal(stream);
    }
  }
  return ds;
}

/// F input vectors per user. vectors[k][i] is d_k[i].
struct InputBlock {
  std::size_t block_length = 0;
  std::size_t input_dim = 0;
  std::vector<std::vector<RealVector>> vectors;

  [[nodiscard]] std::size_t users() const { return vectors.size(); }
  [[nodiscard]] const RealVector& at(std::size_t k, std::size_t i) const {
    return vectors.at(k).at(i);
  }

  /// Same block length and dimension, all entries zero.
  static InputBlock zeros(std::size_t users, std::size_t f, std::size_t q) {
    InputBlock blk{f, q, {}};
    blk.vectors.assign(users, std::vector<RealVector>(f, RealVector::Zero(q)));
    return blk;
  }
};

/// i.i.d. standard normal entries, drawn user-major then block index then
/// coordinate.
inline InputBlock generate_inputs(const SystemConfig& cfg, std::size_t block_length,
                                  Stream& stream) {
  if (block_length < 1) throw ConfigInvalid("block length must be >= 1");
  InputBlock blk{block_length, cfg.input_dim, {}};
  blk.vectors.resize(cfg.users);
  for (auto& user : blk.vectors) {
    user.reserve(block_length);
    for (std::size_t i = 0; i < block_length; ++i) {
      RealVector v(cfg.input_dim);
      for (Eigen::Index q = 0; q < v.size(); ++q) v(q) = standard_normal(stream);
      user.push_back(std::move(v));
    }
  }
  return blk;
}

/// phi_b(v) = a_b . v with a_b row b of the dataset.
class LinearFunctionFamily {
 public:
  explicit LinearFunctionFamily(Dataset ds) : ds_(std::move(ds)) {}

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(ds_.matrix.rows());
  }
  [[nodiscard]] std::size_t input_dim() const {
    return static_cast<std::size_t>(ds_.matrix.cols());
  }
  [[nodiscard]] const Dataset& dataset() const { return ds_; }

  [[nodiscard]] double evaluate(std::size_t b, const RealVector& v) const {
    if (b >= size()) {
      throw DimensionMismatch("function index " + std::to_string(b) +
                              " out of range (B=" + std::to_string(size()) + ")");
    }
    if (static_cast<std::size_t>(v.size()) != input_dim()) {
      throw DimensionMismatch("input dimension " + std::to_string(v.size()) +
                              " != Q=" + std::to_string(input_dim()));
    }
    return ds_.matrix.row(static_cast<Eigen::Index>(b)).dot(v);
  }

 private:
  Dataset ds_;
};

/// Dense (user, block index, function) table of reals. Holds ground truth,
/// decoded estimates and per-entry distortions alike.
class OutputTable {
 public:
  OutputTable() = default;
  OutputTable(std::size_t users, std::size_t block_length, std::size_t outputs,
              double fill = 0.0)
      : users_(users), block_(block_length), outputs_(outputs),
        data_(users * block_length * outputs, fill) {}

  [[nodiscard]] double& at(std::size_t k, std::size_t i, std::size_t b) {
    return data_.at(index(k, i, b));
  }
  [[nodiscard]] double at(std::size_t k, std::size_t i, std::size_t b) const {
    return data_.at(index(k, i, b));
  }

  [[nodiscard]] std::size_t users() const { return users_; }
  [[nodiscard]] std::size_t block_length() const { return block_; }
  [[nodiscard]] std::size_t outputs() const { return outputs_; }
  [[nodiscard]] const std::vector<double>& values() const { return data_; }
  [[nodiscard]] std::vector<double>& values() { return data_; }

  bool operator==(const OutputTable&) const = default;

 private:
  [[nodiscard]] std::size_t index(std::size_t k, std::size_t i, std::size_t b) const {
    if (k >= users_ || i >= block_ || b >= outputs_) {
      throw DimensionMismatch("output table index out of range");
    }
    return (k * block_ + i) * outputs_ + b;
  }

  std::size_t users_ = 0;
  std::size_t block_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> data_;
};

/// Uncoded direct evaluation; the reference every decoder is scored against.
inline OutputTable ground_truth(const LinearFunctionFamily& fam, const InputBlock& block) {
  OutputTable y(block.users(), block.block_length, fam.size());
  for (std::size_t k = 0; k < block.users(); ++k) {
    for (std::size_t i = 0; i < block.block_length; ++i) {
      for (std::size_t b = 0; b < fam.size(); ++b) {
        y.at(k, i, b) = fam.evaluate(b, block.at(k, i));
      }
    }
  }
  return y;
}

}  // namespace ucec
