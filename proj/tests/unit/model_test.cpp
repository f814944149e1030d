#include <cmath>

#include <gtest/gtest.h>

#include "ucec/model.hpp"

namespace ucec {
namespace {

SystemConfig config(std::size_t k, std::size_t b, std::size_t q) {
  SystemConfig cfg;
  cfg.users = k;
  cfg.nodes = k;
  cfg.outputs = b;
  cfg.input_dim = q;
  return cfg;
}

TEST(SystemConfig, Validation) {
  EXPECT_NO_THROW(config(2, 1, 1).validate());
  auto bad = config(0, 1, 1);
  EXPECT_THROW(bad.validate(), ConfigInvalid);
  bad = config(1, 1, 1);
  bad.power = 0.0;
  EXPECT_THROW(bad.validate(), ConfigInvalid);
  bad = config(1, 1, 1);
  bad.direction_n = 0;
  EXPECT_THROW(bad.validate(), ConfigInvalid);
}

TEST(GenerateInputs, ShapeAndDeterminism) {
  const auto cfg = config(2, 1, 4);
  Stream a(17), b(17);
  const InputBlock x = generate_inputs(cfg, 3, a);
  const InputBlock y = generate_inputs(cfg, 3, b);
  ASSERT_EQ(x.users(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    ASSERT_EQ(x.vectors[k].size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(x.at(k, i).size(), 4);
      EXPECT_EQ(x.at(k, i), y.at(k, i));
    }
  }
  EXPECT_THROW(generate_inputs(cfg, 0, a), ConfigInvalid);
}

TEST(GenerateInputs, SampleMeanNearZero) {
  // 1e5 entries; 5 sigma of the sample mean is 0.0158
  const auto cfg = config(1, 1, 100);
  Stream s(123);
  const InputBlock blk = generate_inputs(cfg, 1000, s);
  double sum = 0.0;
  for (const auto& v : blk.vectors[0]) sum += v.sum();
  EXPECT_LT(std::abs(sum / 1e5), 0.02);
}

TEST(GenerateDataset, Reproducible) {
  const auto cfg = config(2, 3, 5);
  Stream a(4), b(4);
  EXPECT_EQ(generate_dataset(cfg, a).matrix, generate_dataset(cfg, b).matrix);
}

TEST(Evaluate, RowSelectorAndZero) {
  const LinearFunctionFamily fam(Dataset{RealMatrix::Identity(3, 3)});
  RealVector v(3);
  v << 5, 7, 9;
  EXPECT_EQ(fam.evaluate(1, v), 7.0);  // second function
  EXPECT_EQ(fam.evaluate(0, RealVector::Zero(3)), 0.0);
}

TEST(Evaluate, DimensionErrors) {
  const LinearFunctionFamily fam(Dataset{RealMatrix::Identity(3, 3)});
  EXPECT_THROW((void)fam.evaluate(3, RealVector::Zero(3)), DimensionMismatch);
  EXPECT_THROW((void)fam.evaluate(0, RealVector::Zero(2)), DimensionMismatch);
}

TEST(Evaluate, LinearityOnRandomDraws) {
  const auto cfg = config(1, 4, 6);
  Stream s(2718);
  const LinearFunctionFamily fam(generate_dataset(cfg, s));
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = standard_normal(s);
    const double beta = standard_normal(s);
    const InputBlock uv = generate_inputs(cfg, 2, s);
    const auto b = static_cast<std::size_t>(trial % 4);
    const double lhs = fam.evaluate(b, alpha * uv.at(0, 0) + beta * uv.at(0, 1));
    const double rhs = alpha * fam.evaluate(b, uv.at(0, 0)) + beta * fam.evaluate(b, uv.at(0, 1));
    const double scale = std::abs(alpha * fam.evaluate(b, uv.at(0, 0))) +
                         std::abs(beta * fam.evaluate(b, uv.at(0, 1)));
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, scale));
  }
  RealVector u = RealVector::Ones(6), w = RealVector::LinSpaced(6, -1, 1);
  EXPECT_NEAR(fam.evaluate(2, 2 * u + 3 * w), 2 * fam.evaluate(2, u) + 3 * fam.evaluate(2, w),
              1e-12);
}

TEST(GroundTruth, IdentityDatasetCopiesEntries) {
  const auto cfg = config(2, 3, 3);
  Stream s(9);
  const InputBlock blk = generate_inputs(cfg, 2, s);
  const LinearFunctionFamily fam(Dataset{RealMatrix::Identity(3, 3)});
  const OutputTable y = ground_truth(fam, blk);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t b = 0; b < 3; ++b)
        EXPECT_EQ(y.at(k, i, b), blk.at(k, i)(static_cast<Eigen::Index>(b)));
}

TEST(GroundTruth, MatchesElementwiseEvaluate) {
  const auto cfg = config(3, 4, 5);
  Stream s(10);
  const LinearFunctionFamily fam(generate_dataset(cfg, s));
  const InputBlock blk = generate_inputs(cfg, 3, s);
  const OutputTable y = ground_truth(fam, blk);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t b = 0; b < 4; ++b)
        EXPECT_EQ(y.at(k, i, b), fam.evaluate(b, blk.at(k, i)));
}

TEST(GroundTruth, SingleScalarShape) {
  const auto cfg = config(2, 1, 2);
  Stream s(11);
  const LinearFunctionFamily fam(generate_dataset(cfg, s));
  const OutputTable y = ground_truth(fam, generate_inputs(cfg, 1, s));
  EXPECT_EQ(y.values().size(), 2u);
  EXPECT_THROW((void)y.at(2, 0, 0), DimensionMismatch);
}

}  // namespace
}  // namespace ucec
