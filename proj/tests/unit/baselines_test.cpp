/*
 * Copyright 2026 The MTMT Uplift Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include "baselines/learners.hpp"
#include "core/error.hpp"
#include "grad_cases.hpp"
#include "test_util.hpp"

namespace mtmt::baselines {
namespace {

using testing::random_matrix;

ModelConfig config(std::vector<size_t> hidden) {
  ModelConfig c;
  c.feature_dim = 2;
  c.num_tasks = 2;
  c.num_treatments = 3;
  c.expert_hidden = std::move(hidden);
  return c;
}

data::Batch random_batch(size_t n, uint64_t seed) {
  Rng rng(seed);
  data::Batch b;
  b.x = random_matrix(n, 2, rng);
  b.y = random_matrix(n, 2, rng, 0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const int treated = i % 4 == 0 ? 0 : 1;
    b.base.push_back(treated);
    b.secondary.push_back(treated ? static_cast<int>(i % 3) : data::kNoTreatment);
  }
  return b;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::kContract;
}

TEST(SLearnerInputTest, AppendsFlagAndOneHot) {
  const std::vector<double> x{0.5, -1.0};
  EXPECT_EQ(s_learner_input(x, 1, 2, 3), (std::vector<double>{0.5, -1.0, 1, 0, 0, 1}));
  EXPECT_EQ(s_learner_input(x, 0, data::kNoTreatment, 3),
            (std::vector<double>{0.5, -1.0, 0, 0, 0, 0}));
}

TEST(DifferencesTest, HandResponseFunctions) {
  const ResponseFn f = [](std::span<const double> in) {
    // in = [x0, base, t0, t1]
    return std::vector<double>{in[0] + 2 * in[1] + 3 * in[2] - in[3], in[0] * in[1]};
  };
  const std::vector<double> x{4.0};
  const Matrix g = s_learner_differences(f, x, 2);
  ASSERT_EQ(g.rows(), 2u);
  ASSERT_EQ(g.cols(), 2u);
  EXPECT_EQ(g(0, 0), 5.0);
  EXPECT_EQ(g(0, 1), 1.0);
  EXPECT_EQ(g(1, 0), 4.0);
  EXPECT_EQ(g(1, 1), 4.0);

  std::vector<ResponseFn> branches{
      [](std::span<const double> v) { return std::vector<double>{v[0]}; },
      [](std::span<const double> v) { return std::vector<double>{3 * v[0]}; },
      [](std::span<const double> v) { return std::vector<double>{v[0] - 1}; }};
  const Matrix t = t_learner_differences(branches, x);
  EXPECT_EQ(t(0, 0), 8.0);
  EXPECT_EQ(t(0, 1), -1.0);
}

TEST(SLearnerTest, ZeroTreatmentWeightsGiveZeroUplift) {
  SLearner s(config({4}), 1);
  Matrix& w = s.parameters().value("slearner.layer0.weight");
  for (size_t r = 0; r < w.rows(); ++r)
    for (size_t c = 2; c < w.cols(); ++c) w(r, c) = 0.0;
  s.mark_fitted();
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(1, 2, rng, -3, 3);
    const Matrix g = s.uplift(x.values());
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(SLearnerTest, LinearHandWeights) {
  SLearner s(config({}), 1);
  // Columns: x0, x1, base, t0, t1, t2.
  s.parameters().value("slearner.layer0.weight") =
      Matrix::from_rows({{1, 1, 0.5, 0.1, 0.2, 0.3}, {-1, 2, -0.5, 0.0, 1.0, -1.0}});
  s.parameters().value("slearner.layer0.bias") = Matrix::from_rows({{7, 9}});
  s.mark_fitted();
  const std::vector<double> x{3.0, -2.0};
  const Matrix g = s.uplift(x);
  EXPECT_NEAR(g(0, 0), 0.6, 1e-12);
  EXPECT_NEAR(g(0, 2), 0.8, 1e-12);
  EXPECT_NEAR(g(1, 1), 0.5, 1e-12);
  EXPECT_NEAR(g(1, 2), -1.5, 1e-12);
  const auto response = s.response(s_learner_input(x, 0, data::kNoTreatment, 3));
  EXPECT_DOUBLE_EQ(response[0], 8.0);
  EXPECT_DOUBLE_EQ(response[1], 2.0);
}

// A linear model's differences do not depend on the feature weights.
TEST(SLearnerTest, FeatureOnlyWeightsDoNotMoveLinearUplift) {
  SLearner s(config({}), 3);
  s.mark_fitted();
  const std::vector<double> x{0.7, 1.1};
  const Matrix before = s.uplift(x);
  Matrix& w = s.parameters().value("slearner.layer0.weight");
  w(0, 0) += 5.0;
  w(1, 1) -= 2.0;
  s.parameters().value("slearner.layer0.bias")(0, 1) += 3.0;
  const Matrix after = s.uplift(x);
  for (size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-12);
}

TEST(SLearnerTest, PredictMatchesUplift) {
  SLearner s(config({5, 3}), 4);
  s.mark_fitted();
  Rng rng(4);
  const Matrix x = random_matrix(6, 2, rng);
  const model::Predictions p = s.predict(x);
  EXPECT_FALSE(p.has_tiers);
  EXPECT_TRUE(p.has_natural_response);
  for (size_t i = 0; i < 6; ++i) {
    const Matrix g = s.uplift(x.row(i));
    const auto y0 = s.response(s_learner_input(x.row(i), 0, data::kNoTreatment, 3));
    for (size_t k = 0; k < 2; ++k) {
      EXPECT_EQ(p.gamma_at(i, k, 0), 0.0);
      EXPECT_NEAR(p.natural_at(i, k), y0[k], 1e-13);
      for (size_t m = 0; m < 3; ++m) EXPECT_NEAR(p.gamma_at(i, k, m + 1), g(k, m), 1e-13);
    }
  }
}

TEST(SLearnerTest, UnfittedUpliftIsContractError) {
  SLearner s(config({}), 1);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_EQ(kind_of([&] { s.uplift(x); }), ErrorKind::kContract);
}

TEST(SLearnerTest, GradientsMatchFiniteDifferences) {
  SLearner s(config({4}), 5);
  const auto check = testing::check_learner_gradients(s, random_batch(9, 6), {1.0, 0.5});
  EXPECT_LT(check.max_rel_error, 1e-4);
}

TEST(SLearnerTest, LossIsWeightedMeanSquaredError) {
  SLearner s(config({3}), 7);
  const data::Batch b = random_batch(5, 7);
  const std::vector<double> w{2.0, 0.5};
  diff::Tape tape;
  const double loss = s.batch_loss(tape, b, w).value()(0, 0);
  double expected = 0.0;
  for (size_t i = 0; i < 5; ++i) {
    const auto out = s.response(s_learner_input(b.x.row(i), b.base[i], b.secondary[i], 3));
    for (size_t k = 0; k < 2; ++k) expected += w[k] * std::pow(out[k] - b.y(i, k), 2) / 5.0;
  }
  EXPECT_NEAR(loss, expected, 1e-12);
}

TEST(TLearnerTest, OneBranchPerGroup) {
  TLearner t(config({3}), 1);
  EXPECT_EQ(t.branch_count(), 4u);
  EXPECT_TRUE(t.parameters().contains("tlearner.branch3.layer1.weight"));
}

TEST(TLearnerTest, UpliftIsBranchDifference) {
  TLearner t(config({3}), 2);
  t.mark_fitted();
  const std::vector<double> x{0.4, -0.9};
  const Matrix g = t.uplift(x);
  const auto y0 = t.branch_response(0, x);
  for (size_t m = 0; m < 3; ++m) {
    const auto ym = t.branch_response(m + 1, x);
    for (size_t k = 0; k < 2; ++k) EXPECT_NEAR(g(k, m), ym[k] - y0[k], 1e-15);
  }
}

TEST(TLearnerTest, SwappingBranchesFlipsSign) {
  TLearner t(config({3}), 3);
  t.mark_fitted();
  const std::vector<double> x{1.2, 0.3};
  const Matrix before = t.uplift(x);
  TLearner swapped = t;
  auto& p = swapped.parameters();
  for (const char* suffix : {".layer0.weight", ".layer0.bias", ".layer1.weight", ".layer1.bias"})
    std::swap(p.value(std::string("tlearner.branch0") + suffix),
              p.value(std::string("tlearner.branch2") + suffix));
  const Matrix after = swapped.uplift(x);
  for (size_t k = 0; k < 2; ++k) EXPECT_NEAR(after(k, 1), -before(k, 1), 1e-15);
}

TEST(TLearnerTest, LossRoutesRowsToTheirBranch) {
  TLearner t(config({}), 4);
  const data::Batch b = random_batch(8, 8);
  const std::vector<double> w{1.0, 3.0};
  diff::Tape tape;
  const double loss = t.batch_loss(tape, b, w).value()(0, 0);
  double expected = 0.0;
  for (size_t i = 0; i < 8; ++i) {
    const size_t branch = b.base[i] == 1 ? static_cast<size_t>(b.secondary[i]) + 1 : 0;
    const auto out = t.branch_response(branch, b.x.row(i));
    for (size_t k = 0; k < 2; ++k) expected += w[k] * std::pow(out[k] - b.y(i, k), 2) / 8.0;
  }
  EXPECT_NEAR(loss, expected, 1e-12);
}

TEST(TLearnerTest, GradientsMatchFiniteDifferences) {
  TLearner t(config({4}), 5);
  const auto check = testing::check_learner_gradients(t, random_batch(12, 9), {0.3, 1.0});
  EXPECT_LT(check.max_rel_error, 1e-4);
}

TEST(TLearnerTest, UnfittedAndBadBranch) {
  TLearner t(config({}), 1);
  const std::vector<double> x{0.0, 0.0};
  EXPECT_EQ(kind_of([&] { t.uplift(x); }), ErrorKind::kContract);
  EXPECT_EQ(kind_of([&] { t.branch_response(4, x); }), ErrorKind::kIndex);
}

}  // namespace
}  // namespace mtmt::baselines
