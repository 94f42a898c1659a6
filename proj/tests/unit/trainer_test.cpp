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

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "data/synthetic.hpp"
#include "diff/tape.hpp"
#include "grad_cases.hpp"
#include "model/mtmt_model.hpp"
#include "test_util.hpp"
#include "train/trainer.hpp"

namespace mtmt::train {
namespace {

using model::Matrix;
using model::ModelConfig;
using model::MtmtModel;

// One feature, task and treatment; one scalar token; no enhancer.
ModelConfig toy_config() {
  ModelConfig c;
  c.feature_dim = 1;
  c.num_tasks = 1;
  c.num_treatments = 1;
  c.num_experts = 2;
  c.expert_hidden = {};
  c.token_count = 1;
  c.token_width = 1;
  c.embed_dim = 1;
  c.attention_dim = 1;
  c.use_enhancer = false;
  return c;
}

ModelConfig small_config() {
  ModelConfig c;
  c.num_experts = 2;
  c.expert_hidden = {6};
  c.token_count = 2;
  c.token_width = 3;
  c.embed_dim = 3;
  c.attention_dim = 3;
  c.enhancer_hidden = {4};
  return c;
}

data::Dataset synthetic(size_t n, uint64_t seed) {
  data::SyntheticSpec spec;
  spec.num_samples = n;
  return data::generate_synthetic(spec, seed).dataset;
}

data::Batch random_batch(size_t n, size_t d, size_t tasks, size_t m, uint64_t seed) {
  Rng rng(seed);
  data::Batch b;
  b.x = testing::random_matrix(n, d, rng);
  b.y = testing::random_matrix(n, tasks, rng, 0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const int treated = i % 3 == 1 ? 0 : 1;
    b.base.push_back(treated);
    b.secondary.push_back(treated ? static_cast<int>(i % m) : data::kNoTreatment);
  }
  return b;
}

double loss_of(const model::UpliftLearner& learner, const data::Batch& b,
               const std::vector<double>& w) {
  diff::Tape tape;
  return learner.batch_loss(tape, b, w).value()(0, 0);
}

bool uplift_parameter(const std::string& name) {
  for (const char* prefix : {"embed.", "path.", "enhancer.", "head.base", "head.incremental",
                             "head.joint"})
    if (name.rfind(prefix, 0) == 0) return true;
  return false;
}

TEST(TrainLossTest, AllControlBatchLeavesUpliftParametersWithoutGradient) {
  ModelConfig c = small_config();
  c.feature_dim = 4;
  c.num_tasks = 2;
  c.num_treatments = 3;
  MtmtModel model(c, 3);
  data::Batch b = random_batch(10, 4, 2, 3, 5);
  std::fill(b.base.begin(), b.base.end(), 0);
  std::fill(b.secondary.begin(), b.secondary.end(), data::kNoTreatment);
  diff::Tape tape;
  const std::vector<double> w{1.0, 1.0};
  const diff::Gradients g = diff::backward(model.batch_loss(tape, b, w), model.parameters());
  size_t nonzero_elsewhere = 0;
  for (size_t p = 0; p < model.parameters().size(); ++p) {
    const std::string& name = model.parameters().at(p).name;
    double norm = 0.0;
    for (double v : g[p].values()) norm += std::abs(v);
    if (uplift_parameter(name)) {
      EXPECT_EQ(norm, 0.0) << name;
    } else if (norm > 0.0) {
      ++nonzero_elsewhere;
    }
  }
  EXPECT_GT(nonzero_elsewhere, 0u);
}

// Hand-set toy model: phi = 2x + 0.5 from the one live expert, natural head 1,
// base uplift = phi, incremental uplift = phi.
TEST(TrainLossTest, HandComputedTwoSampleLoss) {
  ModelConfig c = toy_config();
  c.center_incremental = false;
  MtmtModel model(c, 1);
  auto& p = model.parameters();
  p.value("gate.k0").fill(0.0);
  p.value("expert0.layer0.weight") = Matrix::from_rows({{4.0}});
  p.value("expert0.layer0.bias") = Matrix::from_rows({{1.0}});
  p.value("expert1.layer0.weight").fill(0.0);
  p.value("expert1.layer0.bias").fill(0.0);
  p.value("head.natural.k0") = Matrix::from_rows({{1.0}});
  p.value("path.base.value") = Matrix::from_rows({{0.5}});
  p.value("head.base.k0") = Matrix::from_rows({{2.0}});
  p.value("path.secondary.value") = Matrix::from_rows({{0.25}});
  p.value("head.incremental.k0") = Matrix::from_rows({{4.0}});

  data::Batch b;
  b.x = Matrix::from_rows({{1.0}, {0.0}});
  b.y = Matrix::from_rows({{4.0}, {1.0}});
  b.base = {1, 0};
  b.secondary = {0, data::kNoTreatment};
  // Treated: phi 2.5, prediction 7.5, residual 3.5. Control: phi 0.5, residual -0.5.
  EXPECT_DOUBLE_EQ(loss_of(model, b, {1.0}), (12.25 + 0.25) / 2.0);
  EXPECT_DOUBLE_EQ(loss_of(model, b, {0.5}), 0.5 * (12.25 + 0.25) / 2.0);

  // Centered with one treatment: the incremental uplift is zero, prediction 5.
  c.center_incremental = true;
  MtmtModel centered(c, 1);
  for (size_t i = 0; i < p.size(); ++i) centered.parameters().value(p.at(i).name) = p.at(i).value;
  EXPECT_DOUBLE_EQ(loss_of(centered, b, {1.0}), (1.0 + 0.25) / 2.0);
}

TEST(TrainLossTest, ToyModelGradientsMatchFiniteDifferences) {
  MtmtModel model(toy_config(), 7);
  const data::Batch b = random_batch(6, 1, 1, 1, 8);
  const auto check = testing::check_learner_gradients(model, b, {1.0});
  EXPECT_EQ(check.checked, MtmtModel::parameter_count(toy_config()));
  EXPECT_LT(check.max_rel_error, 1e-6);
}

TEST(TrainLossTest, RowOrderDoesNotChangeLoss) {
  ModelConfig c = small_config();
  c.feature_dim = 3;
  c.num_tasks = 2;
  c.num_treatments = 2;
  MtmtModel model(c, 9);
  const data::Batch b = random_batch(9, 3, 2, 2, 10);
  data::Batch r = b;
  const std::vector<size_t> order{4, 2, 8, 0, 6, 1, 3, 7, 5};
  for (size_t i = 0; i < order.size(); ++i) {
    for (size_t j = 0; j < 3; ++j) r.x(i, j) = b.x(order[i], j);
    for (size_t k = 0; k < 2; ++k) r.y(i, k) = b.y(order[i], k);
    r.base[i] = b.base[order[i]];
    r.secondary[i] = b.secondary[order[i]];
  }
  EXPECT_NEAR(loss_of(model, b, {1.0, 2.0}), loss_of(model, r, {1.0, 2.0}), 1e-12);
}

TEST(TrainLossTest, LinearInTaskWeights) {
  ModelConfig c = small_config();
  c.feature_dim = 3;
  c.num_tasks = 2;
  c.num_treatments = 2;
  MtmtModel model(c, 11);
  const data::Batch b = random_batch(7, 3, 2, 2, 12);
  const double l1 = loss_of(model, b, {1.0, 0.0});
  const double l2 = loss_of(model, b, {0.0, 1.0});
  EXPECT_NEAR(loss_of(model, b, {0.3, 1.7}), 0.3 * l1 + 1.7 * l2, 1e-12);
  EXPECT_EQ(loss_of(model, b, {0.0, 0.0}), 0.0);
}

TEST(TrainConfigTest, ValidationAndWeights) {
  TrainConfig c;
  EXPECT_EQ(c.resolved_weights(3), (std::vector<double>{1, 1, 1}));
  c.task_weights = {1.0, 2.0};
  EXPECT_THROW(c.resolved_weights(3), Error);
  TrainConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = TrainConfig{};
  bad.task_weights = {-1.0};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(TrainConfigTest, JsonRoundTrip) {
  TrainConfig c;
  c.learning_rate = 0.003;
  c.batch_size = 64;
  c.max_epochs = 7;
  c.seed = 99;
  c.task_weights = {0.5, 1.5};
  c.weight_decay = 0.0;
  const TrainConfig back = nlohmann::json(c).get<TrainConfig>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(c));
}

TEST(FitTest, ZeroEpochsLeavesParametersUntouched) {
  const data::Dataset train = synthetic(200, 1);
  ModelConfig c = small_config();
  c.resolve(train.feature_dim(), train.num_tasks(), train.num_treatments());
  MtmtModel model(c, 2);
  const uint64_t before = model.parameters().digest();
  TrainConfig tc;
  tc.max_epochs = 0;
  const TrainReport r = fit(model, train, tc);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_TRUE(r.epoch_loss.empty());
  EXPECT_EQ(model.parameters().digest(), before);
  EXPECT_TRUE(model.fitted());
}

TEST(FitTest, SameSeedSameWeights) {
  const data::Dataset train = synthetic(400, 2);
  TrainConfig tc;
  tc.max_epochs = 3;
  tc.batch_size = 64;
  tc.learning_rate = 0.01;
  tc.seed = 5;
  const FitResult a = fit(model::Method::kMtmt, small_config(), train, tc);
  const FitResult b = fit(model::Method::kMtmt, small_config(), train, tc);
  EXPECT_EQ(a.report.checksum, b.report.checksum);
  EXPECT_EQ(a.report.epoch_loss, b.report.epoch_loss);
  EXPECT_EQ(a.report.steps, 3u * 7u);
  tc.seed = 6;
  const FitResult c = fit(model::Method::kMtmt, small_config(), train, tc);
  EXPECT_NE(a.report.checksum, c.report.checksum);
}

TEST(FitTest, TrainingReducesLossForEveryMethod) {
  const data::Dataset train = synthetic(1000, 3);
  TrainConfig tc;
  tc.max_epochs = 8;
  tc.batch_size = 100;
  tc.learning_rate = 0.01;
  tc.seed = 1;
  for (auto method : {model::Method::kMtmt, model::Method::kSLearner, model::Method::kTLearner}) {
    std::vector<double> seen;
    const FitResult r = fit(method, small_config(), train, tc,
                            [&](size_t epoch, double loss) {
                              EXPECT_EQ(epoch, seen.size());
                              seen.push_back(loss);
                            });
    EXPECT_EQ(seen, r.report.epoch_loss);
    EXPECT_LT(r.report.epoch_loss.back(), r.report.epoch_loss.front()) << method_name(method);
    EXPECT_TRUE(r.learner->fitted());
  }
}

TEST(FitTest, DimensionMismatchIsSchemaErrorBeforeTraining) {
  const data::Dataset train = synthetic(100, 4);
  ModelConfig c = small_config();
  c.feature_dim = train.feature_dim() + 1;
  c.num_tasks = train.num_tasks();
  c.num_treatments = train.num_treatments();
  MtmtModel model(c, 1);
  const uint64_t before = model.parameters().digest();
  try {
    fit(model, train, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
  }
  EXPECT_EQ(model.parameters().digest(), before);
  EXPECT_FALSE(model.fitted());
}

TEST(FitTest, MakeLearnerBuildsEachMethod) {
  ModelConfig c = small_config();
  c.resolve(3, 2, 2);
  for (auto method : {model::Method::kMtmt, model::Method::kSLearner, model::Method::kTLearner})
    EXPECT_EQ(make_learner(method, c, 1)->method(), method);
}

}  // namespace
}  // namespace mtmt::train
