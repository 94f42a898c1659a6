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

#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "diff/optimizer.hpp"

namespace mtmt::diff {
namespace {

TEST(CosineScheduleTest, Endpoints) {
  EXPECT_EQ(cosine_learning_rate(1e-3, 0, 100), 1e-3);
  EXPECT_EQ(cosine_learning_rate(1e-3, 100, 100), 0.0);
  EXPECT_EQ(cosine_learning_rate(1e-3, 250, 100), 0.0);
  EXPECT_NEAR(cosine_learning_rate(1e-3, 50, 100), 5e-4, 1e-18);
}

TEST(CosineScheduleTest, MonotoneNonIncreasing) {
  double prev = cosine_learning_rate(0.01, 0, 37);
  for (size_t s = 1; s <= 37; ++s) {
    const double r = cosine_learning_rate(0.01, s, 37);
    EXPECT_LE(r, prev);
    prev = r;
  }
}

// Hand evaluation of one decoupled-decay step at step 0 with constant g.
TEST(AdamWTest, SingleStepMatchesClosedForm) {
  ParameterStore store;
  const size_t idx = store.add("w", Matrix::from_rows({{2.0}}));
  AdamWOptions opts;
  opts.learning_rate = 0.1;
  opts.weight_decay = 0.01;
  opts.schedule_period = 10;
  AdamW adam(store, opts);
  const double g = 0.5;
  adam.step(store, {Matrix::from_rows({{g}})});

  const double m = (1 - 0.9) * g;
  const double v = (1 - 0.999) * g * g;
  const double m_hat = m / (1 - 0.9);
  const double v_hat = v / (1 - 0.999);
  double w = 2.0;
  w -= 0.1 * 0.01 * w;
  w -= 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);
  EXPECT_NEAR(store.at(idx).value(0, 0), w, 1e-15);
  EXPECT_EQ(adam.step_count(), 1u);
}

TEST(AdamWTest, SecondStepUsesAnnealedRate) {
  ParameterStore store;
  store.add("w", Matrix::from_rows({{1.0}}));
  AdamWOptions opts;
  opts.learning_rate = 0.2;
  opts.weight_decay = 0.0;
  opts.schedule_period = 4;
  AdamW adam(store, opts);
  const double g = 1.0;
  adam.step(store, {Matrix::from_rows({{g}})});
  const double after_one = store.at(0).value(0, 0);
  EXPECT_DOUBLE_EQ(adam.current_learning_rate(), cosine_learning_rate(0.2, 1, 4));
  adam.step(store, {Matrix::from_rows({{g}})});
  // Constant gradient: bias-corrected moments give m_hat/sqrt(v_hat) = 1.
  const double rate = 0.2 * 0.5 * (1 + std::cos(std::numbers::pi / 4));
  EXPECT_NEAR(store.at(0).value(0, 0), after_one - rate / (1.0 + 1e-8), 1e-12);
}

TEST(AdamWTest, EmbeddingTablesSkipDecay) {
  ParameterStore store;
  store.add("w", Matrix::from_rows({{1.0}}), true);
  store.add("table", Matrix::from_rows({{1.0}}), false);
  AdamWOptions opts;
  opts.learning_rate = 0.5;
  opts.weight_decay = 0.1;
  opts.schedule_period = 10;
  AdamW adam(store, opts);
  adam.step(store, {Matrix(1, 1), Matrix(1, 1)});
  EXPECT_NEAR(store.at(0).value(0, 0), 1.0 - 0.5 * 0.1, 1e-15);
  EXPECT_EQ(store.at(1).value(0, 0), 1.0);
}

TEST(AdamWTest, ShapeMismatchIsShapeError) {
  ParameterStore store;
  store.add("w", Matrix(2, 2));
  AdamW adam(store, {});
  try {
    adam.step(store, {Matrix(2, 3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

}  // namespace
}  // namespace mtmt::diff
