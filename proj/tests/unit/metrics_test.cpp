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
#include "metric_oracle.hpp"
#include "metrics/uplift_metrics.hpp"
#include "model/predictions.hpp"

namespace mtmt::metrics {
namespace {

using testing::brute_auuc;
using testing::brute_lift;
using testing::brute_qini;
using testing::random_cohort;

std::vector<CohortUnit> hand_cohort() {
  const double scores[6] = {0.9, 0.8, 0.6, 0.4, 0.3, 0.1};
  const int treated[6] = {1, 0, 1, 0, 1, 0};
  const double outcomes[6] = {1, 0, 1, 0, 0, 0};
  std::vector<CohortUnit> units;
  // Inserted out of order so ranking does the work.
  for (size_t i : {3, 0, 5, 1, 4, 2}) units.push_back({scores[i], treated[i], outcomes[i], i});
  return units;
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

TEST(RankedCohortTest, SortsDescendingWithIndexTieBreak) {
  const RankedCohort c =
      RankedCohort::rank({{0.5, 1, 0, 4}, {0.7, 0, 0, 9}, {0.5, 0, 0, 2}, {0.1, 1, 0, 0}});
  EXPECT_EQ(c[0].index, 9u);
  EXPECT_EQ(c[1].index, 2u);
  EXPECT_EQ(c[2].index, 4u);
  EXPECT_EQ(c[3].index, 0u);
  EXPECT_EQ(c.treated_count(), 2u);
}

TEST(RankedCohortTest, InvalidCohortsAreMetricErrors) {
  EXPECT_EQ(kind_of([] { RankedCohort::rank({}); }), ErrorKind::kMetric);
  EXPECT_EQ(kind_of([] { RankedCohort::rank({{NAN, 1, 0, 0}}); }), ErrorKind::kMetric);
  EXPECT_EQ(kind_of([] { RankedCohort::rank({{0.1, 2, 0, 0}}); }), ErrorKind::kMetric);
  const RankedCohort treated_only = RankedCohort::rank({{0.1, 1, 1, 0}, {0.2, 1, 0, 1}});
  EXPECT_EQ(kind_of([&] { qini(treated_only); }), ErrorKind::kMetric);
  EXPECT_EQ(kind_of([&] { auuc(treated_only); }), ErrorKind::kMetric);
  EXPECT_EQ(kind_of([&] { lift_at_k(treated_only, 1.0); }), ErrorKind::kMetric);
}

TEST(PrefixStatsTest, CountsAndSums) {
  const PrefixStats s = PrefixStats::compute(RankedCohort::rank(hand_cohort()));
  ASSERT_EQ(s.size(), 6u);
  EXPECT_EQ(s.n_treated, (std::vector<double>{0, 1, 1, 2, 2, 3, 3}));
  EXPECT_EQ(s.n_control, (std::vector<double>{0, 0, 1, 1, 2, 2, 3}));
  EXPECT_EQ(s.y_treated, (std::vector<double>{0, 1, 1, 2, 2, 2, 2}));
  EXPECT_EQ(s.y_control, (std::vector<double>{0, 0, 0, 0, 0, 0, 0}));
}

// q = 1, 1, 2, 2, 2, 2: trapezoids sum to 18 / 72, minus the chord area 2 / 12.
TEST(QiniTest, HandCohort) {
  const MetricResult r = qini(RankedCohort::rank(hand_cohort()));
  EXPECT_NEAR(r.coefficient, 1.0 / 12.0, 1e-15);
  ASSERT_EQ(r.curve.fraction.size(), 6u);
  EXPECT_DOUBLE_EQ(r.curve.fraction.front(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.curve.fraction.back(), 1.0);
  EXPECT_DOUBLE_EQ(r.curve.value[2], 2.0 / 6.0);
}

// u = 0, 1/3, 1/2, 2/3, 5/9, 2/3: trapezoids give 43 / 108, minus 1 / 3.
TEST(AuucTest, HandCohort) {
  const MetricResult r = auuc(RankedCohort::rank(hand_cohort()));
  EXPECT_NEAR(r.coefficient, 7.0 / 108.0, 1e-15);
  EXPECT_EQ(r.curve.value[0], 0.0);
  EXPECT_DOUBLE_EQ(r.curve.value[4], 5.0 / 9.0);
}

TEST(QiniTest, AllZeroOutcomesGiveFlatCurve) {
  Rng rng(1);
  auto units = random_cohort(rng, 40, true);
  for (auto& u : units) u.outcome = 0.0;
  const RankedCohort c = RankedCohort::rank(units);
  const MetricResult q = qini(c);
  EXPECT_EQ(q.coefficient, 0.0);
  for (double v : q.curve.value) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(auuc(c).coefficient, 0.0);
  EXPECT_EQ(lift_at_k(c), 0.0);
}

TEST(AuucTest, ConstantIdenticalOutcomesGiveZero) {
  Rng rng(2);
  auto units = random_cohort(rng, 30, true);
  for (auto& u : units) u.outcome = 0.75;
  EXPECT_EQ(auuc(RankedCohort::rank(units)).coefficient, 0.0);
}

TEST(LiftTest, TenUnitHandCohort) {
  std::vector<CohortUnit> units;
  const int treated[10] = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  const double outcome[10] = {1, 0.5, 0, 1, 1, 1, 0, 0, 1, 0};
  for (size_t i = 0; i < 10; ++i)
    units.push_back({1.0 - 0.1 * static_cast<double>(i), treated[i], outcome[i], i});
  const RankedCohort c = RankedCohort::rank(units);
  // Top 3: treated outcomes 1 and 0, control 0.5.
  EXPECT_DOUBLE_EQ(lift_at_k(c, 0.3), 0.5 - 0.5);
  EXPECT_DOUBLE_EQ(lift_at_k(c, 0.4), 0.5 - 0.75);
  // k = 1 is the difference of group means.
  EXPECT_DOUBLE_EQ(lift_at_k(c, 1.0), 3.0 / 5.0 - 2.5 / 5.0);
  EXPECT_EQ(kind_of([&] { lift_at_k(c, 0.0); }), ErrorKind::kMetric);
  EXPECT_EQ(kind_of([&] { lift_at_k(c, 0.1); }), ErrorKind::kMetric);
}

TEST(BruteForceTest, HundredRandomCohorts) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 4 + rng.below(97);
    const auto units = random_cohort(rng, n, trial % 2 == 0);
    const RankedCohort c = RankedCohort::rank(units);
    EXPECT_NEAR(qini(c).coefficient, brute_qini(units), 1e-9) << trial;
    EXPECT_NEAR(auuc(c).coefficient, brute_auuc(units), 1e-9) << trial;
    EXPECT_NEAR(lift_at_k(c, 0.3), brute_lift(units, 0.3), 1e-9) << trial;
  }
}

TEST(RankDependenceTest, MonotoneTransformsAreBitIdentical) {
  Rng rng(7);
  const std::vector<std::function<double(double)>> transforms{
      [](double s) { return std::exp(s); }, [](double s) { return 3.0 * s - 11.0; },
      [](double s) { return s * s * s + s; }, [](double s) { return std::atan(s); }};
  for (int trial = 0; trial < 20; ++trial) {
    auto units = random_cohort(rng, 50 + rng.below(50), trial % 2 == 1);
    const RankedCohort c = RankedCohort::rank(units);
    for (const auto& f : transforms) {
      auto moved = units;
      for (auto& u : moved) u.score = f(u.score);
      const RankedCohort m = RankedCohort::rank(moved);
      EXPECT_EQ(qini(m).coefficient, qini(c).coefficient);
      EXPECT_EQ(auuc(m).coefficient, auuc(c).coefficient);
      EXPECT_EQ(lift_at_k(m), lift_at_k(c));
    }
  }
}

// Effect falls with the score, so the q-curve is concave under the true order.
TEST(ReversalTest, ConcaveCurveFlipsSignWhenReversed) {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CohortUnit> units;
    const size_t n = 400;
    for (size_t i = 0; i < n; ++i) {
      const double effect = 0.8 * (1.0 - static_cast<double>(i) / n);
      const int t = static_cast<int>(i % 2);
      const double p = 0.1 + (t ? effect : 0.0);
      units.push_back({static_cast<double>(n - i), t, rng.bernoulli(p) ? 1.0 : 0.0, i});
    }
    const double forward = qini(RankedCohort::rank(units)).coefficient;
    for (auto& u : units) u.score = -u.score;
    const double reversed = qini(RankedCohort::rank(units)).coefficient;
    EXPECT_GT(forward, 0.0);
    EXPECT_LT(reversed, 0.0);
  }
}

data::DatasetSchema schema() {
  data::DatasetSchema s;
  s.features = {{"x", data::FeatureKind::kContinuous}};
  s.secondary_treatment = "offer";
  s.outcomes = {"y0", "y1"};
  return s;
}

// Rows cycle control, t0, t1, so each restricted cohort has two thirds of n.
struct Fixture {
  data::Dataset data{schema(), 2};
  model::Predictions scores;
  explicit Fixture(size_t n, uint64_t seed) {
    Rng rng(seed);
    for (size_t i = 0; i < n; ++i) {
      const int group = static_cast<int>(i % 3);
      data.add({{rng.normal()},
                group == 0 ? 0 : 1,
                group == 0 ? data::kNoTreatment : group - 1,
                {rng.bernoulli(0.3) ? 1.0 : 0.0, rng.uniform()}});
    }
    scores = model::Predictions::allocate(n, 2, 2);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < 2; ++k)
        for (size_t c = 1; c <= 2; ++c) scores.gamma_at(i, k, c) = rng.uniform();
  }
};

TEST(EvaluateTest, OneRowPerTaskAndTreatmentWithRestrictedCohorts) {
  const Fixture f(90, 1);
  const EvaluationReport r = evaluate(f.scores, f.data);
  ASSERT_EQ(r.rows.size(), 4u);
  size_t total = 0;
  for (size_t t = 0; t < 2; ++t) {
    const MetricRow& row = r.at(0, t);
    EXPECT_EQ(row.cohort_size, 60u);
    EXPECT_EQ(row.treated, 30u);
    EXPECT_EQ(row.control, 30u);
    total += row.cohort_size;
  }
  EXPECT_EQ(total, 90u + 30u);
  EXPECT_DOUBLE_EQ(r.mean_qini(), (r.rows[0].qini + r.rows[1].qini + r.rows[2].qini +
                                   r.rows[3].qini) / 4.0);
  EXPECT_EQ(kind_of([&] { r.at(2, 0); }), ErrorKind::kIndex);
}

TEST(EvaluateTest, MatchesDirectCohortForTreatmentOne) {
  const Fixture f(60, 2);
  const EvaluationReport r = evaluate(f.scores, f.data);
  std::vector<CohortUnit> units;
  for (size_t i = 0; i < 60; ++i)
    if (i % 3 != 1) units.push_back({f.scores.gamma_at(i, 1, 2), i % 3 == 2, f.data.outcome(i, 1), i});
  EXPECT_NEAR(r.at(1, 1).qini, brute_qini(units), 1e-12);
  EXPECT_NEAR(r.at(1, 1).auuc, brute_auuc(units), 1e-12);
  EXPECT_NEAR(r.at(1, 1).lift, brute_lift(units, 0.3), 1e-12);
}

TEST(EvaluateTest, SingleTreatmentCohortIsWholeDataset) {
  data::Dataset d(schema(), 1);
  model::Predictions p = model::Predictions::allocate(20, 2, 1);
  for (size_t i = 0; i < 20; ++i) {
    d.add({{0.0}, static_cast<int>(i % 2), i % 2 ? 0 : data::kNoTreatment,
           {static_cast<double>(i % 3 == 0), 0.5}});
    p.gamma_at(i, 0, 1) = static_cast<double>(i);
  }
  const EvaluationReport r = evaluate(p, d);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].cohort_size, 20u);
}

TEST(EvaluateTest, PermutedRowsGiveIdenticalReport) {
  const Fixture f(75, 3);
  const EvaluationReport base = evaluate(f.scores, f.data);
  Rng rng(5);
  const std::vector<size_t> order = permutation(75, rng);
  const data::Dataset permuted = f.data.subset(order);
  model::Predictions p = model::Predictions::allocate(75, 2, 2);
  for (size_t i = 0; i < 75; ++i)
    for (size_t k = 0; k < 2; ++k)
      for (size_t c = 0; c < 3; ++c) p.gamma_at(i, k, c) = f.scores.gamma_at(order[i], k, c);
  const EvaluationReport moved = evaluate(p, permuted, kDefaultLiftFraction, order);
  ASSERT_EQ(moved.rows.size(), base.rows.size());
  for (size_t r = 0; r < base.rows.size(); ++r) {
    EXPECT_EQ(moved.rows[r].qini, base.rows[r].qini);
    EXPECT_EQ(moved.rows[r].auuc, base.rows[r].auuc);
    EXPECT_EQ(moved.rows[r].lift, base.rows[r].lift);
    EXPECT_EQ(moved.rows[r].qini_curve.value, base.rows[r].qini_curve.value);
  }
}

TEST(EvaluateTest, ConstantScoresUseTieBreakWithoutError) {
  Fixture f(60, 4);
  std::fill(f.scores.gamma.begin(), f.scores.gamma.end(), 0.0);
  const EvaluationReport r = evaluate(f.scores, f.data);
  EXPECT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) EXPECT_TRUE(std::isfinite(row.qini));
}

TEST(EvaluateTest, EmptyRestrictedCohortNamesTreatment) {
  data::Dataset d(schema(), 2);
  for (size_t i = 0; i < 10; ++i)
    d.add({{0.0}, static_cast<int>(i % 2), i % 2 ? 0 : data::kNoTreatment, {0.0, 1.0}});
  const model::Predictions p = model::Predictions::allocate(10, 2, 2);
  try {
    evaluate(p, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMetric);
    EXPECT_NE(std::string(e.what()).find("treatment 1"), std::string::npos) << e.what();
  }
}

TEST(EvaluateTest, OracleScoresBeatRandomScores) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    data::SyntheticSpec spec;
    spec.num_samples = 20000;
    spec.outcome = data::OutcomeKind::kContinuous;
    const data::SyntheticData d = data::generate_synthetic(spec, seed);
    const model::Predictions oracle = model::Predictions::from_oracle(d.oracle);
    model::Predictions random = oracle;
    Rng rng(seed + 100);
    for (double& g : random.gamma) g = rng.uniform();
    EXPECT_GE(evaluate(oracle, d.dataset).mean_qini(), evaluate(random, d.dataset).mean_qini())
        << seed;
  }
}

TEST(SummaryTest, MomentsAndQuantiles) {
  const std::vector<double> v{3, -1, 2, 0, 1, -2, 4, 5, -3, 6, 7};
  const Summary s = Summary::of(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.mean_abs, 34.0 / 11.0);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(110.0 / 11.0));
  ASSERT_EQ(s.quantiles.size(), kQuantileCount);
  for (size_t q = 0; q < kQuantileCount; ++q) EXPECT_DOUBLE_EQ(s.quantiles[q], q - 3.0);
  const std::vector<double> two{0.0, 1.0};
  EXPECT_DOUBLE_EQ(Summary::of(two).quantiles[3], 0.3);
}

TEST(EffectDistributionsTest, SeriesPerTaskAndTreatment) {
  model::Predictions p = model::Predictions::allocate(4, 2, 3);
  p.has_tiers = true;
  for (size_t i = 0; i < 4; ++i) {
    p.base_at(i, 1) = static_cast<double>(i);
    p.incremental_at(i, 0, 2) = -0.5;
  }
  const EffectDistributions d = effect_distributions(p);
  EXPECT_EQ(d.series.size(), 2u * (1 + 3));
  EXPECT_DOUBLE_EQ(d.find("base_k1")->summary.mean, 1.5);
  EXPECT_DOUBLE_EQ(d.find("incremental_k0_t2")->summary.mean_abs, 0.5);
  EXPECT_EQ(d.find("base_k0")->summary.stddev, 0.0);
  EXPECT_EQ(d.find("missing"), nullptr);
  p.has_tiers = false;
  EXPECT_EQ(effect_distributions(p).series.size(), 6u);
}

TEST(EffectDistributionsTest, ZeroScoresSummarizeToZero) {
  const model::Predictions p = model::Predictions::allocate(10, 1, 2);
  for (const auto& s : effect_distributions(p).series) {
    EXPECT_EQ(s.summary.mean, 0.0);
    EXPECT_EQ(s.summary.stddev, 0.0);
    for (double q : s.summary.quantiles) EXPECT_EQ(q, 0.0);
  }
}

}  // namespace
}  // namespace mtmt::metrics
