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

#include "core/error.hpp"
#include "diff/matrix.hpp"
#include "diff/parameters.hpp"
#include "diff/tape.hpp"
#include "grad_cases.hpp"
#include "test_util.hpp"

namespace mtmt::diff {
namespace {

using testing::random_matrix;

Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

TEST(MatMulTest, IdentityLeavesColumnUnchanged) {
  const Matrix out = matmul(Matrix::identity(2), Matrix::from_rows({{5}, {7}}));
  EXPECT_EQ(out, Matrix::from_rows({{5}, {7}}));
}

TEST(MatMulTest, HandArithmetic) {
  EXPECT_EQ(matmul(Matrix::from_rows({{1, 2}, {3, 4}}), Matrix::from_rows({{1}, {1}})),
            Matrix::from_rows({{3}, {7}}));
}

TEST(MatMulTest, MatchesTripleLoop) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(3, 4, rng);
    const Matrix b = random_matrix(4, 2, rng);
    const Matrix got = matmul(a, b);
    const Matrix want = naive_product(a, b);
    for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
  }
}

TEST(MatMulTest, ShapeMismatchNamesBothShapes) {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
  }
  Tape tape;
  EXPECT_THROW(matmul(tape.constant(Matrix(2, 3)), tape.constant(Matrix(4, 1))), Error);
}

TEST(SoftmaxTest, UniformRow) {
  Tape tape;
  const Matrix out = softmax_rows(tape.constant(Matrix(1, 4))).value();
  for (double v : out.values()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(SoftmaxTest, HandArithmetic) {
  Tape tape;
  const Matrix out = softmax_rows(tape.constant(Matrix::from_rows({{0, std::log(3.0)}}))).value();
  EXPECT_NEAR(out(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(out(0, 1), 0.75, 1e-15);
}

TEST(SoftmaxTest, RowsSumToOneAndShiftInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_matrix(4, 6, rng, -30.0, 30.0);
    const double c = rng.uniform(-500.0, 500.0);
    Matrix shifted = m;
    for (double& v : shifted.values()) v += c;
    Tape tape;
    const Matrix p = softmax_rows(tape.constant(m)).value();
    const Matrix q = softmax_rows(tape.constant(shifted)).value();
    for (size_t r = 0; r < 4; ++r) {
      double sum = 0.0;
      for (size_t j = 0; j < 6; ++j) {
        EXPECT_GE(p(r, j), 0.0);
        EXPECT_NEAR(p(r, j), q(r, j), 1e-12);
        sum += p(r, j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(SoftmaxTest, LargeInputsStayFinite) {
  Tape tape;
  const Matrix out = softmax_rows(tape.constant(Matrix::from_rows({{1000, 1001, -1000}}))).value();
  EXPECT_TRUE(all_finite(out));
}

TEST(MseTest, Examples) {
  Tape tape;
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(mse(tape.constant(a), tape.constant(a)).value()(0, 0), 0.0);
  EXPECT_EQ(mse(tape.constant(Matrix::from_rows({{1}})), tape.constant(Matrix::from_rows({{0}})))
                .value()(0, 0),
            1.0);
  Rng rng(3);
  const Matrix p = random_matrix(5, 3, rng);
  const Matrix t = random_matrix(5, 3, rng);
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) sum += (p[i] - t[i]) * (p[i] - t[i]);
  EXPECT_NEAR(mse(tape.constant(p), tape.constant(t)).value()(0, 0), sum / 15.0, 1e-15);
  EXPECT_THROW(mse(tape.constant(Matrix(2, 2)), tape.constant(Matrix(2, 3))), Error);
}

TEST(BackwardTest, SquareHandCalculus) {
  Tape tape;
  Var x = tape.variable(Matrix::from_rows({{3}}));
  tape.backward(mul(x, x));
  EXPECT_EQ(x.grad()(0, 0), 6.0);
}

TEST(BackwardTest, NonScalarLossIsContractError) {
  Tape tape;
  Var x = tape.variable(Matrix(2, 2, 1.0));
  try {
    tape.backward(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kContract);
  }
}

TEST(BackwardTest, MatmulGradientIsUpstreamTimesTranspose) {
  Rng rng(4);
  const Matrix a = random_matrix(3, 4, rng);
  const Matrix b = random_matrix(4, 2, rng);
  const Matrix g = random_matrix(3, 2, rng);
  Tape tape;
  Var va = tape.variable(a);
  Var vb = tape.variable(b);
  tape.backward(sum_all(mul(matmul(va, vb), tape.constant(g))));
  const Matrix want = naive_product(g, b.transposed());
  for (size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(va.grad()[i], want[i], 1e-14);
}

TEST(BackwardTest, UnreachedParametersGetZero) {
  ParameterStore store;
  const size_t used = store.add("used", Matrix::from_rows({{2}}));
  const size_t unused = store.add("unused", Matrix::from_rows({{5}}));
  Tape tape;
  Var p = tape.parameter(store, used);
  Var loss = mul(p, p);
  const Gradients grads = backward(loss, store);
  ASSERT_EQ(grads.size(), 2u);
  EXPECT_EQ(grads[used](0, 0), 4.0);
  EXPECT_EQ(grads[unused](0, 0), 0.0);
}

TEST(BackwardTest, SharedParameterAccumulates) {
  ParameterStore store;
  const size_t idx = store.add("w", Matrix::from_rows({{3}}));
  Tape tape;
  Var a = tape.parameter(store, idx);
  Var b = tape.parameter(store, idx);
  EXPECT_EQ(a.id(), b.id());
  const Gradients grads = backward(add(mul(a, b), a), store);
  EXPECT_EQ(grads[idx](0, 0), 7.0);
}

class OperationGradientTest : public ::testing::TestWithParam<int> {};

TEST_P(OperationGradientTest, MatchesCentralDifferences) {
  for (const auto& c : testing::operation_grad_cases(static_cast<uint64_t>(GetParam()) + 1)) {
    const testing::GradCheck result = testing::check_gradients(c.build, c.inputs);
    EXPECT_GT(result.checked, 0u) << c.name;
    EXPECT_LT(result.max_rel_error, 1e-4) << c.name;
  }
}

INSTANTIATE_TEST_SUITE_P(TenPoints, OperationGradientTest, ::testing::Range(0, 10));

TEST(TapeTest, ForwardIsBitIdentical) {
  Rng rng(6);
  const Matrix a = random_matrix(4, 5, rng);
  const Matrix b = random_matrix(3, 5, rng);
  auto run = [&] {
    Tape tape;
    Var h = relu(matmul_nt(tape.constant(a), tape.constant(b)));
    return softmax_rows(h).value();
  };
  EXPECT_EQ(run(), run());
}

TEST(TapeTest, QueryScoresAndWeightedTokensHandValues) {
  Tape tape;
  // Two queries, two tokens each.
  Var q = tape.constant(Matrix::from_rows({{1, 0}, {0, 2}}));
  Var keys = tape.constant(Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}, {7, 8}}));
  EXPECT_EQ(query_scores(q, keys, 2).value(), Matrix::from_rows({{1, 3}, {12, 16}}));
  Var p = tape.constant(Matrix::from_rows({{0.5, 0.5}, {1, 0}}));
  EXPECT_EQ(weighted_tokens(p, keys, 2).value(), Matrix::from_rows({{2, 3}, {5, 6}}));
}

TEST(TapeTest, GatherAndScatter) {
  Tape tape;
  Var base = tape.constant(Matrix::from_rows({{1}, {2}, {3}}));
  Var vals = tape.constant(Matrix::from_rows({{10}, {20}}));
  EXPECT_EQ(scatter_add_rows(base, {2, 0}, vals).value(), Matrix::from_rows({{21}, {2}, {13}}));
  EXPECT_EQ(gather_rows(base, {2, 2, 0}).value(), Matrix::from_rows({{3}, {3}, {1}}));
  EXPECT_THROW(gather_rows(base, {3}), Error);
}

TEST(ParameterStoreTest, DigestTracksValuesAndNames) {
  ParameterStore a;
  a.add("w", Matrix::from_rows({{1, 2}}));
  ParameterStore b;
  b.add("w", Matrix::from_rows({{1, 2}}));
  EXPECT_EQ(a.digest(), b.digest());
  b.value("w")(0, 1) = 2.0000001;
  EXPECT_NE(a.digest(), b.digest());
  ParameterStore c;
  c.add("v", Matrix::from_rows({{1, 2}}));
  EXPECT_NE(a.digest(), c.digest());
  EXPECT_THROW(a.add("w", Matrix(1, 1)), Error);
}

}  // namespace
}  // namespace mtmt::diff
