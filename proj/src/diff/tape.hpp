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

#ifndef MTMT_DIFF_TAPE_HPP_
#define MTMT_DIFF_TAPE_HPP_

#include <cstddef>
#include <span>
#include <deque>
#include <vector>

#include "diff/matrix.hpp"
#include "diff/parameters.hpp"

namespace mtmt::diff {

enum class OpKind {
  kConstant,
  kVariable,
  kParameter,
  kMatMul,
  kMatMulNT,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddRowVector,
  kRelu,
  kSoftmaxRows,
  kSumAll,
  kRowSum,
  kSliceCols,
  kConcatCols,
  kRowScale,
  kReshape,
  kGatherRows,
  kScatterAddRows,
  kQueryScores,
  kWeightedTokens,
  kMse,
};

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  // Zero matrix when the node was not reached by the last backward sweep.
  Matrix grad() const;
  size_t rows() const { return value().rows(); }
  size_t cols() const { return value().cols(); }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

struct Node {
  OpKind op = OpKind::kConstant;
  int a = -1;
  int b = -1;
  std::vector<int> extra;
  std::vector<size_t> index;
  size_t p0 = 0;
  size_t p1 = 0;
  double scalar = 0.0;
  Matrix value;
  const Matrix* external = nullptr;
  int param_index = -1;
  bool needs_grad = false;
  Matrix grad;

  const Matrix& val() const { return external != nullptr ? *external : value; }
};

// Append-only record of a forward computation over an acyclic graph. Node ids
// are assigned in creation order, which is a topological order.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Leaf whose gradient is kept on the tape after backward().
  Var variable(Matrix value);
  // Leaf bound to a stored parameter. Repeated binds of the same entry share
  // one node. The store must outlive the tape and stay unmodified meanwhile.
  Var parameter(const ParameterStore& store, size_t index);

  // Reverse sweep from a 1x1 loss node.
  void backward(Var loss);
  // Per-parameter gradients after backward(); unreached parameters are zero.
  Gradients gradients(const ParameterStore& store) const;

  size_t node_count() const { return nodes_.size(); }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  const Matrix& value(int id) const { return node(id).val(); }
  Matrix grad(int id) const;

  Var push(Node node);

 private:
  void propagate(Node& n);
  Matrix& grad_slot(int id);

  std::deque<Node> nodes_;
  const ParameterStore* bound_store_ = nullptr;
  std::vector<int> param_nodes_;
};

Var matmul(Var a, Var b);
// a * b^T, the layout used for every linear projection (weights are out x in).
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
// Adds a 1 x n row vector to every row.
Var add_row_vector(Var a, Var bias);
Var relu(Var a);
Var softmax_rows(Var a);
Var sum_all(Var a);
Var row_sum(Var a);
Var slice_cols(Var a, size_t begin, size_t count);
Var concat_cols(std::span<const Var> parts);
// Multiplies row i of `a` by s(i, 0).
Var row_scale(Var a, Var s);
Var reshape(Var a, size_t rows, size_t cols);
Var gather_rows(Var a, std::vector<size_t> rows);
// base with vals(r, :) added onto row rows[r].
Var scatter_add_rows(Var base, std::vector<size_t> rows, Var vals);
// Single-query attention scores. q is B x a, keys is (B*tokens) x a; the
// result is B x tokens with s(b, l) = <q_b, keys_{b*tokens+l}>.
Var query_scores(Var q, Var keys, size_t tokens);
// p is B x tokens, values is (B*tokens) x a; result row b is
// sum_l p(b, l) * values_{b*tokens+l}.
Var weighted_tokens(Var p, Var values, size_t tokens);
// Mean of squared elementwise differences, 1 x 1.
Var mse(Var pred, Var target);

// Convenience: backward from `loss` and collect the parameter gradient map.
Gradients backward(Var loss, const ParameterStore& store);

}  // namespace mtmt::diff

#endif  // MTMT_DIFF_TAPE_HPP_
