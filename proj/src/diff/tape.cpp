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

#include "diff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace mtmt::diff {
namespace {

Tape& tape_of(Var a) {
  check(a.valid(), ErrorKind::kContract, "operation on an unbound variable");
  return *a.tape();
}

Tape& tape_of(Var a, Var b) {
  Tape& t = tape_of(a);
  check(b.valid() && b.tape() == &t, ErrorKind::kContract,
        "operands recorded on different tapes");
  return t;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  check(a.same_shape(b), ErrorKind::kShape,
        std::string(op) + " operands differ: " + a.shape_string() + " vs " + b.shape_string());
}

Node make_node(OpKind op, Tape& t, int a, int b = -1) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.needs_grad = (a >= 0 && t.node(a).needs_grad) || (b >= 0 && t.node(b).needs_grad);
  return n;
}

void add_into(Matrix& dst, const Matrix& src) {
  auto d = dst.values();
  auto s = src.values();
  for (size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }
Matrix Var::grad() const { return tape_->grad(id_); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Matrix value) {
  Node n;
  n.op = OpKind::kVariable;
  n.value = std::move(value);
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(const ParameterStore& store, size_t index) {
  if (bound_store_ == nullptr) {
    bound_store_ = &store;
    param_nodes_.assign(store.size(), -1);
  }
  check(bound_store_ == &store, ErrorKind::kContract,
        "a tape binds parameters from a single store");
  check(index < store.size(), ErrorKind::kIndex, "parameter index out of range");
  if (param_nodes_[index] >= 0) return Var(this, param_nodes_[index]);
  Node n;
  n.op = OpKind::kParameter;
  n.external = &store.at(index).value;
  n.param_index = static_cast<int>(index);
  n.needs_grad = true;
  Var v = push(std::move(n));
  param_nodes_[index] = v.id();
  return v;
}

Matrix Tape::grad(int id) const {
  const Node& n = node(id);
  if (!n.grad.same_shape(n.val())) return Matrix(n.val().rows(), n.val().cols());
  return n.grad;
}

Matrix& Tape::grad_slot(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (n.grad.size() != n.val().size() || !n.grad.same_shape(n.val())) {
    n.grad = Matrix(n.val().rows(), n.val().cols());
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  check(loss.valid() && loss.tape() == this, ErrorKind::kContract,
        "loss is not recorded on this tape");
  const Matrix& lv = loss.value();
  check(lv.rows() == 1 && lv.cols() == 1, ErrorKind::kContract,
        "backward requires a scalar loss, got " + lv.shape_string());
  for (auto& n : nodes_) n.grad = Matrix();
  grad_slot(loss.id())(0, 0) = 1.0;
  for (size_t i = static_cast<size_t>(loss.id()) + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.empty()) continue;
    propagate(n);
  }
}

Gradients Tape::gradients(const ParameterStore& store) const {
  Gradients grads = zero_gradients(store);
  if (bound_store_ != &store) return grads;
  for (size_t i = 0; i < param_nodes_.size(); ++i) {
    if (param_nodes_[i] < 0) continue;
    const Node& n = node(param_nodes_[i]);
    if (!n.grad.empty()) grads[i] = n.grad;
  }
  return grads;
}

void Tape::propagate(Node& n) {
  const Matrix& g = n.grad;
  auto wants = [&](int id) { return id >= 0 && node(id).needs_grad; };
  switch (n.op) {
    case OpKind::kConstant:
    case OpKind::kVariable:
    case OpKind::kParameter:
      break;
    case OpKind::kMatMul: {
      const Matrix& a = value(n.a);
      const Matrix& b = value(n.b);
      if (wants(n.a)) gemm_nt(g, b, grad_slot(n.a));
      if (wants(n.b)) gemm_tn(a, g, grad_slot(n.b));
      break;
    }
    case OpKind::kMatMulNT: {
      const Matrix& a = value(n.a);
      const Matrix& b = value(n.b);
      if (wants(n.a)) gemm_nn(g, b, grad_slot(n.a));
      if (wants(n.b)) gemm_tn(g, a, grad_slot(n.b));
      break;
    }
    case OpKind::kAdd:
      if (wants(n.a)) add_into(grad_slot(n.a), g);
      if (wants(n.b)) add_into(grad_slot(n.b), g);
      break;
    case OpKind::kSub:
      if (wants(n.a)) add_into(grad_slot(n.a), g);
      if (wants(n.b)) {
        auto d = grad_slot(n.b).values();
        auto s = g.values();
        for (size_t i = 0; i < d.size(); ++i) d[i] -= s[i];
      }
      break;
    case OpKind::kMul: {
      const auto av = value(n.a).values();
      const auto bv = value(n.b).values();
      const auto gv = g.values();
      if (wants(n.a)) {
        auto d = grad_slot(n.a).values();
        for (size_t i = 0; i < d.size(); ++i) d[i] += gv[i] * bv[i];
      }
      if (wants(n.b)) {
        auto d = grad_slot(n.b).values();
        for (size_t i = 0; i < d.size(); ++i) d[i] += gv[i] * av[i];
      }
      break;
    }
    case OpKind::kScale: {
      auto d = grad_slot(n.a).values();
      const auto gv = g.values();
      for (size_t i = 0; i < d.size(); ++i) d[i] += n.scalar * gv[i];
      break;
    }
    case OpKind::kAddRowVector: {
      if (wants(n.a)) add_into(grad_slot(n.a), g);
      if (wants(n.b)) {
        Matrix& db = grad_slot(n.b);
        for (size_t r = 0; r < g.rows(); ++r)
          for (size_t c = 0; c < g.cols(); ++c) db(0, c) += g(r, c);
      }
      break;
    }
    case OpKind::kRelu: {
      const auto av = value(n.a).values();
      const auto gv = g.values();
      auto d = grad_slot(n.a).values();
      for (size_t i = 0; i < d.size(); ++i)
        if (av[i] > 0.0) d[i] += gv[i];
      break;
    }
    case OpKind::kSoftmaxRows: {
      const Matrix& y = n.value;
      Matrix& d = grad_slot(n.a);
      for (size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
        for (size_t c = 0; c < y.cols(); ++c) d(r, c) += y(r, c) * (g(r, c) - dot);
      }
      break;
    }
    case OpKind::kSumAll: {
      const double s = g(0, 0);
      for (double& v : grad_slot(n.a).values()) v += s;
      break;
    }
    case OpKind::kRowSum: {
      Matrix& d = grad_slot(n.a);
      for (size_t r = 0; r < d.rows(); ++r)
        for (size_t c = 0; c < d.cols(); ++c) d(r, c) += g(r, 0);
      break;
    }
    case OpKind::kSliceCols: {
      Matrix& d = grad_slot(n.a);
      for (size_t r = 0; r < g.rows(); ++r)
        for (size_t c = 0; c < g.cols(); ++c) d(r, n.p0 + c) += g(r, c);
      break;
    }
    case OpKind::kConcatCols: {
      size_t offset = 0;
      for (int part : n.extra) {
        const size_t width = value(part).cols();
        if (wants(part)) {
          Matrix& d = grad_slot(part);
          for (size_t r = 0; r < g.rows(); ++r)
            for (size_t c = 0; c < width; ++c) d(r, c) += g(r, offset + c);
        }
        offset += width;
      }
      break;
    }
    case OpKind::kRowScale: {
      const Matrix& a = value(n.a);
      const Matrix& s = value(n.b);
      if (wants(n.a)) {
        Matrix& d = grad_slot(n.a);
        for (size_t r = 0; r < a.rows(); ++r)
          for (size_t c = 0; c < a.cols(); ++c) d(r, c) += g(r, c) * s(r, 0);
      }
      if (wants(n.b)) {
        Matrix& d = grad_slot(n.b);
        for (size_t r = 0; r < a.rows(); ++r) {
          double acc = 0.0;
          for (size_t c = 0; c < a.cols(); ++c) acc += g(r, c) * a(r, c);
          d(r, 0) += acc;
        }
      }
      break;
    }
    case OpKind::kReshape: {
      auto d = grad_slot(n.a).values();
      const auto gv = g.values();
      for (size_t i = 0; i < d.size(); ++i) d[i] += gv[i];
      break;
    }
    case OpKind::kGatherRows: {
      Matrix& d = grad_slot(n.a);
      for (size_t r = 0; r < n.index.size(); ++r) {
        auto dst = d.row(n.index[r]);
        auto src = g.row(r);
        for (size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
      }
      break;
    }
    case OpKind::kScatterAddRows: {
      if (wants(n.a)) add_into(grad_slot(n.a), g);
      if (wants(n.b)) {
        Matrix& d = grad_slot(n.b);
        for (size_t r = 0; r < n.index.size(); ++r) {
          auto dst = d.row(r);
          auto src = g.row(n.index[r]);
          for (size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
        }
      }
      break;
    }
    case OpKind::kQueryScores: {
      const Matrix& q = value(n.a);
      const Matrix& keys = value(n.b);
      const size_t tokens = n.p0;
      const size_t width = q.cols();
      if (wants(n.a)) {
        Matrix& dq = grad_slot(n.a);
        for (size_t b = 0; b < q.rows(); ++b)
          for (size_t l = 0; l < tokens; ++l) {
            const double s = g(b, l);
            const auto k = keys.row(b * tokens + l);
            for (size_t c = 0; c < width; ++c) dq(b, c) += s * k[c];
          }
      }
      if (wants(n.b)) {
        Matrix& dk = grad_slot(n.b);
        for (size_t b = 0; b < q.rows(); ++b)
          for (size_t l = 0; l < tokens; ++l) {
            const double s = g(b, l);
            auto k = dk.row(b * tokens + l);
            for (size_t c = 0; c < width; ++c) k[c] += s * q(b, c);
          }
      }
      break;
    }
    case OpKind::kWeightedTokens: {
      const Matrix& p = value(n.a);
      const Matrix& vals = value(n.b);
      const size_t tokens = n.p0;
      const size_t width = vals.cols();
      if (wants(n.a)) {
        Matrix& dp = grad_slot(n.a);
        for (size_t b = 0; b < p.rows(); ++b)
          for (size_t l = 0; l < tokens; ++l) {
            const auto v = vals.row(b * tokens + l);
            double acc = 0.0;
            for (size_t c = 0; c < width; ++c) acc += g(b, c) * v[c];
            dp(b, l) += acc;
          }
      }
      if (wants(n.b)) {
        Matrix& dv = grad_slot(n.b);
        for (size_t b = 0; b < p.rows(); ++b)
          for (size_t l = 0; l < tokens; ++l) {
            const double w = p(b, l);
            auto v = dv.row(b * tokens + l);
            for (size_t c = 0; c < width; ++c) v[c] += w * g(b, c);
          }
      }
      break;
    }
    case OpKind::kMse: {
      const auto pv = value(n.a).values();
      const auto tv = value(n.b).values();
      const double k = 2.0 * g(0, 0) / static_cast<double>(pv.size());
      if (wants(n.a)) {
        auto d = grad_slot(n.a).values();
        for (size_t i = 0; i < d.size(); ++i) d[i] += k * (pv[i] - tv[i]);
      }
      if (wants(n.b)) {
        auto d = grad_slot(n.b).values();
        for (size_t i = 0; i < d.size(); ++i) d[i] -= k * (pv[i] - tv[i]);
      }
      break;
    }
  }
}

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  check(av.cols() == bv.rows(), ErrorKind::kShape,
        "matmul inner dimensions differ: " + av.shape_string() + " x " + bv.shape_string());
  Node n = make_node(OpKind::kMatMul, t, a.id(), b.id());
  n.value = Matrix(av.rows(), bv.cols());
  gemm_nn(av, bv, n.value);
  return t.push(std::move(n));
}

Var matmul_nt(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  check(av.cols() == bv.cols(), ErrorKind::kShape,
        "matmul_nt inner dimensions differ: " + av.shape_string() + " x " +
            bv.shape_string() + "^T");
  Node n = make_node(OpKind::kMatMulNT, t, a.id(), b.id());
  n.value = Matrix(av.rows(), bv.rows());
  gemm_nt(av, bv, n.value);
  return t.push(std::move(n));
}

namespace {

template <typename F>
Var elementwise(OpKind op, const char* name, Var a, Var b, F f) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  require_same_shape(av, bv, name);
  Node n = make_node(op, t, a.id(), b.id());
  n.value = Matrix(av.rows(), av.cols());
  auto out = n.value.values();
  const auto x = av.values();
  const auto y = bv.values();
  for (size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return t.push(std::move(n));
}

}  // namespace

Var add(Var a, Var b) {
  return elementwise(OpKind::kAdd, "add", a, b, [](double x, double y) { return x + y; });
}

Var sub(Var a, Var b) {
  return elementwise(OpKind::kSub, "sub", a, b, [](double x, double y) { return x - y; });
}

Var mul(Var a, Var b) {
  return elementwise(OpKind::kMul, "mul", a, b, [](double x, double y) { return x * y; });
}

Var scale(Var a, double factor) {
  Tape& t = tape_of(a);
  Node n = make_node(OpKind::kScale, t, a.id());
  n.scalar = factor;
  n.value = a.value();
  for (double& v : n.value.values()) v *= factor;
  return t.push(std::move(n));
}

Var add_row_vector(Var a, Var bias) {
  Tape& t = tape_of(a, bias);
  const Matrix& av = a.value();
  const Matrix& bv = bias.value();
  check(bv.rows() == 1 && bv.cols() == av.cols(), ErrorKind::kShape,
        "row-vector add expects 1x" + std::to_string(av.cols()) + " bias, got " +
            bv.shape_string());
  Node n = make_node(OpKind::kAddRowVector, t, a.id(), bias.id());
  n.value = av;
  for (size_t r = 0; r < av.rows(); ++r) {
    auto row = n.value.row(r);
    for (size_t c = 0; c < row.size(); ++c) row[c] += bv(0, c);
  }
  return t.push(std::move(n));
}

Var relu(Var a) {
  Tape& t = tape_of(a);
  Node n = make_node(OpKind::kRelu, t, a.id());
  n.value = a.value();
  for (double& v : n.value.values()) v = v > 0.0 ? v : 0.0;
  return t.push(std::move(n));
}

Var softmax_rows(Var a) {
  Tape& t = tape_of(a);
  Node n = make_node(OpKind::kSoftmaxRows, t, a.id());
  n.value = a.value();
  for (size_t r = 0; r < n.value.rows(); ++r) {
    auto row = n.value.row(r);
    if (row.empty()) continue;
    const double top = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return t.push(std::move(n));
}

Var sum_all(Var a) {
  Tape& t = tape_of(a);
  Node n = make_node(OpKind::kSumAll, t, a.id());
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  n.value = Matrix(1, 1, total);
  return t.push(std::move(n));
}

Var row_sum(Var a) {
  Tape& t = tape_of(a);
  const Matrix& av = a.value();
  Node n = make_node(OpKind::kRowSum, t, a.id());
  n.value = Matrix(av.rows(), 1);
  for (size_t r = 0; r < av.rows(); ++r) {
    double total = 0.0;
    for (double v : av.row(r)) total += v;
    n.value(r, 0) = total;
  }
  return t.push(std::move(n));
}

Var slice_cols(Var a, size_t begin, size_t count) {
  Tape& t = tape_of(a);
  const Matrix& av = a.value();
  check(begin + count <= av.cols(), ErrorKind::kShape,
        "column slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
            ") exceeds " + av.shape_string());
  Node n = make_node(OpKind::kSliceCols, t, a.id());
  n.p0 = begin;
  n.p1 = count;
  n.value = Matrix(av.rows(), count);
  for (size_t r = 0; r < av.rows(); ++r)
    for (size_t c = 0; c < count; ++c) n.value(r, c) = av(r, begin + c);
  return t.push(std::move(n));
}

Var concat_cols(std::span<const Var> parts) {
  check(!parts.empty(), ErrorKind::kShape, "concat of zero parts");
  Tape& t = tape_of(parts.front());
  const size_t rows = parts.front().rows();
  size_t width = 0;
  Node n;
  n.op = OpKind::kConcatCols;
  for (const Var& p : parts) {
    check(p.tape() == &t, ErrorKind::kContract, "operands recorded on different tapes");
    check(p.rows() == rows, ErrorKind::kShape,
          "concat row counts differ: " + std::to_string(rows) + " vs " +
              p.value().shape_string());
    width += p.cols();
    n.extra.push_back(p.id());
    n.needs_grad = n.needs_grad || t.node(p.id()).needs_grad;
  }
  n.value = Matrix(rows, width);
  size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& pv = p.value();
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < pv.cols(); ++c) n.value(r, offset + c) = pv(r, c);
    offset += pv.cols();
  }
  return t.push(std::move(n));
}

Var row_scale(Var a, Var s) {
  Tape& t = tape_of(a, s);
  const Matrix& av = a.value();
  const Matrix& sv = s.value();
  check(sv.cols() == 1 && sv.rows() == av.rows(), ErrorKind::kShape,
        "row scale expects " + shape_string(av.rows(), 1) + " factors, got " +
            sv.shape_string());
  Node n = make_node(OpKind::kRowScale, t, a.id(), s.id());
  n.value = av;
  for (size_t r = 0; r < av.rows(); ++r)
    for (double& v : n.value.row(r)) v *= sv(r, 0);
  return t.push(std::move(n));
}

Var reshape(Var a, size_t rows, size_t cols) {
  Tape& t = tape_of(a);
  Node n = make_node(OpKind::kReshape, t, a.id());
  n.value = a.value().reshaped(rows, cols);
  return t.push(std::move(n));
}

Var gather_rows(Var a, std::vector<size_t> rows) {
  Tape& t = tape_of(a);
  const Matrix& av = a.value();
  Node n = make_node(OpKind::kGatherRows, t, a.id());
  n.value = Matrix(rows.size(), av.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    check(rows[r] < av.rows(), ErrorKind::kIndex,
          "gather row " + std::to_string(rows[r]) + " outside " + av.shape_string());
    std::copy(av.row(rows[r]).begin(), av.row(rows[r]).end(), n.value.row(r).begin());
  }
  n.index = std::move(rows);
  return t.push(std::move(n));
}

Var scatter_add_rows(Var base, std::vector<size_t> rows, Var vals) {
  Tape& t = tape_of(base, vals);
  const Matrix& bv = base.value();
  const Matrix& vv = vals.value();
  check(vv.rows() == rows.size() && vv.cols() == bv.cols(), ErrorKind::kShape,
        "scatter of " + vv.shape_string() + " into " + bv.shape_string() + " with " +
            std::to_string(rows.size()) + " row indices");
  Node n = make_node(OpKind::kScatterAddRows, t, base.id(), vals.id());
  n.value = bv;
  for (size_t r = 0; r < rows.size(); ++r) {
    check(rows[r] < bv.rows(), ErrorKind::kIndex,
          "scatter row " + std::to_string(rows[r]) + " outside " + bv.shape_string());
    auto dst = n.value.row(rows[r]);
    auto src = vv.row(r);
    for (size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
  }
  n.index = std::move(rows);
  return t.push(std::move(n));
}

Var query_scores(Var q, Var keys, size_t tokens) {
  Tape& t = tape_of(q, keys);
  const Matrix& qv = q.value();
  const Matrix& kv = keys.value();
  check(tokens > 0 && kv.rows() == qv.rows() * tokens && kv.cols() == qv.cols(),
        ErrorKind::kShape,
        "attention keys " + kv.shape_string() + " do not match queries " +
            qv.shape_string() + " with " + std::to_string(tokens) + " tokens");
  Node n = make_node(OpKind::kQueryScores, t, q.id(), keys.id());
  n.p0 = tokens;
  n.value = Matrix(qv.rows(), tokens);
  for (size_t b = 0; b < qv.rows(); ++b) {
    const auto qrow = qv.row(b);
    for (size_t l = 0; l < tokens; ++l) {
      const auto k = kv.row(b * tokens + l);
      double acc = 0.0;
      for (size_t c = 0; c < qrow.size(); ++c) acc += qrow[c] * k[c];
      n.value(b, l) = acc;
    }
  }
  return t.push(std::move(n));
}

Var weighted_tokens(Var p, Var values, size_t tokens) {
  Tape& t = tape_of(p, values);
  const Matrix& pv = p.value();
  const Matrix& vv = values.value();
  check(pv.cols() == tokens && vv.rows() == pv.rows() * tokens, ErrorKind::kShape,
        "token weights " + pv.shape_string() + " do not match values " + vv.shape_string());
  Node n = make_node(OpKind::kWeightedTokens, t, p.id(), values.id());
  n.p0 = tokens;
  n.value = Matrix(pv.rows(), vv.cols());
  for (size_t b = 0; b < pv.rows(); ++b) {
    auto out = n.value.row(b);
    for (size_t l = 0; l < tokens; ++l) {
      const double w = pv(b, l);
      const auto v = vv.row(b * tokens + l);
      for (size_t c = 0; c < out.size(); ++c) out[c] += w * v[c];
    }
  }
  return t.push(std::move(n));
}

Var mse(Var pred, Var target) {
  Tape& t = tape_of(pred, target);
  const Matrix& pv = pred.value();
  const Matrix& tv = target.value();
  require_same_shape(pv, tv, "mse");
  check(!pv.empty(), ErrorKind::kShape, "mse of empty matrices");
  Node n = make_node(OpKind::kMse, t, pred.id(), target.id());
  double total = 0.0;
  const auto a = pv.values();
  const auto b = tv.values();
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  n.value = Matrix(1, 1, total / static_cast<double>(a.size()));
  return t.push(std::move(n));
}

Gradients backward(Var loss, const ParameterStore& store) {
  check(loss.valid(), ErrorKind::kContract, "backward on an unbound variable");
  loss.tape()->backward(loss);
  return loss.tape()->gradients(store);
}

}  // namespace mtmt::diff
