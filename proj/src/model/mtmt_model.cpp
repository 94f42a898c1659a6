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

#include "model/mtmt_model.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace mtmt::model {
namespace {

Matrix column_of(const Matrix& m, size_t col) {
  Matrix out(m.rows(), 1);
  for (size_t r = 0; r < m.rows(); ++r) out(r, 0) = m(r, col);
  return out;
}

}  // namespace

double compose_response(double natural, double base_uplift, double incremental_uplift,
                        bool treated) {
  return treated ? natural + base_uplift + incremental_uplift : natural;
}

double overall_uplift(double base_uplift, double incremental_uplift, bool treated) {
  return treated ? base_uplift + incremental_uplift : base_uplift;
}

std::vector<double> embed_treatment(size_t index, const Matrix& table) {
  check(index < table.cols(), ErrorKind::kIndex,
        "treatment index " + std::to_string(index) + " outside embedding table " +
            table.shape_string());
  Matrix one_hot(table.cols(), 1);
  one_hot(index, 0) = 1.0;
  const Matrix column = diff::matmul(table, one_hot);
  return {column.values().begin(), column.values().end()};
}

std::vector<Candidate> rank_candidates(std::vector<Candidate> candidates, size_t rank_task) {
  for (const auto& c : candidates)
    check(rank_task < c.gamma.size(), ErrorKind::kIndex,
          "rank task " + std::to_string(rank_task) + " out of range");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [rank_task](const Candidate& a, const Candidate& b) {
                     if (a.gamma[rank_task] != b.gamma[rank_task])
                       return a.gamma[rank_task] > b.gamma[rank_task];
                     return a.index < b.index;
                   });
  for (size_t r = 0; r < candidates.size(); ++r) candidates[r].rank = r + 1;
  return candidates;
}

MtmtModel::MtmtModel(ModelConfig config, uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  const ModelConfig& c = config_;
  Rng rng(seed);
  const size_t d = c.feature_dim;
  const size_t rep = c.representation_size();

  for (size_t k = 0; k < c.num_tasks; ++k)
    gates_.push_back(params_.add("gate.k" + std::to_string(k),
                                 fan_in_uniform(c.num_experts, d, d, rng)));
  std::vector<size_t> expert_widths = c.expert_hidden;
  expert_widths.push_back(rep);
  for (size_t j = 0; j < c.num_experts; ++j)
    experts_.push_back(Mlp::create(params_, "expert" + std::to_string(j), d, expert_widths,
                                   /*relu_last=*/false, c.expert_residual, rng));

  auto make_path = [&](const std::string& name, size_t table_cols) {
    InteractionPath p;
    p.table = params_.add("embed." + name, fan_in_uniform(c.embed_dim, table_cols, table_cols, rng),
                          /*decay=*/false);
    p.query = params_.add("path." + name + ".query",
                          fan_in_uniform(c.attention_dim, c.embed_dim, c.embed_dim, rng));
    p.key = params_.add("path." + name + ".key",
                        fan_in_uniform(c.attention_dim, c.token_width, c.token_width, rng));
    p.value = params_.add("path." + name + ".value",
                          fan_in_uniform(c.attention_dim, c.token_width, c.token_width, rng));
    if (c.use_enhancer && !c.enhancer_hidden.empty()) {
      p.enhancer = Mlp::create(params_, "enhancer." + name, c.attention_dim, c.enhancer_hidden,
                               /*relu_last=*/true, /*residual=*/false, rng);
    }
    return p;
  };
  base_path_ = make_path("base", 2);
  if (c.has_secondary_path()) secondary_path_ = make_path("secondary", c.num_treatments);

  for (size_t k = 0; k < c.num_tasks; ++k)
    natural_heads_.push_back(
        params_.add("head.natural.k" + std::to_string(k), fan_in_uniform(1, rep, rep, rng)));

  const size_t heads = c.per_task_heads ? c.num_tasks : 1;
  const size_t h = c.enhancer_output_size();
  auto head_name = [&](const std::string& kind, size_t slot) {
    return "head." + kind + "." + (c.per_task_heads ? "k" + std::to_string(slot) : "shared");
  };
  for (size_t s = 0; s < heads; ++s) {
    if (c.tiered) {
      base_heads_.push_back(params_.add(head_name("base", s), fan_in_uniform(1, h, h, rng)));
      if (c.has_secondary_path())
        incremental_heads_.push_back(
            params_.add(head_name("incremental", s), fan_in_uniform(1, h, h, rng)));
    } else {
      joint_heads_.push_back(
          params_.add(head_name("joint", s), fan_in_uniform(c.num_treatments, h, h, rng)));
    }
  }
}

size_t MtmtModel::parameter_count(const ModelConfig& c) {
  const size_t d = c.feature_dim;
  const size_t rep = c.representation_size();
  std::vector<size_t> expert_widths = c.expert_hidden;
  expert_widths.push_back(rep);
  size_t total = c.num_tasks * c.num_experts * d;
  total += c.num_experts * Mlp::parameter_count(d, expert_widths);
  const size_t enhancer = c.use_enhancer ? Mlp::parameter_count(c.attention_dim, c.enhancer_hidden) : 0;
  const size_t path = c.attention_dim * c.embed_dim + 2 * c.attention_dim * c.token_width + enhancer;
  total += c.embed_dim * 2 + path;
  if (c.has_secondary_path()) total += c.embed_dim * c.num_treatments + path;
  total += c.num_tasks * rep;
  const size_t heads = c.per_task_heads ? c.num_tasks : 1;
  const size_t h = c.enhancer_output_size();
  if (c.tiered) {
    total += heads * h * (c.has_secondary_path() ? 2 : 1);
  } else {
    total += heads * c.num_treatments * h;
  }
  return total;
}

const MtmtModel::InteractionPath& MtmtModel::path(Path p) const {
  if (p == Path::kBase) return base_path_;
  check(secondary_path_.has_value(), ErrorKind::kContract,
        "this model variant has no secondary interaction path");
  return *secondary_path_;
}

void MtmtModel::check_task(size_t task) const {
  check(task < config_.num_tasks, ErrorKind::kIndex,
        "task index " + std::to_string(task) + " outside [0, " +
            std::to_string(config_.num_tasks) + ")");
}

void MtmtModel::check_features(std::span<const double> x) const {
  check(x.size() == config_.feature_dim, ErrorKind::kShape,
        "feature vector of length " + std::to_string(x.size()) + ", model expects " +
            std::to_string(config_.feature_dim));
}

std::vector<Var> MtmtModel::expert_outputs(Tape& tape, Var x) const {
  std::vector<Var> outputs;
  outputs.reserve(experts_.size());
  for (const auto& expert : experts_) outputs.push_back(expert.forward(tape, params_, x));
  return outputs;
}

Var MtmtModel::task_representation(Tape& tape, Var x, const std::vector<Var>& experts,
                                   size_t task) const {
  Var gates = softmax_rows(project(tape, params_, x, gates_[task]));
  Var phi = row_scale(experts[0], slice_cols(gates, 0, 1));
  for (size_t j = 1; j < experts.size(); ++j)
    phi = add(phi, row_scale(experts[j], slice_cols(gates, j, 1)));
  return phi;
}

Var MtmtModel::natural_head(Tape& tape, Var phi, size_t task) const {
  return project(tape, params_, phi, natural_heads_[task]);
}

MtmtModel::Keys MtmtModel::path_keys(Tape& tape, Var phi, const InteractionPath& p) const {
  Var tokens = reshape(phi, phi.rows() * config_.token_count, config_.token_width);
  return Keys{project(tape, params_, tokens, p.key), project(tape, params_, tokens, p.value)};
}

Var MtmtModel::embed(Tape& tape, Var one_hot, const InteractionPath& p) const {
  return matmul_nt(one_hot, tape.parameter(params_, p.table));
}

Var MtmtModel::attend(Tape& tape, Var embedding, const Keys& keys,
                      const InteractionPath& p) const {
  const size_t tokens = config_.token_count;
  Var query = project(tape, params_, embedding, p.query);
  Var scores = scale(query_scores(query, keys.keys, tokens),
                     1.0 / std::sqrt(static_cast<double>(config_.attention_dim)));
  if (config_.interaction == InteractionMode::kAttention)
    return weighted_tokens(softmax_rows(scores), keys.values, tokens);
  return scale(weighted_tokens(scores, keys.values, tokens), 1.0 / static_cast<double>(tokens));
}

Var MtmtModel::enhance(Tape& tape, Var psi, const InteractionPath& p) const {
  if (!p.enhancer) return psi;
  return p.enhancer->forward(tape, params_, psi);
}

Var MtmtModel::incremental_for(Tape& tape, Var embedding, const Keys& keys, size_t slot) const {
  Var psi = attend(tape, embedding, keys, *secondary_path_);
  return project(tape, params_, enhance(tape, psi, *secondary_path_), incremental_heads_[slot]);
}

std::vector<double> MtmtModel::gate_weights(std::span<const double> x, size_t task) const {
  check_task(task);
  check_features(x);
  Tape tape;
  Var gates = softmax_rows(
      project(tape, params_, tape.constant(Matrix::row_vector(x)), gates_[task]));
  return {gates.value().values().begin(), gates.value().values().end()};
}

std::vector<Matrix> MtmtModel::encode_user(std::span<const double> x) const {
  check_features(x);
  Tape tape;
  Var input = tape.constant(Matrix::row_vector(x));
  const std::vector<Var> experts = expert_outputs(tape, input);
  std::vector<Matrix> reps;
  for (size_t k = 0; k < config_.num_tasks; ++k) {
    Var phi = task_representation(tape, input, experts, k);
    reps.push_back(phi.value().reshaped(config_.token_count, config_.token_width));
  }
  return reps;
}

std::vector<double> MtmtModel::embed_base(int treated) const {
  check(treated == 0 || treated == 1, ErrorKind::kIndex, "base treatment flag must be 0 or 1");
  return embed_treatment(static_cast<size_t>(treated), params_.at(base_path_.table).value);
}

std::vector<double> MtmtModel::embed_secondary(size_t treatment) const {
  return embed_treatment(treatment, params_.at(path(Path::kSecondary).table).value);
}

double MtmtModel::natural_response(const Matrix& representation, size_t task) const {
  check_task(task);
  check(representation.size() == config_.representation_size(), ErrorKind::kShape,
        "representation " + representation.shape_string() + " does not hold " +
            std::to_string(config_.representation_size()) + " values");
  Tape tape;
  Var phi = tape.constant(representation.reshaped(1, representation.size()));
  return natural_head(tape, phi, task).value()(0, 0);
}

std::vector<double> MtmtModel::interact(std::span<const double> embedding,
                                        const Matrix& representation, Path which) const {
  const InteractionPath& p = path(which);
  check(embedding.size() == config_.embed_dim, ErrorKind::kShape,
        "embedding of length " + std::to_string(embedding.size()) + ", expected " +
            std::to_string(config_.embed_dim));
  Tape tape;
  Var phi = tape.constant(representation.reshaped(1, config_.representation_size()));
  Keys keys = path_keys(tape, phi, p);
  Var psi = attend(tape, tape.constant(Matrix::row_vector(embedding)), keys, p);
  return {psi.value().values().begin(), psi.value().values().end()};
}

std::vector<double> MtmtModel::attention_weights(std::span<const double> embedding,
                                                 const Matrix& representation,
                                                 Path which) const {
  check(config_.interaction == InteractionMode::kAttention, ErrorKind::kContract,
        "attention weights exist only in attention interaction mode");
  const InteractionPath& p = path(which);
  Tape tape;
  Var phi = tape.constant(representation.reshaped(1, config_.representation_size()));
  Keys keys = path_keys(tape, phi, p);
  Var query = project(tape, params_, tape.constant(Matrix::row_vector(embedding)), p.query);
  Var weights = softmax_rows(scale(query_scores(query, keys.keys, config_.token_count),
                                   1.0 / std::sqrt(static_cast<double>(config_.attention_dim))));
  return {weights.value().values().begin(), weights.value().values().end()};
}

HeadOutputs MtmtModel::uplift_heads(std::span<const double> psi_base,
                                    std::optional<std::span<const double>> psi_secondary,
                                    size_t task) const {
  check_task(task);
  check(config_.tiered, ErrorKind::kContract, "untiered models use joint_uplifts");
  check(psi_base.size() == config_.attention_dim, ErrorKind::kShape,
        "base interaction output has the wrong length");
  const size_t slot = head_slot(task);
  HeadOutputs out;
  Tape tape;
  Var base = enhance(tape, tape.constant(Matrix::row_vector(psi_base)), base_path_);
  out.base = project(tape, params_, base, base_heads_[slot]).value()(0, 0);
  if (secondary_path_) {
    check(psi_secondary.has_value() && psi_secondary->size() == config_.attention_dim,
          ErrorKind::kShape, "secondary interaction output missing or of the wrong length");
    Var sec = enhance(tape, tape.constant(Matrix::row_vector(*psi_secondary)), *secondary_path_);
    out.incremental = project(tape, params_, sec, incremental_heads_[slot]).value()(0, 0);
  }
  return out;
}

std::vector<double> MtmtModel::joint_uplifts(std::span<const double> psi_base,
                                             size_t task) const {
  check_task(task);
  check(!config_.tiered, ErrorKind::kContract, "tiered models use uplift_heads");
  Tape tape;
  Var base = enhance(tape, tape.constant(Matrix::row_vector(psi_base)), base_path_);
  Var joint = project(tape, params_, base, joint_heads_[head_slot(task)]);
  return {joint.value().values().begin(), joint.value().values().end()};
}

UpliftScores MtmtModel::forward_full(std::span<const double> x) const {
  check_features(x);
  const Predictions p = predict(Matrix::row_vector(x));
  UpliftScores scores;
  for (size_t k = 0; k < config_.num_tasks; ++k) {
    TaskScores t;
    t.natural_response = p.natural_at(0, k);
    t.base_uplift = p.base_at(0, k);
    if (!config_.single_treatment) {
      for (size_t m = 0; m < config_.num_treatments; ++m)
        t.incremental_uplifts.push_back(p.incremental_at(0, k, m));
    }
    for (size_t c = 0; c < p.num_candidates(); ++c) t.gamma.push_back(p.gamma_at(0, k, c));
    scores.tasks.push_back(std::move(t));
  }
  return scores;
}

std::vector<Candidate> MtmtModel::score_candidates(std::span<const double> x,
                                                   size_t rank_task) const {
  require_fitted("score_candidates");
  check_task(rank_task);
  const UpliftScores scores = forward_full(x);
  std::vector<Candidate> candidates(config_.num_candidates());
  for (size_t c = 0; c < candidates.size(); ++c) {
    candidates[c].index = c;
    for (const auto& task : scores.tasks) candidates[c].gamma.push_back(task.gamma[c]);
  }
  return rank_candidates(std::move(candidates), rank_task);
}

diff::Var MtmtModel::batch_loss(Tape& tape, const data::Batch& batch,
                                std::span<const double> task_weights) const {
  validate_batch(batch, config_.feature_dim, config_.num_tasks, config_.num_treatments,
                 task_weights);
  const size_t n = batch.size();
  const size_t m = config_.num_treatments;
  std::vector<size_t> treated;
  for (size_t i = 0; i < n; ++i)
    if (batch.base[i] == 1) treated.push_back(i);

  Var x = tape.constant(batch.x);
  const std::vector<Var> experts = expert_outputs(tape, x);

  Var base_embedding;
  Var secondary_embedding;
  Matrix secondary_one_hot(treated.size(), m);
  for (size_t r = 0; r < treated.size(); ++r)
    secondary_one_hot(r, static_cast<size_t>(batch.secondary[treated[r]])) = 1.0;
  Var secondary_mask;
  const bool centered = secondary_path_ && config_.center_incremental;
  std::vector<Var> all_embeddings;
  if (!treated.empty()) {
    Matrix base_one_hot(treated.size(), 2);
    for (size_t r = 0; r < treated.size(); ++r) base_one_hot(r, 1) = 1.0;
    base_embedding = embed(tape, tape.constant(std::move(base_one_hot)), base_path_);
    if (secondary_path_)
      secondary_embedding = embed(tape, tape.constant(secondary_one_hot), *secondary_path_);
    if (!config_.tiered) secondary_mask = tape.constant(secondary_one_hot);
    if (centered) {
      for (size_t t = 0; t < m; ++t) {
        Matrix one_hot(treated.size(), m);
        for (size_t r = 0; r < treated.size(); ++r) one_hot(r, t) = 1.0;
        all_embeddings.push_back(embed(tape, tape.constant(std::move(one_hot)), *secondary_path_));
      }
    }
  }

  Var total;
  for (size_t k = 0; k < config_.num_tasks; ++k) {
    Var phi = task_representation(tape, x, experts, k);
    Var prediction = natural_head(tape, phi, k);
    if (!treated.empty()) {
      const size_t slot = head_slot(k);
      Var phi_treated = gather_rows(phi, treated);
      Var psi_base = attend(tape, base_embedding, path_keys(tape, phi_treated, base_path_),
                            base_path_);
      Var enhanced_base = enhance(tape, psi_base, base_path_);
      Var uplift;
      if (config_.tiered) {
        uplift = project(tape, params_, enhanced_base, base_heads_[slot]);
        if (secondary_path_ && centered) {
          const Keys keys = path_keys(tape, phi_treated, *secondary_path_);
          Var received;
          Var mean;
          for (size_t t = 0; t < m; ++t) {
            Var inc = incremental_for(tape, all_embeddings[t], keys, slot);
            Var picked = mul(inc, tape.constant(column_of(secondary_one_hot, t)));
            received = t == 0 ? picked : add(received, picked);
            mean = t == 0 ? inc : add(mean, inc);
          }
          uplift = add(uplift, sub(received, scale(mean, 1.0 / static_cast<double>(m))));
        } else if (secondary_path_) {
          const Keys keys = path_keys(tape, phi_treated, *secondary_path_);
          uplift = add(uplift, incremental_for(tape, secondary_embedding, keys, slot));
        }
      } else {
        Var joint = project(tape, params_, enhanced_base, joint_heads_[slot]);
        uplift = row_sum(mul(joint, secondary_mask));
      }
      prediction = scatter_add_rows(prediction, treated, uplift);
    }
    Matrix target(n, 1);
    for (size_t i = 0; i < n; ++i) target(i, 0) = batch.y(i, k);
    Var residual = sub(prediction, tape.constant(std::move(target)));
    Var task_loss = scale(sum_all(mul(residual, residual)),
                          task_weights[k] / static_cast<double>(n));
    total = total.valid() ? add(total, task_loss) : task_loss;
  }
  return total;
}

Predictions MtmtModel::predict(const Matrix& features) const {
  check(features.cols() == config_.feature_dim, ErrorKind::kShape,
        "feature matrix " + features.shape_string() + " but model expects " +
            std::to_string(config_.feature_dim) + " columns");
  const size_t m = config_.num_treatments;
  Predictions out = Predictions::allocate(features.rows(), config_.num_tasks, m);
  out.has_natural_response = true;
  out.has_tiers = config_.tiered;
  out.has_incremental = !config_.single_treatment || !config_.tiered;

  for (size_t start = 0; start < features.rows(); start += kPredictChunk) {
    const size_t rows = std::min(kPredictChunk, features.rows() - start);
    Matrix chunk(rows, features.cols());
    for (size_t r = 0; r < rows; ++r)
      std::copy(features.row(start + r).begin(), features.row(start + r).end(),
                chunk.row(r).begin());

    Tape tape;
    Var x = tape.constant(std::move(chunk));
    const std::vector<Var> experts = expert_outputs(tape, x);
    Matrix base_one_hot(rows, 2);
    for (size_t r = 0; r < rows; ++r) base_one_hot(r, 1) = 1.0;
    Var base_embedding = embed(tape, tape.constant(std::move(base_one_hot)), base_path_);
    std::vector<Var> secondary_embeddings;
    if (secondary_path_) {
      for (size_t t = 0; t < m; ++t) {
        Matrix one_hot(rows, m);
        for (size_t r = 0; r < rows; ++r) one_hot(r, t) = 1.0;
        secondary_embeddings.push_back(embed(tape, tape.constant(std::move(one_hot)),
                                             *secondary_path_));
      }
    }

    for (size_t k = 0; k < config_.num_tasks; ++k) {
      const size_t slot = head_slot(k);
      Var phi = task_representation(tape, x, experts, k);
      const Matrix natural = natural_head(tape, phi, k).value();
      Var enhanced_base =
          enhance(tape, attend(tape, base_embedding, path_keys(tape, phi, base_path_), base_path_),
                  base_path_);
      for (size_t r = 0; r < rows; ++r) out.natural_at(start + r, k) = natural(r, 0);

      if (!config_.tiered) {
        const Matrix joint = project(tape, params_, enhanced_base, joint_heads_[slot]).value();
        for (size_t r = 0; r < rows; ++r)
          for (size_t t = 0; t < m; ++t) {
            out.incremental_at(start + r, k, t) = joint(r, t);
            out.gamma_at(start + r, k, t + 1) = overall_uplift(0.0, joint(r, t), true);
          }
        continue;
      }

      const Matrix base = project(tape, params_, enhanced_base, base_heads_[slot]).value();
      for (size_t r = 0; r < rows; ++r) out.base_at(start + r, k) = base(r, 0);
      if (!secondary_path_) {
        for (size_t r = 0; r < rows; ++r)
          for (size_t t = 0; t < m; ++t) out.gamma_at(start + r, k, t + 1) = base(r, 0);
        continue;
      }
      const Keys keys = path_keys(tape, phi, *secondary_path_);
      std::vector<Matrix> inc;
      for (size_t t = 0; t < m; ++t)
        inc.push_back(incremental_for(tape, secondary_embeddings[t], keys, slot).value());
      for (size_t r = 0; r < rows; ++r) {
        double mean = 0.0;
        if (config_.center_incremental) {
          for (size_t t = 0; t < m; ++t) mean += inc[t](r, 0);
          mean /= static_cast<double>(m);
        }
        for (size_t t = 0; t < m; ++t) {
          const double value = inc[t](r, 0) - mean;
          out.incremental_at(start + r, k, t) = value;
          out.gamma_at(start + r, k, t + 1) = overall_uplift(base(r, 0), value, true);
        }
      }
    }
  }
  return out;
}

}  // namespace mtmt::model
