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

#include "data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/random.hpp"

namespace mtmt::data {
namespace {

const char* effect_name(EffectFunction f) {
  switch (f) {
    case EffectFunction::kConstant: return "constant";
    case EffectFunction::kLinear: return "linear";
    case EffectFunction::kSignSwitch: return "sign_switch";
  }
  return "constant";
}

EffectFunction parse_effect(const std::string& name) {
  if (name == "constant") return EffectFunction::kConstant;
  if (name == "linear") return EffectFunction::kLinear;
  if (name == "sign_switch") return EffectFunction::kSignSwitch;
  fail(ErrorKind::kConfig, "unknown effect function '" + name + "'");
}

const char* response_name(ResponseFunction f) {
  switch (f) {
    case ResponseFunction::kConstant: return "constant";
    case ResponseFunction::kLinear: return "linear";
    case ResponseFunction::kNonlinear: return "nonlinear";
  }
  return "constant";
}

ResponseFunction parse_response(const std::string& name) {
  if (name == "constant") return ResponseFunction::kConstant;
  if (name == "linear") return ResponseFunction::kLinear;
  if (name == "nonlinear") return ResponseFunction::kNonlinear;
  fail(ErrorKind::kConfig, "unknown natural response function '" + name + "'");
}

nlohmann::json effect_json(const EffectSpec& e) {
  return {{"function", effect_name(e.function)}, {"feature", e.feature}, {"magnitude", e.magnitude}};
}

EffectSpec effect_from_json(const nlohmann::json& j) {
  EffectSpec e;
  e.function = parse_effect(j.value("function", std::string("constant")));
  e.feature = j.value("feature", size_t{0});
  e.magnitude = j.value("magnitude", 0.0);
  return e;
}

}  // namespace

double EffectSpec::evaluate(std::span<const double> x) const {
  switch (function) {
    case EffectFunction::kConstant:
      return magnitude;
    case EffectFunction::kLinear:
      return magnitude * (1.0 + 0.5 * x[feature]);
    case EffectFunction::kSignSwitch:
      return x[feature] >= 0.0 ? magnitude : -magnitude;
  }
  return 0.0;
}

void SyntheticSpec::validate() const {
  check(num_features >= 1, ErrorKind::kSpec, "num_features must be at least 1");
  check(num_discrete <= num_features, ErrorKind::kSpec, "num_discrete exceeds num_features");
  check(num_discrete == 0 || discrete_levels >= 2, ErrorKind::kSpec,
        "discrete features need at least 2 levels");
  check(num_tasks >= 1, ErrorKind::kSpec, "num_tasks must be at least 1");
  check(num_treatments >= 1, ErrorKind::kSpec, "num_treatments must be at least 1");
  check(num_samples >= 1, ErrorKind::kSpec, "num_samples must be at least 1");
  check(treatment_probability > 0.0 && treatment_probability < 1.0, ErrorKind::kSpec,
        "treatment_probability must lie in (0, 1)");
  if (!secondary_probabilities.empty()) {
    check(secondary_probabilities.size() == num_treatments, ErrorKind::kSpec,
          "secondary_probabilities needs one entry per treatment");
    double total = 0.0;
    for (double p : secondary_probabilities) {
      check(std::isfinite(p) && p >= 0.0, ErrorKind::kSpec,
            "secondary probabilities must be non-negative");
      total += p;
    }
    check(std::abs(total - 1.0) < 1e-9, ErrorKind::kSpec,
          "secondary probabilities must sum to 1");
  }
  check(incremental_effects.size() == num_treatments, ErrorKind::kSpec,
        "incremental_effects needs one entry per treatment");
  auto check_effect = [&](const EffectSpec& e) {
    check(std::isfinite(e.magnitude), ErrorKind::kSpec, "effect magnitudes must be finite");
    check(e.feature < num_features, ErrorKind::kSpec, "effect feature index out of range");
  };
  check_effect(base_effect);
  for (const auto& e : incremental_effects) check_effect(e);
  check(task_effect_scales.empty() || task_effect_scales.size() == num_tasks, ErrorKind::kSpec,
        "task_effect_scales needs one entry per task");
  for (double s : task_effect_scales)
    check(std::isfinite(s), ErrorKind::kSpec, "task effect scales must be finite");
  check(std::isfinite(response_level), ErrorKind::kSpec, "response_level must be finite");
  if (outcome == OutcomeKind::kBinary) {
    check(response_level >= 0.0 && response_level <= 1.0, ErrorKind::kSpec,
          "binary outcomes need a response level in [0, 1]");
  } else {
    check(std::isfinite(noise_sigma) && noise_sigma >= 0.0, ErrorKind::kSpec,
          "noise_sigma must be non-negative");
  }
}

double SyntheticSpec::task_scale(size_t task) const {
  return task_effect_scales.empty() ? 1.0 : task_effect_scales[task];
}

double SyntheticSpec::natural_response_value(std::span<const double> x, size_t task) const {
  const size_t d = num_features;
  const double level = response_level + 0.05 * static_cast<double>(task);
  switch (natural_response) {
    case ResponseFunction::kConstant:
      return level;
    case ResponseFunction::kLinear:
      return level + 0.05 * x[(3 + task) % d];
    case ResponseFunction::kNonlinear:
      return level + 0.08 * std::tanh(x[(3 + task) % d]) +
             0.04 * std::tanh(x[(4 + task) % d] * x[(5 + task) % d]);
  }
  return level;
}

DatasetSchema SyntheticSpec::schema() const {
  return DatasetSchema::generated(num_features, num_discrete, num_tasks, num_treatments);
}

SyntheticSpec SyntheticSpec::null_effect(size_t num_samples) {
  SyntheticSpec spec;
  spec.num_samples = num_samples;
  spec.base_effect = {EffectFunction::kConstant, 0, 0.0};
  for (auto& e : spec.incremental_effects) e = {EffectFunction::kConstant, 0, 0.0};
  return spec;
}

SyntheticSpec SyntheticSpec::constant_effect(double magnitude, size_t num_samples) {
  SyntheticSpec spec = null_effect(num_samples);
  spec.base_effect = {EffectFunction::kConstant, 0, magnitude};
  return spec;
}

void to_json(nlohmann::json& j, const SyntheticSpec& spec) {
  nlohmann::json incremental = nlohmann::json::array();
  for (const auto& e : spec.incremental_effects) incremental.push_back(effect_json(e));
  j = nlohmann::json{
      {"num_features", spec.num_features},
      {"num_discrete", spec.num_discrete},
      {"discrete_levels", spec.discrete_levels},
      {"num_tasks", spec.num_tasks},
      {"num_treatments", spec.num_treatments},
      {"num_samples", spec.num_samples},
      {"treatment_probability", spec.treatment_probability},
      {"secondary_probabilities", spec.secondary_probabilities},
      {"base_effect", effect_json(spec.base_effect)},
      {"incremental_effects", incremental},
      {"natural_response", response_name(spec.natural_response)},
      {"response_level", spec.response_level},
      {"task_effect_scales", spec.task_effect_scales},
      {"outcome", spec.outcome == OutcomeKind::kBinary ? "binary" : "continuous"},
      {"noise_sigma", spec.noise_sigma},
  };
}

void from_json(const nlohmann::json& j, SyntheticSpec& spec) {
  spec = SyntheticSpec{};
  spec.num_features = j.value("num_features", spec.num_features);
  spec.num_discrete = j.value("num_discrete", spec.num_discrete);
  spec.discrete_levels = j.value("discrete_levels", spec.discrete_levels);
  spec.num_tasks = j.value("num_tasks", spec.num_tasks);
  spec.num_treatments = j.value("num_treatments", spec.num_treatments);
  spec.num_samples = j.value("num_samples", spec.num_samples);
  spec.treatment_probability = j.value("treatment_probability", spec.treatment_probability);
  spec.secondary_probabilities =
      j.value("secondary_probabilities", spec.secondary_probabilities);
  if (j.contains("base_effect")) spec.base_effect = effect_from_json(j.at("base_effect"));
  if (j.contains("incremental_effects")) {
    spec.incremental_effects.clear();
    for (const auto& e : j.at("incremental_effects"))
      spec.incremental_effects.push_back(effect_from_json(e));
  } else if (spec.num_treatments != 2) {
    // The default list is sized for two treatments; extend it cyclically.
    std::vector<EffectSpec> effects;
    for (size_t t = 0; t < spec.num_treatments; ++t) {
      effects.push_back({EffectFunction::kSignSwitch, (1 + t) % spec.num_features, 0.02});
    }
    spec.incremental_effects = effects;
  }
  spec.natural_response =
      parse_response(j.value("natural_response", std::string("nonlinear")));
  spec.response_level = j.value("response_level", spec.response_level);
  spec.task_effect_scales = j.value("task_effect_scales", spec.task_effect_scales);
  const std::string outcome = j.value("outcome", std::string("binary"));
  check(outcome == "binary" || outcome == "continuous", ErrorKind::kConfig,
        "outcome must be binary or continuous, got '" + outcome + "'");
  spec.outcome = outcome == "binary" ? OutcomeKind::kBinary : OutcomeKind::kContinuous;
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, uint64_t seed) {
  spec.validate();
  const size_t d = spec.num_features;
  const size_t k_tasks = spec.num_tasks;
  const size_t m = spec.num_treatments;
  std::vector<double> secondary_probs = spec.secondary_probabilities;
  if (secondary_probs.empty()) secondary_probs.assign(m, 1.0 / static_cast<double>(m));

  SyntheticData out{Dataset(spec.schema(), m), OracleIte{}};
  out.dataset.reserve(spec.num_samples);
  out.oracle.num_tasks = k_tasks;
  out.oracle.num_treatments = m;
  out.oracle.base = Matrix(spec.num_samples, k_tasks);
  out.oracle.incremental = Matrix(spec.num_samples, k_tasks * m);

  Rng rng(seed);
  const size_t first_discrete = d - spec.num_discrete;
  Sample s;
  s.x.resize(d);
  s.y.resize(k_tasks);
  for (size_t i = 0; i < spec.num_samples; ++i) {
    for (size_t j = 0; j < d; ++j) {
      s.x[j] = j < first_discrete ? rng.normal()
                                  : static_cast<double>(rng.below(spec.discrete_levels));
    }
    s.base = rng.bernoulli(spec.treatment_probability) ? 1 : 0;
    s.secondary = s.base == 1 ? static_cast<int>(rng.categorical(secondary_probs)) : kNoTreatment;

    for (size_t k = 0; k < k_tasks; ++k) {
      const double task_scale = spec.task_scale(k);
      const double base_effect = task_scale * spec.base_effect.evaluate(s.x);
      out.oracle.base(i, k) = base_effect;
      for (size_t t = 0; t < m; ++t) {
        out.oracle.incremental(i, k * m + t) =
            task_scale * spec.incremental_effects[t].evaluate(s.x);
      }
      double mean = spec.natural_response_value(s.x, k);
      if (s.base == 1) {
        mean += base_effect + out.oracle.incremental(i, k * m + static_cast<size_t>(s.secondary));
      }
      if (spec.outcome == OutcomeKind::kBinary) {
        s.y[k] = rng.bernoulli(std::clamp(mean, 0.0, 1.0)) ? 1.0 : 0.0;
      } else {
        s.y[k] = mean + spec.noise_sigma * rng.normal();
      }
    }
    out.dataset.add(s);
  }
  return out;
}

}  // namespace mtmt::data
