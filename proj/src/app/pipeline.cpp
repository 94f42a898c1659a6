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

#include "app/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "app/checkpoint.hpp"
#include "core/error.hpp"
#include "core/format.hpp"
#include "data/csv.hpp"
#include "metrics/report.hpp"
#include "model/mtmt_model.hpp"

namespace mtmt::app {
namespace fs = std::filesystem;

namespace {

std::string ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  check(!ec, ErrorKind::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_json(const std::string& path, const nlohmann::json& j) {
  metrics::write_text_file(path, j.dump(2) + "\n");
}

struct LoadedData {
  data::Dataset dataset;
  std::optional<data::OracleIte> oracle;
};

LoadedData load_source(const RunConfig& config) {
  check(config.has_data(), ErrorKind::kConfig, "the configuration has no data source");
  LoadedData out;
  if (config.data.synthetic) {
    data::SyntheticData generated = data::generate_synthetic(*config.data.synthetic,
                                                             data_seed(config));
    out.dataset = std::move(generated.dataset);
    out.oracle = std::move(generated.oracle);
    return out;
  }
  const CsvSource& src = *config.data.csv;
  out.dataset = data::load_csv(src.path, src.schema, src.on_error);
  if (!src.oracle_path.empty()) {
    out.oracle = data::load_oracle_csv(src.oracle_path, out.dataset.num_tasks(),
                                       out.dataset.num_treatments());
    check(out.oracle->size() == out.dataset.size(), ErrorKind::kData,
          "oracle file has " + std::to_string(out.oracle->size()) + " rows, data has " +
              std::to_string(out.dataset.size()));
  }
  return out;
}

void write_evaluation(const std::string& dir, const metrics::EvaluationReport& report,
                      const std::string& method) {
  metrics::write_text_file(join(dir, "report.txt"), metrics::report_text(report, method));
  metrics::write_text_file(join(dir, "report.csv"), metrics::report_csv(report, method));
  metrics::write_curves(join(dir, "curves"), report);
}

void check_checkpoint_matches(const RunConfig& config, const LoadedCheckpoint& ckpt,
                              const data::Dataset& data) {
  const model::UpliftLearner& learner = *ckpt.learner;
  check(learner.method() == config.method, ErrorKind::kContract,
        std::string("checkpoint holds a ") + model::method_name(learner.method()) +
            " model but the configuration selects " + model::method_name(config.method));
  check(learner.feature_dim() == data.feature_dim() && learner.num_tasks() == data.num_tasks() &&
            learner.num_treatments() >= data.num_treatments(),
        ErrorKind::kContract, "checkpoint dimensions do not match the evaluation data");
}

data::Normalizer checkpoint_normalizer(const LoadedCheckpoint& ckpt) {
  try {
    return ckpt.meta.at("normalizer").get<data::Normalizer>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("checkpoint lacks a normalizer: ") + e.what());
  }
}

}  // namespace

PreparedData prepare_data(const RunConfig& config) {
  LoadedData loaded = load_source(config);
  const std::vector<double> fractions{1.0 - config.test_fraction, config.test_fraction};
  const auto parts = data::split_indices(loaded.dataset.size(), fractions, split_seed(config));
  PreparedData out;
  out.train = loaded.dataset.subset(parts[0]);
  out.test = loaded.dataset.subset(parts[1]);
  check(out.train.size() > 0 && out.test.size() > 0, ErrorKind::kData,
        "the train/test split left an empty partition");
  if (loaded.oracle) out.test_oracle = loaded.oracle->subset(parts[1]);
  return out;
}

TrainedModel train_model(model::Method method, const model::ModelConfig& model_config,
                         const train::TrainConfig& train_config, const data::Dataset& train,
                         bool normalize) {
  TrainedModel out;
  out.normalizer = normalize ? data::Normalizer::fit(train)
                             : data::Normalizer::identity(train.feature_dim());
  data::Dataset normalized = train;
  out.normalizer.apply(normalized);
  train::FitResult fitted = train::fit(method, model_config, normalized, train_config);
  out.learner = std::move(fitted.learner);
  out.report = std::move(fitted.report);
  return out;
}

model::Predictions score_dataset(const model::UpliftLearner& learner,
                                 const data::Normalizer& normalizer, const data::Dataset& data) {
  diff::Matrix features = data.feature_matrix();
  normalizer.apply(features);
  return learner.predict(features);
}

nlohmann::json checkpoint_meta(const RunConfig& config, const data::Normalizer& normalizer,
                               const data::DatasetSchema& schema) {
  return {{"normalizer", normalizer},
          {"schema", schema},
          {"seed", config.seed},
          {"train", config.train}};
}

void cmd_gen_data(const RunConfig& config) {
  check(config.data.synthetic.has_value(), ErrorKind::kConfig,
        "gen-data needs a data.synthetic section");
  const std::string dir = ensure_dir(config.output_dir);
  const data::SyntheticData generated =
      data::generate_synthetic(*config.data.synthetic, data_seed(config));
  data::write_csv(join(dir, "dataset.csv"), generated.dataset);
  data::write_oracle_csv(join(dir, "oracle.csv"), generated.oracle);
  write_json(join(dir, "manifest.json"),
             {{"seed", config.seed},
              {"data_seed", data_seed(config)},
              {"synthetic", *config.data.synthetic},
              {"schema", generated.dataset.schema()},
              {"rows", generated.dataset.size()},
              {"files", {"dataset.csv", "oracle.csv"}}});
}

train::TrainReport cmd_train(const RunConfig& config) {
  const std::string dir = ensure_dir(config.output_dir);
  const PreparedData prepared = prepare_data(config);
  model::ModelConfig resolved_model = config.model;
  resolved_model.resolve(prepared.train.feature_dim(), prepared.train.num_tasks(),
                         prepared.train.num_treatments());
  RunConfig resolved = config;
  resolved.model = resolved_model;
  write_json(join(dir, "resolved_config.json"), resolved_json(resolved));

  TrainedModel trained = train_model(config.method, resolved_model, config.train, prepared.train,
                                     config.normalize);
  save_checkpoint(join(dir, "checkpoint.bin"), *trained.learner,
                  checkpoint_meta(config, trained.normalizer, prepared.train.schema()));

  std::ostringstream log;
  for (size_t e = 0; e < trained.report.epoch_loss.size(); ++e)
    log << "epoch " << e + 1 << " loss " << format_double(trained.report.epoch_loss[e]) << '\n';
  log << "steps " << trained.report.steps << '\n';
  log << "checksum " << hex_digest(trained.report.checksum) << '\n';
  log << "wall_seconds " << trained.report.wall_seconds << '\n';
  metrics::write_text_file(join(dir, "train_log.txt"), log.str());
  write_json(join(dir, "train_summary.json"),
             {{"method", model::method_name(config.method)},
              {"epoch_loss", trained.report.epoch_loss},
              {"steps", trained.report.steps},
              {"parameters", trained.learner->parameters().scalar_count()},
              {"train_rows", prepared.train.size()},
              {"checksum", hex_digest(trained.report.checksum)}});
  return trained.report;
}

metrics::EvaluationReport cmd_evaluate(const RunConfig& config, const std::string& checkpoint) {
  const std::string dir = ensure_dir(config.output_dir);
  const PreparedData prepared = prepare_data(config);
  const LoadedCheckpoint ckpt = load_checkpoint(checkpoint);
  check_checkpoint_matches(config, ckpt, prepared.test);
  const data::Normalizer normalizer = checkpoint_normalizer(ckpt);
  check(normalizer.dim() == prepared.test.feature_dim(), ErrorKind::kContract,
        "checkpoint normalizer width does not match the data");

  const model::Predictions scores = score_dataset(*ckpt.learner, normalizer, prepared.test);
  const metrics::EvaluationReport report =
      metrics::evaluate(scores, prepared.test, config.lift_fraction);
  const std::string method = model::method_name(config.method);
  write_evaluation(dir, report, method);

  const metrics::EffectDistributions dist = metrics::effect_distributions(scores);
  metrics::write_text_file(join(dir, "distributions.csv"),
                           metrics::distribution_summary_csv(dist));
  metrics::write_text_file(join(dir, "distribution_values.csv"),
                           metrics::distribution_values_csv(dist));

  if (prepared.test_oracle) {
    const metrics::EvaluationReport oracle = metrics::evaluate(
        model::Predictions::from_oracle(*prepared.test_oracle), prepared.test,
        config.lift_fraction);
    metrics::write_text_file(join(dir, "oracle_report.csv"),
                             metrics::report_csv(oracle, "oracle"));
  }
  return report;
}

void cmd_score(const RunConfig& config, const std::string& checkpoint,
               const std::string& features_csv) {
  const std::string dir = ensure_dir(config.output_dir);
  const LoadedCheckpoint ckpt = load_checkpoint(checkpoint);
  const model::UpliftLearner& learner = *ckpt.learner;
  data::DatasetSchema schema;
  try {
    schema = ckpt.meta.at("schema").get<data::DatasetSchema>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("checkpoint lacks a schema: ") + e.what());
  }
  check(schema.feature_dim() == learner.feature_dim(), ErrorKind::kSchema,
        "checkpoint schema and model disagree on the feature count");
  check(config.rank_task < learner.num_tasks(), ErrorKind::kConfig,
        "evaluate.rank_task is out of range for this model");
  diff::Matrix features = data::load_feature_csv(features_csv, schema);
  checkpoint_normalizer(ckpt).apply(features);
  const model::Predictions scores = learner.predict(features);

  std::ostringstream out;
  out << "row,candidate,assignment";
  for (size_t k = 0; k < scores.num_tasks; ++k) out << ",gamma_k" << k;
  out << ",rank\n";
  for (size_t i = 0; i < scores.size; ++i) {
    std::vector<model::Candidate> candidates(scores.num_candidates());
    for (size_t c = 0; c < candidates.size(); ++c) {
      candidates[c].index = c;
      for (size_t k = 0; k < scores.num_tasks; ++k)
        candidates[c].gamma.push_back(scores.gamma_at(i, k, c));
    }
    for (const auto& c : model::rank_candidates(std::move(candidates), config.rank_task)) {
      out << i << ',' << c.index << ',' << (c.index == 0 ? "none" : "t" + std::to_string(c.index - 1));
      for (double g : c.gamma) out << ',' << format_double(g);
      out << ',' << c.rank << '\n';
    }
  }
  metrics::write_text_file(join(dir, "scores.csv"), out.str());
}

size_t worker_threads() {
  if (const char* env = std::getenv("MTMT_NUM_THREADS")) {
    long long value = 0;
    check(parse_int(env, &value) && value >= 1, ErrorKind::kConfig,
          "MTMT_NUM_THREADS must be a positive integer");
    return static_cast<size_t>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<VariantResult> cmd_ablate(const RunConfig& config) {
  check(config.method == model::Method::kMtmt, ErrorKind::kConfig,
        "ablate requires method mtmt");
  const std::string dir = ensure_dir(config.output_dir);
  const PreparedData prepared = prepare_data(config);
  model::ModelConfig full = config.model;
  full.resolve(prepared.train.feature_dim(), prepared.train.num_tasks(),
               prepared.train.num_treatments());
  const std::vector<model::Variant> variants = model::ablation_variants(full);

  std::vector<VariantResult> results(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t v = next++; v < variants.size(); v = next++) {
      try {
        const std::string sub = ensure_dir(join(dir, variants[v].name));
        RunConfig variant_config = config;
        variant_config.model = variants[v].config;
        variant_config.output_dir = sub;
        write_json(join(sub, "resolved_config.json"), resolved_json(variant_config));
        TrainedModel trained = train_model(config.method, variants[v].config, config.train,
                                           prepared.train, config.normalize);
        save_checkpoint(join(sub, "checkpoint.bin"), *trained.learner,
                        checkpoint_meta(variant_config, trained.normalizer,
                                        prepared.train.schema()));
        const model::Predictions scores =
            score_dataset(*trained.learner, trained.normalizer, prepared.test);
        results[v].name = variants[v].name;
        results[v].report = metrics::evaluate(scores, prepared.test, config.lift_fraction);
        write_evaluation(sub, results[v].report, "mtmt:" + variants[v].name);
      } catch (...) {
        errors[v] = std::current_exception();
      }
    }
  };
  const size_t workers = std::min(worker_threads(), variants.size());
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ostringstream table;
  table << "variant,task,treatment,qini,auuc,lift\n";
  for (const auto& r : results)
    for (const auto& row : r.report.rows)
      table << r.name << ',' << row.task << ',' << row.treatment << ','
            << format_double(row.qini) << ',' << format_double(row.auuc) << ','
            << format_double(row.lift) << '\n';
  metrics::write_text_file(join(dir, "ablation.csv"), table.str());
  return results;
}

}  // namespace mtmt::app
