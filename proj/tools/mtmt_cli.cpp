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

// mtmt command-line driver. Every command reads one JSON run configuration;
// --seed and --out override the file.

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtmt/mtmt.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kDataError = 3, kRuntime = 4 };

int exit_code(mtmt_status status) {
  switch (status) {
    case MTMT_OK: return kOk;
    case MTMT_ERR_CONFIG:
    case MTMT_ERR_SPEC:
    case MTMT_ERR_ARGUMENT: return kUsage;
    case MTMT_ERR_DATA:
    case MTMT_ERR_SCHEMA: return kDataError;
    default: return kRuntime;
  }
}

int report(mtmt_status status, const char* what) {
  if (status != MTMT_OK)
    std::fprintf(stderr, "mtmt %s: %s\n", what, mtmt_last_error());
  return exit_code(status);
}

struct Options {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::string checkpoint;
  std::string input;
};

int run(const std::string& command, const Options& opts) {
  mtmt_config* config = nullptr;
  mtmt_status status = mtmt_config_load(opts.config.c_str(), &config);
  if (status != MTMT_OK) return report(status, "config");
  if (opts.seed) mtmt_config_set_seed(config, *opts.seed);
  if (opts.out) status = mtmt_config_set_output_dir(config, opts.out->c_str());

  if (status == MTMT_OK) {
    if (command == "gen-data") {
      status = mtmt_gen_data(config);
    } else if (command == "train") {
      status = mtmt_train(config);
    } else if (command == "evaluate") {
      status = mtmt_evaluate(config, opts.checkpoint.c_str());
    } else if (command == "score") {
      status = mtmt_score(config, opts.checkpoint.c_str(), opts.input.c_str());
    } else if (command == "ablate") {
      status = mtmt_ablate(config);
    }
  }
  mtmt_config_free(config);
  return report(status, command.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-treatment multi-task uplift modelling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mtmt_version()));

  Options opts;
  uint64_t seed = 0;
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "Run seed (overrides the file)");
    sub->add_option("--out", out, "Output directory (overrides the file)");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "Write a synthetic trial with its oracle effects");
  CLI::App* train = app.add_subcommand("train", "Train the configured method and save a checkpoint");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on the held-out split");
  CLI::App* score = app.add_subcommand("score", "Rank treatment assignments for feature rows");
  CLI::App* ablate = app.add_subcommand("ablate", "Train and evaluate the ablation variants");
  for (CLI::App* sub : {gen, train, evaluate, score, ablate}) add_common(sub);
  evaluate->add_option("--checkpoint", opts.checkpoint, "Checkpoint file")->required();
  score->add_option("--checkpoint", opts.checkpoint, "Checkpoint file")->required();
  score->add_option("--input", opts.input, "CSV of feature rows")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) opts.seed = seed;
  if (chosen->count("--out") > 0) opts.out = out;
  return run(chosen->get_name(), opts);
}
