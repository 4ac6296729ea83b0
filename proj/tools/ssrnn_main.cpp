// tools/ssrnn_main.cpp

// Copyright 2026  The ssrnn authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: gen, train, eval, grid, gradcheck.
//
//   ssrnn gen    --config exp.json [--seed N] [--out DIR]
//   ssrnn train  --config exp.json [--seed N] [--out DIR] [--data DIR]
//   ssrnn eval   --checkpoint ckpt.txt --data set.jsonl --config exp.json
//                [--out DIR]
//   ssrnn grid   --config grid.json [--out DIR] [--jobs N]
//   ssrnn gradcheck [--trials N] [--seed N] [--fd-step H]
//
// Exit code 0 on success; on failure a single machine-readable JSON error
// line goes to stderr and the exit code is 1.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssrnn/checkpoint.hpp"
#include "ssrnn/config.hpp"
#include "ssrnn/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;  // -1: keep the config's seeds
};

ssrnn::ExperimentConfig LoadExperiment(const CommonFlags& flags) {
  ssrnn::ExperimentConfig cfg =
      ssrnn::ExperimentFromJson(ssrnn::LoadJsonFile(flags.config_path));
  if (flags.seed >= 0) {
    const auto seed = static_cast<std::uint64_t>(flags.seed);
    cfg.model.seed = seed;
    cfg.train.seed = seed;
    cfg.data.seed = seed;
  }
  if (!flags.out_dir.empty()) {
    cfg.output_dir = flags.out_dir;
  }
  if (cfg.output_dir.empty()) {
    throw std::invalid_argument("no output directory: set output_dir in the config or pass --out");
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scheduled-sampling sequence model toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string data_arg;
  std::string checkpoint_arg;
  int jobs = 1;
  int trials = 20;
  double fd_step = 1e-5;
  std::int64_t gradcheck_seed = 12345;

  CLI::App* gen = app.add_subcommand("gen", "generate dataset splits");
  gen->add_option("--config", flags.config_path, "experiment config JSON")->required();
  gen->add_option("--seed", flags.seed, "override all seeds");
  gen->add_option("--out", flags.out_dir, "output directory");

  CLI::App* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", flags.config_path, "experiment config JSON")->required();
  train->add_option("--seed", flags.seed, "override all seeds");
  train->add_option("--out", flags.out_dir, "output directory");
  train->add_option("--data", data_arg, "directory with train/valid/test.jsonl "
                                        "(default: the output directory)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", checkpoint_arg, "checkpoint file")->required();
  eval->add_option("--data", data_arg, "dataset JSONL file")->required();
  eval->add_option("--config", flags.config_path, "experiment config JSON (for the beam)")
      ->required();
  eval->add_option("--out", flags.out_dir, "directory for metrics.json and decodes.jsonl");

  CLI::App* grid = app.add_subcommand("grid", "run a (configuration x seed) grid");
  grid->add_option("--config", flags.config_path, "grid config JSON")->required();
  grid->add_option("--out", flags.out_dir, "output directory");
  grid->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "verify gradients on random tiny models");
  gradcheck->add_option("--trials", trials, "number of random models");
  gradcheck->add_option("--seed", gradcheck_seed, "seed for the random models");
  gradcheck->add_option("--fd-step", fd_step, "finite-difference step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ssrnn::ExperimentConfig cfg = LoadExperiment(flags);
      ssrnn::CmdGen(cfg, cfg.output_dir);
      std::cout << "wrote " << cfg.output_dir << "/{train,valid,test}.jsonl\n";
    } else if (train->parsed()) {
      const ssrnn::ExperimentConfig cfg = LoadExperiment(flags);
      const std::string data_dir = data_arg.empty() ? cfg.output_dir : data_arg;
      const ssrnn::TrainArtifacts artifacts = ssrnn::CmdTrain(cfg, data_dir, cfg.output_dir);
      std::cout << "wrote " << artifacts.checkpoint_path << " and " << artifacts.report_path
                << "\n";
    } else if (eval->parsed()) {
      const ssrnn::ExperimentConfig cfg =
          ssrnn::ExperimentFromJson(ssrnn::LoadJsonFile(flags.config_path));
      const ssrnn::EvalResult result = ssrnn::CmdEval(checkpoint_arg, data_arg, cfg.beam);
      const ssrnn::Json metrics = ssrnn::ToJson(result);
      std::cout << metrics.dump(2) << "\n";
      if (!flags.out_dir.empty()) {
        std::filesystem::create_directories(flags.out_dir);
        ssrnn::detail::WriteTextFile(flags.out_dir + "/metrics.json", metrics.dump(2) + "\n");
        ssrnn::Json resolved;
        resolved["checkpoint"] = checkpoint_arg;
        resolved["data"] = data_arg;
        resolved["beam"] = ssrnn::ToJson(cfg.beam);
        ssrnn::detail::WriteTextFile(flags.out_dir + "/config.json", resolved.dump(2) + "\n");
        ssrnn::WriteDecodesJsonl(ssrnn::LoadCheckpoint(checkpoint_arg),
                                 ssrnn::LoadJsonl(data_arg), cfg.beam,
                                 flags.out_dir + "/decodes.jsonl");
      }
    } else if (grid->parsed()) {
      ssrnn::GridConfig grid_cfg = ssrnn::GridFromJson(ssrnn::LoadJsonFile(flags.config_path));
      const std::string out =
          !flags.out_dir.empty() ? flags.out_dir : grid_cfg.base.output_dir;
      if (out.empty()) {
        throw std::invalid_argument("no output directory: set base.output_dir or pass --out");
      }
      ssrnn::CmdGrid(grid_cfg, out, jobs);
      std::cout << "wrote " << out << "/summary.csv\n";
    } else if (gradcheck->parsed()) {
      const ssrnn::GradCheckSummary summary = ssrnn::CmdGradCheck(
          trials, static_cast<std::uint64_t>(gradcheck_seed), fd_step);
      ssrnn::Json j;
      j["trials"] = summary.trials;
      j["max_rel_error"] = summary.max_rel_error;
      j["threshold"] = 1e-4;
      j["pass"] = summary.max_rel_error < 1e-4;
      std::cout << j.dump(2) << "\n";
      if (summary.max_rel_error >= 1e-4) {
        return 1;
      }
    }
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
