// ssrnn/harness.hpp

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

// Wires config -> data -> training -> decoding -> reports. Every command
// writes the resolved config next to its outputs, so a run directory is
// always reproducible from its own contents. (config, seed) -> byte
// identical artifacts.

#ifndef SSRNN_HARNESS_HPP_
#define SSRNN_HARNESS_HPP_

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ssrnn/checkpoint.hpp"
#include "ssrnn/config.hpp"
#include "ssrnn/data.hpp"
#include "ssrnn/metrics.hpp"
#include "ssrnn/trainer.hpp"

namespace ssrnn {

namespace detail {

inline void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << contents;
  if (!out) {
    throw std::runtime_error("write to " + path + " failed");
  }
}

inline Dataset GenerateSplit(const DataConfig& d, const std::string& split, int n,
                             std::uint64_t seed) {
  if (d.generator == "copy") {
    return GenCopy(n, d.len_min, d.len_max, d.payload_vocab, seed, split);
  }
  HmmGenOptions opt;
  opt.len_min = d.frame_len_min;
  opt.len_max = d.frame_len_max;
  opt.stay_prob = d.stay_prob;
  opt.split = split;
  return GenHmmAligned(n, d.num_states, d.min_dwell, d.feature_dim, d.noise_sigma, seed, opt);
}

}  // namespace detail

// Generates train/valid/test splits (disjoint seeds: seed, seed+1, seed+2)
// into out_dir.
inline void CmdGen(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.data.generator.empty()) {
    throw std::invalid_argument("gen: config has no data generator (data.path given instead?)");
  }
  std::filesystem::create_directories(out_dir);
  const DataConfig& d = cfg.data;
  detail::WriteTextFile(out_dir + "/config.json", ToJson(cfg).dump(2) + "\n");
  SaveJsonl(detail::GenerateSplit(d, "train", d.n_train, d.seed), out_dir + "/train.jsonl");
  SaveJsonl(detail::GenerateSplit(d, "valid", d.n_valid, d.seed + 1), out_dir + "/valid.jsonl");
  SaveJsonl(detail::GenerateSplit(d, "test", d.n_test, d.seed + 2), out_dir + "/test.jsonl");
}

// Fills in model fields that depend on the dataset (vocab_size, feature_dim)
// and converts a ramp given in epochs to mini-batch steps.
inline void ResolveConfig(ExperimentConfig& cfg, const Dataset& train_set) {
  const int data_feature_dim =
      train_set.mode == SeqMode::kFrameAligned
          ? static_cast<int>(train_set.examples.front().features.front().size())
          : static_cast<int>(train_set.examples.front().static_input.size());
  if (cfg.model.vocab_size == 0) {
    cfg.model.vocab_size = train_set.vocab_size;
  }
  if (cfg.model.feature_dim == 0) {
    cfg.model.feature_dim = data_feature_dim;
  }
  if (cfg.model.vocab_size != train_set.vocab_size) {
    throw std::invalid_argument("config: model vocab_size " +
                                std::to_string(cfg.model.vocab_size) +
                                " does not match dataset vocab_size " +
                                std::to_string(train_set.vocab_size));
  }
  if (cfg.model.feature_dim != data_feature_dim) {
    throw std::invalid_argument("config: model feature_dim " +
                                std::to_string(cfg.model.feature_dim) +
                                " does not match dataset feature dim " +
                                std::to_string(data_feature_dim));
  }
  if ((cfg.model.mode == SeqMode::kFrameAligned) != (train_set.mode == SeqMode::kFrameAligned)) {
    throw std::invalid_argument("config: model mode does not match dataset mode");
  }
  if (cfg.policy_ramp_epochs > 0) {
    auto* ss = std::get_if<ScheduledSampling>(&cfg.policy);
    if (ss != nullptr) {
      if (auto* ramp = std::get_if<LinearRamp>(&ss->schedule)) {
        const long batches_per_epoch =
            (static_cast<long>(train_set.examples.size()) + cfg.train.batch_size - 1) /
            cfg.train.batch_size;
        ss->schedule = LinearRamp(ramp->eps_start, ramp->eps_end,
                                  static_cast<long>(cfg.policy_ramp_epochs) * batches_per_epoch);
      }
    }
    cfg.policy_ramp_epochs = 0;
  }
}

struct TrainArtifacts {
  std::string checkpoint_path;
  std::string report_path;
  TrainResult result;
};

// Trains with the configured policy on data_dir's splits; writes the
// best-validation checkpoint, the TrainReport CSV and the resolved config
// into out_dir.
inline TrainArtifacts CmdTrain(ExperimentConfig cfg, const std::string& data_dir,
                               const std::string& out_dir) {
  const Dataset train_set = LoadJsonl(data_dir + "/train.jsonl");
  const Dataset valid_set = LoadJsonl(data_dir + "/valid.jsonl");
  ResolveConfig(cfg, train_set);
  std::filesystem::create_directories(out_dir);
  detail::WriteTextFile(out_dir + "/config.json", ToJson(cfg).dump(2) + "\n");

  const ModelParams init = InitParams(cfg.model);
  TrainResult result = Train(init, train_set, valid_set, cfg.policy, cfg.train, cfg.beam);

  TrainArtifacts artifacts;
  artifacts.checkpoint_path = out_dir + "/checkpoint.txt";
  artifacts.report_path = out_dir + "/train_report.csv";
  SaveCheckpoint(result.params, artifacts.checkpoint_path);
  std::ostringstream csv;
  WriteCsv(result.report, csv);
  detail::WriteTextFile(artifacts.report_path, csv.str());
  artifacts.result = std::move(result);
  return artifacts;
}

struct EvalResult {
  double next_step_fer = 0.0;
  double decoding_fer = 0.0;
  std::optional<double> mean_edit_distance;  // static mode only
  long num_examples = 0;
};

inline Json ToJson(const EvalResult& r) {
  Json j;
  j["next_step_fer"] = r.next_step_fer;
  j["decoding_fer"] = r.decoding_fer;
  if (r.mean_edit_distance) {
    j["mean_edit_distance"] = *r.mean_edit_distance;
  }
  j["num_examples"] = r.num_examples;
  return j;
}

// Evaluates a checkpoint on a dataset: teacher-forced next-step error and
// beam-search decoding error (plus raw mean edit distance in static mode).
inline EvalResult CmdEval(const std::string& checkpoint_path, const std::string& dataset_path,
                          const BeamConfig& beam) {
  const ModelParams params = LoadCheckpoint(checkpoint_path);
  const Dataset ds = LoadJsonl(dataset_path);
  if ((params.cfg.mode == SeqMode::kFrameAligned) != (ds.mode == SeqMode::kFrameAligned)) {
    throw std::invalid_argument("eval: checkpoint mode " + ToString(params.cfg.mode) +
                                " does not match dataset mode " + ToString(ds.mode));
  }
  EvalResult r;
  r.next_step_fer = NextStepError(params, ds);
  r.decoding_fer = DecodingError(params, ds, beam);
  r.num_examples = static_cast<long>(ds.examples.size());
  if (ds.mode == SeqMode::kStaticInput) {
    double total = 0.0;
    for (const SeqExample& ex : ds.examples) {
      const std::vector<int> top = BeamSearch(params, ex, beam).front().tokens;
      total += static_cast<double>(
          EditDistance(StripTrailingEos(top), StripTrailingEos(ex.targets)));
    }
    r.mean_edit_distance = total / static_cast<double>(ds.examples.size());
  }
  return r;
}

// Decode output: JSON-lines, one record per input with the beam's ranked
// hypotheses.
inline void WriteDecodesJsonl(const ModelParams& params, const Dataset& ds,
                              const BeamConfig& beam, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  for (const SeqExample& ex : ds.examples) {
    Json rec;
    rec["id"] = ex.id;
    Json hyps = Json::array();
    for (const ScoredSequence& s : BeamSearch(params, ex, beam)) {
      Json h;
      h["tokens"] = s.tokens;
      h["logprob"] = s.logprob;
      hyps.push_back(std::move(h));
    }
    rec["hypotheses"] = std::move(hyps);
    out << rec.dump() << "\n";
  }
  if (!out) {
    throw std::runtime_error("write to " + path + " failed");
  }
}

struct GridRow {
  std::string config;
  std::string seed;  // seed number, or "mean"
  double eps_start = 0.0;
  double eps_end = 0.0;
  double next_step_fer = 0.0;
  double decoding_fer = 0.0;
  bool failed = false;
  std::string error;
};

inline void WriteGridCsv(const std::vector<GridRow>& rows, std::ostream& out) {
  out << "config,seed,eps_start,eps_end,next_step_fer,decoding_fer\n";
  char buf[512];
  for (const GridRow& r : rows) {
    if (r.failed) {
      out << r.config << "," << r.seed << ",,,,\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%.17g,%.17g\n", r.config.c_str(),
                  r.seed.c_str(), r.eps_start, r.eps_end, r.next_step_fer, r.decoding_fer);
    out << buf;
  }
}

// Runs the full (configuration x seed) grid over a shared dataset. Cells are
// sorted lexicographically by (config name, seed) and may run in parallel;
// each cell is internally deterministic, so the job count cannot change any
// result. Next-step FER is reported on the validation split, decoding FER on
// the test split. A failing cell is recorded and the grid continues.
inline std::vector<GridRow> CmdGrid(const GridConfig& grid, const std::string& out_dir,
                                    int jobs = 1) {
  std::filesystem::create_directories(out_dir);

  std::vector<GridCell> cells = grid.configurations;
  std::sort(cells.begin(), cells.end(),
            [](const GridCell& a, const GridCell& b) { return a.name < b.name; });
  std::vector<std::uint64_t> seeds = grid.seeds;
  std::sort(seeds.begin(), seeds.end());

  const std::string data_dir = out_dir + "/data";
  CmdGen(grid.base, data_dir);

  struct Task {
    const GridCell* cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const GridCell& cell : cells) {
    for (std::uint64_t seed : seeds) {
      tasks.push_back({&cell, seed});
    }
  }

  std::vector<GridRow> rows(tasks.size());
  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t t = next_task.fetch_add(1);
      if (t >= tasks.size()) {
        return;
      }
      const Task& task = tasks[t];
      GridRow& row = rows[t];
      row.config = task.cell->name;
      row.seed = std::to_string(task.seed);
      try {
        ExperimentConfig cell_cfg = grid.base;
        cell_cfg.policy = task.cell->policy;
        cell_cfg.policy_ramp_epochs = task.cell->policy_ramp_epochs;
        cell_cfg.model.seed = task.seed;
        cell_cfg.train.seed = task.seed;
        const std::string cell_dir =
            out_dir + "/cells/" + task.cell->name + "_seed" + std::to_string(task.seed);
        TrainArtifacts artifacts = CmdTrain(cell_cfg, data_dir, cell_dir);
        const EvalResult valid_eval =
            CmdEval(artifacts.checkpoint_path, data_dir + "/valid.jsonl", cell_cfg.beam);
        const EvalResult test_eval =
            CmdEval(artifacts.checkpoint_path, data_dir + "/test.jsonl", cell_cfg.beam);
        const auto bounds = EpsilonBounds(task.cell->policy);
        row.eps_start = bounds.first;
        row.eps_end = bounds.second;
        row.next_step_fer = valid_eval.next_step_fer;
        row.decoding_fer = test_eval.decoding_fer;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back(worker);
    }
    for (std::thread& th : pool) {
      th.join();
    }
  }

  // Mean rows per configuration, over the seeds that succeeded.
  std::vector<GridRow> all_rows = rows;
  for (const GridCell& cell : cells) {
    GridRow mean;
    mean.config = cell.name;
    mean.seed = "mean";
    int count = 0;
    for (const GridRow& r : rows) {
      if (r.config == cell.name && !r.failed) {
        mean.eps_start = r.eps_start;
        mean.eps_end = r.eps_end;
        mean.next_step_fer += r.next_step_fer;
        mean.decoding_fer += r.decoding_fer;
        ++count;
      }
    }
    if (count == 0) {
      mean.failed = true;
      mean.error = "all seeds failed";
    } else {
      mean.next_step_fer /= count;
      mean.decoding_fer /= count;
    }
    all_rows.push_back(mean);
  }

  std::ostringstream csv;
  WriteGridCsv(all_rows, csv);
  detail::WriteTextFile(out_dir + "/summary.csv", csv.str());
  std::string errors;
  for (const GridRow& r : all_rows) {
    if (r.failed && r.seed != "mean") {
      errors += r.config + " seed " + r.seed + ": " + r.error + "\n";
    }
  }
  if (!errors.empty()) {
    detail::WriteTextFile(out_dir + "/errors.log", errors);
  }
  return all_rows;
}

struct GradCheckSummary {
  int trials = 0;
  double max_rel_error = 0.0;
};

// Randomized gradient verification over tiny models in both conditioning
// modes, with and without sampled fed tokens.
inline GradCheckSummary CmdGradCheck(int trials, std::uint64_t seed, double fd_step = 1e-5) {
  if (trials < 1) {
    throw std::invalid_argument("gradcheck: trials must be >= 1");
  }
  GradCheckSummary summary;
  summary.trials = trials;
  RngState rng = RngState::FromSeed(seed);
  for (int trial = 0; trial < trials; ++trial) {
    RngState trial_rng = rng.Split(static_cast<std::uint64_t>(trial));
    const bool aligned = trial % 2 == 1;
    ModelConfig cfg;
    cfg.mode = aligned ? SeqMode::kFrameAligned : SeqMode::kStaticInput;
    cfg.vocab_size = 4 + static_cast<int>(trial_rng.NextBelow(4));
    cfg.embed_dim = 3 + static_cast<int>(trial_rng.NextBelow(3));
    cfg.hidden_dim = 4 + static_cast<int>(trial_rng.NextBelow(4));
    cfg.feature_dim = 3 + static_cast<int>(trial_rng.NextBelow(3));
    cfg.init_scale = 0.3;
    cfg.seed = trial_rng.NextU64();
    const ModelParams params = InitParams(cfg);

    const int T = 3 + static_cast<int>(trial_rng.NextBelow(3));
    SeqExample ex;
    ex.id = trial;
    if (aligned) {
      for (int t = 0; t < T; ++t) {
        Vec x(static_cast<std::size_t>(cfg.feature_dim));
        for (double& v : x) {
          v = trial_rng.NextUniform(-1.0, 1.0);
        }
        ex.features.push_back(std::move(x));
        ex.targets.push_back(
            2 + static_cast<int>(trial_rng.NextBelow(static_cast<std::uint64_t>(cfg.vocab_size - 2))));
      }
    } else {
      ex.static_input.resize(static_cast<std::size_t>(cfg.feature_dim));
      for (double& v : ex.static_input) {
        v = trial_rng.NextUniform(-1.0, 1.0);
      }
      for (int t = 0; t + 1 < T; ++t) {
        ex.targets.push_back(
            1 + static_cast<int>(trial_rng.NextBelow(static_cast<std::uint64_t>(cfg.vocab_size - 1))));
      }
      ex.targets.push_back(kEosToken);
    }

    // Even trials teacher-force, odd trials run scheduled sampling at
    // eps=0.5 so sampled fed tokens are exercised too.
    std::vector<int> fed;
    if (trial % 4 < 2) {
      fed = TeacherForcedTokens(ex, cfg.mode);
    } else {
      FeedPolicy policy = ScheduledSampling{ConstantRate(0.5), SampleMode::kMultinomial,
                                            CoinGranularity::kPerToken};
      fed = ChooseFedTokens(params, ex, policy, 0, trial_rng.Split(99)).fed_tokens;
    }
    const double err = GradCheck(params, ex, fed, fd_step);
    summary.max_rel_error = std::max(summary.max_rel_error, err);
  }
  return summary;
}

}  // namespace ssrnn

#endif  // SSRNN_HARNESS_HPP_
