// ssrnn/config.hpp

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

// JSON (de)serialization for every configurable piece: decay schedules,
// feed policies, model/train/beam settings, dataset generation, whole
// experiments and grids. Schedules accept "ramp_epochs" as an alternative
// to "ramp_steps"; the harness resolves epochs to mini-batch steps once the
// dataset size is known.

#ifndef SSRNN_CONFIG_HPP_
#define SSRNN_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssrnn/data.hpp"
#include "ssrnn/decoder.hpp"
#include "ssrnn/model.hpp"
#include "ssrnn/policy.hpp"
#include "ssrnn/schedule.hpp"
#include "ssrnn/trainer.hpp"

namespace ssrnn {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Decay schedules
// ---------------------------------------------------------------------------

// A LinearRamp whose length was given in epochs carries ramp_epochs > 0 and
// a placeholder ramp_steps until ResolveRampEpochs converts it.
struct ScheduleSpec {
  DecaySchedule schedule;
  int ramp_epochs = 0;  // 0 means ramp_steps was given directly
};

inline Json ToJson(const DecaySchedule& s) {
  Json j;
  std::visit(
      [&j](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LinearDecay>) {
          j["type"] = "linear";
          j["k"] = v.offset_k;
          j["c"] = v.slope_c;
          j["eps"] = v.floor_eps;
        } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
          j["type"] = "exponential";
          j["k"] = v.base_k;
        } else if constexpr (std::is_same_v<T, InverseSigmoidDecay>) {
          j["type"] = "inverse_sigmoid";
          j["k"] = v.k;
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          j["type"] = "constant";
          j["eps"] = v.eps;
        } else {
          static_assert(std::is_same_v<T, LinearRamp>);
          j["type"] = "linear_ramp";
          j["eps_start"] = v.eps_start;
          j["eps_end"] = v.eps_end;
          j["ramp_steps"] = v.ramp_steps;
        }
      },
      s);
  return j;
}

inline ScheduleSpec ScheduleFromJson(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") {
    return {LinearDecay(j.at("k").get<double>(), j.at("c").get<double>(),
                        j.at("eps").get<double>()),
            0};
  }
  if (type == "exponential") {
    return {ExponentialDecay(j.at("k").get<double>()), 0};
  }
  if (type == "inverse_sigmoid") {
    return {InverseSigmoidDecay(j.at("k").get<double>()), 0};
  }
  if (type == "constant") {
    return {ConstantRate(j.at("eps").get<double>()), 0};
  }
  if (type == "linear_ramp") {
    const double start = j.at("eps_start").get<double>();
    const double end = j.at("eps_end").get<double>();
    if (j.contains("ramp_epochs")) {
      const int epochs = j.at("ramp_epochs").get<int>();
      if (epochs < 1) {
        throw std::invalid_argument("schedule: ramp_epochs must be >= 1");
      }
      // Placeholder step count; resolved against the dataset later.
      return {LinearRamp(start, end, 1), epochs};
    }
    return {LinearRamp(start, end, j.at("ramp_steps").get<long>()), 0};
  }
  throw std::invalid_argument("schedule: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Feed policies
// ---------------------------------------------------------------------------

inline std::string ToString(SampleMode m) {
  switch (m) {
    case SampleMode::kArgmax:
      return "argmax";
    case SampleMode::kMultinomial:
      return "multinomial";
    case SampleMode::kUniform:
      return "uniform";
  }
  throw std::logic_error("unreachable sample mode");
}

inline SampleMode SampleModeFromString(const std::string& s) {
  if (s == "argmax") {
    return SampleMode::kArgmax;
  }
  if (s == "multinomial") {
    return SampleMode::kMultinomial;
  }
  if (s == "uniform") {
    return SampleMode::kUniform;
  }
  throw std::invalid_argument("unknown sample mode: " + s);
}

inline std::string ToString(CoinGranularity g) {
  return g == CoinGranularity::kPerToken ? "per_token" : "per_sequence";
}

inline CoinGranularity GranularityFromString(const std::string& s) {
  if (s == "per_token") {
    return CoinGranularity::kPerToken;
  }
  if (s == "per_sequence") {
    return CoinGranularity::kPerSequence;
  }
  throw std::invalid_argument("unknown coin granularity: " + s);
}

struct PolicySpec {
  FeedPolicy policy = TeacherForcing{};
  int ramp_epochs = 0;  // forwarded from an embedded linear_ramp schedule
};

inline Json ToJson(const FeedPolicy& policy) {
  Json j;
  if (std::holds_alternative<TeacherForcing>(policy)) {
    j["type"] = "teacher_forcing";
  } else if (const auto* as = std::get_if<AlwaysSampling>(&policy)) {
    j["type"] = "always_sampling";
    j["mode"] = ToString(as->mode);
  } else {
    const ScheduledSampling& ss = std::get<ScheduledSampling>(policy);
    j["type"] = "scheduled_sampling";
    j["mode"] = ToString(ss.mode);
    j["granularity"] = ToString(ss.granularity);
    j["schedule"] = ToJson(ss.schedule);
  }
  return j;
}

inline PolicySpec PolicyFromJson(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "teacher_forcing") {
    return {TeacherForcing{}, 0};
  }
  if (type == "always_sampling") {
    return {AlwaysSampling{SampleModeFromString(j.at("mode").get<std::string>())}, 0};
  }
  if (type == "scheduled_sampling") {
    ScheduleSpec sched = ScheduleFromJson(j.at("schedule"));
    ScheduledSampling ss{std::move(sched.schedule),
                         SampleModeFromString(j.at("mode").get<std::string>()),
                         j.contains("granularity")
                             ? GranularityFromString(j.at("granularity").get<std::string>())
                             : CoinGranularity::kPerToken};
    return {std::move(ss), sched.ramp_epochs};
  }
  throw std::invalid_argument("policy: unknown type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Model / train / beam
// ---------------------------------------------------------------------------

inline Json ToJson(const ModelConfig& cfg) {
  Json j;
  j["vocab_size"] = cfg.vocab_size;
  j["embed_dim"] = cfg.embed_dim;
  j["hidden_dim"] = cfg.hidden_dim;
  j["mode"] = ToString(cfg.mode);
  j["feature_dim"] = cfg.feature_dim;
  j["init_scale"] = cfg.init_scale;
  j["seed"] = cfg.seed;
  return j;
}

inline ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.vocab_size = j.value("vocab_size", 0);
  cfg.embed_dim = j.at("embed_dim").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<int>();
  cfg.mode = SeqModeFromString(j.at("mode").get<std::string>());
  cfg.feature_dim = j.value("feature_dim", 0);
  cfg.init_scale = j.value("init_scale", 0.08);
  cfg.seed = j.value("seed", std::uint64_t{0});
  return cfg;
}

inline Json ToJson(const TrainConfig& cfg) {
  Json j;
  j["lr"] = cfg.lr;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["clip"] = cfg.clip;
  j["seed"] = cfg.seed;
  j["eval_every"] = cfg.eval_every;
  return j;
}

inline TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.lr = j.at("lr").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.clip = j.value("clip", 5.0);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.eval_every = j.value("eval_every", 50);
  Validate(cfg);
  return cfg;
}

inline Json ToJson(const BeamConfig& cfg) {
  Json j;
  j["beam_width"] = cfg.beam_width;
  j["num_results"] = cfg.num_results;
  j["max_len"] = cfg.max_len;
  return j;
}

inline BeamConfig BeamConfigFromJson(const nlohmann::json& j) {
  BeamConfig cfg;
  cfg.beam_width = j.at("beam_width").get<int>();
  cfg.num_results = j.value("num_results", 1);
  cfg.max_len = j.at("max_len").get<int>();
  Validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Data generation
// ---------------------------------------------------------------------------

struct DataConfig {
  std::string generator;  // "copy", "hmm_aligned", or empty when path is set
  std::string path;       // directory with pre-generated train/valid/test.jsonl
  int n_train = 0;
  int n_valid = 0;
  int n_test = 0;
  std::uint64_t seed = 0;
  // copy task
  int payload_vocab = 8;
  int len_min = 2;
  int len_max = 5;
  // aligned task
  int num_states = 8;
  int min_dwell = 4;
  int feature_dim = 16;
  double noise_sigma = 0.7;
  double stay_prob = 0.5;
  int frame_len_min = 70;
  int frame_len_max = 90;
};

inline Json ToJson(const DataConfig& d) {
  Json j;
  if (!d.path.empty()) {
    j["path"] = d.path;
    return j;
  }
  j["generator"] = d.generator;
  j["n_train"] = d.n_train;
  j["n_valid"] = d.n_valid;
  j["n_test"] = d.n_test;
  j["seed"] = d.seed;
  if (d.generator == "copy") {
    j["payload_vocab"] = d.payload_vocab;
    j["len_min"] = d.len_min;
    j["len_max"] = d.len_max;
  } else {
    j["num_states"] = d.num_states;
    j["min_dwell"] = d.min_dwell;
    j["feature_dim"] = d.feature_dim;
    j["noise_sigma"] = d.noise_sigma;
    j["stay_prob"] = d.stay_prob;
    j["frame_len_min"] = d.frame_len_min;
    j["frame_len_max"] = d.frame_len_max;
  }
  return j;
}

inline DataConfig DataConfigFromJson(const nlohmann::json& j) {
  DataConfig d;
  if (j.contains("path")) {
    d.path = j.at("path").get<std::string>();
    return d;
  }
  d.generator = j.at("generator").get<std::string>();
  if (d.generator != "copy" && d.generator != "hmm_aligned") {
    throw std::invalid_argument("data: unknown generator '" + d.generator + "'");
  }
  d.n_train = j.at("n_train").get<int>();
  d.n_valid = j.at("n_valid").get<int>();
  d.n_test = j.at("n_test").get<int>();
  d.seed = j.value("seed", std::uint64_t{0});
  d.payload_vocab = j.value("payload_vocab", d.payload_vocab);
  d.len_min = j.value("len_min", d.len_min);
  d.len_max = j.value("len_max", d.len_max);
  d.num_states = j.value("num_states", d.num_states);
  d.min_dwell = j.value("min_dwell", d.min_dwell);
  d.feature_dim = j.value("feature_dim", d.feature_dim);
  d.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  d.stay_prob = j.value("stay_prob", d.stay_prob);
  d.frame_len_min = j.value("frame_len_min", d.frame_len_min);
  d.frame_len_max = j.value("frame_len_max", d.frame_len_max);
  return d;
}

// ---------------------------------------------------------------------------
// Experiments and grids
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  ModelConfig model;
  TrainConfig train;
  FeedPolicy policy = TeacherForcing{};
  int policy_ramp_epochs = 0;
  BeamConfig beam;
  DataConfig data;
  std::string output_dir;
};

inline Json ToJson(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = 1;
  j["model"] = ToJson(cfg.model);
  j["train"] = ToJson(cfg.train);
  j["policy"] = ToJson(cfg.policy);
  j["beam"] = ToJson(cfg.beam);
  j["data"] = ToJson(cfg.data);
  j["output_dir"] = cfg.output_dir;
  return j;
}

inline ExperimentConfig ExperimentFromJson(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) {
    throw std::invalid_argument("experiment config: unsupported schema_version");
  }
  ExperimentConfig cfg;
  cfg.model = ModelConfigFromJson(j.at("model"));
  cfg.train = TrainConfigFromJson(j.at("train"));
  if (j.contains("policy")) {  // grid bases omit it; cells supply their own
    PolicySpec spec = PolicyFromJson(j.at("policy"));
    cfg.policy = std::move(spec.policy);
    cfg.policy_ramp_epochs = spec.ramp_epochs;
  }
  cfg.beam = BeamConfigFromJson(j.at("beam"));
  cfg.data = DataConfigFromJson(j.at("data"));
  cfg.output_dir = j.value("output_dir", "");
  return cfg;
}

inline nlohmann::json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  nlohmann::json j;
  in >> j;
  return j;
}

struct GridCell {
  std::string name;
  FeedPolicy policy;
  int policy_ramp_epochs = 0;
};

struct GridConfig {
  ExperimentConfig base;  // base.policy is ignored; cells supply policies
  std::vector<GridCell> configurations;
  std::vector<std::uint64_t> seeds;
};

inline GridConfig GridFromJson(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) {
    throw std::invalid_argument("grid config: unsupported schema_version");
  }
  GridConfig grid;
  grid.base = ExperimentFromJson(j.at("base"));
  for (const auto& c : j.at("configurations")) {
    GridCell cell;
    cell.name = c.at("name").get<std::string>();
    PolicySpec spec = PolicyFromJson(c.at("policy"));
    cell.policy = std::move(spec.policy);
    cell.policy_ramp_epochs = spec.ramp_epochs;
    grid.configurations.push_back(std::move(cell));
  }
  grid.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (grid.configurations.empty() || grid.seeds.empty()) {
    throw std::invalid_argument("grid config: needs configurations and seeds");
  }
  return grid;
}

}  // namespace ssrnn

#endif  // SSRNN_CONFIG_HPP_
