// ssrnn/trainer.hpp

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

// Mini-batch SGD training with pluggable feed policies. At every step past
// the first, the policy decides whether the model's input is the true
// previous token or one generated by the model itself; the realized fed
// tokens are constants to the gradient (no backpropagation through the coin
// or the sampling distribution).

#ifndef SSRNN_TRAINER_HPP_
#define SSRNN_TRAINER_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/data.hpp"
#include "ssrnn/decoder.hpp"
#include "ssrnn/math.hpp"
#include "ssrnn/metrics.hpp"
#include "ssrnn/model.hpp"
#include "ssrnn/policy.hpp"
#include "ssrnn/rng.hpp"

namespace ssrnn {

struct TrainConfig {
  double lr = 0.1;
  int batch_size = 8;
  int epochs = 10;
  double clip = 5.0;
  std::uint64_t seed = 0;
  int eval_every = 50;  // mini-batches between TrainReport records

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline void Validate(const TrainConfig& cfg) {
  if (!(cfg.lr > 0.0) || cfg.batch_size < 1 || cfg.epochs < 1 || !(cfg.clip > 0.0) ||
      cfg.eval_every < 1) {
    throw std::invalid_argument("TrainConfig: all fields must be positive");
  }
}

struct TrainRecord {
  long step = 0;          // mini-batch index the record describes
  double epsilon = 1.0;   // truth-feeding probability at that index
  double train_nll = 0.0; // mean per-token training nll since the last record
  double valid_next_step_fer = 0.0;
  double valid_decoding_fer = 0.0;
};

struct TrainReport {
  std::vector<TrainRecord> records;
};

inline void WriteCsv(const TrainReport& report, std::ostream& out) {
  out << "step,epsilon,train_nll,valid_next_step_fer,valid_decoding_fer\n";
  char buf[256];
  for (const TrainRecord& r : report.records) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g\n", r.step, r.epsilon,
                  r.train_nll, r.valid_next_step_fer, r.valid_decoding_fer);
    out << buf;
  }
}

// Raised when training produces a non-finite loss or gradient.
struct TrainingDiverged : std::runtime_error {
  long batch_index;

  explicit TrainingDiverged(long batch)
      : std::runtime_error("training diverged at mini-batch " + std::to_string(batch)),
        batch_index(batch) {}
};

struct ChosenFeed {
  std::vector<int> fed_tokens;
  ForwardTrace trace;
};

// Runs the recurrence left to right, deciding at each step whether the next
// input is the true previous token (with probability epsilon_i) or a token
// generated by the model at the step just computed. The returned trace is
// the single source for Backward: fed tokens are constants to the gradient.
//
// The coin and the sampler consume independent sub-streams of rng, so a
// schedule pinned at eps=1 is bit-identical to teacher forcing and one
// pinned at eps=0 is bit-identical to always-sampling, draw for draw.
inline ChosenFeed ChooseFedTokens(const ModelParams& params, const SeqExample& ex,
                                  const FeedPolicy& policy, long step_index, RngState rng) {
  if (ex.targets.empty()) {
    throw std::invalid_argument("ChooseFedTokens: example has no targets");
  }
  if (ex.targets.back() != kEosToken && params.cfg.mode == SeqMode::kStaticInput) {
    throw std::invalid_argument("ChooseFedTokens: static-mode targets must end with EOS");
  }
  const int first_slot =
      params.cfg.mode == SeqMode::kFrameAligned ? kStartToken : kNoToken;

  const bool teacher = std::holds_alternative<TeacherForcing>(policy);
  const bool always = std::holds_alternative<AlwaysSampling>(policy);
  SampleMode mode = SampleMode::kArgmax;
  CoinGranularity granularity = CoinGranularity::kPerToken;
  double eps = 1.0;
  if (always) {
    mode = std::get<AlwaysSampling>(policy).mode;
    eps = 0.0;
  } else if (!teacher) {
    const ScheduledSampling& ss = std::get<ScheduledSampling>(policy);
    mode = ss.mode;
    granularity = ss.granularity;
    eps = EpsilonAt(ss.schedule, step_index);
  }

  RngState coin_rng = rng.Split(0);
  RngState sample_rng = rng.Split(1);
  bool sequence_truth = true;
  if (!teacher && !always && granularity == CoinGranularity::kPerSequence) {
    sequence_truth = coin_rng.NextDouble() < eps;
  }

  std::vector<char> truth_flags(ex.targets.size(), 1);
  auto decide = [&](std::size_t t0, const StepTrace& st) -> int {
    bool use_truth;
    if (teacher) {
      use_truth = true;
    } else if (always) {
      use_truth = false;
    } else if (granularity == CoinGranularity::kPerSequence) {
      use_truth = sequence_truth;
    } else {
      use_truth = coin_rng.NextDouble() < eps;
    }
    if (use_truth) {
      truth_flags[t0 + 1] = 1;
      return ex.targets[t0];
    }
    truth_flags[t0 + 1] = 0;
    switch (mode) {
      case SampleMode::kArgmax:
        return Argmax(st.logits);
      case SampleMode::kMultinomial: {
        Vec probs(st.log_probs.size());
        for (std::size_t k = 0; k < probs.size(); ++k) {
          probs[k] = std::exp(st.log_probs[k]);
        }
        return SampleCategorical(probs, sample_rng);
      }
      case SampleMode::kUniform:
        return static_cast<int>(
            sample_rng.NextBelow(static_cast<std::uint64_t>(params.cfg.vocab_size)));
    }
    throw std::logic_error("ChooseFedTokens: unreachable sample mode");
  };

  ChosenFeed out;
  out.trace = detail::Walk(params, ex, first_slot, decide);
  out.fed_tokens.resize(out.trace.steps.size());
  for (std::size_t t = 0; t < out.trace.steps.size(); ++t) {
    out.fed_tokens[t] = out.trace.steps[t].fed_token;
    out.trace.steps[t].fed_truth = truth_flags[t] != 0;
  }
  return out;
}

// Teacher-forced next-step error: fraction of steps, over all sequences,
// where the argmax prediction differs from the target.
inline double NextStepError(const ModelParams& params, const Dataset& ds) {
  if (ds.examples.empty()) {
    throw std::invalid_argument("NextStepError: dataset is empty");
  }
  long wrong = 0;
  long total = 0;
  for (const SeqExample& ex : ds.examples) {
    const ForwardTrace trace = Forward(params, ex, TeacherForcedTokens(ex, params.cfg.mode));
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      wrong += Argmax(trace.steps[t].logits) != ex.targets[t] ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(total);
}

struct TrainResult {
  ModelParams params;  // best-validation parameters (decoding error)
  TrainReport report;
};

namespace detail {

// Sub-stream tags for the trainer's master RNG.
constexpr std::uint64_t kShuffleStream = 0x53484649ULL;
constexpr std::uint64_t kExampleStream = 0x4558414dULL;

inline std::vector<std::size_t> EpochOrder(std::size_t n, RngState rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::size_t k = j + static_cast<std::size_t>(rng.NextBelow(n - j));
    std::swap(order[j], order[k]);
  }
  return order;
}

}  // namespace detail

// Mini-batch SGD over the training set. For each mini-batch i: epsilon_i is
// evaluated once for the whole batch, per-example gradients are accumulated
// in example order (their sum feeds one SgdUpdate), and a TrainReport record
// is appended every eval_every batches. Per-example RNG streams derive from
// (seed, epoch, example index), so results do not depend on how the work
// would be scheduled.
//
// Model selection keeps the parameters with the best validation decoding
// error seen at any evaluation point (including the final parameters). The
// last report row always describes the selected parameters, at step index
// equal to the total number of mini-batches.
inline TrainResult Train(const ModelParams& init, const Dataset& train_set,
                         const Dataset& valid_set, const FeedPolicy& policy,
                         const TrainConfig& cfg, const BeamConfig& valid_beam) {
  Validate(cfg);
  if (train_set.examples.empty() || valid_set.examples.empty()) {
    throw std::invalid_argument("Train: datasets must be nonempty");
  }
  const bool aligned_model = init.cfg.mode == SeqMode::kFrameAligned;
  if ((train_set.mode == SeqMode::kFrameAligned) != aligned_model ||
      (valid_set.mode == SeqMode::kFrameAligned) != aligned_model) {
    throw std::invalid_argument("Train: dataset mode does not match model mode");
  }

  ModelParams params = init;
  RngState master = RngState::FromSeed(cfg.seed);
  TrainReport report;

  ModelParams best = params;
  double best_decoding = std::numeric_limits<double>::infinity();
  double best_next_step = std::numeric_limits<double>::infinity();
  bool have_best = false;

  long batch_index = 0;
  double window_nll = 0.0;
  long window_tokens = 0;

  const std::size_t n = train_set.examples.size();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = detail::EpochOrder(
        n, master.Split(detail::kShuffleStream, static_cast<std::uint64_t>(epoch)));
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const double eps = PolicyEpsilon(policy, batch_index);
      Gradients acc = ZeroGradients(params.cfg);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        const SeqExample& ex = train_set.examples[idx];
        RngState ex_rng = master.Split(detail::kExampleStream, static_cast<std::uint64_t>(epoch),
                                       static_cast<std::uint64_t>(idx));
        ChosenFeed chosen = ChooseFedTokens(params, ex, policy, batch_index, ex_rng);
        if (!std::isfinite(chosen.trace.total_nll)) {
          throw TrainingDiverged(batch_index);
        }
        window_nll += chosen.trace.total_nll;
        window_tokens += static_cast<long>(ex.targets.size());
        Accumulate(acc, Backward(params, chosen.trace));
      }
      try {
        params = SgdUpdate(params, acc, cfg.lr, cfg.clip);
      } catch (const std::runtime_error&) {
        throw TrainingDiverged(batch_index);
      }

      if ((batch_index + 1) % cfg.eval_every == 0) {
        TrainRecord rec;
        rec.step = batch_index;
        rec.epsilon = eps;
        rec.train_nll = window_nll / static_cast<double>(window_tokens);
        rec.valid_next_step_fer = NextStepError(params, valid_set);
        rec.valid_decoding_fer = DecodingError(params, valid_set, valid_beam);
        report.records.push_back(rec);
        window_nll = 0.0;
        window_tokens = 0;
        if (rec.valid_decoding_fer < best_decoding) {
          best_decoding = rec.valid_decoding_fer;
          best_next_step = rec.valid_next_step_fer;
          best = params;
          have_best = true;
        }
      }
      ++batch_index;
    }
  }

  // The final parameters also compete for selection.
  const double final_next_step = NextStepError(params, valid_set);
  const double final_decoding = DecodingError(params, valid_set, valid_beam);
  if (!have_best || final_decoding < best_decoding) {
    best_decoding = final_decoding;
    best_next_step = final_next_step;
    best = params;
  }

  TrainRecord last;
  last.step = batch_index;
  last.epsilon = PolicyEpsilon(policy, batch_index);
  last.train_nll = window_tokens > 0 ? window_nll / static_cast<double>(window_tokens)
                                     : report.records.back().train_nll;
  last.valid_next_step_fer = best_next_step;
  last.valid_decoding_fer = best_decoding;
  report.records.push_back(last);

  return {std::move(best), std::move(report)};
}

}  // namespace ssrnn

#endif  // SSRNN_TRAINER_HPP_
