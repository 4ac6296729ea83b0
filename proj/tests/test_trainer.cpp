// tests/test_trainer.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ssrnn/trainer.hpp"

using namespace ssrnn;
using Catch::Approx;

namespace {

ModelConfig SmallCopyModel(int vocab, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.vocab_size = vocab;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 12;
  cfg.mode = SeqMode::kStaticInput;
  cfg.feature_dim = vocab;
  cfg.init_scale = 0.25;
  cfg.seed = seed;
  return cfg;
}

BeamConfig SmallBeam() {
  BeamConfig beam;
  beam.beam_width = 2;
  beam.num_results = 1;
  beam.max_len = 8;
  return beam;
}

bool SameGradients(const Gradients& a, const Gradients& b, const ModelConfig& cfg) {
  const auto ar = TensorRefs(a, cfg);
  const auto br = TensorRefs(b, cfg);
  for (std::size_t k = 0; k < ar.size(); ++k) {
    if (*ar[k].data != *br[k].data) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("ChooseFedTokens under teacher forcing feeds the shifted truth") {
  const Dataset ds = GenCopy(4, 3, 4, 6, 13);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 13));
  for (const SeqExample& ex : ds.examples) {
    const ChosenFeed cf =
        ChooseFedTokens(p, ex, TeacherForcing{}, 0, RngState::FromSeed(1));
    std::vector<int> want(ex.targets.size());
    want[0] = kNoToken;
    for (std::size_t t = 1; t < want.size(); ++t) {
      want[t] = ex.targets[t - 1];
    }
    CHECK(cf.fed_tokens == want);
    // The trace is exactly the teacher-forced Forward trace.
    const ForwardTrace direct = Forward(p, ex, want);
    CHECK(cf.trace.total_nll == direct.total_nll);
    for (std::size_t t = 0; t < direct.steps.size(); ++t) {
      CHECK(cf.trace.steps[t].logits == direct.steps[t].logits);
    }
  }
}

TEST_CASE("Scheduled sampling pinned at eps=1 is bit-identical to teacher forcing") {
  const Dataset ds = GenCopy(6, 2, 5, 6, 14);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 14));
  const FeedPolicy pinned = ScheduledSampling{ConstantRate(1.0), SampleMode::kMultinomial,
                                              CoinGranularity::kPerToken};
  for (const SeqExample& ex : ds.examples) {
    const RngState rng = RngState::FromSeed(500 + static_cast<std::uint64_t>(ex.id));
    const ChosenFeed tf = ChooseFedTokens(p, ex, TeacherForcing{}, 3, rng);
    const ChosenFeed ss = ChooseFedTokens(p, ex, pinned, 3, rng);
    CHECK(tf.fed_tokens == ss.fed_tokens);
    CHECK(tf.trace.total_nll == ss.trace.total_nll);
    CHECK(SameGradients(Backward(p, tf.trace), Backward(p, ss.trace), p.cfg));
  }
}

TEST_CASE("Scheduled sampling pinned at eps=0 is bit-identical to always-sampling") {
  const Dataset ds = GenCopy(6, 2, 5, 6, 15);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 15));
  for (const SampleMode mode :
       {SampleMode::kArgmax, SampleMode::kMultinomial, SampleMode::kUniform}) {
    const FeedPolicy pinned =
        ScheduledSampling{ConstantRate(0.0), mode, CoinGranularity::kPerToken};
    const FeedPolicy always = AlwaysSampling{mode};
    for (const SeqExample& ex : ds.examples) {
      const RngState rng = RngState::FromSeed(700 + static_cast<std::uint64_t>(ex.id));
      const ChosenFeed a = ChooseFedTokens(p, ex, pinned, 5, rng);
      const ChosenFeed b = ChooseFedTokens(p, ex, always, 5, rng);
      CHECK(a.fed_tokens == b.fed_tokens);
      CHECK(a.trace.total_nll == b.trace.total_nll);
    }
  }
}

TEST_CASE("Always-sampling argmax fed tokens replay step by step") {
  const Dataset ds = GenCopy(3, 3, 5, 6, 16);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 16));
  const FeedPolicy policy =
      ScheduledSampling{ConstantRate(0.0), SampleMode::kArgmax, CoinGranularity::kPerToken};
  for (const SeqExample& ex : ds.examples) {
    const ChosenFeed cf = ChooseFedTokens(p, ex, policy, 0, RngState::FromSeed(9));
    // Independent replay through the public single-step interface.
    CellState state = InitialState(p, ex);
    for (std::size_t t = 1; t < ex.targets.size(); ++t) {
      const Vec logits = OutputLogits(p, state);
      CHECK(cf.fed_tokens[t] == Argmax(logits));
      state = Step(p, state, cf.fed_tokens[t]).state;
    }
  }
}

TEST_CASE("Sampled fed tokens are recorded as non-truth") {
  const Dataset ds = GenCopy(1, 5, 5, 6, 17);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 17));
  const FeedPolicy policy =
      ScheduledSampling{ConstantRate(0.0), SampleMode::kUniform, CoinGranularity::kPerToken};
  const ChosenFeed cf = ChooseFedTokens(p, ds.examples[0], policy, 0, RngState::FromSeed(3));
  CHECK(cf.trace.steps[0].fed_truth);  // the input-vector step has no coin
  for (std::size_t t = 1; t < cf.trace.steps.size(); ++t) {
    CHECK_FALSE(cf.trace.steps[t].fed_truth);
  }
}

TEST_CASE("Truth-feeding frequency matches epsilon within three standard errors") {
  const double eps = 0.6;
  SeqExample ex;
  const int payload = 400;
  ex.static_input.assign(7, 0.3);
  for (int t = 0; t < payload; ++t) {
    ex.targets.push_back(1 + t % 6);
  }
  ex.targets.push_back(kEosToken);
  ModelConfig cfg = SmallCopyModel(7, 18);
  const ModelParams p = InitParams(cfg);
  const FeedPolicy policy =
      ScheduledSampling{ConstantRate(eps), SampleMode::kMultinomial, CoinGranularity::kPerToken};
  long truth = 0;
  long coins = 0;
  for (int rep = 0; rep < 25; ++rep) {
    const ChosenFeed cf =
        ChooseFedTokens(p, ex, policy, 0, RngState::FromSeed(40 + static_cast<std::uint64_t>(rep)));
    for (std::size_t t = 1; t < cf.trace.steps.size(); ++t) {
      truth += cf.trace.steps[t].fed_truth ? 1 : 0;
      ++coins;
    }
  }
  const double freq = static_cast<double>(truth) / static_cast<double>(coins);
  const double se = std::sqrt(eps * (1.0 - eps) / static_cast<double>(coins));
  CHECK(std::abs(freq - eps) < 3.0 * se);
}

TEST_CASE("Per-sequence granularity flips one coin for the whole sequence") {
  const Dataset ds = GenCopy(40, 5, 5, 8, 19);
  const ModelParams p = InitParams(SmallCopyModel(ds.vocab_size, 19));
  const FeedPolicy policy = ScheduledSampling{ConstantRate(0.5), SampleMode::kMultinomial,
                                              CoinGranularity::kPerSequence};
  int all_truth = 0;
  int all_sampled = 0;
  for (const SeqExample& ex : ds.examples) {
    const ChosenFeed cf =
        ChooseFedTokens(p, ex, policy, 0, RngState::FromSeed(900 + static_cast<std::uint64_t>(ex.id)));
    bool any_truth = false;
    bool any_sampled = false;
    for (std::size_t t = 1; t < cf.trace.steps.size(); ++t) {
      (cf.trace.steps[t].fed_truth ? any_truth : any_sampled) = true;
    }
    CHECK_FALSE((any_truth && any_sampled));
    all_truth += any_truth && !any_sampled ? 1 : 0;
    all_sampled += any_sampled && !any_truth ? 1 : 0;
  }
  // Both outcomes occur across sequences at eps = 0.5.
  CHECK(all_truth > 0);
  CHECK(all_sampled > 0);
}

TEST_CASE("NextStepError point cases") {
  // A model pinned to a constant label is perfect on constant targets.
  ModelConfig cfg;
  cfg.vocab_size = 5;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.mode = SeqMode::kFrameAligned;
  cfg.feature_dim = 2;
  cfg.seed = 20;
  ModelParams pinned = InitParams(cfg);
  for (const TensorRef& ref : TensorRefs(pinned)) {
    for (double& x : *ref.data) {
      x = 0.0;
    }
  }
  pinned.out_bias[2] = 30.0;
  Dataset constant;
  constant.mode = SeqMode::kFrameAligned;
  constant.vocab_size = 5;
  for (int i = 0; i < 3; ++i) {
    SeqExample ex;
    ex.id = i;
    for (int t = 0; t < 5; ++t) {
      ex.features.push_back(Vec{0.0, 1.0});
      ex.targets.push_back(2);
    }
    constant.examples.push_back(std::move(ex));
  }
  CHECK(NextStepError(pinned, constant) == 0.0);
  CHECK(NextStepError(pinned, constant) == NextStepError(pinned, constant));

  // A zero model always predicts token 0; on uniformly random targets over
  // V tokens the expected error is 1 - 1/V.
  const int vocab = 6;
  ModelConfig zcfg = SmallCopyModel(vocab, 21);
  ModelParams zero = InitParams(zcfg);
  for (const TensorRef& ref : TensorRefs(zero)) {
    for (double& x : *ref.data) {
      x = 0.0;
    }
  }
  Dataset random_ds;
  random_ds.mode = SeqMode::kStaticInput;
  random_ds.vocab_size = vocab;
  RngState rng = RngState::FromSeed(22);
  for (int i = 0; i < 300; ++i) {
    SeqExample ex;
    ex.id = i;
    ex.static_input.assign(static_cast<std::size_t>(vocab), 0.1);
    for (int t = 0; t < 20; ++t) {
      ex.targets.push_back(static_cast<int>(rng.NextBelow(vocab)));
    }
    ex.targets.push_back(kEosToken);
    random_ds.examples.push_back(std::move(ex));
  }
  const double err = NextStepError(zero, random_ds);
  CHECK(err == Approx(1.0 - 1.0 / vocab).margin(0.02));
}

TEST_CASE("Train is deterministic and its epsilon trace matches the schedule") {
  const Dataset train_set = GenCopy(24, 2, 4, 6, 23, "train");
  const Dataset valid_set = GenCopy(8, 2, 4, 6, 24, "valid");
  const DecaySchedule sched = ExponentialDecay(0.9);
  const FeedPolicy policy =
      ScheduledSampling{sched, SampleMode::kMultinomial, CoinGranularity::kPerToken};
  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.batch_size = 8;
  cfg.epochs = 4;
  cfg.clip = 5.0;
  cfg.seed = 25;
  cfg.eval_every = 2;

  const ModelParams init = InitParams(SmallCopyModel(train_set.vocab_size, 25));
  const TrainResult a = Train(init, train_set, valid_set, policy, cfg, SmallBeam());
  const TrainResult b = Train(init, train_set, valid_set, policy, cfg, SmallBeam());
  CHECK(a.params == b.params);
  REQUIRE(a.report.records.size() == b.report.records.size());
  std::ostringstream csv_a;
  std::ostringstream csv_b;
  WriteCsv(a.report, csv_a);
  WriteCsv(b.report, csv_b);
  CHECK(csv_a.str() == csv_b.str());

  for (const TrainRecord& rec : a.report.records) {
    CHECK(rec.epsilon == EpsilonAt(sched, rec.step));
  }
  // Strictly monotone step indices, final row at the total batch count.
  for (std::size_t i = 1; i < a.report.records.size(); ++i) {
    CHECK(a.report.records[i].step > a.report.records[i - 1].step);
  }
  CHECK(a.report.records.back().step == 12);  // 3 batches/epoch * 4 epochs
}

TEST_CASE("Policy equivalences hold through whole training runs") {
  const Dataset train_set = GenCopy(16, 2, 4, 6, 26, "train");
  const Dataset valid_set = GenCopy(6, 2, 4, 6, 27, "valid");
  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.batch_size = 4;
  cfg.epochs = 2;
  cfg.clip = 5.0;
  cfg.seed = 28;
  cfg.eval_every = 2;
  const ModelParams init = InitParams(SmallCopyModel(train_set.vocab_size, 28));

  const TrainResult tf = Train(init, train_set, valid_set, TeacherForcing{}, cfg, SmallBeam());
  const TrainResult ss1 =
      Train(init, train_set, valid_set,
            ScheduledSampling{ConstantRate(1.0), SampleMode::kMultinomial,
                              CoinGranularity::kPerToken},
            cfg, SmallBeam());
  CHECK(tf.params == ss1.params);
  std::ostringstream a;
  std::ostringstream b;
  WriteCsv(tf.report, a);
  WriteCsv(ss1.report, b);
  CHECK(a.str() == b.str());

  const TrainResult as =
      Train(init, train_set, valid_set, AlwaysSampling{SampleMode::kMultinomial}, cfg, SmallBeam());
  const TrainResult ss0 =
      Train(init, train_set, valid_set,
            ScheduledSampling{ConstantRate(0.0), SampleMode::kMultinomial,
                              CoinGranularity::kPerToken},
            cfg, SmallBeam());
  CHECK(as.params == ss0.params);
  std::ostringstream c;
  std::ostringstream d;
  WriteCsv(as.report, c);
  WriteCsv(ss0.report, d);
  CHECK(c.str() == d.str());
}

TEST_CASE("Training loss decreases on the copy task under teacher forcing") {
  const Dataset train_set = GenCopy(48, 2, 3, 5, 29, "train");
  const Dataset valid_set = GenCopy(12, 2, 3, 5, 30, "valid");
  TrainConfig cfg;
  cfg.lr = 0.15;
  cfg.batch_size = 8;
  cfg.epochs = 10;
  cfg.clip = 5.0;
  cfg.seed = 31;
  cfg.eval_every = 6;  // once per epoch
  const ModelParams init = InitParams(SmallCopyModel(train_set.vocab_size, 31));
  const TrainResult r = Train(init, train_set, valid_set, TeacherForcing{}, cfg, SmallBeam());
  REQUIRE(r.report.records.size() >= 3);
  const double first = r.report.records.front().train_nll;
  const double last = r.report.records[r.report.records.size() - 2].train_nll;
  CHECK(last < first * 0.6);
}

TEST_CASE("Train raises a structured divergence error with the batch index") {
  const Dataset train_set = GenCopy(8, 2, 3, 5, 32, "train");
  const Dataset valid_set = GenCopy(4, 2, 3, 5, 33, "valid");
  ModelParams init = InitParams(SmallCopyModel(train_set.vocab_size, 34));
  for (double& x : init.out_proj.data) {
    x = 1e170;  // gradient norm overflows on the first batch
  }
  TrainConfig cfg;
  cfg.lr = 0.1;
  cfg.batch_size = 4;
  cfg.epochs = 1;
  cfg.clip = 5.0;
  cfg.seed = 35;
  cfg.eval_every = 100;
  bool caught = false;
  try {
    Train(init, train_set, valid_set, TeacherForcing{}, cfg, SmallBeam());
  } catch (const TrainingDiverged& e) {
    caught = true;
    CHECK(e.batch_index == 0);
  }
  CHECK(caught);
}

TEST_CASE("Train validates dataset modes and emptiness") {
  const Dataset train_set = GenCopy(8, 2, 3, 5, 36, "train");
  const Dataset aligned = GenHmmAligned(4, 3, 2, 3, 0.2, 37);
  const ModelParams init = InitParams(SmallCopyModel(train_set.vocab_size, 38));
  TrainConfig cfg;
  CHECK_THROWS_AS(Train(init, train_set, aligned, TeacherForcing{}, cfg, SmallBeam()),
                  std::invalid_argument);
  Dataset empty = train_set;
  empty.examples.clear();
  CHECK_THROWS_AS(Train(init, empty, train_set, TeacherForcing{}, cfg, SmallBeam()),
                  std::invalid_argument);
}
