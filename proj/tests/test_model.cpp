// tests/test_model.cpp

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
#include <limits>

#include "oracles.hpp"
#include "ssrnn/model.hpp"

using namespace ssrnn;
using Catch::Approx;

namespace {

ModelConfig TinyStaticConfig(std::uint64_t seed = 1, double init_scale = 0.5) {
  ModelConfig cfg;
  cfg.vocab_size = 4;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.mode = SeqMode::kStaticInput;
  cfg.feature_dim = 4;
  cfg.init_scale = init_scale;
  cfg.seed = seed;
  return cfg;
}

ModelConfig TinyAlignedConfig(std::uint64_t seed = 2, double init_scale = 0.5) {
  ModelConfig cfg;
  cfg.vocab_size = 5;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.mode = SeqMode::kFrameAligned;
  cfg.feature_dim = 3;
  cfg.init_scale = init_scale;
  cfg.seed = seed;
  return cfg;
}

void ZeroTensors(ModelParams& p) {
  for (const TensorRef& ref : TensorRefs(p)) {
    for (double& x : *ref.data) {
      x = 0.0;
    }
  }
}

SeqExample RandomStaticExample(const ModelConfig& cfg, RngState rng, int payload_len) {
  SeqExample ex;
  ex.static_input.resize(static_cast<std::size_t>(cfg.feature_dim));
  for (double& x : ex.static_input) {
    x = rng.NextUniform(-1.0, 1.0);
  }
  for (int t = 0; t < payload_len; ++t) {
    ex.targets.push_back(
        1 + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(cfg.vocab_size - 1))));
  }
  ex.targets.push_back(kEosToken);
  return ex;
}

SeqExample RandomAlignedExample(const ModelConfig& cfg, RngState rng, int len) {
  SeqExample ex;
  for (int t = 0; t < len; ++t) {
    Vec x(static_cast<std::size_t>(cfg.feature_dim));
    for (double& v : x) {
      v = rng.NextUniform(-1.0, 1.0);
    }
    ex.features.push_back(std::move(x));
    ex.targets.push_back(
        2 + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(cfg.vocab_size - 2))));
  }
  return ex;
}

}  // namespace

TEST_CASE("InitParams is deterministic and respects the init range") {
  ModelConfig cfg = TinyStaticConfig(77, 0.08);
  const ModelParams a = InitParams(cfg);
  const ModelParams b = InitParams(cfg);
  CHECK(a == b);

  for (const ConstTensorRef& ref : TensorRefs(a)) {
    if (ref.name == "gate_bias" || ref.name == "out_bias") {
      continue;
    }
    for (double x : *ref.data) {
      CHECK(std::abs(x) <= 0.08);
    }
  }

  cfg.seed = 78;
  CHECK_FALSE(InitParams(cfg) == a);
}

TEST_CASE("InitParams biases are zero except the forget gate") {
  const ModelParams p = InitParams(TinyStaticConfig());
  const int h = p.cfg.hidden_dim;
  for (int k = 0; k < 4 * h; ++k) {
    const bool forget = k >= kGateForget * h && k < (kGateForget + 1) * h;
    CHECK(p.gate_bias[static_cast<std::size_t>(k)] == (forget ? 1.0 : 0.0));
  }
  for (double x : p.out_bias) {
    CHECK(x == 0.0);
  }
}

TEST_CASE("InitParams rejects invalid configs") {
  ModelConfig cfg = TinyStaticConfig();
  cfg.vocab_size = 1;
  CHECK_THROWS_AS(InitParams(cfg), std::invalid_argument);
  cfg = TinyAlignedConfig();
  cfg.vocab_size = 2;  // aligned needs payload + EOS + S
  CHECK_THROWS_AS(InitParams(cfg), std::invalid_argument);
  cfg = TinyStaticConfig();
  cfg.init_scale = 0.0;
  CHECK_THROWS_AS(InitParams(cfg), std::invalid_argument);
}

TEST_CASE("Aligned initial state is one step from the zero vector") {
  const ModelParams p = InitParams(TinyAlignedConfig());
  const SeqExample ex = RandomAlignedExample(p.cfg, RngState::FromSeed(3), 4);
  const CellState init = InitialState(p, ex);
  const CellState manual = Step(p, ZeroState(p.cfg), kStartToken, &ex.features[0]).state;
  CHECK(init == manual);
  CHECK(InitialState(p, ex) == init);  // deterministic on repeat
}

TEST_CASE("Static initial state with zero weights follows the bias composition") {
  ModelParams p = InitParams(TinyStaticConfig());
  ZeroTensors(p);
  const int h = p.cfg.hidden_dim;
  const double bi = 0.3;
  const double bf = 1.2;
  const double bg = -0.4;
  const double bo = 0.9;
  for (int k = 0; k < h; ++k) {
    p.gate_bias[static_cast<std::size_t>(kGateInput * h + k)] = bi;
    p.gate_bias[static_cast<std::size_t>(kGateForget * h + k)] = bf;
    p.gate_bias[static_cast<std::size_t>(kGateCell * h + k)] = bg;
    p.gate_bias[static_cast<std::size_t>(kGateOutput * h + k)] = bo;
  }
  SeqExample ex;
  ex.static_input.assign(static_cast<std::size_t>(p.cfg.feature_dim), 0.0);
  ex.targets = {kEosToken};

  // Hand calculation: with all weights zero the pre-activations are the
  // biases, so c = sigmoid(bi)*tanh(bg) and h = sigmoid(bo)*tanh(c).
  const double want_c = 1.0 / (1.0 + std::exp(-bi)) * std::tanh(bg);
  const double want_h = 1.0 / (1.0 + std::exp(-bo)) * std::tanh(want_c);

  const CellState state = InitialState(p, ex);
  for (int k = 0; k < h; ++k) {
    CHECK(state.c[static_cast<std::size_t>(k)] == Approx(want_c).epsilon(1e-15));
    CHECK(state.h[static_cast<std::size_t>(k)] == Approx(want_h).epsilon(1e-15));
  }
}

TEST_CASE("InitialState rejects feature dimension mismatches") {
  const ModelParams p = InitParams(TinyStaticConfig());
  SeqExample ex;
  ex.static_input.assign(2, 0.0);  // feature_dim is 4
  ex.targets = {kEosToken};
  CHECK_THROWS_AS(InitialState(p, ex), std::invalid_argument);
}

TEST_CASE("Step with zero params yields zero logits (uniform softmax)") {
  ModelParams p = InitParams(TinyStaticConfig());
  ZeroTensors(p);
  const StepResult r = Step(p, ZeroState(p.cfg), 2);
  for (double x : r.logits) {
    CHECK(x == 0.0);
  }
  const Vec probs = Softmax(r.logits);
  for (double x : probs) {
    CHECK(x == Approx(1.0 / p.cfg.vocab_size).epsilon(1e-15));
  }
}

TEST_CASE("Step carries the cell through a saturated forget gate") {
  ModelParams p = InitParams(TinyStaticConfig());
  ZeroTensors(p);
  const int h = p.cfg.hidden_dim;
  for (int k = 0; k < h; ++k) {
    p.gate_bias[static_cast<std::size_t>(kGateForget * h + k)] = 100.0;   // f -> 1
    p.gate_bias[static_cast<std::size_t>(kGateInput * h + k)] = -100.0;   // i -> 0
    p.gate_bias[static_cast<std::size_t>(kGateCell * h + k)] = 0.0;       // g = 0
  }
  CellState state = ZeroState(p.cfg);
  state.c = {0.3, -0.7, 0.1, 0.9};
  const StepResult r = Step(p, state, 1);
  CHECK(r.state.c == state.c);  // exact carry
}

TEST_CASE("Step rejects out-of-range tokens and wrong feature usage") {
  const ModelParams p = InitParams(TinyStaticConfig());
  CHECK_THROWS_AS(Step(p, ZeroState(p.cfg), 99), std::invalid_argument);
  CHECK_THROWS_AS(Step(p, ZeroState(p.cfg), -1), std::invalid_argument);
  Vec feats(4, 0.0);
  CHECK_THROWS_AS(Step(p, ZeroState(p.cfg), 1, &feats), std::invalid_argument);

  const ModelParams pa = InitParams(TinyAlignedConfig());
  CHECK_THROWS_AS(Step(pa, ZeroState(pa.cfg), 1), std::invalid_argument);
}

TEST_CASE("Step matches the scalar-loop reference in both modes") {
  for (const bool aligned : {false, true}) {
    const ModelConfig cfg = aligned ? TinyAlignedConfig(5) : TinyStaticConfig(5);
    const ModelParams p = InitParams(cfg);
    RngState rng = RngState::FromSeed(100 + (aligned ? 1 : 0));
    CellState state = ZeroState(cfg);
    for (double& x : state.h) {
      x = rng.NextUniform(-0.9, 0.9);
    }
    for (double& x : state.c) {
      x = rng.NextUniform(-1.5, 1.5);
    }
    Vec feats(static_cast<std::size_t>(cfg.feature_dim));
    for (double& x : feats) {
      x = rng.NextUniform(-1.0, 1.0);
    }
    const int token = 2;
    const StepResult got = Step(p, state, token, aligned ? &feats : nullptr);
    const ssrnn_test::ReferenceStepResult want =
        ssrnn_test::ReferenceStep(p, state.h, state.c, token, aligned ? &feats : nullptr);
    for (int k = 0; k < cfg.hidden_dim; ++k) {
      CHECK(got.state.h[static_cast<std::size_t>(k)] ==
            Approx(want.h[static_cast<std::size_t>(k)]).margin(1e-14));
      CHECK(got.state.c[static_cast<std::size_t>(k)] ==
            Approx(want.c[static_cast<std::size_t>(k)]).margin(1e-14));
    }
    for (int v = 0; v < cfg.vocab_size; ++v) {
      CHECK(got.logits[static_cast<std::size_t>(v)] ==
            Approx(want.logits[static_cast<std::size_t>(v)]).margin(1e-14));
    }
  }
}

TEST_CASE("Forward on a zero model gives T*ln(vocab) nll") {
  ModelConfig cfg = TinyStaticConfig();
  cfg.vocab_size = 2;
  ModelParams p = InitParams(cfg);
  ZeroTensors(p);
  SeqExample ex;
  ex.static_input.assign(static_cast<std::size_t>(cfg.feature_dim), 0.5);
  ex.targets = {1, 1, kEosToken};
  const ForwardTrace trace = Forward(p, ex, TeacherForcedTokens(ex, cfg.mode));
  CHECK(trace.total_nll == Approx(3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Forward composes from InitialState, Step and LogSoftmax") {
  for (const bool aligned : {false, true}) {
    const ModelConfig cfg = aligned ? TinyAlignedConfig(9) : TinyStaticConfig(9);
    const ModelParams p = InitParams(cfg);
    RngState rng = RngState::FromSeed(200);
    const SeqExample ex = aligned ? RandomAlignedExample(cfg, rng, 5)
                                  : RandomStaticExample(cfg, rng, 4);
    const std::vector<int> fed = TeacherForcedTokens(ex, cfg.mode);
    const ForwardTrace trace = Forward(p, ex, fed);

    // Independent composition of the public single-step operations.
    double nll = 0.0;
    CellState state = InitialState(p, ex);
    for (std::size_t t = 0; t < ex.targets.size(); ++t) {
      if (t > 0) {
        state = Step(p, state, fed[t], aligned ? &ex.features[t] : nullptr).state;
      }
      const Vec lp = LogSoftmax(OutputLogits(p, state));
      nll -= lp[static_cast<std::size_t>(ex.targets[t])];
      CHECK(state == trace.steps[t].state);
    }
    CHECK(trace.total_nll == Approx(nll).margin(1e-12));
    CHECK(trace.total_nll >= 0.0);

    // Bit-identical on repeat.
    const ForwardTrace again = Forward(p, ex, fed);
    CHECK(again.total_nll == trace.total_nll);
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      CHECK(again.steps[t].state == trace.steps[t].state);
      CHECK(again.steps[t].logits == trace.steps[t].logits);
    }
  }
}

TEST_CASE("Forward enforces lengths and first-slot conventions") {
  const ModelParams p = InitParams(TinyStaticConfig());
  SeqExample ex = RandomStaticExample(p.cfg, RngState::FromSeed(1), 2);
  std::vector<int> fed = TeacherForcedTokens(ex, p.cfg.mode);
  fed.pop_back();
  CHECK_THROWS_AS(Forward(p, ex, fed), std::invalid_argument);
  fed = TeacherForcedTokens(ex, p.cfg.mode);
  fed[0] = 1;  // static mode must use the no-token slot
  CHECK_THROWS_AS(Forward(p, ex, fed), std::invalid_argument);
}

TEST_CASE("Probabilities normalize and hidden units stay inside (-1, 1)") {
  const ModelConfig cfg = TinyAlignedConfig(31, 1.5);
  const ModelParams p = InitParams(cfg);
  const SeqExample ex = RandomAlignedExample(cfg, RngState::FromSeed(32), 12);
  const ForwardTrace trace = Forward(p, ex, TeacherForcedTokens(ex, cfg.mode));
  for (const StepTrace& st : trace.steps) {
    double sum = 0.0;
    for (double lp : st.log_probs) {
      sum += std::exp(lp);
    }
    CHECK(sum == Approx(1.0).margin(1e-10));
    for (double hval : st.state.h) {
      CHECK(std::abs(hval) < 1.0);
    }
  }
}

TEST_CASE("Backward single-softmax gradient is softmax minus onehot") {
  ModelConfig cfg = TinyStaticConfig();
  cfg.vocab_size = 2;
  ModelParams p = InitParams(cfg);
  ZeroTensors(p);
  SeqExample ex;
  ex.static_input.assign(static_cast<std::size_t>(cfg.feature_dim), 1.0);
  ex.targets = {kEosToken};  // length-1 sequence
  const Gradients g = Backward(p, Forward(p, ex, TeacherForcedTokens(ex, cfg.mode)));
  CHECK(g.out_bias[0] == Approx(-0.5).epsilon(1e-15));
  CHECK(g.out_bias[1] == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Backward gradients are finite and deterministic") {
  const ModelConfig cfg = TinyAlignedConfig(8, 1.0);
  const ModelParams p = InitParams(cfg);
  const SeqExample ex = RandomAlignedExample(cfg, RngState::FromSeed(80), 6);
  const ForwardTrace trace = Forward(p, ex, TeacherForcedTokens(ex, cfg.mode));
  const Gradients a = Backward(p, trace);
  const Gradients b = Backward(p, trace);
  for (const ConstTensorRef& ref : TensorRefs(a, cfg)) {
    CHECK(AllFinite(*ref.data));
  }
  CHECK(a.w_input.data == b.w_input.data);
  CHECK(a.embeddings.data == b.embeddings.data);
}

TEST_CASE("GradCheck on the spec-sized model stays under 1e-4") {
  ModelConfig cfg;
  cfg.vocab_size = 11;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 12;
  cfg.mode = SeqMode::kStaticInput;
  cfg.feature_dim = 11;
  cfg.init_scale = 0.5;
  cfg.seed = 404;
  const ModelParams p = InitParams(cfg);
  const SeqExample ex = RandomStaticExample(cfg, RngState::FromSeed(405), 4);  // T = 5
  const std::vector<int> fed = TeacherForcedTokens(ex, cfg.mode);
  CHECK(GradCheck(p, ex, fed, 1e-5) < 1e-4);
  // Step-size robustness.
  CHECK(GradCheck(p, ex, fed, 1e-6) < 1e-4);
}

TEST_CASE("GradCheck at the zero-parameter point is nearly exact") {
  ModelParams p = InitParams(TinyStaticConfig());
  ZeroTensors(p);
  const SeqExample ex = RandomStaticExample(p.cfg, RngState::FromSeed(500), 3);
  CHECK(GradCheck(p, ex, TeacherForcedTokens(ex, p.cfg.mode), 1e-5) < 1e-6);
}

TEST_CASE("GradCheck holds when sampled tokens were fed") {
  const ModelConfig cfg = TinyAlignedConfig(60, 0.8);
  const ModelParams p = InitParams(cfg);
  RngState rng = RngState::FromSeed(61);
  const SeqExample ex = RandomAlignedExample(cfg, rng, 5);
  // A fed list that disagrees with the truth everywhere possible: gradients
  // treat these tokens as constants, which is exactly what the finite
  // differences check, since they hold the list fixed.
  std::vector<int> fed = TeacherForcedTokens(ex, cfg.mode);
  for (std::size_t t = 1; t < fed.size(); ++t) {
    fed[t] = 2 + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(cfg.vocab_size - 2)));
  }
  CHECK(GradCheck(p, ex, fed, 1e-5) < 1e-4);
}

TEST_CASE("GradCheck refuses models over the parameter budget") {
  ModelConfig cfg;
  cfg.vocab_size = 50;
  cfg.embed_dim = 32;
  cfg.hidden_dim = 64;
  cfg.mode = SeqMode::kStaticInput;
  cfg.feature_dim = 50;
  cfg.seed = 1;
  const ModelParams p = InitParams(cfg);
  SeqExample ex;
  ex.static_input.assign(50, 0.0);
  ex.targets = {kEosToken};
  CHECK_THROWS_AS(GradCheck(p, ex, TeacherForcedTokens(ex, cfg.mode), 1e-5),
                  std::invalid_argument);
}

TEST_CASE("SgdUpdate applies clipping and plain arithmetic") {
  ModelConfig cfg = TinyStaticConfig();
  const ModelParams p = InitParams(cfg);

  // Zero gradients leave the parameters unchanged.
  const Gradients zero = ZeroGradients(cfg);
  CHECK(SgdUpdate(p, zero, 0.5, 1.0) == p);

  // A gradient of norm 10 against clip 5 is halved.
  Gradients g = ZeroGradients(cfg);
  g.out_bias[0] = 10.0;
  const ModelParams q = SgdUpdate(p, g, 1.0, 5.0);
  CHECK(q.out_bias[0] == Approx(p.out_bias[0] - 5.0).epsilon(1e-15));

  // lr=1, theta=1, grad=0.25, no effective clip -> theta=0.75.
  ModelParams one = p;
  one.out_bias[0] = 1.0;
  Gradients quarter = ZeroGradients(cfg);
  quarter.out_bias[0] = 0.25;
  const ModelParams r =
      SgdUpdate(one, quarter, 1.0, std::numeric_limits<double>::infinity());
  CHECK(r.out_bias[0] == 0.75);
}

TEST_CASE("SgdUpdate rejects non-finite gradients and bad hyperparameters") {
  const ModelParams p = InitParams(TinyStaticConfig());
  Gradients g = ZeroGradients(p.cfg);
  g.w_input.data[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SgdUpdate(p, g, 0.1, 5.0), std::runtime_error);
  const Gradients ok = ZeroGradients(p.cfg);
  CHECK_THROWS_AS(SgdUpdate(p, ok, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(SgdUpdate(p, ok, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("Batch gradient equals the sum of per-example gradients exactly") {
  const ModelConfig cfg = TinyStaticConfig(90, 0.4);
  const ModelParams p = InitParams(cfg);
  RngState rng = RngState::FromSeed(91);
  std::vector<SeqExample> batch;
  for (int i = 0; i < 4; ++i) {
    batch.push_back(RandomStaticExample(cfg, rng.Split(static_cast<std::uint64_t>(i)), 2 + i % 3));
  }
  Gradients acc = ZeroGradients(cfg);
  for (const SeqExample& ex : batch) {
    Accumulate(acc, Backward(p, Forward(p, ex, TeacherForcedTokens(ex, cfg.mode))));
  }
  // Independent per-example gradients summed with plain loops.
  Gradients manual = ZeroGradients(cfg);
  for (const SeqExample& ex : batch) {
    const Gradients g = Backward(p, Forward(p, ex, TeacherForcedTokens(ex, cfg.mode)));
    const auto grefs = TensorRefs(g, cfg);
    const auto mrefs = TensorRefs(manual, cfg);
    for (std::size_t k = 0; k < grefs.size(); ++k) {
      for (std::size_t j = 0; j < grefs[k].data->size(); ++j) {
        (*mrefs[k].data)[j] += (*grefs[k].data)[j];
      }
    }
  }
  const auto arefs = TensorRefs(acc, cfg);
  const auto mrefs = TensorRefs(manual, cfg);
  for (std::size_t k = 0; k < arefs.size(); ++k) {
    CHECK(*arefs[k].data == *mrefs[k].data);
  }
}
