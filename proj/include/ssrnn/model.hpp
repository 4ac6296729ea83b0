// ssrnn/model.hpp

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

// Single-layer LSTM sequence model with token embeddings and a linear
// projection + softmax output head, in two conditioning modes:
//
//   kStaticInput:   the static input vector is adapted into the embedding
//                   space and consumed as if it were the first token; every
//                   later step is conditioned on the previous output token.
//   kFrameAligned:  every step consumes the previous output token AND the
//                   current frame's feature vector (concatenated); the
//                   recurrent state entering step 1 is exactly zero and the
//                   first token fed is the reserved start token S.
//
// Forward passes record a full per-step trace so Backward can produce exact
// gradients through the unrolled recurrence. Tokens that were sampled from
// the model rather than taken from the ground truth are treated as constants
// in the backward pass: no gradient flows through the sampling decisions.

#ifndef SSRNN_MODEL_HPP_
#define SSRNN_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/data.hpp"
#include "ssrnn/math.hpp"
#include "ssrnn/rng.hpp"

namespace ssrnn {

// Marks the first-step slot of a static-mode fed-token list, where the input
// is the adapted static vector rather than a token.
constexpr int kNoToken = -1;

struct ModelConfig {
  int vocab_size = 0;   // includes EOS (and S in aligned mode)
  int embed_dim = 0;
  int hidden_dim = 0;
  SeqMode mode = SeqMode::kStaticInput;
  // Static mode: length of the static input vector. Aligned mode: length of
  // each per-frame feature vector.
  int feature_dim = 0;
  double init_scale = 0.08;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline void Validate(const ModelConfig& cfg) {
  const int min_vocab = cfg.mode == SeqMode::kFrameAligned ? 3 : 2;
  if (cfg.vocab_size < min_vocab) {
    throw std::invalid_argument("ModelConfig: vocab_size " + std::to_string(cfg.vocab_size) +
                                " is below the minimum of " + std::to_string(min_vocab) +
                                " for this mode");
  }
  if (cfg.embed_dim < 1 || cfg.hidden_dim < 1 || cfg.feature_dim < 1) {
    throw std::invalid_argument("ModelConfig: all dimensions must be >= 1");
  }
  if (!(cfg.init_scale > 0.0)) {
    throw std::invalid_argument("ModelConfig: init_scale must be > 0");
  }
}

// Dimension of the LSTM input: the token embedding alone in static mode, the
// embedding concatenated with the adapted frame features in aligned mode.
inline int LstmInputDim(const ModelConfig& cfg) {
  return cfg.mode == SeqMode::kFrameAligned ? 2 * cfg.embed_dim : cfg.embed_dim;
}

// Gate blocks inside the 4H pre-activation / activation vectors, in fixed
// order: input, forget, cell candidate, output.
enum GateBlock { kGateInput = 0, kGateForget = 1, kGateCell = 2, kGateOutput = 3 };

struct ModelParams {
  ModelConfig cfg;
  Mat embeddings;     // vocab_size x embed_dim
  Mat w_input;        // 4H x LstmInputDim
  Mat w_hidden;       // 4H x H
  Vec gate_bias;      // 4H
  Mat input_adapter;  // embed_dim x feature_dim
  Mat out_proj;       // vocab_size x H
  Vec out_bias;       // vocab_size

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Same tensor layout as ModelParams.
struct Gradients {
  Mat embeddings;
  Mat w_input;
  Mat w_hidden;
  Vec gate_bias;
  Mat input_adapter;
  Mat out_proj;
  Vec out_bias;
};

struct CellState {
  Vec h;
  Vec c;

  friend bool operator==(const CellState&, const CellState&) = default;
};

// Named view over the learnable tensors, in the fixed serialization order.
template <typename VecPtr>
struct BasicTensorRef {
  std::string name;
  VecPtr data;
  int rows;
  int cols;
};
using TensorRef = BasicTensorRef<Vec*>;
using ConstTensorRef = BasicTensorRef<const Vec*>;

namespace detail {

template <typename Ref, typename T>
std::vector<Ref> TensorRefsImpl(T& p, const ModelConfig& cfg) {
  const int h4 = 4 * cfg.hidden_dim;
  return {
      {"embeddings", &p.embeddings.data, cfg.vocab_size, cfg.embed_dim},
      {"w_input", &p.w_input.data, h4, LstmInputDim(cfg)},
      {"w_hidden", &p.w_hidden.data, h4, cfg.hidden_dim},
      {"gate_bias", &p.gate_bias, h4, 1},
      {"input_adapter", &p.input_adapter.data, cfg.embed_dim, cfg.feature_dim},
      {"out_proj", &p.out_proj.data, cfg.vocab_size, cfg.hidden_dim},
      {"out_bias", &p.out_bias, cfg.vocab_size, 1},
  };
}

}  // namespace detail

inline std::vector<TensorRef> TensorRefs(ModelParams& p) {
  return detail::TensorRefsImpl<TensorRef>(p, p.cfg);
}

inline std::vector<ConstTensorRef> TensorRefs(const ModelParams& p) {
  return detail::TensorRefsImpl<ConstTensorRef>(p, p.cfg);
}

inline std::vector<TensorRef> TensorRefs(Gradients& g, const ModelConfig& cfg) {
  return detail::TensorRefsImpl<TensorRef>(g, cfg);
}

inline std::vector<ConstTensorRef> TensorRefs(const Gradients& g, const ModelConfig& cfg) {
  return detail::TensorRefsImpl<ConstTensorRef>(g, cfg);
}

inline long ParamCount(const ModelConfig& cfg) {
  const long h4 = 4L * cfg.hidden_dim;
  return static_cast<long>(cfg.vocab_size) * cfg.embed_dim + h4 * LstmInputDim(cfg) +
         h4 * cfg.hidden_dim + h4 + static_cast<long>(cfg.embed_dim) * cfg.feature_dim +
         static_cast<long>(cfg.vocab_size) * cfg.hidden_dim + cfg.vocab_size;
}

inline Gradients ZeroGradients(const ModelConfig& cfg) {
  Gradients g;
  g.embeddings = Mat(cfg.vocab_size, cfg.embed_dim);
  g.w_input = Mat(4 * cfg.hidden_dim, LstmInputDim(cfg));
  g.w_hidden = Mat(4 * cfg.hidden_dim, cfg.hidden_dim);
  g.gate_bias.assign(static_cast<std::size_t>(4 * cfg.hidden_dim), 0.0);
  g.input_adapter = Mat(cfg.embed_dim, cfg.feature_dim);
  g.out_proj = Mat(cfg.vocab_size, cfg.hidden_dim);
  g.out_bias.assign(static_cast<std::size_t>(cfg.vocab_size), 0.0);
  return g;
}

inline void Accumulate(Gradients& acc, const Gradients& g) {
  Axpy(1.0, g.embeddings.data, acc.embeddings.data);
  Axpy(1.0, g.w_input.data, acc.w_input.data);
  Axpy(1.0, g.w_hidden.data, acc.w_hidden.data);
  Axpy(1.0, g.gate_bias, acc.gate_bias);
  Axpy(1.0, g.input_adapter.data, acc.input_adapter.data);
  Axpy(1.0, g.out_proj.data, acc.out_proj.data);
  Axpy(1.0, g.out_bias, acc.out_bias);
}

// Weights drawn uniform in [-init_scale, +init_scale] from cfg.seed; biases
// zero except the forget-gate block, which starts at 1.0.
inline ModelParams InitParams(const ModelConfig& cfg) {
  Validate(cfg);
  ModelParams p;
  p.cfg = cfg;
  p.embeddings = Mat(cfg.vocab_size, cfg.embed_dim);
  p.w_input = Mat(4 * cfg.hidden_dim, LstmInputDim(cfg));
  p.w_hidden = Mat(4 * cfg.hidden_dim, cfg.hidden_dim);
  p.gate_bias.assign(static_cast<std::size_t>(4 * cfg.hidden_dim), 0.0);
  p.input_adapter = Mat(cfg.embed_dim, cfg.feature_dim);
  p.out_proj = Mat(cfg.vocab_size, cfg.hidden_dim);
  p.out_bias.assign(static_cast<std::size_t>(cfg.vocab_size), 0.0);

  RngState rng = RngState::FromSeed(cfg.seed);
  for (Mat* m : {&p.embeddings, &p.w_input, &p.w_hidden, &p.input_adapter, &p.out_proj}) {
    for (double& x : m->data) {
      x = rng.NextUniform(-cfg.init_scale, cfg.init_scale);
    }
  }
  for (int k = 0; k < cfg.hidden_dim; ++k) {
    p.gate_bias[static_cast<std::size_t>(kGateForget * cfg.hidden_dim + k)] = 1.0;
  }
  return p;
}

inline CellState ZeroState(const ModelConfig& cfg) {
  CellState s;
  s.h.assign(static_cast<std::size_t>(cfg.hidden_dim), 0.0);
  s.c.assign(static_cast<std::size_t>(cfg.hidden_dim), 0.0);
  return s;
}

namespace detail {

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct CellCaches {
  Vec preact;  // 4H, gate order i|f|g|o
  Vec gates;   // 4H, activated
  CellState state;
};

inline CellCaches LstmCell(const ModelParams& p, const CellState& prev, const Vec& input) {
  const int h = p.cfg.hidden_dim;
  CellCaches cc;
  cc.preact = MatVec(p.w_input, input);
  const Vec rec = MatVec(p.w_hidden, prev.h);
  for (int k = 0; k < 4 * h; ++k) {
    cc.preact[k] += rec[k] + p.gate_bias[k];
  }
  cc.gates.resize(static_cast<std::size_t>(4 * h));
  for (int k = 0; k < h; ++k) {
    cc.gates[kGateInput * h + k] = Sigmoid(cc.preact[kGateInput * h + k]);
    cc.gates[kGateForget * h + k] = Sigmoid(cc.preact[kGateForget * h + k]);
    cc.gates[kGateCell * h + k] = std::tanh(cc.preact[kGateCell * h + k]);
    cc.gates[kGateOutput * h + k] = Sigmoid(cc.preact[kGateOutput * h + k]);
  }
  cc.state.h.resize(static_cast<std::size_t>(h));
  cc.state.c.resize(static_cast<std::size_t>(h));
  for (int k = 0; k < h; ++k) {
    cc.state.c[k] =
        cc.gates[kGateForget * h + k] * prev.c[k] + cc.gates[kGateInput * h + k] * cc.gates[kGateCell * h + k];
    cc.state.h[k] = cc.gates[kGateOutput * h + k] * std::tanh(cc.state.c[k]);
  }
  return cc;
}

inline void CheckToken(const ModelParams& p, int token) {
  if (token < 0 || token >= p.cfg.vocab_size) {
    throw std::invalid_argument("token " + std::to_string(token) + " out of range for vocab of size " +
                                std::to_string(p.cfg.vocab_size));
  }
}

inline Vec EmbeddingRow(const ModelParams& p, int token) {
  CheckToken(p, token);
  return Vec(p.embeddings.Row(token), p.embeddings.Row(token) + p.cfg.embed_dim);
}

inline Vec AdaptFeatures(const ModelParams& p, const Vec& x) {
  if (static_cast<int>(x.size()) != p.cfg.feature_dim) {
    throw std::invalid_argument("feature vector of length " + std::to_string(x.size()) +
                                " does not match feature_dim " + std::to_string(p.cfg.feature_dim));
  }
  return MatVec(p.input_adapter, x);
}

// The LSTM input vector actually fed at (0-based) step t0. In static mode
// the first step consumes the adapted static input; all later steps consume
// the embedding of the fed token. In aligned mode every step consumes
// embedding(token) ++ adapted(frame features).
inline Vec BuildInput(const ModelParams& p, const SeqExample& ex, int fed_token, int t0) {
  if (p.cfg.mode == SeqMode::kStaticInput) {
    if (t0 == 0) {
      return AdaptFeatures(p, ex.static_input);
    }
    return EmbeddingRow(p, fed_token);
  }
  Vec input = EmbeddingRow(p, fed_token);
  const Vec adapted = AdaptFeatures(p, ex.features[static_cast<std::size_t>(t0)]);
  input.insert(input.end(), adapted.begin(), adapted.end());
  return input;
}

}  // namespace detail

inline Vec OutputLogits(const ModelParams& p, const CellState& state) {
  Vec logits = MatVec(p.out_proj, state.h);
  Axpy(1.0, p.out_bias, logits);
  return logits;
}

// State after the first step. Static mode: one cell update from the zero
// state with the adapted static input. Aligned mode: one cell update from
// the zero state fed (S, x_1).
inline CellState InitialState(const ModelParams& p, const SeqExample& ex) {
  if (p.cfg.mode == SeqMode::kFrameAligned && ex.features.empty()) {
    throw std::invalid_argument("InitialState: aligned example has no frames");
  }
  const Vec input = detail::BuildInput(
      p, ex, p.cfg.mode == SeqMode::kFrameAligned ? kStartToken : kNoToken, 0);
  return detail::LstmCell(p, ZeroState(p.cfg), input).state;
}

struct StepResult {
  CellState state;
  Vec logits;
};

// One cell update conditioned on the previous output token (and, in aligned
// mode, the current frame's features). Pure function of its inputs.
inline StepResult Step(const ModelParams& p, const CellState& state, int prev_token,
                       const Vec* step_features = nullptr) {
  detail::CheckToken(p, prev_token);
  Vec input;
  if (p.cfg.mode == SeqMode::kFrameAligned) {
    if (step_features == nullptr) {
      throw std::invalid_argument("Step: aligned mode requires step features");
    }
    input = detail::EmbeddingRow(p, prev_token);
    const Vec adapted = detail::AdaptFeatures(p, *step_features);
    input.insert(input.end(), adapted.begin(), adapted.end());
  } else {
    if (step_features != nullptr) {
      throw std::invalid_argument("Step: static mode takes no step features");
    }
    input = detail::EmbeddingRow(p, prev_token);
  }
  detail::CellCaches cc = detail::LstmCell(p, state, input);
  StepResult out;
  out.logits = OutputLogits(p, cc.state);
  out.state = std::move(cc.state);
  return out;
}

// Everything Backward needs about one step.
struct StepTrace {
  Vec input;      // LSTM input vector actually fed
  Vec preact;     // 4H gate pre-activations
  Vec gates;      // 4H gate activations
  CellState state;
  Vec logits;
  Vec log_probs;
  int fed_token = kNoToken;
  bool fed_truth = true;
};

struct ForwardTrace {
  double total_nll = 0.0;
  std::vector<StepTrace> steps;
  // Copies of the example data the gradients route into.
  std::vector<int> targets;
  Vec static_input;
  std::vector<Vec> features;
};

// Teacher-forced fed-token list for an example: the first slot is the
// static-input step (static mode) or the start token (aligned mode), then
// y_1 .. y_{T-1}.
inline std::vector<int> TeacherForcedTokens(const SeqExample& ex, SeqMode mode) {
  std::vector<int> fed(ex.targets.size());
  fed[0] = mode == SeqMode::kFrameAligned ? kStartToken : kNoToken;
  for (std::size_t t = 1; t < fed.size(); ++t) {
    fed[t] = ex.targets[t - 1];
  }
  return fed;
}

namespace detail {

// Shared driver for the unrolled recurrence. decide(t0, step_trace) names
// the token fed at step t0+2 (i.e. after the step whose trace it sees);
// Forward reads it off a fixed list, the trainer's feed policies flip coins
// and sample. Keeping one code path makes teacher forcing and scheduled
// sampling with eps=1 bit-identical by construction.
template <typename Decide>
ForwardTrace Walk(const ModelParams& p, const SeqExample& ex, int first_slot, Decide decide) {
  const std::size_t T = ex.targets.size();
  if (T == 0) {
    throw std::invalid_argument("Forward: example has no targets");
  }
  if (p.cfg.mode == SeqMode::kFrameAligned) {
    if (ex.features.size() != T) {
      throw std::invalid_argument("Forward: aligned example has " +
                                  std::to_string(ex.features.size()) + " frames but " +
                                  std::to_string(T) + " targets");
    }
    if (first_slot != kStartToken) {
      throw std::invalid_argument("Forward: aligned mode must feed the start token at step 1");
    }
  } else if (first_slot != kNoToken) {
    throw std::invalid_argument("Forward: static mode feeds the input vector at step 1, not a token");
  }

  ForwardTrace trace;
  trace.targets = ex.targets;
  trace.static_input = ex.static_input;
  trace.features = ex.features;
  trace.steps.reserve(T);

  const std::vector<int> truth = TeacherForcedTokens(ex, p.cfg.mode);
  CellState state = ZeroState(p.cfg);
  int fed = first_slot;
  for (std::size_t t0 = 0; t0 < T; ++t0) {
    const int target = ex.targets[t0];
    CheckToken(p, target);
    StepTrace st;
    st.input = BuildInput(p, ex, fed, static_cast<int>(t0));
    CellCaches cc = LstmCell(p, state, st.input);
    st.preact = std::move(cc.preact);
    st.gates = std::move(cc.gates);
    st.state = cc.state;
    st.logits = OutputLogits(p, st.state);
    st.log_probs = LogSoftmax(st.logits);
    st.fed_token = fed;
    st.fed_truth = fed == truth[t0];
    trace.total_nll -= st.log_probs[static_cast<std::size_t>(target)];
    state = cc.state;
    if (t0 + 1 < T) {
      fed = decide(t0, st);
    }
    trace.steps.push_back(std::move(st));
  }
  return trace;
}

}  // namespace detail

// Runs the full recurrence with the given fed tokens and accumulates
// total_nll = -sum_t log P(y_t | h_t). fed_tokens[t] is the input at step
// t+1; slot 0 is the first-step placeholder (kNoToken / kStartToken).
inline ForwardTrace Forward(const ModelParams& p, const SeqExample& ex,
                            const std::vector<int>& fed_tokens) {
  if (ex.targets.empty()) {
    throw std::invalid_argument("Forward: example has no targets");
  }
  if (fed_tokens.size() != ex.targets.size()) {
    throw std::invalid_argument("Forward: fed_tokens length " + std::to_string(fed_tokens.size()) +
                                " does not match target length " +
                                std::to_string(ex.targets.size()));
  }
  return detail::Walk(p, ex, fed_tokens[0],
                      [&fed_tokens](std::size_t t0, const StepTrace&) { return fed_tokens[t0 + 1]; });
}

// Exact gradient of total_nll with respect to every parameter, holding the
// fed tokens fixed. The trace must come from Forward on the same params.
inline Gradients Backward(const ModelParams& p, const ForwardTrace& trace) {
  const ModelConfig& cfg = p.cfg;
  const int h = cfg.hidden_dim;
  const int e = cfg.embed_dim;
  Gradients grad = ZeroGradients(cfg);

  Vec dh_next(static_cast<std::size_t>(h), 0.0);
  Vec dc_next(static_cast<std::size_t>(h), 0.0);
  const Vec zeros(static_cast<std::size_t>(h), 0.0);

  for (std::size_t t0 = trace.steps.size(); t0-- > 0;) {
    const StepTrace& st = trace.steps[t0];
    const Vec& prev_h = t0 > 0 ? trace.steps[t0 - 1].state.h : zeros;
    const Vec& prev_c = t0 > 0 ? trace.steps[t0 - 1].state.c : zeros;

    // Output head: dlogits = softmax(logits) - onehot(target).
    Vec dlogits(st.log_probs.size());
    for (std::size_t k = 0; k < dlogits.size(); ++k) {
      dlogits[k] = std::exp(st.log_probs[k]);
    }
    dlogits[static_cast<std::size_t>(trace.targets[t0])] -= 1.0;
    AddOuter(grad.out_proj, dlogits, st.state.h);
    Axpy(1.0, dlogits, grad.out_bias);

    Vec dh = MatTVec(p.out_proj, dlogits);
    Axpy(1.0, dh_next, dh);

    // Cell backward.
    Vec dpre(static_cast<std::size_t>(4 * h));
    Vec dc(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
      const double gi = st.gates[kGateInput * h + k];
      const double gf = st.gates[kGateForget * h + k];
      const double gg = st.gates[kGateCell * h + k];
      const double go = st.gates[kGateOutput * h + k];
      const double tc = std::tanh(st.state.c[k]);
      const double do_k = dh[k] * tc;
      const double dck = dh[k] * go * (1.0 - tc * tc) + dc_next[k];
      dc[k] = dck;
      dpre[kGateInput * h + k] = dck * gg * gi * (1.0 - gi);
      dpre[kGateForget * h + k] = dck * prev_c[k] * gf * (1.0 - gf);
      dpre[kGateCell * h + k] = dck * gi * (1.0 - gg * gg);
      dpre[kGateOutput * h + k] = do_k * go * (1.0 - go);
    }
    AddOuter(grad.w_input, dpre, st.input);
    AddOuter(grad.w_hidden, dpre, prev_h);
    Axpy(1.0, dpre, grad.gate_bias);

    dh_next = MatTVec(p.w_hidden, dpre);
    for (int k = 0; k < h; ++k) {
      dc_next[k] = dc[k] * st.gates[kGateForget * h + k];
    }

    // Route the input gradient: embedding rows and/or the input adapter.
    const Vec du = MatTVec(p.w_input, dpre);
    if (cfg.mode == SeqMode::kStaticInput) {
      if (t0 == 0) {
        AddOuter(grad.input_adapter, du, trace.static_input);
      } else {
        double* row = grad.embeddings.Row(st.fed_token);
        for (int k = 0; k < e; ++k) {
          row[k] += du[k];
        }
      }
    } else {
      double* row = grad.embeddings.Row(st.fed_token);
      for (int k = 0; k < e; ++k) {
        row[k] += du[k];
      }
      const Vec du_adapter(du.begin() + e, du.end());
      AddOuter(grad.input_adapter, du_adapter, trace.features[t0]);
    }
  }
  return grad;
}

// Compares Backward against central finite differences over every parameter
// and returns the worst relative error. Only use on tiny models.
inline double GradCheck(const ModelParams& params, const SeqExample& ex,
                        const std::vector<int>& fed_tokens, double fd_step) {
  if (ParamCount(params.cfg) > 5000) {
    throw std::invalid_argument("GradCheck: model has " + std::to_string(ParamCount(params.cfg)) +
                                " parameters, limit is 5000");
  }
  Gradients analytic = Backward(params, Forward(params, ex, fed_tokens));
  ModelParams pert = params;
  std::vector<TensorRef> prefs = TensorRefs(pert);
  std::vector<TensorRef> grefs = TensorRefs(analytic, params.cfg);

  double max_err = 0.0;
  for (std::size_t k = 0; k < prefs.size(); ++k) {
    Vec& data = *prefs[k].data;
    const Vec& gdata = *grefs[k].data;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double saved = data[j];
      data[j] = saved + fd_step;
      const double nll_plus = Forward(pert, ex, fed_tokens).total_nll;
      data[j] = saved - fd_step;
      const double nll_minus = Forward(pert, ex, fed_tokens).total_nll;
      data[j] = saved;
      const double numeric = (nll_plus - nll_minus) / (2.0 * fd_step);
      const double a = gdata[j];
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

inline double GradNorm(const Gradients& g, const ModelConfig& cfg) {
  double sq = 0.0;
  for (const ConstTensorRef& ref : TensorRefs(g, cfg)) {
    for (double x : *ref.data) {
      sq += x * x;
    }
  }
  return std::sqrt(sq);
}

// One SGD step with global-norm clipping: if ||g||_2 > clip, g is rescaled
// to norm clip before the update.
inline ModelParams SgdUpdate(const ModelParams& params, const Gradients& grads, double lr,
                             double clip) {
  if (!(lr > 0.0)) {
    throw std::invalid_argument("SgdUpdate: lr must be > 0");
  }
  if (!(clip > 0.0)) {
    throw std::invalid_argument("SgdUpdate: clip must be > 0");
  }
  const std::vector<ConstTensorRef> grefs = TensorRefs(grads, params.cfg);
  for (const ConstTensorRef& ref : grefs) {
    if (!AllFinite(*ref.data)) {
      throw std::runtime_error("SgdUpdate: non-finite gradient in " + ref.name +
                               " (training diverged)");
    }
  }
  const double norm = GradNorm(grads, params.cfg);
  if (!std::isfinite(norm)) {
    throw std::runtime_error("SgdUpdate: gradient norm overflowed (training diverged)");
  }
  const double scale = norm > clip ? clip / norm : 1.0;

  ModelParams next = params;
  std::vector<TensorRef> prefs = TensorRefs(next);
  for (std::size_t k = 0; k < prefs.size(); ++k) {
    Axpy(-lr * scale, *grefs[k].data, *prefs[k].data);
  }
  return next;
}

}  // namespace ssrnn

#endif  // SSRNN_MODEL_HPP_
