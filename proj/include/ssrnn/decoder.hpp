// ssrnn/decoder.hpp

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

// Inference: greedy, stochastic and beam-search generation, plus an
// exhaustive-search oracle that is feasible at desk scale and pins down the
// beam's expected behavior exactly.
//
// Conventions shared by all decoders:
//   - static mode generates until EOS or max_len; aligned mode generates
//     exactly min(max_len, number of frames) labels with no EOS handling.
//   - candidates are ranked by accumulated log-probability; exact ties break
//     toward the lexicographically smaller token sequence, which makes every
//     decoder deterministic and lets the oracle tests compare token-for-token.
//   - no length normalization: finished hypotheses compete by raw logprob.

#ifndef SSRNN_DECODER_HPP_
#define SSRNN_DECODER_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/data.hpp"
#include "ssrnn/math.hpp"
#include "ssrnn/model.hpp"
#include "ssrnn/rng.hpp"

namespace ssrnn {

struct BeamConfig {
  int beam_width = 1;   // m: candidates kept per step
  int num_results = 1;  // k: sequences returned
  int max_len = 1;

  friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

inline void Validate(const BeamConfig& cfg) {
  if (cfg.beam_width < 1 || cfg.num_results < 1 || cfg.num_results > cfg.beam_width) {
    throw std::invalid_argument("BeamConfig: need 1 <= num_results <= beam_width");
  }
  if (cfg.max_len < 1) {
    throw std::invalid_argument("BeamConfig: max_len must be >= 1");
  }
}

struct ScoredSequence {
  std::vector<int> tokens;
  double logprob = 0.0;

  friend bool operator==(const ScoredSequence&, const ScoredSequence&) = default;
};

namespace detail {

inline int EffectiveDecodeLen(const ModelParams& p, const SeqExample& ex, int max_len) {
  if (p.cfg.mode == SeqMode::kFrameAligned) {
    return std::min<int>(max_len, static_cast<int>(ex.features.size()));
  }
  return max_len;
}

// Higher logprob first; exact ties go to the lexicographically smaller
// token sequence.
inline bool BetterSequence(double lp_a, const std::vector<int>& a, double lp_b,
                           const std::vector<int>& b) {
  if (lp_a != lp_b) {
    return lp_a > lp_b;
  }
  return a < b;
}

}  // namespace detail

// Repeatedly feeds the argmax token; stops at EOS (static mode) or at the
// effective length limit.
inline std::vector<int> GreedyDecode(const ModelParams& p, const SeqExample& ex, int max_len) {
  if (max_len < 1) {
    throw std::invalid_argument("GreedyDecode: max_len must be >= 1");
  }
  const bool aligned = p.cfg.mode == SeqMode::kFrameAligned;
  const int limit = detail::EffectiveDecodeLen(p, ex, max_len);
  std::vector<int> out;
  CellState state = InitialState(p, ex);
  while (static_cast<int>(out.size()) < limit) {
    const Vec logits = OutputLogits(p, state);
    const int tok = Argmax(logits);
    out.push_back(tok);
    if (!aligned && tok == kEosToken) {
      break;
    }
    if (static_cast<int>(out.size()) >= limit) {
      break;
    }
    state = Step(p, state, tok, aligned ? &ex.features[out.size()] : nullptr).state;
  }
  return out;
}

// As GreedyDecode, but each token is drawn from the model's distribution.
inline std::vector<int> SampleDecode(const ModelParams& p, const SeqExample& ex, int max_len,
                                     RngState& rng) {
  if (max_len < 1) {
    throw std::invalid_argument("SampleDecode: max_len must be >= 1");
  }
  const bool aligned = p.cfg.mode == SeqMode::kFrameAligned;
  const int limit = detail::EffectiveDecodeLen(p, ex, max_len);
  std::vector<int> out;
  CellState state = InitialState(p, ex);
  while (static_cast<int>(out.size()) < limit) {
    const Vec probs = Softmax(OutputLogits(p, state));
    const int tok = SampleCategorical(probs, rng);
    out.push_back(tok);
    if (!aligned && tok == kEosToken) {
      break;
    }
    if (static_cast<int>(out.size()) >= limit) {
      break;
    }
    state = Step(p, state, tok, aligned ? &ex.features[out.size()] : nullptr).state;
  }
  return out;
}

// Breadth-limited best-first search keeping the beam_width highest-logprob
// candidates per step. Each round extends every unfinished candidate by
// every vocabulary token, merges with the finished candidates and re-prunes.
// The search stops when all kept candidates are finished, when pruning kept
// no new extension, or when candidates reach the length limit.
inline std::vector<ScoredSequence> BeamSearch(const ModelParams& p, const SeqExample& ex,
                                              const BeamConfig& cfg) {
  Validate(cfg);
  const bool aligned = p.cfg.mode == SeqMode::kFrameAligned;
  const int limit = detail::EffectiveDecodeLen(p, ex, cfg.max_len);
  const int vocab = p.cfg.vocab_size;

  struct Hyp {
    std::vector<int> tokens;
    double logprob = 0.0;
    bool finished = false;
    CellState state;  // empty once finished
    Vec log_probs;    // next-token distribution at the frontier
  };

  std::vector<Hyp> beam;
  {
    Hyp root;
    CellState state = InitialState(p, ex);
    root.log_probs = LogSoftmax(OutputLogits(p, state));
    root.state = std::move(state);
    beam.push_back(std::move(root));
  }

  struct Candidate {
    std::vector<int> tokens;
    double logprob;
    int parent;  // -1 for a carried-over finished hypothesis
    int token;
  };

  while (true) {
    std::vector<Candidate> pool;
    bool any_extension = false;
    for (int b = 0; b < static_cast<int>(beam.size()); ++b) {
      const Hyp& hyp = beam[b];
      if (hyp.finished) {
        pool.push_back({hyp.tokens, hyp.logprob, -1, 0});
        continue;
      }
      for (int v = 0; v < vocab; ++v) {
        Candidate c;
        c.tokens = hyp.tokens;
        c.tokens.push_back(v);
        c.logprob = hyp.logprob + hyp.log_probs[static_cast<std::size_t>(v)];
        c.parent = b;
        c.token = v;
        pool.push_back(std::move(c));
        any_extension = true;
      }
    }
    if (!any_extension) {
      break;  // every kept candidate is finished
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return detail::BetterSequence(a.logprob, a.tokens, b.logprob, b.tokens);
    });
    if (static_cast<int>(pool.size()) > cfg.beam_width) {
      pool.resize(static_cast<std::size_t>(cfg.beam_width));
    }

    bool kept_extension = false;
    std::vector<Hyp> next;
    next.reserve(pool.size());
    for (Candidate& c : pool) {
      Hyp hyp;
      hyp.logprob = c.logprob;
      if (c.parent < 0) {
        hyp.tokens = std::move(c.tokens);
        hyp.finished = true;
        next.push_back(std::move(hyp));
        continue;
      }
      kept_extension = true;
      const Hyp& parent = beam[static_cast<std::size_t>(c.parent)];
      hyp.tokens = std::move(c.tokens);
      const int len = static_cast<int>(hyp.tokens.size());
      hyp.finished = (!aligned && c.token == kEosToken) || len >= limit;
      if (!hyp.finished) {
        StepResult sr = Step(p, parent.state, c.token,
                             aligned ? &ex.features[static_cast<std::size_t>(len)] : nullptr);
        hyp.log_probs = LogSoftmax(sr.logits);
        hyp.state = std::move(sr.state);
      }
      next.push_back(std::move(hyp));
    }
    beam = std::move(next);
    if (!kept_extension) {
      break;  // pruning added no new sequence
    }
  }

  std::sort(beam.begin(), beam.end(), [](const Hyp& a, const Hyp& b) {
    return detail::BetterSequence(a.logprob, a.tokens, b.logprob, b.tokens);
  });
  std::vector<ScoredSequence> results;
  for (const Hyp& hyp : beam) {
    if (static_cast<int>(results.size()) >= cfg.num_results) {
      break;
    }
    results.push_back({hyp.tokens, hyp.logprob});
  }
  return results;
}

// Enumerates every complete sequence (EOS-terminated within max_len, or of
// exactly the length limit) and returns the best under the beam's ordering.
// Test oracle; refuses models where vocab^max_len exceeds 10^6.
inline ScoredSequence ExhaustiveSearch(const ModelParams& p, const SeqExample& ex, int max_len) {
  if (max_len < 1) {
    throw std::invalid_argument("ExhaustiveSearch: max_len must be >= 1");
  }
  const bool aligned = p.cfg.mode == SeqMode::kFrameAligned;
  const int limit = detail::EffectiveDecodeLen(p, ex, max_len);
  const int vocab = p.cfg.vocab_size;
  if (std::pow(static_cast<double>(vocab), static_cast<double>(limit)) > 1e6) {
    throw std::runtime_error("ExhaustiveSearch: vocab^max_len exceeds the 1e6 budget");
  }

  std::optional<ScoredSequence> best;
  std::vector<int> tokens;
  auto consider = [&](double logprob) {
    if (!best ||
        detail::BetterSequence(logprob, tokens, best->logprob, best->tokens)) {
      best = ScoredSequence{tokens, logprob};
    }
  };

  auto recurse = [&](auto&& self, const CellState& state, double logprob) -> void {
    const Vec log_probs = LogSoftmax(OutputLogits(p, state));
    for (int v = 0; v < vocab; ++v) {
      tokens.push_back(v);
      const double lp = logprob + log_probs[static_cast<std::size_t>(v)];
      const int len = static_cast<int>(tokens.size());
      const bool complete = (!aligned && v == kEosToken) || len >= limit;
      if (complete) {
        consider(lp);
      } else {
        const CellState next =
            Step(p, state, v, aligned ? &ex.features[static_cast<std::size_t>(len)] : nullptr)
                .state;
        self(self, next, lp);
      }
      tokens.pop_back();
    }
  };
  recurse(recurse, InitialState(p, ex), 0.0);
  return *best;
}

}  // namespace ssrnn

#endif  // SSRNN_DECODER_HPP_
