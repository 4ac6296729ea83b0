// ssrnn/metrics.hpp

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

#ifndef SSRNN_METRICS_HPP_
#define SSRNN_METRICS_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/data.hpp"
#include "ssrnn/decoder.hpp"
#include "ssrnn/model.hpp"

namespace ssrnn {

// Fraction of positions where pred and truth disagree. Sequences must have
// equal length (aligned-mode labelings).
inline double FrameErrorRate(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("FrameErrorRate: length mismatch, " + std::to_string(pred.size()) +
                                " vs " + std::to_string(truth.size()));
  }
  if (truth.empty()) {
    return 0.0;
  }
  long wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    wrong += pred[i] != truth[i] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

// Levenshtein distance with unit costs.
inline long EditDistance(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<long> prev(m + 1);
  std::vector<long> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    prev[j] = static_cast<long>(j);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline std::vector<int> StripTrailingEos(std::vector<int> tokens) {
  if (!tokens.empty() && tokens.back() == kEosToken) {
    tokens.pop_back();
  }
  return tokens;
}

// Aligned mode: mean frame error rate of the top beam hypothesis.
// Static mode: mean edit distance of the top hypothesis, normalized by the
// target length excluding EOS (both sides have their trailing EOS removed).
inline double DecodingError(const ModelParams& params, const Dataset& ds, const BeamConfig& cfg) {
  if (ds.examples.empty()) {
    throw std::invalid_argument("DecodingError: dataset is empty");
  }
  const bool aligned = params.cfg.mode == SeqMode::kFrameAligned;
  if (aligned != (ds.mode == SeqMode::kFrameAligned)) {
    throw std::invalid_argument("DecodingError: model mode " + ToString(params.cfg.mode) +
                                " does not match dataset mode " + ToString(ds.mode));
  }
  double total = 0.0;
  for (const SeqExample& ex : ds.examples) {
    const std::vector<ScoredSequence> results = BeamSearch(params, ex, cfg);
    const std::vector<int>& top = results.front().tokens;
    if (aligned) {
      total += FrameErrorRate(top, ex.targets);
    } else {
      const std::vector<int> pred = StripTrailingEos(top);
      const std::vector<int> truth = StripTrailingEos(ex.targets);
      const double denom = std::max<std::size_t>(1, truth.size());
      total += static_cast<double>(EditDistance(pred, truth)) / denom;
    }
  }
  return total / static_cast<double>(ds.examples.size());
}

}  // namespace ssrnn

#endif  // SSRNN_METRICS_HPP_
