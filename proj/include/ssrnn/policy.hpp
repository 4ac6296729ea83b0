// ssrnn/policy.hpp

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

#ifndef SSRNN_POLICY_HPP_
#define SSRNN_POLICY_HPP_

#include <utility>
#include <variant>

#include "ssrnn/schedule.hpp"

namespace ssrnn {

// How a model-generated replacement token is produced when the coin says
// "don't feed the truth".
enum class SampleMode {
  kArgmax,       // most likely token under the model
  kMultinomial,  // drawn from the model's distribution
  kUniform       // drawn uniformly from the whole dictionary, EOS included
};

// Whether the truth-vs-model coin is flipped for every token or once per
// sequence.
enum class CoinGranularity { kPerToken, kPerSequence };

struct TeacherForcing {
  friend bool operator==(const TeacherForcing&, const TeacherForcing&) = default;
};

struct AlwaysSampling {
  SampleMode mode = SampleMode::kMultinomial;

  friend bool operator==(const AlwaysSampling&, const AlwaysSampling&) = default;
};

struct ScheduledSampling {
  DecaySchedule schedule;
  SampleMode mode = SampleMode::kMultinomial;
  CoinGranularity granularity = CoinGranularity::kPerToken;
};

using FeedPolicy = std::variant<TeacherForcing, AlwaysSampling, ScheduledSampling>;

// Probability of feeding the true previous token at mini-batch index step.
inline double PolicyEpsilon(const FeedPolicy& policy, long step) {
  if (std::holds_alternative<TeacherForcing>(policy)) {
    return 1.0;
  }
  if (std::holds_alternative<AlwaysSampling>(policy)) {
    return 0.0;
  }
  return EpsilonAt(std::get<ScheduledSampling>(policy).schedule, step);
}

// {epsilon at step 0, limiting epsilon}. Used for reporting grid rows.
inline std::pair<double, double> EpsilonBounds(const FeedPolicy& policy) {
  if (std::holds_alternative<TeacherForcing>(policy)) {
    return {1.0, 1.0};
  }
  if (std::holds_alternative<AlwaysSampling>(policy)) {
    return {0.0, 0.0};
  }
  const DecaySchedule& s = std::get<ScheduledSampling>(policy).schedule;
  return {EpsilonAt(s, 0), EpsilonLimit(s)};
}

}  // namespace ssrnn

#endif  // SSRNN_POLICY_HPP_
