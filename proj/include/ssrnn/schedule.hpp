// ssrnn/schedule.hpp

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

#ifndef SSRNN_SCHEDULE_HPP_
#define SSRNN_SCHEDULE_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace ssrnn {

// Decay schedules for the truth-feeding probability eps_i, where i counts
// mini-batch updates. Invalid constants are rejected at construction, so
// EpsilonAt never has to re-validate.

// eps_i = max(floor, k - c*i)
struct LinearDecay {
  double offset_k;
  double slope_c;
  double floor_eps;

  LinearDecay(double k, double c, double floor) : offset_k(k), slope_c(c), floor_eps(floor) {
    if (!(floor >= 0.0 && floor < 1.0)) {
      throw std::invalid_argument("LinearDecay: floor must be in [0,1), got " +
                                  std::to_string(floor));
    }
    if (!(k >= 0.0 && k <= 1.0)) {
      throw std::invalid_argument("LinearDecay: offset must be in [0,1], got " +
                                  std::to_string(k));
    }
    if (!(c >= 0.0)) {
      throw std::invalid_argument("LinearDecay: slope must be >= 0, got " + std::to_string(c));
    }
  }
};

// eps_i = k^i
struct ExponentialDecay {
  double base_k;

  explicit ExponentialDecay(double k) : base_k(k) {
    if (!(k > 0.0 && k < 1.0)) {
      throw std::invalid_argument("ExponentialDecay: base must be in (0,1), got " +
                                  std::to_string(k));
    }
  }
};

// eps_i = k / (k + exp(i / k))
struct InverseSigmoidDecay {
  double k;

  explicit InverseSigmoidDecay(double k_in) : k(k_in) {
    if (!(k >= 1.0)) {
      throw std::invalid_argument("InverseSigmoidDecay: k must be >= 1, got " +
                                  std::to_string(k));
    }
  }
};

// eps_i = eps for all i
struct ConstantRate {
  double eps;

  explicit ConstantRate(double eps_in) : eps(eps_in) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
      throw std::invalid_argument("ConstantRate: eps must be in [0,1], got " +
                                  std::to_string(eps));
    }
  }
};

// Linear interpolation from eps_start at i=0 down to eps_end at i=ramp_steps,
// then constant at eps_end.
struct LinearRamp {
  double eps_start;
  double eps_end;
  long ramp_steps;

  LinearRamp(double start, double end, long steps)
      : eps_start(start), eps_end(end), ramp_steps(steps) {
    if (!(start >= 0.0 && start <= 1.0 && end >= 0.0 && end <= 1.0)) {
      throw std::invalid_argument("LinearRamp: endpoints must be in [0,1]");
    }
    if (end > start) {
      throw std::invalid_argument("LinearRamp: eps_end must not exceed eps_start");
    }
    if (steps < 1) {
      throw std::invalid_argument("LinearRamp: ramp_steps must be >= 1, got " +
                                  std::to_string(steps));
    }
  }
};

using DecaySchedule =
    std::variant<LinearDecay, ExponentialDecay, InverseSigmoidDecay, ConstantRate, LinearRamp>;

inline double EpsilonAt(const DecaySchedule& schedule, long i) {
  if (i < 0) {
    throw std::invalid_argument("EpsilonAt: step index must be >= 0, got " + std::to_string(i));
  }
  return std::visit(
      [i](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearDecay>) {
          return std::max(s.floor_eps, s.offset_k - s.slope_c * static_cast<double>(i));
        } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
          return std::pow(s.base_k, static_cast<double>(i));
        } else if constexpr (std::is_same_v<T, InverseSigmoidDecay>) {
          // exp overflows to inf for large i; the quotient then correctly
          // underflows to 0.
          return s.k / (s.k + std::exp(static_cast<double>(i) / s.k));
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          return s.eps;
        } else {
          static_assert(std::is_same_v<T, LinearRamp>);
          if (i >= s.ramp_steps) {
            return s.eps_end;
          }
          const double frac = static_cast<double>(i) / static_cast<double>(s.ramp_steps);
          return s.eps_start + (s.eps_end - s.eps_start) * frac;
        }
      },
      schedule);
}

// The value the schedule approaches as i grows without bound.
inline double EpsilonLimit(const DecaySchedule& schedule) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearDecay>) {
          return s.floor_eps;
        } else if constexpr (std::is_same_v<T, ExponentialDecay>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, InverseSigmoidDecay>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ConstantRate>) {
          return s.eps;
        } else {
          static_assert(std::is_same_v<T, LinearRamp>);
          return s.eps_end;
        }
      },
      schedule);
}

}  // namespace ssrnn

#endif  // SSRNN_SCHEDULE_HPP_
