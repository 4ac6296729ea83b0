// ssrnn/math.hpp

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

#ifndef SSRNN_MATH_HPP_
#define SSRNN_MATH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/rng.hpp"

namespace ssrnn {

// All scalars are doubles: models here are desk-scale and the gradient
// checks need the precision.
using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
    if (r < 0 || c < 0) {
      throw std::invalid_argument("Mat: negative dimension");
    }
  }

  static Mat Zeros(int r, int c) { return Mat(r, c); }

  static Mat Identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      m.At(i, i) = 1.0;
    }
    return m;
  }

  double& At(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double At(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  const double* Row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
  double* Row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }

  friend bool operator==(const Mat&, const Mat&) = default;
};

inline double Dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += a[i] * b[i];
  }
  return s;
}

// y = M v
inline Vec MatVec(const Mat& m, const Vec& v) {
  if (m.cols != static_cast<int>(v.size())) {
    throw std::invalid_argument("MatVec: shape (" + std::to_string(m.rows) + "x" +
                                std::to_string(m.cols) + ") does not match vector of length " +
                                std::to_string(v.size()));
  }
  Vec out(static_cast<std::size_t>(m.rows), 0.0);
  for (int r = 0; r < m.rows; ++r) {
    out[r] = Dot(m.Row(r), v.data(), m.cols);
  }
  return out;
}

// y = M^T v, without materializing the transpose.
inline Vec MatTVec(const Mat& m, const Vec& v) {
  if (m.rows != static_cast<int>(v.size())) {
    throw std::invalid_argument("MatTVec: shape (" + std::to_string(m.rows) + "x" +
                                std::to_string(m.cols) + ") does not match vector of length " +
                                std::to_string(v.size()));
  }
  Vec out(static_cast<std::size_t>(m.cols), 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double s = v[r];
    if (s == 0.0) {
      continue;
    }
    const double* row = m.Row(r);
    for (int c = 0; c < m.cols; ++c) {
      out[c] += s * row[c];
    }
  }
  return out;
}

// m += a b^T
inline void AddOuter(Mat& m, const Vec& a, const Vec& b) {
  if (m.rows != static_cast<int>(a.size()) || m.cols != static_cast<int>(b.size())) {
    throw std::invalid_argument("AddOuter: shape (" + std::to_string(m.rows) + "x" +
                                std::to_string(m.cols) + ") does not match outer product (" +
                                std::to_string(a.size()) + "x" + std::to_string(b.size()) + ")");
  }
  for (int r = 0; r < m.rows; ++r) {
    const double s = a[r];
    if (s == 0.0) {
      continue;
    }
    double* row = m.Row(r);
    for (int c = 0; c < m.cols; ++c) {
      row[c] += s * b[c];
    }
  }
}

// y += alpha x
inline void Axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] += alpha * x[i];
  }
}

inline double MaxElement(const Vec& v) {
  if (v.empty()) {
    throw std::invalid_argument("MaxElement: empty vector");
  }
  return *std::max_element(v.begin(), v.end());
}

// Numerically stable softmax (max subtraction).
inline Vec Softmax(const Vec& v) {
  const double m = MaxElement(v);
  Vec out(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  const double inv = 1.0 / sum;
  for (double& x : out) {
    x *= inv;
  }
  return out;
}

inline double LogSumExp(const Vec& v) {
  const double m = MaxElement(v);
  double sum = 0.0;
  for (double x : v) {
    sum += std::exp(x - m);
  }
  return m + std::log(sum);
}

// log(softmax(v)) computed without forming softmax first.
inline Vec LogSoftmax(const Vec& v) {
  const double lse = LogSumExp(v);
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[i] - lse;
  }
  return out;
}

// Index of the maximum; ties resolve to the lowest index. The tie-break is
// load-bearing for the decoder oracle tests.
inline int Argmax(const Vec& v) {
  if (v.empty()) {
    throw std::invalid_argument("Argmax: empty vector");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) {
      best = i;
    }
  }
  return best;
}

// Draws an index distributed according to p (inverse-CDF walk over the
// cumulative sums). p must be normalized to 1 within 1e-6.
inline int SampleCategorical(const Vec& p, RngState& rng) {
  double sum = 0.0;
  for (double x : p) {
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("SampleCategorical: probabilities sum to " +
                                std::to_string(sum) + ", expected 1");
  }
  const double u = rng.NextDouble();
  double cum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (u < cum) {
      return static_cast<int>(i);
    }
  }
  // Rounding can leave cum slightly below 1; the tail mass belongs to the
  // last index with nonzero probability.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) {
      return static_cast<int>(i);
    }
  }
  return static_cast<int>(p.size()) - 1;
}

inline bool AllFinite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

}  // namespace ssrnn

#endif  // SSRNN_MATH_HPP_
