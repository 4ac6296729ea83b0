// ssrnn/checkpoint.hpp

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

// Self-describing text checkpoints: a versioned header with the model
// configuration, then each tensor as name, shape and row-per-line decimal
// values at 17 significant digits, which round-trips IEEE doubles exactly.

#ifndef SSRNN_CHECKPOINT_HPP_
#define SSRNN_CHECKPOINT_HPP_

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssrnn/model.hpp"

namespace ssrnn {

namespace detail {

inline std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline double ParseDouble(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) {
    throw std::runtime_error("checkpoint: bad floating-point value '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline void SaveCheckpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("SaveCheckpoint: cannot open " + path + " for writing");
  }
  const ModelConfig& cfg = params.cfg;
  out << "ssrnn_checkpoint 1\n";
  out << "vocab_size " << cfg.vocab_size << "\n";
  out << "embed_dim " << cfg.embed_dim << "\n";
  out << "hidden_dim " << cfg.hidden_dim << "\n";
  out << "mode " << ToString(cfg.mode) << "\n";
  out << "feature_dim " << cfg.feature_dim << "\n";
  out << "init_scale " << detail::FormatDouble(cfg.init_scale) << "\n";
  out << "seed " << cfg.seed << "\n";
  for (const ConstTensorRef& ref : TensorRefs(params)) {
    out << "tensor " << ref.name << " " << ref.rows << " " << ref.cols << "\n";
    const Vec& data = *ref.data;
    for (int r = 0; r < ref.rows; ++r) {
      for (int c = 0; c < ref.cols; ++c) {
        if (c > 0) {
          out << " ";
        }
        out << detail::FormatDouble(data[static_cast<std::size_t>(r) * ref.cols + c]);
      }
      out << "\n";
    }
  }
  out << "end\n";
  if (!out) {
    throw std::runtime_error("SaveCheckpoint: write to " + path + " failed");
  }
}

inline ModelParams LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("LoadCheckpoint: cannot open " + path);
  }
  std::string word;
  auto expect_key = [&](const std::string& key) {
    if (!(in >> word) || word != key) {
      throw std::runtime_error("LoadCheckpoint: expected '" + key + "' in " + path);
    }
  };
  expect_key("ssrnn_checkpoint");
  int version = 0;
  in >> version;
  if (version != 1) {
    throw std::runtime_error("LoadCheckpoint: unsupported version " + std::to_string(version));
  }
  ModelConfig cfg;
  expect_key("vocab_size");
  in >> cfg.vocab_size;
  expect_key("embed_dim");
  in >> cfg.embed_dim;
  expect_key("hidden_dim");
  in >> cfg.hidden_dim;
  expect_key("mode");
  in >> word;
  cfg.mode = SeqModeFromString(word);
  expect_key("feature_dim");
  in >> cfg.feature_dim;
  expect_key("init_scale");
  in >> word;
  cfg.init_scale = detail::ParseDouble(word);
  expect_key("seed");
  in >> cfg.seed;
  if (!in) {
    throw std::runtime_error("LoadCheckpoint: truncated header in " + path);
  }
  Validate(cfg);

  // Shape the tensors from the config, then fill them in declared order.
  ModelParams params = InitParams(cfg);
  for (const TensorRef& ref : TensorRefs(params)) {
    expect_key("tensor");
    in >> word;
    if (word != ref.name) {
      throw std::runtime_error("LoadCheckpoint: expected tensor '" + ref.name + "', found '" +
                               word + "'");
    }
    int rows = 0;
    int cols = 0;
    in >> rows >> cols;
    if (rows != ref.rows || cols != ref.cols) {
      throw std::runtime_error("LoadCheckpoint: tensor " + ref.name + " has shape " +
                               std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
                               std::to_string(ref.rows) + "x" + std::to_string(ref.cols));
    }
    Vec& data = *ref.data;
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (!(in >> word)) {
        throw std::runtime_error("LoadCheckpoint: truncated tensor " + ref.name);
      }
      data[j] = detail::ParseDouble(word);
    }
  }
  expect_key("end");
  return params;
}

}  // namespace ssrnn

#endif  // SSRNN_CHECKPOINT_HPP_
