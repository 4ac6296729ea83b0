// ssrnn/data.hpp

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

#ifndef SSRNN_DATA_HPP_
#define SSRNN_DATA_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssrnn/math.hpp"
#include "ssrnn/rng.hpp"

namespace ssrnn {

// Reserved token indices. EOS terminates variable-length outputs in static
// mode; the start token S is fed at the first step in aligned mode.
constexpr int kEosToken = 0;
constexpr int kStartToken = 1;

// Conditioning modes. kStaticInput: one fixed input vector per example
// (seq2seq style, targets end with EOS). kFrameAligned: one feature vector
// and one target label per frame, no EOS.
enum class SeqMode { kStaticInput, kFrameAligned };

inline std::string ToString(SeqMode mode) {
  return mode == SeqMode::kStaticInput ? "static" : "aligned";
}

inline SeqMode SeqModeFromString(const std::string& s) {
  if (s == "static") {
    return SeqMode::kStaticInput;
  }
  if (s == "aligned") {
    return SeqMode::kFrameAligned;
  }
  throw std::invalid_argument("unknown sequence mode: " + s);
}

struct SeqExample {
  long id = 0;
  Vec static_input;            // static mode only
  std::vector<Vec> features;   // aligned mode only, one vector per frame
  std::vector<int> targets;

  friend bool operator==(const SeqExample&, const SeqExample&) = default;
};

struct CopyGenParams {
  int payload_vocab = 0;
  int len_min = 0;
  int len_max = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CopyGenParams&, const CopyGenParams&) = default;
};

// Generator parameters for the aligned synthetic task. Stored with the
// dataset so tests can build exact Bayes oracles from them.
struct HmmGenParams {
  int num_states = 0;
  int min_dwell = 0;
  double stay_prob = 0.0;  // per-frame probability of staying once min_dwell is served
  int feature_dim = 0;
  double noise_sigma = 0.0;
  int len_min = 0;
  int len_max = 0;
  std::uint64_t seed = 0;
  Mat state_means;  // num_states x feature_dim

  friend bool operator==(const HmmGenParams&, const HmmGenParams&) = default;
};

struct Dataset {
  SeqMode mode = SeqMode::kStaticInput;
  int vocab_size = 0;
  std::string split = "train";
  std::vector<SeqExample> examples;
  std::optional<CopyGenParams> copy_gen;
  std::optional<HmmGenParams> hmm_gen;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws if any example violates the dataset invariants: token range, EOS
// placement (static), frame/label alignment (aligned).
inline void Validate(const Dataset& ds) {
  if (ds.vocab_size < 2) {
    throw std::invalid_argument("Dataset: vocab_size must be >= 2");
  }
  for (const SeqExample& ex : ds.examples) {
    if (ex.targets.empty()) {
      throw std::invalid_argument("Dataset: example " + std::to_string(ex.id) +
                                  " has no targets");
    }
    for (int t : ex.targets) {
      if (t < 0 || t >= ds.vocab_size) {
        throw std::invalid_argument("Dataset: example " + std::to_string(ex.id) +
                                    " has token " + std::to_string(t) +
                                    " outside vocab of size " + std::to_string(ds.vocab_size));
      }
    }
    if (ds.mode == SeqMode::kStaticInput) {
      if (ex.static_input.empty()) {
        throw std::invalid_argument("Dataset: static example " + std::to_string(ex.id) +
                                    " has no input vector");
      }
      if (ex.targets.back() != kEosToken) {
        throw std::invalid_argument("Dataset: static example " + std::to_string(ex.id) +
                                    " does not end with EOS");
      }
      for (std::size_t i = 0; i + 1 < ex.targets.size(); ++i) {
        if (ex.targets[i] == kEosToken) {
          throw std::invalid_argument("Dataset: static example " + std::to_string(ex.id) +
                                      " has EOS before the final position");
        }
      }
    } else {
      if (ex.features.size() != ex.targets.size()) {
        throw std::invalid_argument("Dataset: aligned example " + std::to_string(ex.id) +
                                    " has " + std::to_string(ex.features.size()) +
                                    " frames but " + std::to_string(ex.targets.size()) +
                                    " labels");
      }
      for (int t : ex.targets) {
        if (t == kEosToken || t == kStartToken) {
          throw std::invalid_argument("Dataset: aligned example " + std::to_string(ex.id) +
                                      " uses a reserved token as a label");
        }
      }
    }
  }
}

// Builds one static-mode example from an explicit payload: the input is a
// bag-of-tokens indicator over the vocabulary, the target is the payload
// followed by EOS.
inline SeqExample MakeCopyExample(long id, const std::vector<int>& payload, int vocab_size) {
  SeqExample ex;
  ex.id = id;
  ex.static_input.assign(static_cast<std::size_t>(vocab_size), 0.0);
  ex.targets.reserve(payload.size() + 1);
  for (int tok : payload) {
    if (tok <= 0 || tok >= vocab_size) {
      throw std::invalid_argument("MakeCopyExample: payload token " + std::to_string(tok) +
                                  " outside payload range [1," + std::to_string(vocab_size) +
                                  ")");
    }
    ex.static_input[static_cast<std::size_t>(tok)] = 1.0;
    ex.targets.push_back(tok);
  }
  ex.targets.push_back(kEosToken);
  return ex;
}

// Copy task: the model must reproduce, in ascending order, the token subset
// marked in its input indicator. Payloads are distinct tokens sorted
// ascending so the target order is a deterministic function of the input;
// a bag-of-tokens input cannot encode an arbitrary order.
inline Dataset GenCopy(int n, int len_min, int len_max, int payload_vocab, std::uint64_t seed,
                       const std::string& split = "train") {
  if (payload_vocab < 2) {
    throw std::invalid_argument("GenCopy: payload_vocab must be >= 2");
  }
  if (len_min < 1 || len_max < len_min || len_max > payload_vocab) {
    throw std::invalid_argument("GenCopy: need 1 <= len_min <= len_max <= payload_vocab");
  }
  Dataset ds;
  ds.mode = SeqMode::kStaticInput;
  ds.vocab_size = payload_vocab + 1;  // payload tokens are 1..payload_vocab, 0 is EOS
  ds.split = split;
  ds.copy_gen = CopyGenParams{payload_vocab, len_min, len_max, seed};
  RngState root = RngState::FromSeed(seed);
  std::vector<int> pool(static_cast<std::size_t>(payload_vocab));
  for (int i = 0; i < n; ++i) {
    RngState rng = root.Split(static_cast<std::uint64_t>(i));
    const int len =
        len_min + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(len_max - len_min + 1)));
    std::iota(pool.begin(), pool.end(), 1);
    // Partial Fisher-Yates, then sort the drawn prefix.
    for (int j = 0; j < len; ++j) {
      const int k = j + static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(payload_vocab - j)));
      std::swap(pool[j], pool[k]);
    }
    std::vector<int> payload(pool.begin(), pool.begin() + len);
    std::sort(payload.begin(), payload.end());
    ds.examples.push_back(MakeCopyExample(i, payload, ds.vocab_size));
  }
  return ds;
}

struct HmmGenOptions {
  int len_min = 70;
  int len_max = 90;
  double stay_prob = 0.5;
  std::string split = "train";
};

// Aligned synthetic task: a cyclic Markov chain over hidden states with an
// enforced minimum dwell time, so labels are highly auto-correlated, plus
// state-dependent Gaussian features. Long dwell times make the label
// structure more predictive than the features under teacher forcing, which
// is exactly the regime where the training/inference mismatch shows up in
// decoding.
//
// State s emits label token s+2 (0 and 1 are reserved). Generator
// parameters are fixed functions of the seed and stored with the dataset.
inline Dataset GenHmmAligned(int n, int num_states, int min_dwell, int feature_dim,
                             double noise_sigma, std::uint64_t seed,
                             const HmmGenOptions& opt = HmmGenOptions{}) {
  if (num_states < 3) {
    throw std::invalid_argument("GenHmmAligned: num_states must be >= 3");
  }
  if (min_dwell < 2) {
    throw std::invalid_argument("GenHmmAligned: min_dwell must be >= 2");
  }
  if (feature_dim < 1 || noise_sigma < 0.0 || opt.len_min < 1 || opt.len_max < opt.len_min ||
      !(opt.stay_prob >= 0.0 && opt.stay_prob < 1.0)) {
    throw std::invalid_argument("GenHmmAligned: invalid generator options");
  }
  Dataset ds;
  ds.mode = SeqMode::kFrameAligned;
  ds.vocab_size = num_states + 2;
  ds.split = opt.split;

  HmmGenParams gen;
  gen.num_states = num_states;
  gen.min_dwell = min_dwell;
  gen.stay_prob = opt.stay_prob;
  gen.feature_dim = feature_dim;
  gen.noise_sigma = noise_sigma;
  gen.len_min = opt.len_min;
  gen.len_max = opt.len_max;
  gen.seed = seed;

  RngState root = RngState::FromSeed(seed);
  RngState means_rng = root.Split(0);
  gen.state_means = Mat(num_states, feature_dim);
  for (double& x : gen.state_means.data) {
    x = means_rng.NextUniform(-1.0, 1.0);
  }
  ds.hmm_gen = gen;

  for (int i = 0; i < n; ++i) {
    RngState rng = root.Split(1, static_cast<std::uint64_t>(i));
    const int len = opt.len_min + static_cast<int>(rng.NextBelow(
                                      static_cast<std::uint64_t>(opt.len_max - opt.len_min + 1)));
    SeqExample ex;
    ex.id = i;
    ex.features.reserve(static_cast<std::size_t>(len));
    ex.targets.reserve(static_cast<std::size_t>(len));
    int state = static_cast<int>(rng.NextBelow(static_cast<std::uint64_t>(num_states)));
    int dwell = 0;
    for (int t = 0; t < len; ++t) {
      if (dwell >= min_dwell && rng.NextDouble() >= opt.stay_prob) {
        state = (state + 1) % num_states;
        dwell = 0;
      }
      ++dwell;
      Vec x(static_cast<std::size_t>(feature_dim));
      for (int d = 0; d < feature_dim; ++d) {
        x[d] = gen.state_means.At(state, d) + noise_sigma * rng.NextGaussian();
      }
      ex.features.push_back(std::move(x));
      ex.targets.push_back(state + 2);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// JSON-lines serialization. Line 1 is a header record carrying the schema
// version, mode, vocabulary and generator parameters; every following line
// is one example.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json GeneratorToJson(const Dataset& ds) {
  nlohmann::ordered_json g;
  if (ds.copy_gen) {
    g["type"] = "copy";
    g["payload_vocab"] = ds.copy_gen->payload_vocab;
    g["len_min"] = ds.copy_gen->len_min;
    g["len_max"] = ds.copy_gen->len_max;
    g["seed"] = ds.copy_gen->seed;
  } else if (ds.hmm_gen) {
    const HmmGenParams& h = *ds.hmm_gen;
    g["type"] = "hmm_aligned";
    g["num_states"] = h.num_states;
    g["min_dwell"] = h.min_dwell;
    g["stay_prob"] = h.stay_prob;
    g["feature_dim"] = h.feature_dim;
    g["noise_sigma"] = h.noise_sigma;
    g["len_min"] = h.len_min;
    g["len_max"] = h.len_max;
    g["seed"] = h.seed;
    std::vector<Vec> rows;
    for (int s = 0; s < h.num_states; ++s) {
      rows.emplace_back(h.state_means.Row(s), h.state_means.Row(s) + h.feature_dim);
    }
    g["means"] = rows;
  }
  return g;
}

inline void GeneratorFromJson(const nlohmann::json& g, Dataset& ds) {
  if (g.is_null() || g.empty()) {
    return;
  }
  const std::string type = g.at("type").get<std::string>();
  if (type == "copy") {
    CopyGenParams p;
    p.payload_vocab = g.at("payload_vocab").get<int>();
    p.len_min = g.at("len_min").get<int>();
    p.len_max = g.at("len_max").get<int>();
    p.seed = g.at("seed").get<std::uint64_t>();
    ds.copy_gen = p;
  } else if (type == "hmm_aligned") {
    HmmGenParams p;
    p.num_states = g.at("num_states").get<int>();
    p.min_dwell = g.at("min_dwell").get<int>();
    p.stay_prob = g.at("stay_prob").get<double>();
    p.feature_dim = g.at("feature_dim").get<int>();
    p.noise_sigma = g.at("noise_sigma").get<double>();
    p.len_min = g.at("len_min").get<int>();
    p.len_max = g.at("len_max").get<int>();
    p.seed = g.at("seed").get<std::uint64_t>();
    const auto& rows = g.at("means");
    p.state_means = Mat(p.num_states, p.feature_dim);
    for (int s = 0; s < p.num_states; ++s) {
      const Vec row = rows.at(s).get<Vec>();
      if (static_cast<int>(row.size()) != p.feature_dim) {
        throw std::invalid_argument("dataset header: bad state mean length");
      }
      std::copy(row.begin(), row.end(), p.state_means.Row(s));
    }
    ds.hmm_gen = p;
  } else {
    throw std::invalid_argument("dataset header: unknown generator type " + type);
  }
}

}  // namespace detail

inline void SaveJsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("SaveJsonl: cannot open " + path + " for writing");
  }
  nlohmann::ordered_json header;
  header["kind"] = "ssrnn_dataset";
  header["schema_version"] = 1;
  header["mode"] = ToString(ds.mode);
  header["vocab_size"] = ds.vocab_size;
  header["split"] = ds.split;
  header["generator"] = detail::GeneratorToJson(ds);
  out << header.dump() << "\n";
  for (const SeqExample& ex : ds.examples) {
    nlohmann::ordered_json j;
    j["id"] = ex.id;
    j["mode"] = ToString(ds.mode);
    if (ds.mode == SeqMode::kStaticInput) {
      j["input"] = ex.static_input;
    } else {
      j["features"] = ex.features;
    }
    j["targets"] = ex.targets;
    out << j.dump() << "\n";
  }
  if (!out) {
    throw std::runtime_error("SaveJsonl: write to " + path + " failed");
  }
}

inline Dataset LoadJsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("LoadJsonl: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("LoadJsonl: " + path + " is empty");
  }
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.value("kind", "") != "ssrnn_dataset") {
    throw std::runtime_error("LoadJsonl: " + path + " is not a dataset file");
  }
  if (header.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("LoadJsonl: unsupported schema version in " + path);
  }
  Dataset ds;
  ds.mode = SeqModeFromString(header.at("mode").get<std::string>());
  ds.vocab_size = header.at("vocab_size").get<int>();
  ds.split = header.at("split").get<std::string>();
  detail::GeneratorFromJson(header.value("generator", nlohmann::json::object()), ds);
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    nlohmann::json j = nlohmann::json::parse(line);
    SeqExample ex;
    ex.id = j.at("id").get<long>();
    if (ds.mode == SeqMode::kStaticInput) {
      ex.static_input = j.at("input").get<Vec>();
    } else {
      ex.features = j.at("features").get<std::vector<Vec>>();
    }
    ex.targets = j.at("targets").get<std::vector<int>>();
    ds.examples.push_back(std::move(ex));
  }
  Validate(ds);
  return ds;
}

}  // namespace ssrnn

#endif  // SSRNN_DATA_HPP_
