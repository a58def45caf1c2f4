// Copyright 2026 The Irony Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Phrase encoder: word projection + tanh, two stacked bidirectional LSTMs,
// and attention pooling over the per-step concatenation
// [projection, layer-1 output, layer-2 output].
//
// The encoder is inference-only. Parameters come from a tensor package
// (see tensor_package.hpp) or from seeded random initialization.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "irony/error.hpp"
#include "irony/parse.hpp"
#include "irony/tensor.hpp"
#include "irony/tensor_package.hpp"

namespace irony {

inline constexpr std::size_t kPadId = 0;
inline constexpr std::size_t kUnkId = 1;

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::vector<std::string> whitespace_split(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

class Vocab {
 public:
  static constexpr std::string_view kPad = "<pad>";
  static constexpr std::string_view kUnk = "<unk>";

  Vocab() : Vocab(std::vector<std::string>{}) {}

  // `words` excludes the two reserved entries; they receive ids 2, 3, ...
  explicit Vocab(const std::vector<std::string>& words) {
    tokens_ = {std::string(kPad), std::string(kUnk)};
    for (const auto& w : words) add(w);
  }

  // Inverse of tokens(): the first two entries must be the reserved ones.
  static Vocab from_token_list(const std::vector<std::string>& list) {
    if (list.size() < 2 || list[kPadId] != kPad || list[kUnkId] != kUnk) {
      throw ValidationError("vocab must start with " + std::string(kPad) + ", " + std::string(kUnk));
    }
    return Vocab(std::vector<std::string>(list.begin() + 2, list.end()));
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::size_t lookup(std::string_view token) const {
    const auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnkId : it->second;
  }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  void add(const std::string& w) {
    if (w == kPad || w == kUnk || !ids_.emplace(w, tokens_.size()).second) {
      throw ValidationError("vocab: duplicate or reserved token '" + w + "'");
    }
    tokens_.push_back(w);
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Lowercased whitespace tokens with count >= min_count, by descending
// frequency then lexicographically.
inline Vocab build_vocab(std::span<const Phrase> phrases, std::size_t min_count = 1) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : phrases) {
    for (const auto& tok : whitespace_split(p.text)) ++counts[ascii_lower(tok)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts) {
    if (n >= std::max<std::size_t>(min_count, 1) && tok != Vocab::kPad && tok != Vocab::kUnk) {
      kept.emplace_back(tok, n);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [tok, n] : kept) words.push_back(tok);
  return Vocab(words);
}

inline std::vector<std::size_t> encode_tokens(const Vocab& vocab, const Phrase& phrase) {
  const auto toks = whitespace_split(phrase.text);
  if (toks.empty()) throw ValidationError("cannot encode an empty phrase");
  std::vector<std::size_t> ids;
  ids.reserve(toks.size());
  for (const auto& t : toks) ids.push_back(vocab.lookup(ascii_lower(t)));
  return ids;
}

struct EncoderConfig {
  static constexpr std::size_t kLstmLayers = 2;

  std::size_t embed_dim = 256;
  std::size_t lstm_dim = 512;  // per direction

  std::size_t layer_output_dim() const { return 2 * lstm_dim; }
  std::size_t feature_dim() const { return embed_dim + kLstmLayers * layer_output_dim(); }

  bool operator==(const EncoderConfig&) const = default;
};

// Gate blocks are stacked in the order input, forget, cell, output.
struct LstmDirection {
  Matrix w_input;      // 4H x in
  Matrix w_recurrent;  // 4H x H
  Vector bias;         // 4H

  bool operator==(const LstmDirection&) const = default;
};

struct BiLstmLayer {
  LstmDirection forward;
  LstmDirection backward;

  bool operator==(const BiLstmLayer&) const = default;
};

struct EncoderParams {
  Matrix embedding;  // V x embed_dim
  std::array<BiLstmLayer, EncoderConfig::kLstmLayers> layers;
  Vector attention;  // feature_dim

  bool operator==(const EncoderParams&) const = default;
};

struct PhraseVector {
  Vector values;

  std::size_t size() const { return values.size(); }
  bool operator==(const PhraseVector&) const = default;
};

inline EncoderParams zero_encoder_params(const EncoderConfig& cfg, std::size_t vocab_size) {
  EncoderParams p;
  p.embedding = Matrix(vocab_size, cfg.embed_dim);
  const std::size_t h = cfg.lstm_dim;
  for (std::size_t l = 0; l < EncoderConfig::kLstmLayers; ++l) {
    const std::size_t in = l == 0 ? cfg.embed_dim : cfg.layer_output_dim();
    for (auto* dir : {&p.layers[l].forward, &p.layers[l].backward}) {
      dir->w_input = Matrix(4 * h, in);
      dir->w_recurrent = Matrix(4 * h, h);
      dir->bias = Vector(4 * h, 0.0);
    }
  }
  p.attention = Vector(cfg.feature_dim(), 0.0);
  return p;
}

// Uniform in [-scale, scale] drawn as binary32 so a package round trip is
// exact; forget-gate biases start at 1.
inline EncoderParams random_encoder_params(const EncoderConfig& cfg, std::size_t vocab_size,
                                           std::uint64_t seed, double scale = 0.08) {
  EncoderParams p = zero_encoder_params(cfg, vocab_size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-static_cast<float>(scale), static_cast<float>(scale));
  auto fill = [&](std::vector<double>& v) {
    for (double& x : v) x = static_cast<double>(dist(rng));
  };
  fill(p.embedding.data());
  const std::size_t h = cfg.lstm_dim;
  for (auto& layer : p.layers) {
    for (auto* dir : {&layer.forward, &layer.backward}) {
      fill(dir->w_input.data());
      fill(dir->w_recurrent.data());
      fill(dir->bias);
      std::fill(dir->bias.begin() + static_cast<std::ptrdiff_t>(h),
                dir->bias.begin() + static_cast<std::ptrdiff_t>(2 * h), 1.0);
    }
  }
  fill(p.attention);
  return p;
}

inline EncoderConfig config_of(const EncoderParams& p) {
  return {p.embedding.cols(), p.layers[0].forward.w_recurrent.cols()};
}

namespace detail {

inline std::vector<Vector> run_lstm(const LstmDirection& dir, const std::vector<Vector>& inputs,
                                    bool reverse) {
  const std::size_t h = dir.w_recurrent.cols();
  const std::size_t steps = inputs.size();
  Vector hidden(h, 0.0), cell(h, 0.0), z(4 * h);
  std::vector<Vector> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    z = dir.bias;
    gemv_accumulate(dir.w_input, inputs[t], z);
    gemv_accumulate(dir.w_recurrent, hidden, z);
    for (std::size_t j = 0; j < h; ++j) {
      const double in_gate = sigmoid(z[j]);
      const double forget_gate = sigmoid(z[h + j]);
      const double candidate = std::tanh(z[2 * h + j]);
      const double out_gate = sigmoid(z[3 * h + j]);
      cell[j] = forget_gate * cell[j] + in_gate * candidate;
      hidden[j] = out_gate * std::tanh(cell[j]);
    }
    out[t] = hidden;
  }
  return out;
}

inline std::vector<Vector> run_bilstm(const BiLstmLayer& layer, const std::vector<Vector>& inputs) {
  const auto fwd = run_lstm(layer.forward, inputs, false);
  const auto bwd = run_lstm(layer.backward, inputs, true);
  std::vector<Vector> out(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out[t].reserve(fwd[t].size() + bwd[t].size());
    out[t].insert(out[t].end(), fwd[t].begin(), fwd[t].end());
    out[t].insert(out[t].end(), bwd[t].begin(), bwd[t].end());
  }
  return out;
}

}  // namespace detail

// Intermediate values of one forward pass.
struct EncoderTrace {
  std::vector<Vector> features;  // per step: [projection, layer 1, layer 2]
  Vector attention_weights;
  PhraseVector output;
};

inline EncoderTrace encoder_forward_trace(const EncoderParams& params, std::span<const std::size_t> ids) {
  if (ids.empty()) throw ValidationError("encoder: empty token sequence");
  const std::size_t vocab_size = params.embedding.rows();
  std::vector<Vector> projected;
  projected.reserve(ids.size());
  for (std::size_t id : ids) {
    if (id >= vocab_size) {
      throw ValidationError("encoder: token id " + std::to_string(id) + " out of range [0, " +
                            std::to_string(vocab_size) + ")");
    }
    const auto row = params.embedding.row(id);
    Vector e(row.size());
    std::transform(row.begin(), row.end(), e.begin(), [](double x) { return std::tanh(x); });
    projected.push_back(std::move(e));
  }
  const auto layer1 = detail::run_bilstm(params.layers[0], projected);
  const auto layer2 = detail::run_bilstm(params.layers[1], layer1);

  EncoderTrace trace;
  const std::size_t steps = ids.size();
  trace.features.resize(steps);
  Vector scores(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto& f = trace.features[t];
    f.reserve(params.attention.size());
    f.insert(f.end(), projected[t].begin(), projected[t].end());
    f.insert(f.end(), layer1[t].begin(), layer1[t].end());
    f.insert(f.end(), layer2[t].begin(), layer2[t].end());
    if (f.size() != params.attention.size()) {
      throw ValidationError("encoder: attention width does not match feature width");
    }
    if (!all_finite(f)) throw NumericError("encoder: non-finite feature at step " + std::to_string(t));
    scores[t] = dot(params.attention, f);
  }

  const double max_score = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  trace.attention_weights.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    trace.attention_weights[t] = std::exp(scores[t] - max_score);
    total += trace.attention_weights[t];
  }
  for (double& a : trace.attention_weights) a /= total;

  trace.output.values.assign(params.attention.size(), 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    const double a = trace.attention_weights[t];
    for (std::size_t k = 0; k < trace.output.values.size(); ++k) {
      trace.output.values[k] += a * trace.features[t][k];
    }
  }
  if (!all_finite(trace.output.values)) throw NumericError("encoder: non-finite output");
  return trace;
}

inline PhraseVector encoder_forward(const EncoderParams& params, std::span<const std::size_t> ids) {
  return encoder_forward_trace(params, ids).output;
}

// ---------------------------------------------------------------------------
// Package I/O

inline std::string lstm_tensor_prefix(std::size_t layer, bool backward) {
  return "lstm." + std::to_string(layer) + (backward ? ".backward" : ".forward");
}

inline void save_encoder(const EncoderConfig& cfg, const EncoderParams& params, const Vocab& vocab,
                         const std::string& path) {
  if (config_of(params) != cfg || params.embedding.rows() != vocab.size()) {
    throw ValidationError("save_encoder: parameters do not match config or vocab");
  }
  TensorPackage pkg;
  pkg.meta = {{"kind", "encoder"},
              {"config",
               {{"embed_dim", cfg.embed_dim},
                {"lstm_dim", cfg.lstm_dim},
                {"lstm_layers", EncoderConfig::kLstmLayers},
                {"feature_dim", cfg.feature_dim()}}},
              {"vocab", vocab.tokens()}};
  pkg.add("embedding", {params.embedding.rows(), params.embedding.cols()}, to_f32(params.embedding.data()));
  for (std::size_t l = 0; l < EncoderConfig::kLstmLayers; ++l) {
    for (bool backward : {false, true}) {
      const auto& dir = backward ? params.layers[l].backward : params.layers[l].forward;
      const auto prefix = lstm_tensor_prefix(l, backward);
      pkg.add(prefix + ".w_input", {dir.w_input.rows(), dir.w_input.cols()}, to_f32(dir.w_input.data()));
      pkg.add(prefix + ".w_recurrent", {dir.w_recurrent.rows(), dir.w_recurrent.cols()},
              to_f32(dir.w_recurrent.data()));
      pkg.add(prefix + ".bias", {dir.bias.size()}, to_f32(dir.bias));
    }
  }
  pkg.add("attention", {params.attention.size()}, to_f32(params.attention));
  write_package(pkg, path);
}

struct LoadedEncoder {
  EncoderConfig config;
  EncoderParams params;
  Vocab vocab;
};

inline LoadedEncoder encoder_from_package(const TensorPackage& pkg, const std::string& origin) {
  LoadedEncoder enc;
  try {
    if (pkg.meta.value("kind", "") != "encoder") {
      throw ValidationError(origin + ": not an encoder package");
    }
    const auto& c = pkg.meta.at("config");
    enc.config.embed_dim = c.at("embed_dim").get<std::size_t>();
    enc.config.lstm_dim = c.at("lstm_dim").get<std::size_t>();
    if (c.at("lstm_layers").get<std::size_t>() != EncoderConfig::kLstmLayers) {
      throw ValidationError(origin + ": only 2 LSTM layers are supported");
    }
    if (c.at("feature_dim").get<std::size_t>() != enc.config.feature_dim()) {
      throw ValidationError(origin + ": feature_dim does not equal embed_dim + 4 * lstm_dim");
    }
    enc.vocab = Vocab::from_token_list(pkg.meta.at("vocab").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": bad encoder manifest: " + e.what());
  }
  if (enc.config.embed_dim == 0 || enc.config.lstm_dim == 0) {
    throw ValidationError(origin + ": encoder dimensions must be positive");
  }

  const auto& cfg = enc.config;
  const std::size_t h = cfg.lstm_dim;
  auto load_matrix = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    const auto& t = pkg.get(name);
    expect_shape(t, {rows, cols}, origin);
    Matrix m(rows, cols);
    std::copy(t.values.begin(), t.values.end(), m.data().begin());
    return m;
  };
  auto load_vector = [&](const std::string& name, std::size_t n) {
    const auto& t = pkg.get(name);
    expect_shape(t, {n}, origin);
    return Vector(t.values.begin(), t.values.end());
  };

  enc.params.embedding = load_matrix("embedding", enc.vocab.size(), cfg.embed_dim);
  for (std::size_t l = 0; l < EncoderConfig::kLstmLayers; ++l) {
    const std::size_t in = l == 0 ? cfg.embed_dim : cfg.layer_output_dim();
    for (bool backward : {false, true}) {
      auto& dir = backward ? enc.params.layers[l].backward : enc.params.layers[l].forward;
      const auto prefix = lstm_tensor_prefix(l, backward);
      dir.w_input = load_matrix(prefix + ".w_input", 4 * h, in);
      dir.w_recurrent = load_matrix(prefix + ".w_recurrent", 4 * h, h);
      dir.bias = load_vector(prefix + ".bias", 4 * h);
    }
  }
  enc.params.attention = load_vector("attention", cfg.feature_dim());
  return enc;
}

inline LoadedEncoder load_encoder(const std::string& path) {
  return encoder_from_package(read_package(path), path);
}

// Bundles a loaded encoder for phrase-level use.
struct Encoder {
  EncoderConfig config;
  EncoderParams params;
  Vocab vocab;

  explicit Encoder(LoadedEncoder loaded)
      : config(loaded.config), params(std::move(loaded.params)), vocab(std::move(loaded.vocab)) {}

  std::size_t feature_dim() const { return config.feature_dim(); }

  PhraseVector encode(const Phrase& phrase) const {
    return encoder_forward(params, encode_tokens(vocab, phrase));
  }
};

// ---------------------------------------------------------------------------
// Precomputed phrase vectors, keyed by exact phrase text.
//
// File layout: first line "#dim=<D>", then "phrase_text<TAB>v1 v2 ... vD".

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& text) const { return entries_.contains(text); }

  void insert(const std::string& text, PhraseVector v) {
    if (v.size() != dim_) {
      throw ValidationError("embedding table: vector for '" + text + "' has dimension " +
                            std::to_string(v.size()) + ", table expects " + std::to_string(dim_));
    }
    entries_.insert_or_assign(text, std::move(v));
  }

  const PhraseVector* find(const std::string& text) const {
    const auto it = entries_.find(text);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const PhraseVector& lookup(const Phrase& phrase) const {
    if (const auto* v = find(phrase.text)) return *v;
    throw ValidationError("embedding table: missing phrase '" + phrase.text + "'");
  }

  const std::map<std::string, PhraseVector>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::map<std::string, PhraseVector> entries_;
};

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline void write_embedding_table(const EmbeddingTable& table, std::ostream& out) {
  out << "#dim=" << table.dim() << '\n';
  for (const auto& [text, vec] : table.entries()) {
    out << text << '\t';
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (i) out << ' ';
      out << format_double(vec.values[i]);
    }
    out << '\n';
  }
}

inline void write_embedding_table(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  write_embedding_table(table, out);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

inline EmbeddingTable read_embedding_table(std::istream& in, const std::string& origin = "table") {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(origin + ": empty embedding table");
  detail::strip_cr(line);
  if (!line.starts_with("#dim=")) throw ValidationError(origin + ": first line must be #dim=<D>");
  const auto dim = detail::parse_int<std::size_t>(std::string_view(line).substr(5));
  if (!dim || *dim == 0) throw ValidationError(origin + ": bad #dim header");

  EmbeddingTable table(*dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto where = " at line " + std::to_string(line_no) + " of " + origin;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ValidationError("missing tab" + where);
    const std::string text = line.substr(0, tab);
    PhraseVector v;
    v.values.reserve(*dim);
    const std::string_view rest = std::string_view(line).substr(tab + 1);
    for (const auto& field : whitespace_split(rest)) {
      double x = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), x);
      if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(x)) {
        throw ValidationError("bad number '" + field + "'" + where);
      }
      v.values.push_back(x);
    }
    if (v.size() != *dim) {
      throw ValidationError("expected " + std::to_string(*dim) + " values, found " +
                            std::to_string(v.size()) + where);
    }
    if (table.contains(text)) throw ValidationError("duplicate phrase '" + text + "'" + where);
    table.insert(text, std::move(v));
  }
  return table;
}

inline EmbeddingTable read_embedding_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding table '" + path + "'");
  return read_embedding_table(in, path);
}

inline const PhraseVector& lookup_precomputed(const EmbeddingTable& table, const Phrase& phrase) {
  return table.lookup(phrase);
}

}  // namespace irony
