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

// End-to-end pipeline: dataset -> phrases -> phrase vectors -> slot inputs
// -> classifier. Each subcommand of the command-line tool is one function
// here taking a PipelineConfig.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "irony/classifier.hpp"
#include "irony/corpus.hpp"
#include "irony/encoder.hpp"
#include "irony/error.hpp"
#include "irony/eval.hpp"
#include "irony/parse.hpp"

namespace irony {

struct PipelineConfig {
  std::string dataset;
  std::string parses;
  std::string phrases;  // phrase file produced by `phrases`, used instead of parsing
  std::string encoder;
  std::string table;
  std::string out;
  std::string model;
  std::string backend;  // "conll", "heuristic", or empty to pick from `parses`
  ModelVariant variant = ModelVariant::kAlpha;
  std::size_t slots = 9;
  std::size_t embed_dim = 256;
  std::size_t lstm_dim = 512;
  std::size_t min_count = 1;
  std::vector<std::size_t> hidden;  // explicit hidden widths; empty = default layout
  int epochs = 4;
  double lr = 0.01;
  double momentum = 0.5;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double val_fraction = 0.0;
  unsigned threads = 1;
  bool cache = true;
};

inline std::string variant_name(ModelVariant v) { return v == ModelVariant::kBeta ? "beta" : "alpha"; }

inline ModelVariant parse_variant(const std::string& s) {
  if (s == "alpha") return ModelVariant::kAlpha;
  if (s == "beta") return ModelVariant::kBeta;
  throw ValidationError("variant must be 'alpha' or 'beta', got '" + s + "'");
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  return {{"dataset", c.dataset},     {"parses", c.parses},
          {"phrases", c.phrases},     {"encoder", c.encoder},
          {"table", c.table},         {"out", c.out},
          {"model", c.model},         {"backend", c.backend},
          {"variant", variant_name(c.variant)},
          {"slots", c.slots},         {"embed_dim", c.embed_dim},
          {"lstm_dim", c.lstm_dim},   {"min_count", c.min_count},
          {"hidden", c.hidden},       {"epochs", c.epochs},
          {"lr", c.lr},               {"momentum", c.momentum},
          {"seed", c.seed},           {"shuffle", c.shuffle},
          {"val_fraction", c.val_fraction},
          {"threads", c.threads},     {"cache", c.cache}};
}

// Unknown keys are rejected so typos do not silently fall back to defaults.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  PipelineConfig c;
  const auto known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError("config: unknown field '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("dataset", c.dataset);
    get("parses", c.parses);
    get("phrases", c.phrases);
    get("encoder", c.encoder);
    get("table", c.table);
    get("out", c.out);
    get("model", c.model);
    get("backend", c.backend);
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
    get("slots", c.slots);
    get("embed_dim", c.embed_dim);
    get("lstm_dim", c.lstm_dim);
    get("min_count", c.min_count);
    get("hidden", c.hidden);
    get("epochs", c.epochs);
    get("lr", c.lr);
    get("momentum", c.momentum);
    get("seed", c.seed);
    get("shuffle", c.shuffle);
    get("val_fraction", c.val_fraction);
    get("threads", c.threads);
    get("cache", c.cache);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Phrases

struct TweetPhrases {
  std::vector<Phrase> phrases;
  // Whole-tweet phrase (filtered tokens in sentence order), when derivable.
  std::optional<Phrase> whole;
};

inline std::string resolved_backend(const PipelineConfig& cfg) {
  const std::string b = cfg.backend.empty() ? (cfg.parses.empty() ? "heuristic" : "conll") : cfg.backend;
  if (b != "conll" && b != "heuristic") throw ValidationError("backend must be 'conll' or 'heuristic'");
  if (b == "conll" && cfg.parses.empty()) throw ValidationError("backend 'conll' requires --parses");
  return b;
}

inline void write_phrase_file(const Dataset& dataset, const std::vector<TweetPhrases>& phrases,
                              const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out << dataset.records[i].id;
    for (const auto& p : phrases[i].phrases) out << '\t' << p.text;
    out << '\n';
  }
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

// Reads `id<TAB>phrase...` lines; ids must follow the dataset order.
inline std::vector<TweetPhrases> read_phrase_file(const std::string& path, const Dataset& dataset) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open phrase file '" + path + "'");
  std::vector<TweetPhrases> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    const auto id = detail::parse_int<std::uint64_t>(fields[0]);
    const auto where = " at line " + std::to_string(line_no) + " of " + path;
    if (!id) throw ValidationError("bad id" + where);
    if (out.size() >= dataset.size() || dataset.records[out.size()].id != *id) {
      throw ValidationError("phrase file id " + std::to_string(*id) + " does not match dataset order" + where);
    }
    TweetPhrases tp;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      auto toks = whitespace_split(fields[k]);
      if (toks.empty()) continue;
      tp.phrases.push_back(make_phrase(std::move(toks), static_cast<int>(k)));
    }
    out.push_back(std::move(tp));
  }
  if (out.size() != dataset.size()) {
    throw ValidationError("phrase file has " + std::to_string(out.size()) + " lines, dataset has " +
                          std::to_string(dataset.size()) + " records");
  }
  return out;
}

inline std::vector<TweetPhrases> extract_phrases(const PipelineConfig& cfg, const Dataset& dataset) {
  std::vector<TweetPhrases> out;
  out.reserve(dataset.size());
  if (resolved_backend(cfg) == "conll") {
    std::ifstream in(cfg.parses);
    if (!in) throw ValidationError("cannot open parses '" + cfg.parses + "'");
    const auto forests = read_conll(in);
    const auto matched = match_forests(dataset, forests);
    for (const auto* forest : matched) {
      TweetPhrases tp{group_phrases(*forest), filtered_sentence(*forest)};
      out.push_back(std::move(tp));
    }
  } else {
    for (const auto& r : dataset.records) {
      TweetPhrases tp;
      tp.phrases = heuristic_segment(r.text);
      std::vector<std::string> all;
      for (const auto& p : tp.phrases) all.insert(all.end(), p.tokens.begin(), p.tokens.end());
      tp.whole = make_phrase(std::move(all), 0);
      out.push_back(std::move(tp));
    }
  }
  return out;
}

// Phrase file when configured, otherwise parses or the heuristic segmenter.
inline std::vector<TweetPhrases> resolve_phrases(const PipelineConfig& cfg, const Dataset& dataset) {
  if (!cfg.phrases.empty()) return read_phrase_file(cfg.phrases, dataset);
  return extract_phrases(cfg, dataset);
}

// ---------------------------------------------------------------------------
// Embedding backends

class PhraseEmbedder {
 public:
  static PhraseEmbedder from_config(const PipelineConfig& cfg) {
    if (cfg.encoder.empty() == cfg.table.empty()) {
      throw ValidationError("configure exactly one embedding backend: --encoder or --table");
    }
    PhraseEmbedder e;
    if (!cfg.encoder.empty()) {
      const std::string bytes = read_file_bytes(cfg.encoder);
      e.package_hash_ = fnv1a64(bytes);
      e.backend_ = Encoder(encoder_from_package(parse_package(bytes, cfg.encoder), cfg.encoder));
    } else {
      e.backend_ = read_embedding_table(cfg.table);
    }
    e.threads_ = std::max(1u, cfg.threads);
    return e;
  }

  std::size_t feature_dim() const {
    if (const auto* enc = std::get_if<Encoder>(&backend_)) return enc->feature_dim();
    return std::get<EmbeddingTable>(backend_).dim();
  }

  bool uses_encoder() const { return std::holds_alternative<Encoder>(backend_); }

  std::string cache_path_for(const std::string& phrase_file) const {
    std::ostringstream s;
    s << phrase_file << ".emb-" << std::hex << std::setw(16) << std::setfill('0') << package_hash_ << ".tsv";
    return s.str();
  }

  // Vectors for each distinct text. Table misses are collected and reported
  // together. With an encoder, `cache_path` (if non-empty) is read first and
  // rewritten when new phrases were encoded.
  std::map<std::string, PhraseVector> embed(const std::vector<std::string>& texts,
                                            const std::string& cache_path = {}) const {
    std::map<std::string, PhraseVector> out;
    if (const auto* table = std::get_if<EmbeddingTable>(&backend_)) {
      std::vector<std::string> missing;
      for (const auto& t : texts) {
        if (const auto* v = table->find(t)) {
          out.emplace(t, *v);
        } else if (std::find(missing.begin(), missing.end(), t) == missing.end()) {
          missing.push_back(t);
        }
      }
      if (!missing.empty()) {
        std::string msg = "embedding table is missing " + std::to_string(missing.size()) + " phrase(s):";
        for (const auto& m : missing) msg += "\n  " + m;
        throw ValidationError(msg);
      }
      return out;
    }

    const auto& enc = std::get<Encoder>(backend_);
    EmbeddingTable cache(enc.feature_dim());
    if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
      cache = read_embedding_table(cache_path);
      if (cache.dim() != enc.feature_dim()) cache = EmbeddingTable(enc.feature_dim());
    }
    std::vector<std::string> todo;
    for (const auto& t : texts) {
      if (out.contains(t)) continue;
      if (const auto* v = cache.find(t)) {
        out.emplace(t, *v);
      } else if (std::find(todo.begin(), todo.end(), t) == todo.end()) {
        todo.push_back(t);
      }
    }
    const auto encoded = encode_parallel(enc, todo);
    for (std::size_t i = 0; i < todo.size(); ++i) {
      out.emplace(todo[i], encoded[i]);
      cache.insert(todo[i], encoded[i]);
    }
    if (!cache_path.empty() && !todo.empty()) write_embedding_table(cache, cache_path);
    return out;
  }

 private:
  std::vector<PhraseVector> encode_parallel(const Encoder& enc, const std::vector<std::string>& texts) const {
    std::vector<PhraseVector> results(texts.size());
    const std::size_t workers = std::min<std::size_t>(threads_, std::max<std::size_t>(texts.size(), 1));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](std::size_t w) {
      try {
        for (std::size_t i = w; i < texts.size(); i += workers) {
          results[i] = enc.encode(make_phrase(whitespace_split(texts[i]), 0));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return results;
  }

  std::variant<Encoder, EmbeddingTable> backend_ = EmbeddingTable{};
  std::uint64_t package_hash_ = 0;
  unsigned threads_ = 1;
};

// ---------------------------------------------------------------------------
// Input assembly

struct AssembledInputs {
  SlotConfig slots;
  std::vector<Vector> inputs;
};

inline AssembledInputs assemble_dataset(const std::vector<TweetPhrases>& phrases, const SlotConfig& slots,
                                        const PhraseEmbedder& embedder, const std::string& cache_path = {}) {
  if (embedder.feature_dim() != slots.feature_dim) {
    throw ValidationError("dimension mismatch: model expects phrase vectors of dimension " +
                          std::to_string(slots.feature_dim) + ", embedding backend produces " +
                          std::to_string(embedder.feature_dim()));
  }
  std::vector<std::string> texts;
  for (const auto& tp : phrases) {
    for (std::size_t k = 0; k < std::min(tp.phrases.size(), slots.max_slots); ++k) {
      texts.push_back(tp.phrases[k].text);
    }
    if (slots.include_whole_tweet) {
      if (!tp.whole) {
        throw ValidationError("variant beta needs whole-tweet text; use --parses or the heuristic backend "
                              "instead of a phrase file");
      }
      if (!tp.whole->tokens.empty()) texts.push_back(tp.whole->text);
    }
  }
  const auto vectors = embedder.embed(texts, cache_path);

  AssembledInputs out{slots, {}};
  out.inputs.reserve(phrases.size());
  for (const auto& tp : phrases) {
    std::vector<PhraseVector> slot_vectors;
    for (std::size_t k = 0; k < std::min(tp.phrases.size(), slots.max_slots); ++k) {
      slot_vectors.push_back(vectors.at(tp.phrases[k].text));
    }
    std::optional<PhraseVector> whole;
    if (slots.include_whole_tweet) {
      whole = tp.whole->tokens.empty() ? PhraseVector{Vector(slots.feature_dim, 0.0)}
                                       : vectors.at(tp.whole->text);
    }
    out.inputs.push_back(assemble_input(slot_vectors, whole, slots));
  }
  return out;
}

inline std::string cache_path(const PipelineConfig& cfg, const PhraseEmbedder& embedder) {
  if (!cfg.cache || cfg.phrases.empty() || !embedder.uses_encoder()) return {};
  return embedder.cache_path_for(cfg.phrases);
}

inline MlpConfig mlp_config(const PipelineConfig& cfg, const SlotConfig& slots) {
  MlpConfig m;
  if (cfg.hidden.empty()) {
    m.widths = MlpConfig::default_widths(slots);
  } else {
    m.widths.push_back(slots.input_dim());
    m.widths.insert(m.widths.end(), cfg.hidden.begin(), cfg.hidden.end());
    m.widths.push_back(2);
  }
  m.learning_rate = cfg.lr;
  m.momentum = cfg.momentum;
  m.epochs = cfg.epochs;
  m.seed = cfg.seed;
  m.shuffle = cfg.shuffle;
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Subcommands

inline std::size_t cmd_phrases(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.dataset.empty()) throw ValidationError("phrases: --dataset is required");
  if (cfg.out.empty()) throw ValidationError("phrases: --out is required");
  const Dataset dataset = load_dataset_auto(cfg.dataset);
  const auto phrases = extract_phrases(cfg, dataset);
  write_phrase_file(dataset, phrases, cfg.out);
  std::size_t total = 0;
  for (const auto& tp : phrases) total += tp.phrases.size();
  log << "wrote " << dataset.size() << " tweets, " << total << " phrases to " << cfg.out << '\n';

  // Warm the embedding cache beside the phrase file when an encoder is given.
  if (!cfg.encoder.empty() && cfg.cache) {
    const auto embedder = PhraseEmbedder::from_config(cfg);
    std::vector<std::string> texts;
    for (const auto& tp : phrases) {
      for (const auto& p : tp.phrases) texts.push_back(p.text);
    }
    const auto path = embedder.cache_path_for(cfg.out);
    embedder.embed(texts, path);
    log << "cached phrase vectors in " << path << '\n';
  }
  return dataset.size();
}

// Builds a vocabulary from the dataset's phrases and writes a randomly
// initialized encoder package.
inline void cmd_init_encoder(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.dataset.empty()) throw ValidationError("init-encoder: --dataset is required");
  if (cfg.out.empty()) throw ValidationError("init-encoder: --out is required");
  if (cfg.embed_dim == 0 || cfg.lstm_dim == 0) throw ValidationError("encoder dimensions must be positive");
  const Dataset dataset = load_dataset_auto(cfg.dataset);
  const auto phrases = resolve_phrases(cfg, dataset);
  std::vector<Phrase> all;
  for (const auto& tp : phrases) all.insert(all.end(), tp.phrases.begin(), tp.phrases.end());
  const Vocab vocab = build_vocab(all, cfg.min_count);
  const EncoderConfig ecfg{cfg.embed_dim, cfg.lstm_dim};
  save_encoder(ecfg, random_encoder_params(ecfg, vocab.size(), cfg.seed), vocab, cfg.out);
  log << "wrote encoder (vocab " << vocab.size() << ", feature_dim " << ecfg.feature_dim() << ") to "
      << cfg.out << '\n';
}

struct TrainSummary {
  TrainHistory history;
  std::vector<std::string> checkpoints;
  std::string final_model;
};

inline void write_history(const TrainHistory& h, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  const bool val = !h.epochs.empty() && h.epochs.front().validation.has_value();
  out << "epoch\tloss\ttrain_accuracy";
  if (val) out << "\tval_accuracy\tval_precision\tval_recall\tval_f1";
  out << '\n';
  for (const auto& e : h.epochs) {
    out << e.epoch << '\t' << format_double(e.mean_loss) << '\t' << format_double(e.train_accuracy);
    if (e.validation) {
      out << '\t' << fixed4(e.validation->accuracy) << '\t' << fixed4(e.validation->precision) << '\t'
          << fixed4(e.validation->recall) << '\t' << fixed4(e.validation->f1);
    }
    out << '\n';
  }
}

inline TrainSummary cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.dataset.empty()) throw ValidationError("train: --dataset is required");
  if (cfg.out.empty()) throw ValidationError("train: --out is required");
  if (!(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0)) {
    throw ValidationError("train: --val-fraction must be in [0, 1)");
  }
  const Dataset dataset = load_dataset_auto(cfg.dataset);
  if (!dataset.fully_labeled()) throw ValidationError("train: labels required");
  const auto labels = dataset.labels();
  const auto embedder = PhraseEmbedder::from_config(cfg);
  const SlotConfig slots{cfg.slots, embedder.feature_dim(), cfg.variant == ModelVariant::kBeta};
  if (slots.max_slots == 0) throw ValidationError("train: --slots must be >= 1");
  const MlpConfig mlp = mlp_config(cfg, slots);

  const auto phrases = resolve_phrases(cfg, dataset);
  const auto assembled = assemble_dataset(phrases, slots, embedder, cache_path(cfg, embedder));

  // Optional held-out split: a seeded shuffle picks the validation records,
  // both parts keep file order.
  std::vector<std::size_t> val_idx, train_idx;
  const auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(dataset.size()));
  if (n_val > 0) {
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.seed + 1);
    std::shuffle(order.begin(), order.end(), rng);
    val_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::sort(val_idx.begin(), val_idx.end());
  }
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!std::binary_search(val_idx.begin(), val_idx.end(), i)) train_idx.push_back(i);
  }
  if (train_idx.empty()) throw ValidationError("train: validation split leaves no training data");
  auto gather = [&](const std::vector<std::size_t>& idx, std::vector<Vector>& xs, std::vector<int>& ys) {
    for (auto i : idx) {
      xs.push_back(assembled.inputs[i]);
      ys.push_back(labels[i]);
    }
  };
  std::vector<Vector> train_x, val_x;
  std::vector<int> train_y, val_y;
  gather(train_idx, train_x, train_y);
  gather(val_idx, val_x, val_y);

  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  {
    std::ofstream c(dir / "config.json", std::ios::binary | std::ios::trunc);
    c << to_json(cfg).dump(2) << '\n';
  }

  TrainSummary summary;
  TrainOptions opts;
  opts.validation_inputs = val_x;
  opts.validation_labels = val_y;
  opts.on_epoch = [&](const EpochRecord& rec, const MlpModel& model) {
    const auto path = (dir / ("checkpoint-epoch-" + std::to_string(rec.epoch) + ".bin")).string();
    save_checkpoint({mlp, slots, model, rec.epoch}, path);
    summary.checkpoints.push_back(path);
    log << "epoch " << rec.epoch << "  loss " << fixed4(rec.mean_loss) << "  train_acc "
        << fixed4(rec.train_accuracy);
    if (rec.validation) log << "  val_f1 " << fixed4(rec.validation->f1);
    log << '\n';
  };

  auto result = train(mlp, slots, train_x, train_y, opts);
  summary.history = std::move(result.history);
  summary.final_model = (dir / "model.bin").string();
  save_checkpoint({mlp, slots, result.model, mlp.epochs}, summary.final_model);
  write_history(summary.history, (dir / "history.tsv").string());
  if (const auto best = summary.history.best_f1_epoch()) log << "best validation F1 at epoch " << *best << '\n';
  return summary;
}

struct InferenceResult {
  Dataset dataset;
  std::vector<int> predictions;
};

inline InferenceResult run_inference(const PipelineConfig& cfg, bool need_labels) {
  if (cfg.model.empty()) throw ValidationError("--model is required");
  if (cfg.dataset.empty()) throw ValidationError("--dataset is required");
  if (!std::filesystem::exists(cfg.model)) throw ValidationError("checkpoint '" + cfg.model + "' not found");
  const Checkpoint ck = load_checkpoint(cfg.model);
  InferenceResult r{load_dataset_auto(cfg.dataset), {}};
  if (need_labels && !r.dataset.fully_labeled()) throw ValidationError("eval: labels required");
  const auto embedder = PhraseEmbedder::from_config(cfg);
  if (embedder.feature_dim() != ck.slots.feature_dim) {
    throw ValidationError("dimension mismatch: checkpoint expects phrase vectors of dimension " +
                          std::to_string(ck.slots.feature_dim) + ", embedding backend produces " +
                          std::to_string(embedder.feature_dim()));
  }
  const auto phrases = resolve_phrases(cfg, r.dataset);
  const auto assembled = assemble_dataset(phrases, ck.slots, embedder, cache_path(cfg, embedder));
  r.predictions = predict_labels(ck.model, assembled.inputs);
  return r;
}

inline MetricsReport cmd_eval(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.out.empty()) throw ValidationError("eval: --out is required");
  const auto r = run_inference(cfg, true);
  write_predictions(r.dataset, r.predictions, cfg.out);
  const auto report = compute_metrics(r.predictions, r.dataset.labels());
  {
    std::ofstream j(cfg.out + ".metrics.json", std::ios::binary | std::ios::trunc);
    if (!j) throw ValidationError("cannot write metrics next to '" + cfg.out + "'");
    j << to_json(report).dump(2) << '\n';
  }
  log << render_text(report);
  return report;
}

inline std::size_t cmd_predict(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.out.empty()) throw ValidationError("predict: --out is required");
  const auto r = run_inference(cfg, false);
  write_predictions(r.dataset, r.predictions, cfg.out);
  log << "wrote " << r.predictions.size() << " predictions to " << cfg.out << '\n';
  return r.predictions.size();
}

}  // namespace irony
