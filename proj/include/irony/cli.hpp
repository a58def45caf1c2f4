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

// Command-line front end. Every PipelineConfig field can come from a JSON
// config file (--config) and be overridden by the same-named flag.
//
// Exit codes: 0 success, 2 validation error, 3 numeric failure.

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irony/pipeline.hpp"

namespace irony::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

namespace detail {

template <typename T>
inline constexpr bool is_vector = false;
template <typename T>
inline constexpr bool is_vector<std::vector<T>> = true;

struct FlagBinding {
  CLI::Option* option;
  std::function<void(PipelineConfig&, const PipelineConfig&)> apply;
};

class Subcommand {
 public:
  Subcommand(CLI::App& app, const std::string& name, const std::string& description)
      : app_(app.add_subcommand(name, description)) {
    app_->add_option("--config", config_path_, "JSON config file; flags override its fields")
        ->check(CLI::ExistingFile);
  }

  template <typename T>
  Subcommand& option(const std::string& flag, T PipelineConfig::*field, const std::string& help) {
    auto* opt = app_->add_option(flag, flags_.*field, help);
    if constexpr (!is_vector<T>) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    bindings_.push_back({opt, [field](PipelineConfig& dst, const PipelineConfig& src) { dst.*field = src.*field; }});
    return *this;
  }

  Subcommand& variant() {
    auto* opt = app_->add_option("--variant", variant_, "alpha (phrase slots) or beta (plus whole tweet)")
                    ->check(CLI::IsMember({"alpha", "beta"}))
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    bindings_.push_back({opt, [this](PipelineConfig& dst, const PipelineConfig&) { dst.variant = parse_variant(variant_); }});
    return *this;
  }

  Subcommand& switches() {
    auto* ns = app_->add_flag("--no-shuffle", "keep file order within epochs");
    bindings_.push_back({ns, [](PipelineConfig& dst, const PipelineConfig&) { dst.shuffle = false; }});
    auto* nc = app_->add_flag("--no-cache", "do not read or write the phrase-vector cache");
    bindings_.push_back({nc, [](PipelineConfig& dst, const PipelineConfig&) { dst.cache = false; }});
    return *this;
  }

  bool parsed() const { return app_->parsed(); }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path_.empty() ? PipelineConfig{} : load_config(config_path_);
    for (const auto& b : bindings_) {
      if (b.option->count() > 0) b.apply(cfg, flags_);
    }
    return cfg;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::string variant_;
  PipelineConfig flags_;
  std::vector<FlagBinding> bindings_;
};

inline void add_data_options(Subcommand& s) {
  s.option("--dataset", &PipelineConfig::dataset, "TSV dataset (id, [label,] text)")
      .option("--parses", &PipelineConfig::parses, "CoNLL parses, one block per tweet")
      .option("--backend", &PipelineConfig::backend, "phrase source: conll or heuristic")
      .option("--out", &PipelineConfig::out, "output path");
}

inline void add_embedding_options(Subcommand& s) {
  s.option("--phrases", &PipelineConfig::phrases, "phrase file written by `phrases`")
      .option("--encoder", &PipelineConfig::encoder, "encoder tensor package")
      .option("--table", &PipelineConfig::table, "precomputed phrase-vector table")
      .option("--threads", &PipelineConfig::threads, "phrase-encoding worker threads");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Irony detection over dependency-parse phrases"};
  app.require_subcommand(1);

  detail::Subcommand phrases(app, "phrases", "split tweets into per-root phrases");
  detail::add_data_options(phrases);
  phrases.option("--encoder", &PipelineConfig::encoder, "encoder package; pre-computes the vector cache")
      .option("--threads", &PipelineConfig::threads, "phrase-encoding worker threads")
      .switches();

  detail::Subcommand init(app, "init-encoder", "write a seeded random encoder package for a dataset");
  detail::add_data_options(init);
  init.option("--phrases", &PipelineConfig::phrases, "phrase file written by `phrases`")
      .option("--embed-dim", &PipelineConfig::embed_dim, "word projection width")
      .option("--lstm-dim", &PipelineConfig::lstm_dim, "LSTM width per direction")
      .option("--min-count", &PipelineConfig::min_count, "minimum token count for the vocabulary")
      .option("--seed", &PipelineConfig::seed, "random seed");

  detail::Subcommand train(app, "train", "train the classifier");
  detail::add_data_options(train);
  detail::add_embedding_options(train);
  train.variant()
      .option("--slots", &PipelineConfig::slots, "maximum phrase slots")
      .option("--hidden", &PipelineConfig::hidden, "explicit hidden layer widths")
      .option("--epochs", &PipelineConfig::epochs, "training epochs")
      .option("--lr", &PipelineConfig::lr, "learning rate")
      .option("--momentum", &PipelineConfig::momentum, "momentum")
      .option("--seed", &PipelineConfig::seed, "random seed")
      .option("--val-fraction", &PipelineConfig::val_fraction, "held-out fraction for per-epoch metrics")
      .switches();

  detail::Subcommand eval(app, "eval", "predict a labeled dataset and report metrics");
  detail::add_data_options(eval);
  detail::add_embedding_options(eval);
  eval.option("--model", &PipelineConfig::model, "classifier checkpoint").switches();

  detail::Subcommand predict(app, "predict", "predict labels");
  detail::add_data_options(predict);
  detail::add_embedding_options(predict);
  predict.option("--model", &PipelineConfig::model, "classifier checkpoint").switches();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (phrases.parsed()) cmd_phrases(phrases.resolve(), out);
    else if (init.parsed()) cmd_init_encoder(init.resolve(), out);
    else if (train.parsed()) cmd_train(train.resolve(), out);
    else if (eval.parsed()) cmd_eval(eval.resolve(), out);
    else if (predict.parsed()) cmd_predict(predict.resolve(), out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("irony");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace irony::cli
