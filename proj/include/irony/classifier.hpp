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

// Fully connected classifier over fixed-slot phrase inputs.
//
// A tweet's phrase vectors fill up to max_slots slots of width feature_dim
// (extra phrases are dropped, missing slots are zero). The "beta" variant
// appends the whole-tweet vector as one extra slot. The network applies
// affine + tanh on every hidden layer and affine only on the 2-way output,
// and is trained with softmax cross-entropy and classical momentum SGD,
// one example at a time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "irony/encoder.hpp"
#include "irony/error.hpp"
#include "irony/eval.hpp"
#include "irony/tensor.hpp"
#include "irony/tensor_package.hpp"

namespace irony {

enum class ModelVariant { kAlpha, kBeta };

struct SlotConfig {
  std::size_t max_slots = 9;
  std::size_t feature_dim = 2304;
  bool include_whole_tweet = false;

  std::size_t slot_count() const { return max_slots + (include_whole_tweet ? 1 : 0); }
  std::size_t input_dim() const { return feature_dim * slot_count(); }
  ModelVariant variant() const { return include_whole_tweet ? ModelVariant::kBeta : ModelVariant::kAlpha; }

  bool operator==(const SlotConfig&) const = default;
};

struct MlpConfig {
  std::vector<std::size_t> widths;
  double learning_rate = 0.01;
  double momentum = 0.5;
  int epochs = 4;
  std::uint64_t seed = 0;
  bool shuffle = true;

  // [input, 4D, D, ceil(256 D / 2304) but >= 2, 2]; the full-scale network
  // is [20736, 9216, 2304, 256, 2].
  static std::vector<std::size_t> default_widths(const SlotConfig& slots) {
    const std::size_t d = slots.feature_dim;
    const std::size_t narrow = std::max<std::size_t>(2, (256 * d + 2303) / 2304);
    return {slots.input_dim(), 4 * d, d, narrow, 2};
  }

  static MlpConfig for_slots(const SlotConfig& slots) {
    MlpConfig cfg;
    cfg.widths = default_widths(slots);
    return cfg;
  }

  void validate() const {
    if (widths.size() < 2) throw ValidationError("mlp: need at least input and output widths");
    if (widths.back() != 2) throw ValidationError("mlp: output width must be 2");
    for (auto w : widths) {
      if (w == 0) throw ValidationError("mlp: layer widths must be positive");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw ValidationError("mlp: learning rate must be finite and non-negative");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("mlp: momentum must be in [0, 1)");
    if (epochs < 1) throw ValidationError("mlp: epochs must be >= 1");
  }

  bool operator==(const MlpConfig&) const = default;
};

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;
  Matrix weight_velocity;
  Vector bias_velocity;

  bool operator==(const DenseLayer&) const = default;
};

struct MlpModel {
  std::vector<DenseLayer> layers;

  static MlpModel zeros(std::span<const std::size_t> widths) {
    MlpModel m;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      m.layers.push_back({Matrix(widths[l + 1], widths[l]), Vector(widths[l + 1], 0.0),
                          Matrix(widths[l + 1], widths[l]), Vector(widths[l + 1], 0.0)});
    }
    return m;
  }

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().weight.cols());
    for (const auto& l : layers) w.push_back(l.weight.rows());
    return w;
  }

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }

  bool operator==(const MlpModel&) const = default;
};

struct MlpGrads {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
};

// Concatenates the first max_slots vectors, zero-fills unused slots, and in
// the beta variant puts the whole-tweet vector in the final slot.
inline Vector assemble_input(std::span<const PhraseVector> vectors,
                             const std::optional<PhraseVector>& whole_tweet, const SlotConfig& cfg) {
  const std::size_t d = cfg.feature_dim;
  if (whole_tweet.has_value() != cfg.include_whole_tweet) {
    throw ValidationError(cfg.include_whole_tweet ? "assemble_input: whole-tweet vector required"
                                                  : "assemble_input: whole-tweet vector given for alpha variant");
  }
  Vector input(cfg.input_dim(), 0.0);
  const std::size_t kept = std::min(vectors.size(), cfg.max_slots);
  for (std::size_t s = 0; s < vectors.size(); ++s) {
    if (vectors[s].size() != d) {
      throw ValidationError("assemble_input: phrase vector " + std::to_string(s) + " has dimension " +
                            std::to_string(vectors[s].size()) + ", expected " + std::to_string(d));
    }
    if (s < kept) std::copy(vectors[s].values.begin(), vectors[s].values.end(), input.begin() + static_cast<std::ptrdiff_t>(s * d));
  }
  if (whole_tweet) {
    if (whole_tweet->size() != d) {
      throw ValidationError("assemble_input: whole-tweet vector has dimension " +
                            std::to_string(whole_tweet->size()) + ", expected " + std::to_string(d));
    }
    std::copy(whole_tweet->values.begin(), whole_tweet->values.end(),
              input.begin() + static_cast<std::ptrdiff_t>(cfg.max_slots * d));
  }
  return input;
}

struct ForwardResult {
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
  // activations[0] is the input, activations[l] the tanh output of hidden
  // layer l; the logits are not repeated here.
  std::vector<Vector> activations;
};

inline std::array<double, 2> softmax2(const std::array<double, 2>& z) {
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m);
  const double e1 = std::exp(z[1] - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

inline ForwardResult mlp_forward(const MlpModel& model, std::span<const double> input) {
  if (model.layers.empty()) throw ValidationError("mlp_forward: empty model");
  if (input.size() != model.input_dim()) {
    throw ValidationError("mlp_forward: input has dimension " + std::to_string(input.size()) +
                          ", model expects " + std::to_string(model.input_dim()));
  }
  ForwardResult r;
  r.activations.reserve(model.layers.size());
  r.activations.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    Vector z = layer.bias;
    gemv_accumulate(layer.weight, r.activations.back(), z);
    if (l + 1 == model.layers.size()) {
      if (z.size() != 2) throw ValidationError("mlp_forward: output layer must have width 2");
      r.logits = {z[0], z[1]};
    } else {
      for (double& x : z) x = std::tanh(x);
      r.activations.push_back(std::move(z));
    }
  }
  if (!std::isfinite(r.logits[0]) || !std::isfinite(r.logits[1])) {
    throw NumericError("mlp_forward: non-finite logits");
  }
  r.probs = softmax2(r.logits);
  return r;
}

struct LossAndGrad {
  double loss = 0.0;
  MlpGrads grads;
  ForwardResult forward;
};

inline double cross_entropy(const std::array<double, 2>& logits, int label) {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return lse - logits[static_cast<std::size_t>(label)];
}

inline LossAndGrad loss_and_grad(const MlpModel& model, std::span<const double> input, int label) {
  if (label != 0 && label != 1) throw ValidationError("loss_and_grad: label must be 0 or 1");
  LossAndGrad out;
  out.forward = mlp_forward(model, input);
  out.loss = cross_entropy(out.forward.logits, label);

  const std::size_t n_layers = model.layers.size();
  out.grads.weight.resize(n_layers);
  out.grads.bias.resize(n_layers);
  Vector delta = {out.forward.probs[0], out.forward.probs[1]};
  delta[static_cast<std::size_t>(label)] -= 1.0;

  for (std::size_t l = n_layers; l-- > 0;) {
    const auto& layer = model.layers[l];
    const Vector& a_in = out.forward.activations[l];
    Matrix gw(layer.weight.rows(), layer.weight.cols());
    for (std::size_t i = 0; i < gw.rows(); ++i) {
      auto row = gw.row(i);
      for (std::size_t j = 0; j < gw.cols(); ++j) row[j] = delta[i] * a_in[j];
    }
    out.grads.weight[l] = std::move(gw);
    out.grads.bias[l] = delta;
    if (l == 0) break;
    Vector prev(layer.weight.cols(), 0.0);
    for (std::size_t i = 0; i < layer.weight.rows(); ++i) {
      const auto row = layer.weight.row(i);
      for (std::size_t j = 0; j < prev.size(); ++j) prev[j] += row[j] * delta[i];
    }
    for (std::size_t j = 0; j < prev.size(); ++j) prev[j] *= 1.0 - a_in[j] * a_in[j];
    delta = std::move(prev);
  }
  return out;
}

// v <- mu v - lr g; theta <- theta + v. Nothing is updated when any gradient
// is non-finite.
inline void sgd_momentum_step(MlpModel& model, const MlpGrads& grads, double lr, double mu) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("sgd: learning rate must be >= 0");
  if (!(mu >= 0.0 && mu < 1.0)) throw ValidationError("sgd: momentum must be in [0, 1)");
  if (grads.weight.size() != model.layers.size() || grads.bias.size() != model.layers.size()) {
    throw ValidationError("sgd: gradient layer count does not match model");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    if (grads.weight[l].rows() != model.layers[l].weight.rows() ||
        grads.weight[l].cols() != model.layers[l].weight.cols() ||
        grads.bias[l].size() != model.layers[l].bias.size()) {
      throw ValidationError("sgd: gradient shape mismatch at layer " + std::to_string(l));
    }
    if (!all_finite(grads.weight[l].data()) || !all_finite(grads.bias[l])) {
      throw NumericError("sgd: non-finite gradient at layer " + std::to_string(l));
    }
  }
  // Dry run first so an overflowing step leaves the model untouched.
  auto overflows = [lr, mu](const std::vector<double>& theta, const std::vector<double>& v,
                            const std::vector<double>& g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double nv = mu * v[i] - lr * g[i];
      if (!std::isfinite(nv) || !std::isfinite(theta[i] + nv)) return true;
    }
    return false;
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    if (overflows(layer.weight.data(), layer.weight_velocity.data(), grads.weight[l].data()) ||
        overflows(layer.bias, layer.bias_velocity, grads.bias[l])) {
      throw NumericError("sgd: update overflows at layer " + std::to_string(l));
    }
  }
  auto update = [lr, mu](std::vector<double>& theta, std::vector<double>& v, const std::vector<double>& g) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      v[i] = mu * v[i] - lr * g[i];
      theta[i] += v[i];
    }
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    update(layer.weight.data(), layer.weight_velocity.data(), grads.weight[l].data());
    update(layer.bias, layer.bias_velocity, grads.bias[l]);
  }
}

struct Prediction {
  int label = 0;
  std::array<double, 2> probs{};
};

// Ties go to label 0.
inline Prediction predict(const MlpModel& model, std::span<const double> input) {
  const auto r = mlp_forward(model, input);
  return {r.logits[1] > r.logits[0] ? 1 : 0, r.probs};
}

// Glorot-uniform weights, zero biases and velocities.
inline MlpModel init_mlp(const MlpConfig& cfg) {
  cfg.validate();
  MlpModel m = MlpModel::zeros(cfg.widths);
  std::mt19937_64 rng(cfg.seed);
  for (auto& layer : m.layers) {
    const double a = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& w : layer.weight.data()) w = dist(rng);
  }
  return m;
}

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<MetricsReport> validation;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  // 1-based epoch with the highest validation F1 (earliest on ties).
  std::optional<int> best_f1_epoch() const {
    std::optional<int> best;
    double best_f1 = -1.0;
    for (const auto& e : epochs) {
      if (e.validation && e.validation->f1 > best_f1) {
        best_f1 = e.validation->f1;
        best = e.epoch;
      }
    }
    return best;
  }
};

struct TrainOptions {
  std::span<const Vector> validation_inputs;
  std::span<const int> validation_labels;
  bool keep_checkpoints = false;
  std::function<void(const EpochRecord&, const MlpModel&)> on_epoch;
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
  std::vector<MlpModel> checkpoints;  // one per epoch when requested
};

inline std::vector<int> predict_labels(const MlpModel& model, std::span<const Vector> inputs) {
  std::vector<int> out;
  out.reserve(inputs.size());
  for (const auto& x : inputs) out.push_back(predict(model, x).label);
  return out;
}

inline TrainResult train(const MlpConfig& cfg, const SlotConfig& slots, std::span<const Vector> inputs,
                         std::span<const int> labels, const TrainOptions& options = {}) {
  cfg.validate();
  if (inputs.empty()) throw ValidationError("train: empty dataset");
  if (inputs.size() != labels.size()) {
    throw ValidationError("train: " + std::to_string(inputs.size()) + " inputs but " +
                          std::to_string(labels.size()) + " labels");
  }
  if (cfg.widths.front() != slots.input_dim()) {
    throw ValidationError("train: input width " + std::to_string(cfg.widths.front()) +
                          " does not match slot layout width " + std::to_string(slots.input_dim()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != slots.input_dim()) {
      throw ValidationError("train: input " + std::to_string(i) + " has wrong dimension");
    }
    if (labels[i] != 0 && labels[i] != 1) throw ValidationError("train: labels must be 0 or 1");
  }
  if (options.validation_inputs.size() != options.validation_labels.size()) {
    throw ValidationError("train: validation inputs and labels differ in length");
  }

  TrainResult result;
  result.model = init_mlp(cfg);
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k];
      const auto where = "epoch " + std::to_string(epoch) + ", example " + std::to_string(i);
      LossAndGrad step;
      try {
        step = loss_and_grad(result.model, inputs[i], labels[i]);
        if (!std::isfinite(step.loss)) throw NumericError("non-finite loss");
        sgd_momentum_step(result.model, step.grads, cfg.learning_rate, cfg.momentum);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at " + where + ": " + e.what());
      }
      loss_sum += step.loss;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_loss = loss_sum / static_cast<double>(inputs.size());
    const auto train_pred = predict_labels(result.model, inputs);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += train_pred[i] == labels[i];
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    if (!options.validation_inputs.empty()) {
      rec.validation = compute_metrics(predict_labels(result.model, options.validation_inputs),
                                       options.validation_labels);
    }
    result.history.epochs.push_back(rec);
    if (options.keep_checkpoints) result.checkpoints.push_back(result.model);
    if (options.on_epoch) options.on_epoch(rec, result.model);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints (tensor package, kind "mlp").

struct Checkpoint {
  MlpConfig mlp;
  SlotConfig slots;
  MlpModel model;
  int epoch = 0;
};

inline TensorPackage checkpoint_package(const Checkpoint& ck) {
  TensorPackage pkg;
  pkg.meta = {{"kind", "mlp"},
              {"epoch", ck.epoch},
              {"mlp",
               {{"widths", ck.model.widths()},
                {"learning_rate", ck.mlp.learning_rate},
                {"momentum", ck.mlp.momentum},
                {"epochs", ck.mlp.epochs},
                {"seed", ck.mlp.seed},
                {"shuffle", ck.mlp.shuffle},
                {"hidden_activation", "tanh"}}},
              {"slots",
               {{"max_slots", ck.slots.max_slots},
                {"feature_dim", ck.slots.feature_dim},
                {"include_whole_tweet", ck.slots.include_whole_tweet}}}};
  for (std::size_t l = 0; l < ck.model.layers.size(); ++l) {
    const auto& layer = ck.model.layers[l];
    const std::string p = "layer" + std::to_string(l);
    const std::vector<std::size_t> wshape = {layer.weight.rows(), layer.weight.cols()};
    pkg.add(p + ".weight", wshape, to_f32(layer.weight.data()));
    pkg.add(p + ".bias", {layer.bias.size()}, to_f32(layer.bias));
    pkg.add(p + ".weight_velocity", wshape, to_f32(layer.weight_velocity.data()));
    pkg.add(p + ".bias_velocity", {layer.bias_velocity.size()}, to_f32(layer.bias_velocity));
  }
  return pkg;
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
  write_package(checkpoint_package(ck), path);
}

inline Checkpoint checkpoint_from_package(const TensorPackage& pkg, const std::string& origin) {
  Checkpoint ck;
  try {
    if (pkg.meta.value("kind", "") != "mlp") throw ValidationError(origin + ": not a classifier checkpoint");
    ck.epoch = pkg.meta.value("epoch", 0);
    const auto& m = pkg.meta.at("mlp");
    ck.mlp.widths = m.at("widths").get<std::vector<std::size_t>>();
    ck.mlp.learning_rate = m.at("learning_rate").get<double>();
    ck.mlp.momentum = m.at("momentum").get<double>();
    ck.mlp.epochs = m.at("epochs").get<int>();
    ck.mlp.seed = m.at("seed").get<std::uint64_t>();
    ck.mlp.shuffle = m.at("shuffle").get<bool>();
    const auto& s = pkg.meta.at("slots");
    ck.slots.max_slots = s.at("max_slots").get<std::size_t>();
    ck.slots.feature_dim = s.at("feature_dim").get<std::size_t>();
    ck.slots.include_whole_tweet = s.at("include_whole_tweet").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": bad checkpoint manifest: " + e.what());
  }
  ck.mlp.validate();
  if (ck.mlp.widths.front() != ck.slots.input_dim()) {
    throw ValidationError(origin + ": input width does not match slot layout");
  }
  ck.model = MlpModel::zeros(ck.mlp.widths);
  for (std::size_t l = 0; l < ck.model.layers.size(); ++l) {
    auto& layer = ck.model.layers[l];
    const std::string p = "layer" + std::to_string(l);
    const std::vector<std::size_t> wshape = {layer.weight.rows(), layer.weight.cols()};
    auto load = [&](const std::string& name, const std::vector<std::size_t>& shape, std::vector<double>& dst) {
      const auto& t = pkg.get(name);
      expect_shape(t, shape, origin);
      std::copy(t.values.begin(), t.values.end(), dst.begin());
    };
    load(p + ".weight", wshape, layer.weight.data());
    load(p + ".bias", {layer.bias.size()}, layer.bias);
    load(p + ".weight_velocity", wshape, layer.weight_velocity.data());
    load(p + ".bias_velocity", {layer.bias_velocity.size()}, layer.bias_velocity);
  }
  return ck;
}

inline Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_package(read_package(path), path);
}

}  // namespace irony
