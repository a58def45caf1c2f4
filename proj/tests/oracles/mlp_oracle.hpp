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

// Reference forward pass written as chained explicit matrix products, a
// central finite-difference gradient built on it, and the separable
// synthetic training set used by the overfit checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "irony/classifier.hpp"

namespace oracle {

struct MlpOracleOutput {
  double logit0 = 0.0;
  double logit1 = 0.0;
};

inline MlpOracleOutput mlp_logits(const irony::MlpModel& m, const std::vector<double>& input) {
  std::vector<double> a = input;
  const std::size_t L = m.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = m.layers[l].weight;
    std::vector<double> z(W.rows());
    for (std::size_t i = 0; i < W.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < W.cols(); ++j) s += W(i, j) * a[j];
      z[i] = s + m.layers[l].bias[i];
    }
    if (l + 1 < L) {
      for (double& v : z) v = std::tanh(v);
    }
    a = z;
  }
  return {a[0], a[1]};
}

inline double mlp_loss(const irony::MlpModel& m, const std::vector<double>& input, int label) {
  const auto out = mlp_logits(m, input);
  const double p1 = 1.0 / (1.0 + std::exp(out.logit0 - out.logit1));
  return label == 1 ? -std::log(p1) : -std::log1p(-p1);
}

struct FiniteDiffGrads {
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> bias;
};

inline FiniteDiffGrads central_differences(irony::MlpModel m, const std::vector<double>& input, int label,
                                           double step = 1e-5) {
  FiniteDiffGrads g;
  auto probe = [&](double& theta) {
    const double saved = theta;
    theta = saved + step;
    const double up = mlp_loss(m, input, label);
    theta = saved - step;
    const double down = mlp_loss(m, input, label);
    theta = saved;
    return (up - down) / (2.0 * step);
  };
  for (auto& layer : m.layers) {
    g.weight.emplace_back();
    for (double& w : layer.weight.data()) g.weight.back().push_back(probe(w));
    g.bias.emplace_back();
    for (double& b : layer.bias) g.bias.back().push_back(probe(b));
  }
  return g;
}

// Relative error with a floor on the denominator so that two gradients that
// are both ~0 compare as equal.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct SyntheticSet {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
};

// 20 examples, 10 per class, D = 12, S = 3. Each class has a prototype per
// slot; an example uses 1..3 slots (the rest zero) with prototype + noise.
inline SyntheticSet separable_set(std::uint64_t seed = 7, std::size_t dim = 12, std::size_t slots = 3,
                                  std::size_t count = 20) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.15);
  std::uniform_int_distribution<std::size_t> used(1, slots);
  std::vector<std::vector<double>> proto(2, std::vector<double>(dim * slots));
  for (auto& p : proto) {
    for (double& v : p) v = unit(rng);
  }
  SyntheticSet s;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 2);
    const std::size_t k = used(rng);
    std::vector<double> x(dim * slots, 0.0);
    for (std::size_t j = 0; j < dim * k; ++j) x[j] = proto[label][j] + noise(rng);
    s.inputs.push_back(std::move(x));
    s.labels.push_back(label);
  }
  return s;
}

// True when every example lies strictly closer to its own class centroid
// than to the other one, which implies linear separability.
inline bool nearest_centroid_separable(const SyntheticSet& s) {
  const std::size_t d = s.inputs.front().size();
  std::vector<std::vector<double>> centroid(2, std::vector<double>(d, 0.0));
  std::vector<double> count(2, 0.0);
  for (std::size_t i = 0; i < s.inputs.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) centroid[s.labels[i]][j] += s.inputs[i][j];
    count[s.labels[i]] += 1.0;
  }
  for (int c = 0; c < 2; ++c) {
    for (double& v : centroid[c]) v /= count[c];
  }
  for (std::size_t i = 0; i < s.inputs.size(); ++i) {
    double dist[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = s.inputs[i][j] - centroid[c][j];
        dist[c] += diff * diff;
      }
    }
    if (!(dist[s.labels[i]] < dist[1 - s.labels[i]])) return false;
  }
  return true;
}

}  // namespace oracle
