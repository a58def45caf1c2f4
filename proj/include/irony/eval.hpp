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

// Binary classification metrics with the ironic class (label 1) as positive.

#include <cstdio>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "irony/error.hpp"

namespace irony {

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool undefined_ratio = false;

  std::size_t total() const { return tp + fp + fn + tn; }
};

// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

inline MetricsReport compute_metrics(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) {
    throw ValidationError("metrics: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(gold.size()) + " gold labels");
  }
  if (gold.empty()) throw ValidationError("metrics: no instances");
  MetricsReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] == 1;
    const bool g = gold[i] == 1;
    if (p && g) ++r.tp;
    else if (p) ++r.fp;
    else if (g) ++r.fn;
    else ++r.tn;
  }
  const auto ratio = [&r](std::size_t num, std::size_t den) {
    if (den == 0) {
      r.undefined_ratio = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(r.tp + r.tn, r.total());
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  if (r.precision + r.recall == 0.0) r.undefined_ratio = true;
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string render_text(const MetricsReport& r) {
  std::string out;
  out += "accuracy   " + fixed4(r.accuracy) + "\n";
  out += "precision  " + fixed4(r.precision) + "\n";
  out += "recall     " + fixed4(r.recall) + "\n";
  out += "f1         " + fixed4(r.f1) + "\n";
  out += "tp " + std::to_string(r.tp) + "  fp " + std::to_string(r.fp) + "  fn " +
         std::to_string(r.fn) + "  tn " + std::to_string(r.tn) + "\n";
  if (r.undefined_ratio) out += "warning: a ratio had a zero denominator and was reported as 0\n";
  return out;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall},
          {"f1", r.f1},             {"tp", r.tp},               {"fp", r.fp},
          {"fn", r.fn},             {"tn", r.tn},               {"instances", r.total()},
          {"undefined_ratio", r.undefined_ratio}};
}

}  // namespace irony
