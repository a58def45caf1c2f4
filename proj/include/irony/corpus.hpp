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

// Labeled-text datasets in the shared-task TSV layout:
//   labeled:   id<TAB>label<TAB>text
//   unlabeled: id<TAB>text
// An optional header line (first field not an integer) is skipped.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "irony/error.hpp"

namespace irony {

struct TweetRecord {
  std::uint64_t id = 0;
  std::string text;
  std::optional<int> label;  // 0 = non-ironic, 1 = ironic

  bool operator==(const TweetRecord&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<TweetRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  bool fully_labeled() const {
    for (const auto& r : records) {
      if (!r.label) return false;
    }
    return !records.empty();
  }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) {
      if (!r.label) throw ValidationError("dataset '" + name + "': labels required (record " +
                                          std::to_string(r.id) + " has none)");
      out.push_back(*r.label);
    }
    return out;
  }
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

template <typename Int>
inline std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int value{};
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, value);
  if (s.empty() || res.ec != std::errc{} || res.ptr != end) return std::nullopt;
  return value;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

inline Dataset read_dataset(std::istream& in, bool has_labels, std::string name = "dataset") {
  Dataset ds;
  ds.name = std::move(name);
  const std::size_t want_fields = has_labels ? 3 : 2;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  bool any_line = false;

  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty()) continue;
    any_line = true;
    const auto fields = detail::split_tabs(line);
    const auto where = " at line " + std::to_string(line_no) + " of " + ds.name;

    if (line_no == 1 && !detail::parse_int<std::uint64_t>(fields[0])) continue;  // header

    if (fields.size() != want_fields) {
      throw ValidationError("expected " + std::to_string(want_fields) + " tab-separated fields, found " +
                            std::to_string(fields.size()) + where);
    }
    TweetRecord rec;
    const auto id = detail::parse_int<std::uint64_t>(fields[0]);
    if (!id) throw ValidationError("id is not a non-negative integer" + where);
    rec.id = *id;
    if (has_labels) {
      const auto label = detail::parse_int<int>(fields[1]);
      if (!label || (*label != 0 && *label != 1)) {
        throw ValidationError("label not in {0,1}" + where);
      }
      rec.label = *label;
    }
    rec.text = std::string(fields.back());
    if (detail::trim(rec.text).empty()) throw ValidationError("empty text" + where);
    if (!seen.insert(rec.id).second) {
      throw ValidationError("duplicate id " + std::to_string(rec.id) + where);
    }
    ds.records.push_back(std::move(rec));
  }
  if (!any_line) throw ValidationError(ds.name + ": empty file");
  if (ds.records.empty()) throw ValidationError(ds.name + ": no data lines");
  return ds;
}

inline Dataset load_dataset(const std::string& path, bool has_labels) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path + "'");
  return read_dataset(in, has_labels, path);
}

// Decides labeled vs unlabeled from the field count of the first data line.
inline Dataset load_dataset_auto(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> labeled;
  while (!labeled && std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (line_no == 1 && !detail::parse_int<std::uint64_t>(fields[0])) continue;
    labeled = fields.size() >= 3;
  }
  if (!labeled) throw ValidationError(path + ": empty file");
  return load_dataset(path, *labeled);
}

inline void write_predictions(const Dataset& dataset, std::span<const int> labels,
                              std::ostream& out) {
  if (labels.size() != dataset.size()) {
    throw ValidationError("prediction count " + std::to_string(labels.size()) +
                          " does not match record count " + std::to_string(dataset.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << dataset.records[i].id << '\t' << labels[i] << '\n';
  }
}

inline void write_predictions(const Dataset& dataset, std::span<const int> labels,
                              const std::string& path) {
  if (labels.size() != dataset.size()) {
    throw ValidationError("prediction count " + std::to_string(labels.size()) +
                          " does not match record count " + std::to_string(dataset.size()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  write_predictions(dataset, labels, out);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace irony
