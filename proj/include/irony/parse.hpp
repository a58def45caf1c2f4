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

// Multi-rooted dependency forests and their split into per-root phrases.
//
// A forest is read from CoNLL-style blocks (index in column 1, form in
// column 2, head in column 7). head == 0 marks a root and head == -1 marks a
// token the parser left out of the tree (hashtags, URLs, emoticons...).

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "irony/corpus.hpp"
#include "irony/error.hpp"

namespace irony {

struct ParseToken {
  int index = 0;  // 1-based
  std::string form;
  int head = 0;  // -1 excluded, 0 root, else index of governor

  bool excluded() const { return head == -1; }
  bool is_root() const { return head == 0; }
  bool operator==(const ParseToken&) const = default;
};

struct ParseForest {
  std::vector<ParseToken> tokens;
  std::optional<std::uint64_t> text_id;
};

struct Phrase {
  std::vector<std::string> tokens;
  int root_index = 0;
  std::string text;

  bool operator==(const Phrase&) const = default;
};

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline Phrase make_phrase(std::vector<std::string> tokens, int root_index) {
  Phrase p;
  p.text = join_tokens(tokens);
  p.tokens = std::move(tokens);
  p.root_index = root_index;
  return p;
}

struct ForestIssue {
  int token = 0;  // 1-based position of the offending token
  std::string message;
};

// Checks index contiguity, head range, self-loops, and that every
// non-excluded token's head chain ends at a root.
inline std::optional<ForestIssue> check_forest(const ParseForest& forest) {
  const int n = static_cast<int>(forest.tokens.size());
  for (int i = 0; i < n; ++i) {
    const auto& tok = forest.tokens[i];
    if (tok.index != i + 1) {
      return ForestIssue{i + 1, "non-contiguous index " + std::to_string(tok.index)};
    }
    if (tok.head < -1 || tok.head > n) {
      return ForestIssue{i + 1, "head " + std::to_string(tok.head) + " out of range"};
    }
    if (tok.head == tok.index) return ForestIssue{i + 1, "head self-loop"};
  }
  // 0 = unvisited, 1 = on current path, 2 = resolved
  std::vector<char> state(n + 1, 0);
  for (int start = 1; start <= n; ++start) {
    if (forest.tokens[start - 1].excluded() || state[start] == 2) continue;
    std::vector<int> path;
    int cur = start;
    while (state[cur] != 2) {
      if (state[cur] == 1) return ForestIssue{cur, "cycle in head links"};
      state[cur] = 1;
      path.push_back(cur);
      const int head = forest.tokens[cur - 1].head;
      if (head == 0) break;
      if (forest.tokens[head - 1].excluded()) {
        return ForestIssue{cur, "attaches to excluded token " + std::to_string(head)};
      }
      cur = head;
    }
    for (int t : path) state[t] = 2;
  }
  return std::nullopt;
}

namespace detail {

inline std::optional<std::uint64_t> parse_id_comment(std::string_view line) {
  // "# id = N"
  line.remove_prefix(1);
  line = trim(line);
  if (!line.starts_with("id")) return std::nullopt;
  line.remove_prefix(2);
  line = trim(line);
  if (!line.starts_with("=")) return std::nullopt;
  line.remove_prefix(1);
  return parse_int<std::uint64_t>(line);
}

}  // namespace detail

inline std::vector<ParseForest> read_conll(std::istream& in) {
  std::vector<ParseForest> forests;
  ParseForest current;
  std::vector<std::size_t> token_lines;
  std::size_t block_no = 0;
  std::size_t line_no = 0;
  std::optional<std::uint64_t> pending_id;
  bool in_block = false;

  auto fail = [&](const std::string& what, std::size_t line) -> void {
    throw ValidationError("conll block " + std::to_string(block_no) + ", line " +
                          std::to_string(line) + ": " + what);
  };

  auto finish_block = [&]() {
    if (current.tokens.empty()) return;
    if (const auto issue = check_forest(current)) {
      fail("token " + std::to_string(issue->token) + ": " + issue->message,
           token_lines[static_cast<std::size_t>(issue->token) - 1]);
    }
    forests.push_back(std::move(current));
    current = ParseForest{};
    token_lines.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (detail::trim(line).empty()) {
      finish_block();
      in_block = false;
      continue;
    }
    if (!in_block) {
      in_block = true;
      ++block_no;
    }
    if (line.front() == '#') {
      if (auto id = detail::parse_id_comment(line)) {
        if (!current.tokens.empty()) fail("id comment inside a block", line_no);
        pending_id = id;
      }
      continue;
    }
    const auto fields = detail::split_tabs(line);
    if (fields.size() < 8) {
      fail("expected at least 8 tab-separated columns, found " + std::to_string(fields.size()), line_no);
    }
    const auto index = detail::parse_int<int>(fields[0]);
    const auto head = detail::parse_int<int>(fields[6]);
    if (!index) fail("index column is not an integer", line_no);
    if (!head) fail("head column is not an integer", line_no);
    if (current.tokens.empty()) {
      current.text_id = pending_id;
      pending_id.reset();
    }
    current.tokens.push_back({*index, std::string(fields[1]), *head});
    token_lines.push_back(line_no);
  }
  finish_block();
  return forests;
}

// One phrase per root, in root-index order; each phrase holds the root and
// every token whose head chain reaches it, in sentence order.
inline std::vector<Phrase> group_phrases(const ParseForest& forest) {
  if (const auto issue = check_forest(forest)) {
    throw ValidationError("invalid forest: token " + std::to_string(issue->token) + ": " + issue->message);
  }
  const int n = static_cast<int>(forest.tokens.size());
  std::vector<int> root_of(n + 1, -1);
  for (int i = 1; i <= n; ++i) {
    if (forest.tokens[i - 1].excluded()) continue;
    int cur = i;
    std::vector<int> path;
    while (root_of[cur] < 0 && forest.tokens[cur - 1].head != 0) {
      path.push_back(cur);
      cur = forest.tokens[cur - 1].head;
    }
    const int root = root_of[cur] >= 0 ? root_of[cur] : cur;
    root_of[cur] = root;
    for (int t : path) root_of[t] = root;
  }

  std::vector<Phrase> phrases;
  std::unordered_map<int, std::size_t> slot;
  for (int i = 1; i <= n; ++i) {
    if (forest.tokens[i - 1].is_root()) {
      slot[i] = phrases.size();
      phrases.push_back(Phrase{{}, i, {}});
    }
  }
  for (int i = 1; i <= n; ++i) {
    if (root_of[i] < 0) continue;
    phrases[slot.at(root_of[i])].tokens.push_back(forest.tokens[i - 1].form);
  }
  for (auto& p : phrases) p.text = join_tokens(p.tokens);
  return phrases;
}

// Non-excluded tokens in sentence order, as a single phrase.
inline Phrase filtered_sentence(const ParseForest& forest) {
  std::vector<std::string> tokens;
  for (const auto& t : forest.tokens) {
    if (!t.excluded()) tokens.push_back(t.form);
  }
  return make_phrase(std::move(tokens), 0);
}

// Pairs each record with its forest: by `# id = N` comments when every
// forest carries one, otherwise positionally.
inline std::vector<const ParseForest*> match_forests(const Dataset& dataset,
                                                     const std::vector<ParseForest>& forests) {
  std::size_t with_id = 0;
  for (const auto& f : forests) with_id += f.text_id.has_value();
  std::vector<const ParseForest*> out;
  out.reserve(dataset.size());

  if (with_id == 0) {
    if (forests.size() != dataset.size()) {
      throw ValidationError("parse count " + std::to_string(forests.size()) +
                            " does not match record count " + std::to_string(dataset.size()));
    }
    for (const auto& f : forests) out.push_back(&f);
    return out;
  }
  if (with_id != forests.size()) {
    throw ValidationError("parse file mixes blocks with and without id comments");
  }
  std::unordered_map<std::uint64_t, const ParseForest*> by_id;
  for (const auto& f : forests) {
    if (!by_id.emplace(*f.text_id, &f).second) {
      throw ValidationError("duplicate parse for id " + std::to_string(*f.text_id));
    }
  }
  for (const auto& r : dataset.records) {
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw ValidationError("no parse for id " + std::to_string(r.id));
    out.push_back(it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fallback segmentation for texts without a parse.

namespace detail {

inline bool is_url(std::string_view tok) {
  auto lower_starts = [&](std::string_view prefix) {
    if (tok.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      const char c = tok[i];
      const char l = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
      if (l != prefix[i]) return false;
    }
    return true;
  };
  return lower_starts("http://") || lower_starts("https://") || lower_starts("www.");
}

// Decodes UTF-8; invalid sequences yield U+FFFD and advance one byte.
inline std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline bool is_emoji_codepoint(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2300 && cp <= 0x23FF) || (cp >= 0x2B00 && cp <= 0x2BFF) ||
         cp == 0xFE0F || cp == 0x200D || (cp >= 0xE0020 && cp <= 0xE007F);
}

inline bool is_emoticon(std::string_view tok) {
  if (tok.empty()) return false;
  // Unicode emoji runs.
  const auto cps = decode_utf8(tok);
  bool all_emoji = true;
  for (char32_t cp : cps) all_emoji = all_emoji && is_emoji_codepoint(cp);
  if (all_emoji) return true;

  // ASCII faces: eyes [nose] mouth, or the mirrored form, or hearts.
  static constexpr std::string_view eyes = ":;=8xX";
  static constexpr std::string_view noses = "-o^'";
  static constexpr std::string_view mouths = ")(][dDpP/\\|*oO03$@}{<>";
  auto all_in = [](std::string_view s, std::string_view set) {
    if (s.empty()) return false;
    for (char c : s) {
      if (set.find(c) == std::string_view::npos) return false;
    }
    return true;
  };
  if (tok == "<3" || tok == "</3" || tok == "<33" || tok == "<333") return true;
  if (tok.size() >= 2 && eyes.find(tok.front()) != std::string_view::npos) {
    std::string_view rest = tok.substr(1);
    if (noses.find(rest.front()) != std::string_view::npos && rest.size() > 1) rest.remove_prefix(1);
    // Letter eyes only pair with a few mouths so words like "xo" survive.
    const bool letter_eyes = tok.front() == 'x' || tok.front() == 'X' || tok.front() == '8';
    if (all_in(rest, letter_eyes ? std::string_view("DP()") : mouths)) return true;
  }
  if (tok.size() >= 2 && eyes.find(tok.back()) != std::string_view::npos && tok.back() != 'x' &&
      tok.back() != 'X' && tok.back() != '8') {
    std::string_view rest = tok.substr(0, tok.size() - 1);
    if (noses.find(rest.back()) != std::string_view::npos && rest.size() > 1) rest.remove_suffix(1);
    if (all_in(rest, ")(][/\\|")) return true;
  }
  return false;
}

inline bool heuristic_excluded(std::string_view tok) {
  return tok.starts_with('#') || tok.starts_with('@') || is_url(tok) || is_emoticon(tok);
}

}  // namespace detail

// Splits at runs of sentence-final punctuation (. ! ? and U+2026) and at
// newlines, drops hashtags, mentions, URLs and emoticons, and whitespace
// tokenizes what is left. root_index is the 1-based position of the
// segment's first whitespace token in the original text.
inline std::vector<Phrase> heuristic_segment(std::string_view text) {
  static constexpr std::string_view ellipsis = "\xE2\x80\xA6";
  std::vector<Phrase> phrases;
  std::vector<std::string> seg;
  int seg_root = 0;
  int position = 0;

  auto close = [&]() {
    if (!seg.empty()) phrases.push_back(make_phrase(std::move(seg), seg_root));
    seg.clear();
  };
  auto emit = [&](std::string piece) {
    if (piece.empty()) return;
    if (seg.empty()) seg_root = position;
    seg.push_back(std::move(piece));
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      close();
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' &&
           text[j] != '\r' && text[j] != '\f' && text[j] != '\v') {
      ++j;
    }
    const std::string_view tok = text.substr(i, j - i);
    i = j;
    ++position;
    if (detail::heuristic_excluded(tok)) continue;

    std::string piece;
    for (std::size_t k = 0; k < tok.size();) {
      const bool dot = tok[k] == '.' || tok[k] == '!' || tok[k] == '?';
      const bool ell = tok.substr(k).starts_with(ellipsis);
      if (dot || ell) {
        emit(std::move(piece));
        piece.clear();
        close();
        k += ell ? ellipsis.size() : 1;
      } else {
        piece.push_back(tok[k]);
        ++k;
      }
    }
    emit(std::move(piece));
  }
  close();
  return phrases;
}

}  // namespace irony
