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

#include <algorithm>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "irony/parse.hpp"
#include "oracles/phrase_oracle.hpp"

namespace irony {
namespace {

std::string conll_line(int index, const std::string& form, int head) {
  return std::to_string(index) + "\t" + form + "\t_\tN\tN\t_\t" + std::to_string(head) + "\t_\n";
}

ParseForest forest_of(const std::vector<std::pair<std::string, int>>& tokens) {
  ParseForest f;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    f.tokens.push_back({static_cast<int>(i) + 1, tokens[i].first, tokens[i].second});
  }
  return f;
}

std::vector<std::string> texts(const std::vector<Phrase>& phrases) {
  std::vector<std::string> out;
  for (const auto& p : phrases) out.push_back(p.text);
  return out;
}

TEST(ReadConllTest, SingleRootBlock) {
  std::istringstream in(conll_line(1, "so", 2) + conll_line(2, "fun", 0) + conll_line(3, "!", 2));
  const auto forests = read_conll(in);
  ASSERT_EQ(forests.size(), 1u);
  ASSERT_EQ(forests[0].tokens.size(), 3u);
  EXPECT_TRUE(forests[0].tokens[1].is_root());
  EXPECT_EQ(forests[0].tokens[0].form, "so");
  EXPECT_FALSE(forests[0].text_id.has_value());
}

TEST(ReadConllTest, BlankLinesSeparateBlocks) {
  std::istringstream in(conll_line(1, "a", 0) + "\n\n" + conll_line(1, "b", 0) + conll_line(2, "c", 1) + "\n");
  const auto forests = read_conll(in);
  ASSERT_EQ(forests.size(), 2u);
  EXPECT_EQ(forests[1].tokens.size(), 2u);
}

TEST(ReadConllTest, AcceptsTenColumnsCrlfAndIdComments) {
  std::istringstream in("# id = 42\r\n1\tyay\t_\t!\t!\t_\t0\tROOT\t_\t_\r\n\r\n# id = 7\n" + conll_line(1, "x", -1));
  const auto forests = read_conll(in);
  ASSERT_EQ(forests.size(), 2u);
  EXPECT_EQ(forests[0].text_id, 42u);
  EXPECT_EQ(forests[1].text_id, 7u);
  EXPECT_TRUE(forests[1].tokens[0].excluded());
}

TEST(ReadConllTest, ErrorsNameBlockAndLine) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_conll(in);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const auto out_of_range = message(conll_line(1, "a", 0) + "\n" + conll_line(1, "a", 5) + conll_line(2, "b", 0) +
                                    conll_line(3, "c", 2));
  EXPECT_NE(out_of_range.find("block 2"), std::string::npos) << out_of_range;
  EXPECT_NE(out_of_range.find("line 3"), std::string::npos) << out_of_range;
  EXPECT_NE(out_of_range.find("out of range"), std::string::npos) << out_of_range;

  EXPECT_NE(message(conll_line(1, "a", 0) + conll_line(3, "b", 1)).find("non-contiguous"), std::string::npos);
  EXPECT_NE(message(conll_line(1, "a", 1)).find("self-loop"), std::string::npos);
  EXPECT_NE(message(conll_line(1, "a", 2) + conll_line(2, "b", 1)).find("cycle"), std::string::npos);
  EXPECT_NE(message(conll_line(1, "a", 2) + conll_line(2, "#b", -1)).find("excluded"), std::string::npos);
  EXPECT_NE(message("1\ta\t_\t0\n").find("columns"), std::string::npos);
  EXPECT_NE(message("1\ta\t_\t_\t_\t_\tX\t_\n").find("head column"), std::string::npos);
}

TEST(GroupPhrasesTest, MultiRootWithExcludedToken) {
  const auto f = forest_of({{"I", 2}, {"love", 0}, {"rain", 2}, {"#not", -1}, {"yay", 0}});
  const auto phrases = group_phrases(f);
  EXPECT_EQ(texts(phrases), (std::vector<std::string>{"I love rain", "yay"}));
  EXPECT_EQ(phrases[0].root_index, 2);
  EXPECT_EQ(phrases[1].root_index, 5);
  EXPECT_EQ(phrases[0].tokens, (std::vector<std::string>{"I", "love", "rain"}));
}

TEST(GroupPhrasesTest, SingleRootIsFilteredSentence) {
  const auto f = forest_of({{"@bob", -1}, {"what", 4}, {"a", 4}, {"day", 0}, {"http://t.co", -1}});
  const auto phrases = group_phrases(f);
  ASSERT_EQ(phrases.size(), 1u);
  EXPECT_EQ(phrases[0].text, "what a day");
  EXPECT_EQ(filtered_sentence(f).text, "what a day");
}

TEST(GroupPhrasesTest, RejectsInvalidForest) {
  EXPECT_THROW(group_phrases(forest_of({{"a", 2}, {"b", 2}})), ValidationError);
  EXPECT_THROW(group_phrases(forest_of({{"a", 2}, {"b", 1}})), ValidationError);
}

TEST(GroupPhrasesTest, AllExcludedGivesNoPhrases) {
  EXPECT_TRUE(group_phrases(forest_of({{"#a", -1}, {":)", -1}})).empty());
}

TEST(GroupPhrasesTest, InterleavedTreesKeepSentenceOrder) {
  // Root 2 owns 1, 4; root 3 owns 5; 4 hangs off 1 (chain 4 -> 1 -> 2).
  const auto f = forest_of({{"a", 2}, {"B", 0}, {"C", 0}, {"d", 1}, {"e", 3}});
  EXPECT_EQ(texts(group_phrases(f)), (std::vector<std::string>{"a B d", "C e"}));
}

TEST(GroupPhrasesTest, MatchesBruteForceOracleOnRandomForests) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto f = oracle::random_forest(rng);
    ASSERT_FALSE(check_forest(f).has_value());
    const auto expected = oracle::brute_force_groups(f);
    const auto phrases = group_phrases(f);
    ASSERT_EQ(phrases.size(), expected.size());
    std::size_t roots = 0;
    for (const auto& t : f.tokens) roots += t.is_root();
    EXPECT_EQ(phrases.size(), roots);

    std::vector<int> seen(f.tokens.size() + 1, 0);
    for (std::size_t k = 0; k < phrases.size(); ++k) {
      std::vector<std::string> forms;
      for (int idx : expected[k]) {
        forms.push_back(f.tokens[idx - 1].form);
        ++seen[idx];
      }
      EXPECT_EQ(phrases[k].tokens, forms);
      const auto root = std::find_if(expected[k].begin(), expected[k].end(),
                                     [&](int idx) { return f.tokens[idx - 1].is_root(); });
      ASSERT_NE(root, expected[k].end());
      EXPECT_EQ(phrases[k].root_index, *root);
    }
    for (const auto& t : f.tokens) EXPECT_EQ(seen[t.index], t.excluded() ? 0 : 1);
  }
}

TEST(GroupPhrasesTest, ParallelEqualsSequential) {
  std::mt19937_64 rng(99);
  std::vector<ParseForest> forests;
  for (int i = 0; i < 200; ++i) forests.push_back(oracle::random_forest(rng));
  std::vector<std::vector<Phrase>> sequential, parallel(forests.size());
  for (const auto& f : forests) sequential.push_back(group_phrases(f));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < forests.size(); i += 4) parallel[i] = group_phrases(forests[i]);
      });
    }
  }
  EXPECT_EQ(sequential, parallel);
}

TEST(MatchForestsTest, PositionalAndById) {
  std::istringstream tsv("5\t1\ta\n6\t0\tb\n");
  const auto ds = read_dataset(tsv, true);
  std::vector<ParseForest> positional(2);
  EXPECT_EQ(match_forests(ds, positional)[1], &positional[1]);
  positional.pop_back();
  EXPECT_THROW(match_forests(ds, positional), ValidationError);

  std::vector<ParseForest> by_id(2);
  by_id[0].text_id = 6;
  by_id[1].text_id = 5;
  const auto m = match_forests(ds, by_id);
  EXPECT_EQ(m[0], &by_id[1]);
  EXPECT_EQ(m[1], &by_id[0]);
  by_id[1].text_id.reset();
  EXPECT_THROW(match_forests(ds, by_id), ValidationError);
}

TEST(HeuristicSegmentTest, SplitsOnSentencePunctuation) {
  const auto p = heuristic_segment("Great. Just great.");
  EXPECT_EQ(texts(p), (std::vector<std::string>{"Great", "Just great"}));
  EXPECT_EQ(p[0].root_index, 1);
  EXPECT_EQ(p[1].root_index, 2);
}

TEST(HeuristicSegmentTest, DropsExcludedTokenClasses) {
  EXPECT_EQ(texts(heuristic_segment("love this #not")), (std::vector<std::string>{"love this"}));
  EXPECT_EQ(texts(heuristic_segment("@jen thanks :) for nothing http://t.co/abc :-( www.x.org")),
            (std::vector<std::string>{"thanks for nothing"}));
  EXPECT_EQ(texts(heuristic_segment("so happy \xF0\x9F\x98\x82\xF0\x9F\x98\x82 xD")),
            (std::vector<std::string>{"so happy"}));
}

TEST(HeuristicSegmentTest, NewlinesEllipsisAndRuns) {
  EXPECT_EQ(texts(heuristic_segment("wow!!! nice\nreally\xE2\x80\xA6 sure?!")),
            (std::vector<std::string>{"wow", "nice", "really", "sure"}));
  EXPECT_EQ(texts(heuristic_segment("keep, commas here")), (std::vector<std::string>{"keep, commas here"}));
}

TEST(HeuristicSegmentTest, EmptyAndPunctuationOnly) {
  EXPECT_TRUE(heuristic_segment("").empty());
  EXPECT_TRUE(heuristic_segment("  ... !!! \n ").empty());
  EXPECT_TRUE(heuristic_segment("#only @tags").empty());
}

}  // namespace
}  // namespace irony
