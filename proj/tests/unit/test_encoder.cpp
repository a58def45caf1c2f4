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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "irony/encoder.hpp"
#include "oracles/encoder_oracle.hpp"

namespace irony {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("irony_enc_" + name)).string();
}

Phrase phrase(const std::string& text) { return make_phrase(whitespace_split(text), 1); }

double max_relative_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), 1e-300}));
  }
  return worst;
}

TEST(VocabTest, BuildOrdersByFrequencyThenLexicographic) {
  const std::vector<Phrase> corpus = {phrase("a a b")};
  const auto v = build_vocab(corpus, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"<pad>", "<unk>", "a", "b"}));
  EXPECT_EQ(build_vocab(corpus, 2).tokens(), (std::vector<std::string>{"<pad>", "<unk>", "a"}));
  EXPECT_EQ(build_vocab(std::vector<Phrase>{}, 1).size(), 2u);

  const std::vector<Phrase> mixed = {phrase("Zed apple zed"), phrase("APPLE mango")};
  EXPECT_EQ(build_vocab(mixed).tokens(), (std::vector<std::string>{"<pad>", "<unk>", "apple", "zed", "mango"}));
}

TEST(VocabTest, EncodeLowercasesAndMapsUnknown) {
  const Vocab v({"love", "rain"});
  EXPECT_EQ(encode_tokens(v, phrase("Love RAIN")), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(encode_tokens(v, phrase("xyzzy")), (std::vector<std::size_t>{kUnkId}));
  EXPECT_THROW(encode_tokens(v, make_phrase({}, 0)), ValidationError);
  EXPECT_THROW(Vocab({"a", "a"}), ValidationError);
  EXPECT_THROW(Vocab::from_token_list({"a", "b"}), ValidationError);
}

TEST(EncoderConfigTest, FeatureWidth) {
  EXPECT_EQ((EncoderConfig{256, 512}.feature_dim()), 2304u);
  EXPECT_EQ((EncoderConfig{2, 2}.feature_dim()), 10u);
}

TEST(EncoderForwardTest, SingleTokenReturnsItsSkipFeature) {
  const EncoderConfig cfg{3, 2};
  const auto params = random_encoder_params(cfg, 6, 11);
  const std::vector<std::size_t> ids = {4};
  const auto trace = encoder_forward_trace(params, ids);
  ASSERT_EQ(trace.attention_weights.size(), 1u);
  EXPECT_EQ(trace.attention_weights[0], 1.0);
  EXPECT_EQ(trace.output.values, trace.features[0]);
}

TEST(EncoderForwardTest, ZeroParamsGiveZeroVector) {
  const EncoderConfig cfg{4, 3};
  const auto params = zero_encoder_params(cfg, 5);
  const std::vector<std::size_t> ids = {1, 2, 3, 0};
  EXPECT_EQ(encoder_forward(params, ids).values, Vector(cfg.feature_dim(), 0.0));
}

TEST(EncoderForwardTest, RejectsBadIds) {
  const auto params = random_encoder_params({2, 2}, 4, 1);
  EXPECT_THROW(encoder_forward(params, std::vector<std::size_t>{}), ValidationError);
  EXPECT_THROW(encoder_forward(params, std::vector<std::size_t>{1, 4}), ValidationError);
}

TEST(EncoderForwardTest, NonFiniteParamsAreReported) {
  auto params = random_encoder_params({2, 2}, 4, 1);
  params.attention[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(encoder_forward(params, std::vector<std::size_t>{2, 3}), NumericError);
}

TEST(EncoderForwardTest, MatchesIndependentOracle) {
  std::mt19937_64 rng(5);
  const EncoderConfig cfg{2, 2};
  std::uniform_int_distribution<std::size_t> len(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    // Larger scale than the default init so gates leave their linear range.
    const auto params = random_encoder_params(cfg, 9, 1000 + trial, 1.5);
    std::uniform_int_distribution<std::size_t> tok(0, 8);
    std::vector<std::size_t> ids(len(rng));
    for (auto& id : ids) id = tok(rng);
    const auto got = encoder_forward_trace(params, ids);
    const auto want = oracle::encode(params, ids);
    ASSERT_EQ(got.output.size(), cfg.feature_dim());
    EXPECT_LT(max_relative_diff(got.output.values, want.output), 1e-10) << "trial " << trial;
    EXPECT_LT(max_relative_diff(got.attention_weights, want.alphas), 1e-10) << "trial " << trial;
  }
}

TEST(EncoderForwardTest, AttentionIsADistribution) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto params = random_encoder_params({3, 4}, 12, trial, 2.0);
    std::vector<std::size_t> ids(1 + trial % 9);
    for (auto& id : ids) id = rng() % 12;
    const auto trace = encoder_forward_trace(params, ids);
    double sum = 0.0;
    for (double a : trace.attention_weights) {
      EXPECT_GE(a, 0.0);
      sum += a;
    }
    EXPECT_LT(std::abs(sum - 1.0), 1e-9);
    EXPECT_EQ(trace.output.size(), 3u + 4u * 4u);
  }
}

TEST(EncoderForwardTest, VocabularyPermutationInvariance) {
  const std::size_t V = 10;
  const auto params = random_encoder_params({3, 2}, V, 21);
  std::vector<std::size_t> perm(V);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  auto permuted = params;
  for (std::size_t old_id = 0; old_id < V; ++old_id) {
    for (std::size_t k = 0; k < 3; ++k) permuted.embedding(perm[old_id], k) = params.embedding(old_id, k);
  }
  const std::vector<std::size_t> ids = {3, 7, 1, 9, 3};
  std::vector<std::size_t> mapped;
  for (auto id : ids) mapped.push_back(perm[id]);
  EXPECT_EQ(encoder_forward(params, ids), encoder_forward(permuted, mapped));
}

TEST(EncoderForwardTest, Deterministic) {
  const auto params = random_encoder_params({4, 3}, 7, 2);
  const std::vector<std::size_t> ids = {1, 2, 3, 4, 5, 6};
  EXPECT_EQ(encoder_forward(params, ids), encoder_forward(params, ids));
}

TEST(EncoderPackageTest, RoundTripIsBitwiseAndDeterministic) {
  const EncoderConfig cfg{3, 2};
  const Vocab vocab({"so", "fun", "not"});
  const auto params = random_encoder_params(cfg, vocab.size(), 77);
  const auto a = temp_path("a.bin"), b = temp_path("b.bin");
  save_encoder(cfg, params, vocab, a);
  save_encoder(cfg, params, vocab, b);
  EXPECT_EQ(read_file_bytes(a), read_file_bytes(b));

  const auto loaded = load_encoder(a);
  EXPECT_EQ(loaded.config, cfg);
  EXPECT_EQ(loaded.vocab, vocab);
  EXPECT_TRUE(loaded.params == params);
}

TEST(EncoderPackageTest, RejectsUnwritablePath) {
  const Vocab vocab;
  EXPECT_THROW(save_encoder({2, 2}, random_encoder_params({2, 2}, 2, 1), vocab, "/nonexistent-dir/e.bin"),
               ValidationError);
}

TEST(EncoderPackageTest, ShapeMismatchNamesTensor) {
  const EncoderConfig cfg{2, 2};
  const Vocab vocab({"a", "b", "c", "d", "e", "f", "g", "h"});  // V = 10
  const auto params = random_encoder_params(cfg, vocab.size(), 3);
  auto pkg = read_package([&] {
    const auto p = temp_path("shape.bin");
    save_encoder(cfg, params, vocab, p);
    return p;
  }());
  for (auto& t : pkg.tensors) {
    if (t.name == "embedding") {
      t.shape = {9, 2};
      t.values.resize(18);
    }
  }
  try {
    encoder_from_package(pkg, "pkg");
    FAIL() << "expected a shape error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("shape mismatch for tensor 'embedding'"), std::string::npos) << e.what();
  }
  auto missing = pkg;
  missing.tensors.erase(missing.tensors.begin() + 1);
  EXPECT_THROW(encoder_from_package(missing, "pkg"), ValidationError);
}

TEST(EncoderPackageTest, TruncatedPayloadIsCorrupt) {
  const auto path = temp_path("trunc.bin");
  save_encoder({2, 2}, random_encoder_params({2, 2}, 4, 9), Vocab({"x", "y"}), path);
  auto bytes = read_file_bytes(path);
  bytes.resize(bytes.size() - 6);
  try {
    parse_package(bytes, "trunc");
    FAIL() << "expected a corrupt-payload error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("corrupt payload: tensor 'attention'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_package(bytes.substr(0, 5), "tiny"), ValidationError);
  EXPECT_THROW(parse_package(bytes.substr(0, 40), "short-manifest"), ValidationError);
}

TEST(EmbeddingTableTest, ExactMatchLookup) {
  EmbeddingTable table(3);
  table.insert("so fun", PhraseVector{{0.5, -1.0, 2.0}});
  EXPECT_EQ(lookup_precomputed(table, phrase("so fun")).values, (Vector{0.5, -1.0, 2.0}));
  try {
    lookup_precomputed(table, phrase("so fun!"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("so fun!"), std::string::npos);
  }
  EXPECT_THROW(lookup_precomputed(EmbeddingTable(3), phrase("anything")), ValidationError);
  EXPECT_THROW(table.insert("short", PhraseVector{{1.0}}), ValidationError);
}

TEST(EmbeddingTableTest, TextRoundTripIsExact) {
  EmbeddingTable table(2);
  table.insert("b phrase", PhraseVector{{0.1, 1.0 / 3.0}});
  table.insert("a", PhraseVector{{-2.5e-8, 123456.789}});
  std::ostringstream out;
  write_embedding_table(table, out);
  EXPECT_TRUE(out.str().starts_with("#dim=2\na\t"));
  std::istringstream in(out.str());
  const auto back = read_embedding_table(in);
  EXPECT_EQ(back.entries(), table.entries());
}

TEST(EmbeddingTableTest, RejectsMalformedFiles) {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_embedding_table(in);
  };
  EXPECT_THROW(read(""), ValidationError);
  EXPECT_THROW(read("dim=2\n"), ValidationError);
  EXPECT_THROW(read("#dim=2\nx\t1\n"), ValidationError);
  EXPECT_THROW(read("#dim=2\nx\t1 nan\n"), ValidationError);
  EXPECT_THROW(read("#dim=2\nx\t1 2\nx\t3 4\n"), ValidationError);
  EXPECT_EQ(read("#dim=2\r\nx y\t1 2\r\n").size(), 1u);
}

}  // namespace
}  // namespace irony
