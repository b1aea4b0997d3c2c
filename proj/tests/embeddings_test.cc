// Copyright 2026 The advspan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advspan/embeddings.h"

#include <gtest/gtest.h>

#include "advspan/error.h"

namespace advspan::embeddings {
namespace {

constexpr char kVectors[] =
    "king 1 0 0\n"
    "queen 0.9 0.1 0\n"
    "prince 0.9 0.1 0\n"
    "apple 0 0 1\n"
    "zero 0 0 0\n"
    "king 5 5 5\n";

TEST(LoadEmbeddingsTest, FirstDuplicateWins) {
  const EmbeddingStore store = LoadEmbeddings(kVectors);
  EXPECT_EQ(store.size(), 5u);
  EXPECT_EQ(store.dimension(), 3u);
  EXPECT_EQ(store.duplicate_count(), 1u);
  EXPECT_EQ(store.Vector(*store.IndexOf("king"))[0], 1.0);
}

TEST(LoadEmbeddingsTest, MaxVocabTruncates) {
  const EmbeddingStore store = LoadEmbeddings(kVectors, 2);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_FALSE(store.Contains("prince"));
}

TEST(LoadEmbeddingsTest, RaggedLineReportsLineNumber) {
  try {
    LoadEmbeddings("a 1 2\nb 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 2u);
    EXPECT_EQ(e.unit(), ParseError::Unit::kLine);
  }
  EXPECT_THROW(LoadEmbeddings("a 1 x\n"), ParseError);
}

TEST(NearestNeighborsTest, OrdersBySimilarityThenVocabulary) {
  const EmbeddingStore store = LoadEmbeddings(kVectors);
  const auto n = store.NearestNeighbors("king", 3);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].word, "queen");
  EXPECT_EQ(n[1].word, "prince");
  EXPECT_DOUBLE_EQ(n[0].similarity, n[1].similarity);
  EXPECT_EQ(n[2].word, "apple");
  EXPECT_DOUBLE_EQ(n[2].similarity, 0.0);
}

TEST(NearestNeighborsTest, ExcludesQueryAndZeroRows) {
  const EmbeddingStore store = LoadEmbeddings(kVectors);
  for (const Neighbor& nb : store.NearestNeighbors("apple", 10)) {
    EXPECT_NE(nb.word, "apple");
    EXPECT_NE(nb.word, "zero");
  }
  EXPECT_TRUE(store.NearestNeighbors("zero", 3).empty());
}

TEST(NearestNeighborsTest, UnknownWordThrows) {
  const EmbeddingStore store = LoadEmbeddings(kVectors);
  EXPECT_THROW(store.NearestNeighbors("castle", 2), OutOfVocabularyError);
  NeighborCache cache(store, 2);
  EXPECT_TRUE(cache.Get("castle").empty());
  EXPECT_EQ(cache.Get("king").size(), 2u);
}

}  // namespace
}  // namespace advspan::embeddings
