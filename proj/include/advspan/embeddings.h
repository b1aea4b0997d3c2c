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

#ifndef ADVSPAN_EMBEDDINGS_H_
#define ADVSPAN_EMBEDDINGS_H_

// GLoVe-format word vectors with exact cosine nearest-neighbor queries.

#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace advspan::embeddings {

struct Neighbor {
  std::string word;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Similarities closer than this (relative to magnitude 1) are ties and are
// ordered by vocabulary position.
inline constexpr double kTieTolerance = 1e-12;

class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Builds a store from parallel word/vector lists. The first occurrence of a
  // duplicate word wins. Throws std::invalid_argument on ragged dimensions.
  EmbeddingStore(std::vector<std::string> words,
                 std::vector<std::vector<double>> vectors);

  std::size_t size() const { return words_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t duplicate_count() const { return duplicates_; }
  const std::vector<std::string>& vocabulary() const { return words_; }

  bool Contains(std::string_view word) const;
  std::optional<std::size_t> IndexOf(std::string_view word) const;
  std::span<const double> Vector(std::size_t row) const;

  // Top-k words by cosine similarity, excluding the query itself and
  // zero-norm rows, ties broken by vocabulary order. Throws
  // OutOfVocabularyError for unknown words.
  std::vector<Neighbor> NearestNeighbors(std::string_view word,
                                         std::size_t k) const;

 private:
  friend EmbeddingStore LoadEmbeddings(std::string_view, std::optional<std::size_t>);

  std::vector<std::string> words_;
  std::vector<double> matrix_;  // row-major, size() x dimension()
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
  std::size_t duplicates_ = 0;
};

// Parses GLoVe text format: one "word v1 v2 ... vd" entry per line, no header.
// Keeps the first `max_vocab` distinct words when given. Throws ParseError
// with the line number on ragged or non-numeric lines.
EmbeddingStore LoadEmbeddings(std::string_view bytes,
                              std::optional<std::size_t> max_vocab = std::nullopt);

std::vector<Neighbor> NearestNeighbors(const EmbeddingStore& store,
                                       std::string_view word, std::size_t k);

// Memoizes 1-nearest-neighbor lists per word. Safe for concurrent use.
class NeighborCache {
 public:
  explicit NeighborCache(const EmbeddingStore& store, std::size_t k = 4)
      : store_(store), k_(k) {}

  // Empty for out-of-vocabulary words.
  std::vector<Neighbor> Get(const std::string& word);

 private:
  const EmbeddingStore& store_;
  std::size_t k_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<Neighbor>> cache_;
};

}  // namespace advspan::embeddings

#endif  // ADVSPAN_EMBEDDINGS_H_
