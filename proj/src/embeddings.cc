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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "advspan/error.h"

namespace advspan::embeddings {

namespace {

struct Scored {
  std::size_t row;
  double similarity;
};

bool Before(const Scored& a, const Scored& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.row < b.row;
}

bool NearlyEqual(double a, double b) {
  return std::fabs(a - b) <= kTieTolerance * std::max(1.0, std::fabs(a));
}

// Sorted by Before; reorders runs of near-equal similarities by row.
void BreakTiesByRow(std::vector<Scored>& sorted) {
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() &&
           NearlyEqual(sorted[j - 1].similarity, sorted[j].similarity)) {
      ++j;
    }
    std::sort(sorted.begin() + i, sorted.begin() + j,
              [](const Scored& a, const Scored& b) { return a.row < b.row; });
    i = j;
  }
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::vector<std::string> words,
                               std::vector<std::vector<double>> vectors) {
  if (words.size() != vectors.size()) {
    throw std::invalid_argument("word and vector counts differ");
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i == 0) dimension_ = vectors[0].size();
    if (vectors[i].size() != dimension_ || dimension_ == 0) {
      throw std::invalid_argument("ragged embedding dimensions");
    }
    if (index_.count(words[i])) {
      ++duplicates_;
      continue;
    }
    index_.emplace(words[i], words_.size());
    words_.push_back(std::move(words[i]));
    double sq = 0.0;
    for (double v : vectors[i]) {
      matrix_.push_back(v);
      sq += v * v;
    }
    norms_.push_back(std::sqrt(sq));
  }
}

bool EmbeddingStore::Contains(std::string_view word) const {
  return IndexOf(word).has_value();
}

std::optional<std::size_t> EmbeddingStore::IndexOf(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingStore::Vector(std::size_t row) const {
  return std::span<const double>(matrix_).subspan(row * dimension_, dimension_);
}

std::vector<Neighbor> EmbeddingStore::NearestNeighbors(std::string_view word,
                                                       std::size_t k) const {
  const auto query = IndexOf(word);
  if (!query) throw OutOfVocabularyError(std::string(word));
  if (k == 0) return {};
  const double query_norm = norms_[*query];
  if (query_norm == 0.0) return {};

  const std::span<const double> q = Vector(*query);
  std::vector<Scored> scored;
  scored.reserve(size());
  for (std::size_t row = 0; row < size(); ++row) {
    if (row == *query || norms_[row] == 0.0) continue;
    const std::span<const double> v = Vector(row);
    double dot = 0.0;
    for (std::size_t d = 0; d < dimension_; ++d) dot += q[d] * v[d];
    const double sim = std::clamp(dot / (query_norm * norms_[row]), -1.0, 1.0);
    scored.push_back({row, sim});
  }

  if (scored.size() > k) {
    // Keep everything that could tie with the k-th best.
    std::nth_element(scored.begin(), scored.begin() + (k - 1), scored.end(), Before);
    const double cutoff = scored[k - 1].similarity - 1e-9;
    std::erase_if(scored, [&](const Scored& s) { return s.similarity < cutoff; });
  }
  std::sort(scored.begin(), scored.end(), Before);
  BreakTiesByRow(scored);
  if (scored.size() > k) scored.resize(k);

  std::vector<Neighbor> out;
  out.reserve(scored.size());
  for (const Scored& s : scored) out.push_back({words_[s.row], s.similarity});
  return out;
}

EmbeddingStore LoadEmbeddings(std::string_view bytes,
                              std::optional<std::size_t> max_vocab) {
  EmbeddingStore store;
  std::size_t line_number = 0;
  std::vector<double> values;
  while (!bytes.empty()) {
    if (max_vocab && store.size() >= *max_vocab) break;
    ++line_number;
    const std::size_t newline = bytes.find('\n');
    std::string_view line = bytes.substr(0, newline);
    bytes.remove_prefix(newline == std::string_view::npos ? bytes.size()
                                                          : newline + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty()) continue;

    const std::size_t space = line.find(' ');
    if (space == std::string_view::npos || space == 0) {
      throw ParseError("expected a word followed by a vector", line_number,
                       ParseError::Unit::kLine);
    }
    const std::string_view word = line.substr(0, space);
    values.clear();
    const char* p = line.data() + space;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto result = std::from_chars(p, end, v);
      if (result.ec != std::errc() || (result.ptr < end && *result.ptr != ' ')) {
        throw ParseError("malformed vector component", line_number,
                         ParseError::Unit::kLine);
      }
      values.push_back(v);
      p = result.ptr;
    }
    if (values.empty()) {
      throw ParseError("empty vector", line_number, ParseError::Unit::kLine);
    }
    if (store.dimension_ == 0) store.dimension_ = values.size();
    if (values.size() != store.dimension_) {
      throw ParseError("vector has dimension " + std::to_string(values.size()) +
                           ", expected " + std::to_string(store.dimension_),
                       line_number, ParseError::Unit::kLine);
    }
    std::string key(word);
    if (store.index_.count(key)) {
      ++store.duplicates_;
      continue;
    }
    store.index_.emplace(key, store.words_.size());
    store.words_.push_back(std::move(key));
    double sq = 0.0;
    for (double v : values) {
      store.matrix_.push_back(v);
      sq += v * v;
    }
    store.norms_.push_back(std::sqrt(sq));
  }
  return store;
}

std::vector<Neighbor> NearestNeighbors(const EmbeddingStore& store,
                                       std::string_view word, std::size_t k) {
  return store.NearestNeighbors(word, k);
}

std::vector<Neighbor> NeighborCache::Get(const std::string& word) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;
  }
  std::vector<Neighbor> neighbors;
  if (store_.Contains(word)) neighbors = store_.NearestNeighbors(word, k_);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(word, std::move(neighbors)).first->second;
}

}  // namespace advspan::embeddings
