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

#include "advspan/offset_map.h"

#include <algorithm>
#include <stdexcept>

namespace advspan::corpus {

namespace {

using text::Interval;

// Replacement length minus original length.
std::ptrdiff_t Delta(const Edit& e) {
  return static_cast<std::ptrdiff_t>(e.replacement_length) -
         static_cast<std::ptrdiff_t>(e.original.size());
}

std::size_t Shift(std::size_t pos, std::ptrdiff_t delta) {
  return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(pos) + delta);
}

}  // namespace

OffsetMap OffsetMap::FromEdits(std::size_t original_length,
                               std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    return a.original < b.original;
  });
  OffsetMap map(original_length);
  for (const Edit& e : edits) {
    if (e.original.begin > e.original.end || e.original.end > original_length) {
      throw std::invalid_argument("edit outside of the original text");
    }
    if (!map.edits_.empty()) {
      Edit& last = map.edits_.back();
      if (e.original.begin < last.original.end) {
        throw std::invalid_argument("overlapping edits");
      }
      if (e.original.empty() && last.original.empty() &&
          e.original.begin == last.original.begin) {
        last.replacement_length += e.replacement_length;
        continue;
      }
    }
    map.edits_.push_back(e);
  }
  return map;
}

std::size_t OffsetMap::rewritten_length() const {
  std::ptrdiff_t delta = 0;
  for (const Edit& e : edits_) delta += Delta(e);
  return Shift(original_length_, delta);
}

std::optional<Interval> OffsetMap::Map(const Interval& span) const {
  std::ptrdiff_t delta = 0;
  for (const Edit& e : edits_) {
    if (e.original.empty()) {
      const std::size_t p = e.original.begin;
      if (p <= span.begin) {
        delta += Delta(e);
        continue;
      }
      if (p < span.end) return std::nullopt;
      break;
    }
    if (e.original.end <= span.begin) {
      delta += Delta(e);
      continue;
    }
    if (e.original.begin >= span.end) break;
    return std::nullopt;
  }
  return Interval{Shift(span.begin, delta), Shift(span.end, delta)};
}

std::vector<Segment> OffsetMap::Segments() const {
  std::vector<Segment> out;
  std::size_t orig = 0;
  std::size_t rewritten = 0;
  for (const Edit& e : edits_) {
    if (e.original.begin > orig) {
      const std::size_t n = e.original.begin - orig;
      out.push_back({{orig, orig + n}, {rewritten, rewritten + n}, true});
      orig += n;
      rewritten += n;
    }
    out.push_back({e.original,
                   {rewritten, rewritten + e.replacement_length},
                   false});
    orig = e.original.end;
    rewritten += e.replacement_length;
  }
  if (orig < original_length_) {
    const std::size_t n = original_length_ - orig;
    out.push_back({{orig, original_length_}, {rewritten, rewritten + n}, true});
  }
  return out;
}

OffsetMap OffsetMap::Compose(const OffsetMap& first, const OffsetMap& second) {
  if (first.rewritten_length() != second.original_length()) {
    throw std::invalid_argument("offset maps do not chain");
  }

  // Unchanged pieces of the composition: overlaps, in the intermediate text,
  // of the identity segments of both maps.
  struct Piece {
    std::size_t original;
    std::size_t rewritten;
    std::size_t length;
  };
  std::vector<Segment> a;
  std::vector<Segment> b;
  for (const Segment& s : first.Segments()) {
    if (s.identity && !s.original.empty()) a.push_back(s);
  }
  for (const Segment& s : second.Segments()) {
    if (s.identity && !s.original.empty()) b.push_back(s);
  }
  std::vector<Piece> pieces;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const Interval& mid_a = a[i].rewritten;
    const Interval& mid_b = b[j].original;
    const std::size_t lo = std::max(mid_a.begin, mid_b.begin);
    const std::size_t hi = std::min(mid_a.end, mid_b.end);
    if (lo < hi) {
      const Piece piece{a[i].original.begin + (lo - mid_a.begin),
                        b[j].rewritten.begin + (lo - mid_b.begin), hi - lo};
      if (!pieces.empty() &&
          pieces.back().original + pieces.back().length == piece.original &&
          pieces.back().rewritten + pieces.back().length == piece.rewritten) {
        pieces.back().length += piece.length;
      } else {
        pieces.push_back(piece);
      }
    }
    if (mid_a.end <= mid_b.end) {
      ++i;
    } else {
      ++j;
    }
  }

  std::vector<Edit> edits;
  std::size_t original = 0;
  std::size_t rewritten = 0;
  auto gap = [&](std::size_t next_original, std::size_t next_rewritten) {
    if (next_original > original || next_rewritten > rewritten) {
      edits.push_back({{original, next_original}, next_rewritten - rewritten});
    }
  };
  for (const Piece& piece : pieces) {
    gap(piece.original, piece.rewritten);
    original = piece.original + piece.length;
    rewritten = piece.rewritten + piece.length;
  }
  gap(first.original_length_, second.rewritten_length());
  return FromEdits(first.original_length_, std::move(edits));
}

}  // namespace advspan::corpus
