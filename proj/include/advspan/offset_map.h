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

#ifndef ADVSPAN_OFFSET_MAP_H_
#define ADVSPAN_OFFSET_MAP_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "advspan/text.h"

namespace advspan::corpus {

// One rewritten region: `original` codepoints of the source text were
// replaced by `replacement_length` codepoints.
struct Edit {
  text::Interval original;
  std::size_t replacement_length = 0;

  bool operator==(const Edit&) const = default;
};

// A segment of the full covering form of an OffsetMap.
struct Segment {
  text::Interval original;
  text::Interval rewritten;
  // True when the text of the segment is unchanged.
  bool identity = true;

  bool operator==(const Segment&) const = default;
};

// Correspondence between codepoint offsets of an original text and a
// rewritten text.
//
// Stored as the sorted list of rewritten regions; everything between edits is
// copied verbatim. Edits never overlap. Zero-length originals are insertions,
// zero-length replacements are deletions.
class OffsetMap {
 public:
  OffsetMap() = default;
  // Identity over a text of `length` codepoints.
  explicit OffsetMap(std::size_t length) : original_length_(length) {}

  // Throws std::invalid_argument if edits overlap or exceed the text.
  static OffsetMap FromEdits(std::size_t original_length,
                             std::vector<Edit> edits);

  std::size_t original_length() const { return original_length_; }
  std::size_t rewritten_length() const;
  const std::vector<Edit>& edits() const { return edits_; }
  bool is_identity() const { return edits_.empty(); }

  // Image of an untouched interval. Returns nullopt when any rewritten region
  // overlaps `span` (insertions strictly inside count as overlap; insertions
  // at either endpoint do not and are placed before `span`).
  std::optional<text::Interval> Map(const text::Interval& span) const;

  // Covering segment list: sorted, non-overlapping, and jointly covering
  // [0, original_length()).
  std::vector<Segment> Segments() const;

  // Map from the original text of `first` to the rewritten text of
  // `second`, where `second` rewrites the output of `first`.
  static OffsetMap Compose(const OffsetMap& first, const OffsetMap& second);

  bool operator==(const OffsetMap&) const = default;

 private:
  std::size_t original_length_ = 0;
  std::vector<Edit> edits_;
};

}  // namespace advspan::corpus

#endif  // ADVSPAN_OFFSET_MAP_H_
