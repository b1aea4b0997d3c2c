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

#include "advspan/error.h"

namespace advspan {

namespace {

std::string Describe(const std::string& what, std::size_t location,
                     ParseError::Unit unit) {
  return what + (unit == ParseError::Unit::kByte ? " (at byte " : " (at line ") +
         std::to_string(location) + ")";
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t location, Unit unit)
    : ValidationError(Describe(what, location, unit)),
      location_(location),
      unit_(unit) {}

}  // namespace advspan
