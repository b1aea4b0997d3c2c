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

#ifndef ADVSPAN_IO_H_
#define ADVSPAN_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace advspan::io {

// Throws ConfigError if the file cannot be read.
std::string ReadFile(const std::filesystem::path& path);
// Creates parent directories. Throws Error on failure.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);

// RFC 4180 field quoting.
std::string CsvField(std::string_view field);
// Splits one CSV record; quoted fields may contain commas and doubled quotes
// but not newlines.
std::vector<std::string> SplitCsvLine(std::string_view line);

}  // namespace advspan::io

#endif  // ADVSPAN_IO_H_
