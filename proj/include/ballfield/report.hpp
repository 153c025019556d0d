// Copyright 2026 The ballfield Authors
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

// Report rendering: CSV with '#' header comments, or JSON with sorted keys.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ballfield {

using Json = nlohmann::json;

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string kind;
  Json config = Json::object();  // resolved configuration echo
  std::uint64_t seed = 0;
  Json results = Json::object();
  std::optional<Table> table;
};

enum class Format { csv, json };

/// "csv" or "json"; throws DomainError otherwise.
Format parse_format(const std::string& name);

/// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double v);

/// Throws NumericError naming the first non-finite value.
void check_finite(const Report& report);

/// Full text of the report. CSV requires a table.
std::string render_report(const Report& report, Format format);

/// Writes the rendered report to `path` ("-" for standard output) after the
/// finiteness check. IO failures raise IoError with the path.
void emit_report(const Report& report, Format format, const std::string& path);

const char* library_version() noexcept;

}  // namespace ballfield
