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

#include "ballfield/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ballfield/error.hpp"

namespace ballfield {
namespace {

void check_json(const Json& j, const std::string& where) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw NumericError("non-finite value in report at " + where);
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) check_json(it.value(), where + "/" + it.key());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_json(j[i], where + "/" + std::to_string(i));
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

Json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

const char* library_version() noexcept { return BALLFIELD_VERSION; }

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw DomainError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw NumericError("could not format a double");
  return std::string(buf, res.ptr);
}

void check_finite(const Report& report) {
  check_json(report.results, report.kind + "/results");
  check_json(report.config, report.kind + "/config");
  if (report.table) {
    for (std::size_t r = 0; r < report.table->rows.size(); ++r) {
      const auto& row = report.table->rows[r];
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (const auto* d = std::get_if<double>(&row[c]); d && !std::isfinite(*d)) {
          std::ostringstream msg;
          msg << "non-finite value in report " << report.kind << " at row " << r << ", column "
              << (c < report.table->columns.size() ? report.table->columns[c] : std::to_string(c));
          throw NumericError(msg.str());
        }
      }
    }
  }
}

std::string render_report(const Report& report, Format format) {
  if (format == Format::json) {
    Json j = Json::object();
    j["kind"] = report.kind;
    j["version"] = library_version();
    j["seed"] = report.seed;
    j["config"] = report.config;
    j["results"] = report.results;
    if (report.table) {
      Json rows = Json::array();
      for (const auto& row : report.table->rows) {
        Json r = Json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
      }
      j["table"] = {{"columns", report.table->columns}, {"rows", std::move(rows)}};
    }
    return j.dump(2) + "\n";
  }
  if (!report.table) throw DomainError("report '" + report.kind + "' has no table for CSV output");
  std::string out;
  out += "# kind: " + report.kind + "\n";
  out += "# version: " + std::string(library_version()) + "\n";
  out += "# seed: " + std::to_string(report.seed) + "\n";
  out += "# config: " + report.config.dump() + "\n";
  const auto& t = *report.table;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_escape(t.columns[c]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw DomainError("table row length differs from header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += render_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

void emit_report(const Report& report, Format format, const std::string& path) {
  check_finite(report);
  const std::string text = render_report(report, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing report to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing report to '" + path + "'");
}

}  // namespace ballfield
