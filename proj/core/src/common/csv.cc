// Copyright 2026 The ELA Authors
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

#include "ela/common/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela {
namespace {

void CheckField(const std::string& field) {
  if (field.find_first_of(",\"\n\r") != std::string::npos) {
    Fail(fmt::format("CSV field '{}' contains a reserved character", field));
  }
}

std::vector<std::string> SplitRow(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int CsvTable::Column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  Fail(fmt::format("CSV has no column '{}'", name));
}

void WriteCsv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(fmt::format("cannot open '{}' for writing", path));
  if (!table.comment.empty()) {
    Check(table.comment.find('\n') == std::string::npos,
          "CSV comment must be a single line");
    out << "# " << table.comment << '\n';
  }
  auto write_row = [&](const std::vector<std::string>& row) {
    Check(row.size() == table.header.size(),
          fmt::format("CSV row has {} fields, header has {}", row.size(),
                      table.header.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      CheckField(row[i]);
      if (i > 0) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  if (!out) Fail(fmt::format("failed writing '{}'", path));
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(fmt::format("cannot open '{}'", path));
  CsvTable table;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header && line.rfind("#", 0) == 0) {
      table.comment = line.size() > 2 ? line.substr(2) : "";
      continue;
    }
    auto fields = SplitRow(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      Fail(fmt::format("{}:{}: expected {} fields, got {}", path, line_no,
                       table.header.size(), fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) Fail(fmt::format("'{}' has no CSV header", path));
  return table;
}

std::string FormatDouble(double x) { return fmt::format("{}", x); }

double ParseDouble(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    Fail(fmt::format("'{}' is not a number", s));
  }
  if (pos != s.size()) Fail(fmt::format("'{}' is not a number", s));
  return v;
}

long long ParseInt(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(fmt::format("'{}' is not an integer", s));
  }
  return v;
}

}  // namespace ela
