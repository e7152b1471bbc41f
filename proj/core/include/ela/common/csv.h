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

#ifndef ELA_COMMON_CSV_H_
#define ELA_COMMON_CSV_H_

#include <string>
#include <vector>

namespace ela {

// Minimal CSV for the library's own files: an optional leading "# ..."
// comment line, a header row, then data rows. Fields never contain commas,
// quotes or newlines; writing such a field is an error.
struct CsvTable {
  std::string comment;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws if absent.
  int Column(const std::string& name) const;
};

void WriteCsv(const std::string& path, const CsvTable& table);
CsvTable ReadCsv(const std::string& path);

// Shortest text that parses back to the same double.
std::string FormatDouble(double x);
double ParseDouble(const std::string& s);
long long ParseInt(const std::string& s);

}  // namespace ela

#endif  // ELA_COMMON_CSV_H_
