/*
   Copyright 2026 The aniso-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <string>
#include <vector>

namespace aniso::lab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// "PASS name: detail" / "FAIL name: detail"
std::string check_line(const CheckResult& c);

/// CSV text with a fixed header. Cells are written as given; numbers should
/// come from format_number so they carry 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  // Header line plus one line per row, LF endings. Empty tables give the header only.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Output directory of one run. Every file written through it is checksummed
/// for the manifest.
class OutputDir {
 public:
  // Creates the directory (and parents). Throws std::runtime_error when it
  // cannot be created or written.
  explicit OutputDir(std::string path);

  const std::string& path() const { return path_; }
  void write(const std::string& name, const std::string& content);
  void write_csv(const std::string& name, const CsvTable& table) { write(name, table.str()); }
  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::string path_;
  std::vector<OutputFile> files_;
};

std::string sha256_hex(const std::string& data);

struct RunManifest {
  std::string config_json;  // resolved config
  std::string version;
  std::string experiment;
  unsigned long long seed = 0;
  std::vector<OutputFile> files;
  double duration_seconds = 0.0;
  bool partial = false;
  std::string error;
  std::vector<std::string> warnings;
  std::vector<CheckResult> checks;
};

std::string manifest_to_json(const RunManifest& m);

}  // namespace aniso::lab
