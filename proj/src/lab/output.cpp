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

#include "aniso/lab/output.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "json.hpp"

namespace aniso::lab {

std::string check_line(const CheckResult& c) {
  return std::string(c.pass ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : ": " + c.detail);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

OutputDir::OutputDir(std::string path) : path_(std::move(path)) {
  std::error_code ec;
  std::filesystem::create_directories(path_, ec);
  if (ec || !std::filesystem::is_directory(path_)) {
    throw std::runtime_error("output: cannot create directory '" + path_ + "'" +
                             (ec ? ": " + ec.message() : std::string()));
  }
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const std::filesystem::path p = std::filesystem::path(path_) / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("output: cannot write '" + p.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("output: write failed for '" + p.string() + "'");
  for (OutputFile& f : files_) {
    if (f.name == name) {
      f.sha256 = sha256_hex(content);
      f.bytes = content.size();
      return;
    }
  }
  files_.push_back({name, sha256_hex(content), content.size()});
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256_hex: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "aniso-lab";
  j["version"] = m.version;
  j["experiment"] = m.experiment;
  j["seed"] = m.seed;
  j["config"] = nlohmann::ordered_json::parse(m.config_json);
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const OutputFile& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = files;
  j["duration_seconds"] = m.duration_seconds;
  j["partial"] = m.partial;
  if (!m.error.empty()) j["error"] = m.error;
  j["warnings"] = m.warnings;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckResult& c : m.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

}  // namespace aniso::lab
