// Copyright 2026 The protoaudio Authors.
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

#include "protoaudio/datasetkit/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "protoaudio/error.hpp"

namespace protoaudio::datasetkit {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool Manifest::single_label() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ManifestEntry& e) { return e.labels.size() == 1; });
}

std::vector<std::string> Manifest::classes() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : class_index) out.push_back(id);
  return out;
}

std::string Manifest::ResolvePath(const ManifestEntry& e) const {
  const std::filesystem::path p(e.path);
  return p.is_absolute() ? p.string() : (base_dir / p).string();
}

void Manifest::Reindex() {
  std::set<std::string> ids;
  for (const auto& e : entries) ids.insert(e.labels.begin(), e.labels.end());
  class_index.clear();
  for (const auto& id : ids) class_index.emplace(id, class_index.size());
}

Manifest ParseManifest(std::istream& in, const std::filesystem::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::unordered_map<std::string, int> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (Trim(raw).empty() || raw[0] == '#') continue;
    const auto tab = raw.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected TAB",
                  line_no);
    }
    ManifestEntry e;
    e.path = raw.substr(0, tab);
    if (e.path.empty()) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": empty path",
                  line_no);
    }
    const std::string label_field = Trim(raw.substr(tab + 1));
    if (label_field.empty()) {
      throw Error(ErrorKind::kEmptyLabelSet,
                  "line " + std::to_string(line_no) + ": no labels for " + e.path, line_no);
    }
    std::stringstream ss(label_field);
    std::string label;
    while (std::getline(ss, label, ',')) {
      label = Trim(label);
      if (label.empty() || label.find('\t') != std::string::npos) {
        throw Error(ErrorKind::kParse,
                    "line " + std::to_string(line_no) + ": malformed label list", line_no);
      }
      e.labels.push_back(label);
    }
    std::sort(e.labels.begin(), e.labels.end());
    e.labels.erase(std::unique(e.labels.begin(), e.labels.end()), e.labels.end());

    auto [it, inserted] = seen.emplace(e.path, line_no);
    if (!inserted) {
      throw Error(ErrorKind::kDuplicatePath,
                  "line " + std::to_string(line_no) + ": " + e.path +
                      " already listed on line " + std::to_string(it->second),
                  line_no);
    }
    m.entries.push_back(std::move(e));
  }
  m.Reindex();
  return m;
}

Manifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open manifest " + path);
  return ParseManifest(in, std::filesystem::absolute(path).parent_path());
}

void WriteManifest(const std::string& path, const Manifest& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path);
  for (const auto& e : m.entries) {
    out << e.path << '\t';
    for (std::size_t i = 0; i < e.labels.size(); ++i) out << (i ? "," : "") << e.labels[i];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing manifest " + path);
}

}  // namespace protoaudio::datasetkit
