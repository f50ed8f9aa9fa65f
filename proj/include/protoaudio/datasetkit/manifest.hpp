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

// Manifest files are UTF-8 text, one clip per line:
//
//   <clip-path> TAB <label>[,<label>...]
//
// Paths are relative to the manifest's directory unless absolute. Blank lines
// and lines starting with '#' are ignored.

#ifndef PROTOAUDIO_DATASETKIT_MANIFEST_HPP_
#define PROTOAUDIO_DATASETKIT_MANIFEST_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace protoaudio::datasetkit {

struct ManifestEntry {
  std::string path;
  std::vector<std::string> labels;  // sorted, unique, non-empty
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, std::size_t> class_index;  // class-id -> rank in sorted order
  std::filesystem::path base_dir;

  std::size_t size() const { return entries.size(); }
  bool single_label() const;
  std::vector<std::string> classes() const;
  std::string ResolvePath(const ManifestEntry& e) const;
  // Rebuilds class_index from the entries.
  void Reindex();
};

Manifest ParseManifest(std::istream& in, const std::filesystem::path& base_dir);
Manifest LoadManifest(const std::string& path);
// Paths are written as stored; labels comma-joined.
void WriteManifest(const std::string& path, const Manifest& m);

}  // namespace protoaudio::datasetkit

#endif  // PROTOAUDIO_DATASETKIT_MANIFEST_HPP_
