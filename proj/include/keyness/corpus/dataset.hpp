// Copyright 2026 The Keyness Authors
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

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyness/corpus/conllu.hpp"
#include "keyness/corpus/document.hpp"
#include "keyness/error.hpp"
#include "keyness/log.hpp"

namespace keyness {

enum class Split { train, test };

inline std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

struct Dataset {
  std::string name;
  std::string sublanguage = "unknown";
  Split split = Split::train;
  std::vector<Document> documents;
};

// Loads a dataset manifest:
//   {"name": ..., "sublanguage": ..., "split": "train"|"test",
//    "documents": [{"id": ..., "path": ..., "gold_keywords": [...]}]}
// Document paths are resolved relative to the manifest's directory. Every
// document takes the manifest's sublanguage.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest '" + manifest_path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": invalid JSON: " + e.what());
  }
  Dataset ds;
  try {
    ds.name = j.at("name").get<std::string>();
    ds.sublanguage = j.value("sublanguage", std::string("unknown"));
    const auto split = j.value("split", std::string("train"));
    if (split == "train") ds.split = Split::train;
    else if (split == "test") ds.split = Split::test;
    else throw DataError(manifest_path.string() + ": split must be 'train' or 'test'");
    if (!is_registered_sublanguage(ds.sublanguage)) {
      log::warn(manifest_path.string(), ": unknown sublanguage '", ds.sublanguage,
                "', using 'unknown'");
      ds.sublanguage = "unknown";
    }
    const auto base = manifest_path.parent_path();
    std::set<std::string> seen;
    for (const auto& entry : j.at("documents")) {
      const auto id = entry.at("id").get<std::string>();
      if (!seen.insert(id).second) {
        throw DataError(manifest_path.string() + ": duplicate document id '" + id + "'");
      }
      const auto rel = std::filesystem::path(entry.at("path").get<std::string>());
      const auto path = rel.is_absolute() ? rel : base / rel;
      if (!std::filesystem::exists(path)) {
        throw DataError(manifest_path.string() + ": missing document file '" + path.string() + "'");
      }
      Document doc = load_parsed_document(path, ds.sublanguage);
      doc.id = id;
      doc.gold_keywords = entry.value("gold_keywords", std::vector<std::string>{});
      ds.documents.push_back(std::move(doc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": malformed manifest: " + e.what());
  }
  return ds;
}

}  // namespace keyness
