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

// Ranks the term groups of one parsed document with a trained model.
//
//   extract_keywords <model-dir> <document.conllu> [top-k]
//
// The model directory holds identifier.model, ranker.model and stats.json,
// as written by `keyness build-stats`, `train-identifier` and `train-ranker`.

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "keyness/evalx.hpp"

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: " << argv[0] << " <model-dir> <document.conllu> [top-k]\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const std::size_t top_k = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 10;
  try {
    const auto identifier = keyness::nn::IdentifierModel::load(dir / "identifier.model");
    const auto ranker = keyness::nn::RankerModel::load(dir / "ranker.model");
    const auto stats = keyness::load_stats(dir / "stats.json");
    const auto doc = keyness::load_parsed_document(argv[2]);
    const keyness::LexicalEmbedder embedder;

    const auto groups = keyness::extract(doc, identifier, ranker, stats, embedder, top_k, 0.1);
    std::cout << doc.id << " (" << doc.sublanguage << ")\n";
    for (std::size_t i = 0; i < groups.size(); ++i) {
      std::cout << std::setw(3) << i + 1 << "  " << std::fixed << std::setprecision(3) << groups[i].score << "  ";
      for (std::size_t m = 0; m < groups[i].members.size(); ++m) {
        std::cout << (m ? ", " : "") << groups[i].members[m].key;
      }
      std::cout << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
