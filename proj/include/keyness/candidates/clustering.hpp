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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "keyness/candidates/candidates.hpp"
#include "keyness/candidates/embedding.hpp"
#include "keyness/error.hpp"
#include "keyness/log.hpp"

namespace keyness {

inline double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
}

// Agglomerative clustering with average linkage under cosine distance. Two
// clusters merge while their average distance is below `threshold`; the
// closest pair merges first, ties going to the lexicographically smallest
// pair of cluster keys (a cluster's key is its smallest member key). Returns
// clusters as sorted index lists, ordered by their smallest index.
//
// Average-linkage merges stay inside connected components of the graph
// "distance < threshold", so each component is clustered on its own.
inline std::vector<std::vector<std::size_t>> average_linkage_clusters(
    const std::vector<std::vector<double>>& vectors, double threshold,
    const std::vector<std::string>& keys) {
  const std::size_t n = vectors.size();
  if (keys.size() != n) throw Error("average_linkage_clusters: keys and vectors differ in size");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = cosine_distance(vectors[i], vectors[j]);
      if (dist[i][j] < threshold) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> components(n);
  for (std::size_t i = 0; i < n; ++i) components[find(i)].push_back(i);

  std::vector<std::vector<std::size_t>> result;
  for (auto& comp : components) {
    if (comp.empty()) continue;
    const std::size_t m = comp.size();
    std::vector<std::vector<std::size_t>> members(m);
    std::vector<std::string> ckey(m);
    std::vector<bool> alive(m, true);
    std::vector<std::vector<double>> d(m, std::vector<double>(m));
    for (std::size_t a = 0; a < m; ++a) {
      members[a] = {comp[a]};
      ckey[a] = keys[comp[a]];
      for (std::size_t b = 0; b < m; ++b) d[a][b] = dist[comp[a]][comp[b]];
    }
    for (std::size_t merges = 0; merges + 1 < m; ++merges) {
      std::optional<std::pair<std::size_t, std::size_t>> best;
      double best_d = 0.0;
      const auto pair_keys = [&](std::size_t a, std::size_t b) {
        return std::minmax(ckey[a], ckey[b]);
      };
      for (std::size_t a = 0; a < m; ++a) {
        if (!alive[a]) continue;
        for (std::size_t b = a + 1; b < m; ++b) {
          if (!alive[b]) continue;
          if (!best || d[a][b] < best_d ||
              (d[a][b] == best_d && pair_keys(a, b) < pair_keys(best->first, best->second))) {
            best = {a, b};
            best_d = d[a][b];
          }
        }
      }
      if (!best || best_d >= threshold) break;
      const auto [a, b] = *best;
      const double na = static_cast<double>(members[a].size());
      const double nb = static_cast<double>(members[b].size());
      for (std::size_t k = 0; k < m; ++k) {
        if (!alive[k] || k == a || k == b) continue;
        d[a][k] = d[k][a] = (na * d[a][k] + nb * d[b][k]) / (na + nb);
      }
      members[a].insert(members[a].end(), members[b].begin(), members[b].end());
      ckey[a] = std::min(ckey[a], ckey[b]);
      alive[b] = false;
    }
    for (std::size_t a = 0; a < m; ++a) {
      if (!alive[a]) continue;
      std::sort(members[a].begin(), members[a].end());
      result.push_back(std::move(members[a]));
    }
  }
  std::sort(result.begin(), result.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return result;
}

// A topic: indices into the candidate list it was clustered from.
struct TermGroup {
  std::vector<std::size_t> members;
  std::optional<std::size_t> representative;  // set by ranking
};

inline constexpr double kDefaultClusterThreshold = 0.1;

// Clusters candidates by their embeddings. A key the embedder cannot map
// becomes its own singleton group.
inline std::vector<TermGroup> cluster_terms(const std::vector<CandidateTerm>& candidates,
                                            const Embedder& embedder,
                                            double distance_threshold = kDefaultClusterThreshold) {
  if (!(distance_threshold > 0.0)) throw Error("cluster distance threshold must be positive");
  std::vector<std::vector<double>> vecs;
  std::vector<std::string> keys;
  std::vector<std::size_t> embedded;
  std::vector<TermGroup> groups;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto v = embedder.embed(candidates[i].key);
    if (!v || v->size() != embedder.dimension()) {
      log::info("no embedding for '", candidates[i].key, "'; keeping it as a singleton group");
      groups.push_back({{i}, std::nullopt});
      continue;
    }
    vecs.push_back(std::move(*v));
    keys.push_back(candidates[i].key);
    embedded.push_back(i);
  }
  for (const auto& cluster : average_linkage_clusters(vecs, distance_threshold, keys)) {
    TermGroup g;
    for (auto local : cluster) g.members.push_back(embedded[local]);
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(),
            [](const TermGroup& a, const TermGroup& b) { return a.members.front() < b.members.front(); });
  return groups;
}

}  // namespace keyness
