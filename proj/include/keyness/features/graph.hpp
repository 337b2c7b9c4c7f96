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

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "keyness/candidates/candidates.hpp"
#include "keyness/candidates/clustering.hpp"
#include "keyness/error.hpp"

namespace keyness {

// Undirected weighted graph on vertices 0..n-1 without self-loops.
class Graph {
 public:
  explicit Graph(std::size_t n = 0) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }

  void add_weight(std::size_t u, std::size_t v, double w) {
    if (u == v) return;
    adj_.at(u)[v] += w;
    adj_.at(v)[u] += w;
  }

  double weight(std::size_t u, std::size_t v) const {
    const auto it = adj_.at(u).find(v);
    return it == adj_[u].end() ? 0.0 : it->second;
  }

  const std::map<std::size_t, double>& neighbours(std::size_t u) const { return adj_.at(u); }

  double strength(std::size_t u) const {
    double s = 0.0;
    for (const auto& [v, w] : adj_[u]) s += w;
    return s;
  }

  std::size_t edge_count() const {
    std::size_t m = 0;
    for (const auto& a : adj_) m += a.size();
    return m / 2;
  }

 private:
  std::vector<std::map<std::size_t, double>> adj_;
};

// Edge weight = number of sentences in which two vertex sets both occur.
inline Graph cooccurrence_graph(const std::vector<std::set<std::size_t>>& vertex_sentences) {
  const std::size_t n = vertex_sentences.size();
  std::map<std::size_t, std::vector<std::size_t>> by_sentence;
  for (std::size_t v = 0; v < n; ++v) {
    for (auto s : vertex_sentences[v]) by_sentence[s].push_back(v);
  }
  Graph g(n);
  for (const auto& [s, vs] : by_sentence) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      for (std::size_t j = i + 1; j < vs.size(); ++j) g.add_weight(vs[i], vs[j], 1.0);
    }
  }
  return g;
}

inline std::set<std::size_t> sentences_of(const CandidateTerm& t) {
  std::set<std::size_t> s;
  for (const auto& sp : t.occurrences) s.insert(sp.sentence);
  return s;
}

// Vertices are candidate indices.
inline Graph build_term_graph(const std::vector<CandidateTerm>& candidates) {
  std::vector<std::set<std::size_t>> vs;
  for (const auto& c : candidates) vs.push_back(sentences_of(c));
  return cooccurrence_graph(vs);
}

// Vertices are group indices; a group occurs in a sentence when any member does.
inline Graph build_topic_graph(const std::vector<TermGroup>& groups,
                               const std::vector<CandidateTerm>& candidates) {
  std::vector<std::set<std::size_t>> vs(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto m : groups[g].members) {
      const auto s = sentences_of(candidates.at(m));
      vs[g].insert(s.begin(), s.end());
    }
  }
  return cooccurrence_graph(vs);
}

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-10;  // L1 change between iterations
  int max_iterations = 200;
};

// PageRank with teleport and dangling mass both following `personalization`
// (uniform when empty or all zero). Scores sum to 1.
inline std::vector<double> pagerank(const Graph& g, std::vector<double> personalization = {},
                                    const PageRankOptions& opt = {}) {
  const std::size_t n = g.size();
  if (n == 0) return {};
  double mass = 0.0;
  for (double v : personalization) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("personalization values must be finite and nonnegative");
    mass += v;
  }
  if (personalization.size() != n || mass == 0.0) {
    personalization.assign(n, 1.0 / static_cast<double>(n));
  } else {
    for (double& v : personalization) v /= mass;
  }
  std::vector<double> strength(n);
  for (std::size_t u = 0; u < n; ++u) strength[u] = g.strength(u);
  std::vector<double> x = personalization, next(n);
  double residual = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (strength[u] == 0.0) dangling += x[u];
    }
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = (1.0 - opt.damping + opt.damping * dangling) * personalization[v];
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (strength[u] == 0.0) continue;
      const double share = opt.damping * x[u] / strength[u];
      for (const auto& [v, w] : g.neighbours(u)) next[v] += share * w;
    }
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) residual += std::abs(next[v] - x[v]);
    x.swap(next);
    if (residual < opt.tolerance) return x;
  }
  throw ConvergenceError("PageRank did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations",
                         residual);
}

enum class SeedKind { position, tfidf, lexical, uniform };

inline std::vector<double> personalized_ranks(const Graph& g, SeedKind kind,
                                              const std::vector<double>& seeds = {}) {
  if (kind == SeedKind::uniform) return pagerank(g);
  if (seeds.size() != g.size()) throw Error("personalized_ranks: one seed value per vertex required");
  return pagerank(g, seeds);
}

// Principal eigenvector of the adjacency matrix by power iteration on A + I,
// started from the uniform vector; nonnegative and L2-normalized.
inline std::vector<double> eigenvector_centrality(const Graph& g, double tolerance = 1e-12,
                                                  int max_iterations = 20000) {
  const std::size_t n = g.size();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  double residual = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t u = 0; u < n; ++u) {
      double s = x[u];
      for (const auto& [v, w] : g.neighbours(u)) s += w * x[v];
      next[u] = s;
    }
    double norm = 0.0;
    for (double v : next) norm += v * v;
    norm = std::sqrt(norm);
    residual = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      next[u] /= norm;
      residual += (next[u] - x[u]) * (next[u] - x[u]);
    }
    residual = std::sqrt(residual);
    x.swap(next);
    if (residual < tolerance) return x;
  }
  throw ConvergenceError("eigenvector centrality did not converge in " +
                             std::to_string(max_iterations) + " iterations",
                         residual);
}

inline std::vector<std::size_t> bfs_distances(const Graph& g, std::size_t source) {
  constexpr auto kInf = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(g.size(), kInf);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& [v, w] : g.neighbours(u)) {
      if (dist[v] == kInf) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Closeness on the unweighted skeleton, scaled by the reachable share so
// that it is defined on disconnected graphs: (r / sum d) * (r / (n - 1)).
inline std::vector<double> closeness_centrality(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<double> c(n, 0.0);
  if (n < 2) return c;
  for (std::size_t u = 0; u < n; ++u) {
    const auto dist = bfs_distances(g, u);
    double total = 0.0, reach = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == u || dist[v] == static_cast<std::size_t>(-1)) continue;
      total += static_cast<double>(dist[v]);
      reach += 1.0;
    }
    if (total > 0.0) c[u] = (reach / total) * (reach / static_cast<double>(n - 1));
  }
  return c;
}

// Brandes' shortest-path betweenness on the unweighted skeleton, normalized
// by the (n-1)(n-2)/2 vertex pairs.
inline std::vector<double> betweenness_centrality(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> order;
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<long> dist(n, -1);
    sigma[s] = 1.0;
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      order.push_back(u);
      for (const auto& [v, w] : g.neighbours(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
        if (dist[v] == dist[u] + 1) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto v = *it;
      for (auto u : preds[v]) delta[u] += sigma[u] / sigma[v] * (1.0 + delta[v]);
      if (v != s) bc[v] += delta[v];
    }
  }
  // Each unordered pair was counted from both ends.
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (double& b : bc) b *= scale;
  return bc;
}

struct TopicScores {
  double topic_rank = 0.0;
  double eigenvector = 0.0;
  double closeness = 0.0;
  double betweenness = 0.0;
};

inline std::vector<TopicScores> topic_scores(const Graph& topic_graph) {
  const auto pr = pagerank(topic_graph);
  const auto ev = eigenvector_centrality(topic_graph);
  const auto cl = closeness_centrality(topic_graph);
  const auto bt = betweenness_centrality(topic_graph);
  std::vector<TopicScores> out(topic_graph.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {pr[i], ev[i], cl[i], bt[i]};
  return out;
}

}  // namespace keyness
