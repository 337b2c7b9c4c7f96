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
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "keyness/candidates.hpp"
#include "keyness/corpus.hpp"
#include "keyness/error.hpp"
#include "keyness/features.hpp"
#include "keyness/log.hpp"
#include "keyness/neural/ranker.hpp"
#include "keyness/pipeline.hpp"
#include "keyness/pulearn.hpp"

namespace keyness {

struct RankedMember {
  std::string key;
  double r = 0.0;
};

// Members sorted by r (descending), then key; score is the best member's r.
struct RankedGroup {
  double score = 0.0;
  std::vector<RankedMember> members;
};

using RankedGroups = std::vector<RankedGroup>;

// Groups ordered by score (descending); equal scores fall back to the
// smallest member key. top_k = 0 keeps every group.
inline RankedGroups rank_groups(const std::vector<CandidateTerm>& candidates,
                                const std::vector<TermGroup>& groups,
                                const std::vector<double>& scores, std::size_t top_k = 0) {
  if (scores.size() != candidates.size()) throw Error("rank_groups: one score per candidate required");
  RankedGroups out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    RankedGroup rg;
    for (auto m : g.members) rg.members.push_back({candidates.at(m).key, scores[m]});
    std::sort(rg.members.begin(), rg.members.end(), [](const RankedMember& a, const RankedMember& b) {
      return a.r != b.r ? a.r > b.r : a.key < b.key;
    });
    rg.score = rg.members.front().r;
    out.push_back(std::move(rg));
  }
  std::sort(out.begin(), out.end(), [](const RankedGroup& a, const RankedGroup& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.members.front().key < b.members.front().key;
  });
  if (top_k && out.size() > top_k) out.resize(top_k);
  return out;
}

inline std::vector<double> keyness_scores(const nn::RankerModel& ranker, const AnalyzedDocument& a) {
  std::vector<double> r;
  r.reserve(a.patterns.size());
  for (const auto& p : a.patterns) r.push_back(ranker.forward(p).r());
  return r;
}

inline RankedGroups rank_document(const nn::RankerModel& ranker, const AnalyzedDocument& a,
                                  std::size_t top_k) {
  return with_context("stage 'ranking'",
                      [&] { return rank_groups(a.candidates, a.groups, keyness_scores(ranker, a), top_k); });
}

// Baseline: groups ranked by the TF-IDF score of their members.
inline RankedGroups rank_by_tfidf(const AnalyzedDocument& a, std::size_t top_k) {
  std::vector<double> s;
  for (const auto& p : a.patterns) s.push_back(p.dependent[kTfidf]);
  return rank_groups(a.candidates, a.groups, s, top_k);
}

inline RankedGroups extract(const Document& doc, const nn::IdentifierModel& identifier,
                            const nn::RankerModel& ranker, const CorpusStats& stats,
                            const Embedder& embedder, std::size_t top_k,
                            double cluster_threshold = kDefaultClusterThreshold) {
  const auto a = analyze_document(doc, identifier, embedder, stats, cluster_threshold);
  return with_context("document '" + doc.id + "'", [&] { return rank_document(ranker, a, top_k); });
}

inline nlohmann::json to_json(const std::string& doc_id, const RankedGroups& groups) {
  nlohmann::json gs = nlohmann::json::array();
  for (const auto& g : groups) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : g.members) ms.push_back({{"key", m.key}, {"r", m.r}});
    gs.push_back({{"score", g.score}, {"members", ms}});
  }
  return {{"doc_id", doc_id}, {"groups", gs}};
}

// ---- metrics ---------------------------------------------------------------

// |selected ∩ gold| / |gold|; nullopt when no gold keyword is present.
inline std::optional<double> identification_recall(const std::vector<std::string>& selected_keys,
                                                   const std::vector<std::string>& gold_keys) {
  const std::set<std::string> gold(gold_keys.begin(), gold_keys.end());
  if (gold.empty()) return std::nullopt;
  const std::set<std::string> sel(selected_keys.begin(), selected_keys.end());
  std::size_t hit = 0;
  for (const auto& g : gold) hit += sel.count(g);
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

struct TopK {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  std::size_t correct = 0;
};

inline double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

// Ranks (1-based) of the groups credited as correct, in rank order. A group
// is correct when one of its members matches a gold keyword that no earlier
// group has claimed.
inline std::vector<std::size_t> correct_ranks(const RankedGroups& ranked,
                                              const std::vector<std::string>& gold_keys,
                                              std::size_t k = 0) {
  std::set<std::string> open(gold_keys.begin(), gold_keys.end());
  std::vector<std::size_t> ranks;
  const std::size_t n = k ? std::min(k, ranked.size()) : ranked.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& m : ranked[i].members) {
      if (open.erase(m.key)) {
        ranks.push_back(i + 1);
        break;
      }
    }
  }
  return ranks;
}

// P = correct / k, R = correct / |gold|; nullopt when gold is empty.
inline std::optional<TopK> topk_scores(const RankedGroups& ranked,
                                       const std::vector<std::string>& gold_keys, std::size_t k = 10) {
  if (k == 0) throw Error("k must be at least 1");
  const std::set<std::string> gold(gold_keys.begin(), gold_keys.end());
  if (gold.empty()) return std::nullopt;
  TopK s;
  s.correct = correct_ranks(ranked, gold_keys, k).size();
  s.precision = static_cast<double>(s.correct) / static_cast<double>(k);
  s.recall = static_cast<double>(s.correct) / static_cast<double>(gold.size());
  s.f = harmonic_mean(s.precision, s.recall);
  return s;
}

// Reciprocal rank of the first correct group, 0 when there is none.
inline double reciprocal_rank(const RankedGroups& ranked, const std::vector<std::string>& gold_keys) {
  const auto ranks = correct_ranks(ranked, gold_keys);
  return ranks.empty() ? 0.0 : 1.0 / static_cast<double>(ranks.front());
}

// (1/|P|) * sum over correct groups of 1/rank, P being the predicted list.
inline double literal_reciprocal_rank(const RankedGroups& ranked,
                                      const std::vector<std::string>& gold_keys) {
  if (ranked.empty()) return 0.0;
  double s = 0.0;
  for (auto r : correct_ranks(ranked, gold_keys)) s += 1.0 / static_cast<double>(r);
  return s / static_cast<double>(ranked.size());
}

// Mean over documents with at least one gold keyword.
inline double mrr(const std::vector<RankedGroups>& lists, const std::vector<std::vector<std::string>>& gold,
                  bool literal = false) {
  if (lists.size() != gold.size()) throw Error("mrr: one gold list per ranked list required");
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (gold[i].empty()) continue;
    total += literal ? literal_reciprocal_rank(lists[i], gold[i]) : reciprocal_rank(lists[i], gold[i]);
    ++n;
  }
  if (n == 0) throw DataError("mrr over an empty corpus");
  return total / static_cast<double>(n);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length samples");
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = (static_cast<double>(i + j) / 2.0) + 1.0;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// ---- reports ---------------------------------------------------------------

struct DatasetMetrics {
  std::string name;
  std::size_t documents = 0;
  std::size_t evaluated = 0;        // documents with present gold keywords
  std::size_t skipped_no_gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double mrr = 0.0;
  double mrr_literal = 0.0;
  double identification_recall = 0.0;

  nlohmann::json to_json() const {
    return {{"name", name},         {"documents", documents}, {"evaluated", evaluated},
            {"skipped_no_gold", skipped_no_gold}, {"precision", precision},
            {"recall", recall},     {"f", f},                 {"mrr", mrr},
            {"mrr_literal", mrr_literal}, {"identification_recall", identification_recall}};
  }
};

// Macro averages over documents. Precision and recall are averaged per
// document; F is the harmonic mean of the averaged P and R. MRR uses the
// top-k lists.
inline DatasetMetrics evaluate_rankings(const std::string& name, const Dataset& ds,
                                        const std::vector<AnalyzedDocument>& analyzed,
                                        const std::vector<RankedGroups>& ranked, std::size_t k) {
  DatasetMetrics m;
  m.name = name;
  m.documents = ds.documents.size();
  std::vector<RankedGroups> lists;
  std::vector<std::vector<std::string>> golds;
  double sp = 0, sr = 0, sid = 0;
  for (std::size_t i = 0; i < ds.documents.size(); ++i) {
    const auto gold = present_gold_keys(ds.documents[i]);
    if (gold.empty()) {
      ++m.skipped_no_gold;
      log::info("document '", ds.documents[i].id, "' has no gold keyword in its text; skipped");
      continue;
    }
    ++m.evaluated;
    const auto s = *topk_scores(ranked[i], gold, k);
    sp += s.precision;
    sr += s.recall;
    std::vector<std::string> selected;
    for (const auto& c : analyzed[i].candidates) selected.push_back(c.key);
    sid += *identification_recall(selected, gold);
    lists.push_back(ranked[i]);
    golds.push_back(gold);
  }
  if (m.evaluated == 0) return m;
  const double n = static_cast<double>(m.evaluated);
  m.precision = sp / n;
  m.recall = sr / n;
  m.f = harmonic_mean(m.precision, m.recall);
  m.mrr = mrr(lists, golds);
  m.mrr_literal = mrr(lists, golds, true);
  m.identification_recall = sid / n;
  return m;
}

inline DatasetMetrics evaluate_ranker(const Dataset& ds, const std::vector<AnalyzedDocument>& analyzed,
                                      const nn::RankerModel& ranker, std::size_t k, std::size_t jobs = 1) {
  std::vector<RankedGroups> ranked(analyzed.size());
  parallel_for(analyzed.size(), jobs, [&](std::size_t i) { ranked[i] = rank_document(ranker, analyzed[i], k); });
  return evaluate_rankings(ds.name, ds, analyzed, ranked, k);
}

inline DatasetMetrics evaluate_tfidf(const Dataset& ds, const std::vector<AnalyzedDocument>& analyzed,
                                     std::size_t k) {
  std::vector<RankedGroups> ranked;
  for (const auto& a : analyzed) ranked.push_back(rank_by_tfidf(a, k));
  return evaluate_rankings(ds.name + " (tfidf)", ds, analyzed, ranked, k);
}

// Recall of candidate selection alone, macro-averaged.
inline std::optional<double> dataset_identification_recall(const Dataset& ds,
                                                            const nn::IdentifierModel& identifier,
                                                            std::size_t jobs = 1) {
  std::vector<std::optional<double>> per(ds.documents.size());
  parallel_for(ds.documents.size(), jobs, [&](std::size_t i) {
    const auto& doc = ds.documents[i];
    std::vector<std::string> keys;
    for (const auto& c : select_candidates(identifier, doc)) keys.push_back(c.key);
    per[i] = identification_recall(keys, present_gold_keys(doc));
  });
  double s = 0;
  std::size_t n = 0;
  for (const auto& r : per) {
    if (r) {
      s += *r;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

struct EvalReport {
  std::vector<DatasetMetrics> datasets;
  nlohmann::json config = nlohmann::json::object();

  DatasetMetrics macro() const {
    DatasetMetrics m;
    m.name = "macro";
    std::size_t n = 0;
    for (const auto& d : datasets) {
      m.documents += d.documents;
      m.evaluated += d.evaluated;
      m.skipped_no_gold += d.skipped_no_gold;
      if (d.evaluated == 0) continue;
      ++n;
      m.precision += d.precision;
      m.recall += d.recall;
      m.mrr += d.mrr;
      m.mrr_literal += d.mrr_literal;
      m.identification_recall += d.identification_recall;
    }
    if (n) {
      const double k = static_cast<double>(n);
      m.precision /= k;
      m.recall /= k;
      m.mrr /= k;
      m.mrr_literal /= k;
      m.identification_recall /= k;
      m.f = harmonic_mean(m.precision, m.recall);
    }
    return m;
  }

  nlohmann::json to_json() const {
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& d : datasets) ds.push_back(d.to_json());
    return {{"datasets", ds}, {"macro", macro().to_json()}, {"config", config}};
  }
};

// ---- sweeps and exports ----------------------------------------------------

struct SweepPoint {
  double theta = 0.0;
  DatasetMetrics metrics;
  std::optional<std::string> error;
};

// Trains one ranker per theta (seed derived from the base seed and the grid
// index) and evaluates it with `evaluate`. A failed point is recorded and the
// sweep continues.
inline std::vector<SweepPoint> sweep_theta(
    const std::vector<pu::RankerPool>& pools, const std::vector<double>& grid,
    const pu::TrainingConfig& base, const nn::RankerDims& dims,
    const std::function<DatasetMetrics(const nn::RankerModel&)>& evaluate) {
  if (grid.empty()) throw DataError("theta grid is empty");
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepPoint pt;
    pt.theta = grid[i];
    try {
      auto cfg = base;
      cfg.theta = grid[i];
      cfg.seed = derive_seed(base.seed, 100 + i);
      const auto trained = pu::train_ranker(pools, cfg, dims);
      pt.metrics = evaluate(trained.model);
    } catch (const Error& e) {
      log::warn("theta ", grid[i], ": ", e.what());
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& curve) {
  out << "theta,P,R,F,MRR\n" << std::setprecision(10);
  for (const auto& p : curve) {
    if (p.error) continue;
    out << p.theta << ',' << p.metrics.precision << ',' << p.metrics.recall << ',' << p.metrics.f
        << ',' << p.metrics.mrr << '\n';
  }
}

struct CoveragePoint {
  std::size_t instances = 0;
  double coverage = 0.0;
};

// Clusters the patterns (average linkage, cosine distance) and reports, after
// each instance in input order, the share of clusters seen so far.
inline std::vector<CoveragePoint> pattern_coverage_curve(const std::vector<DependentVector>& patterns,
                                                         double threshold = 0.1) {
  if (patterns.size() < 2) return {{patterns.size(), 1.0}};
  std::vector<std::vector<double>> vecs;
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    vecs.emplace_back(patterns[i].begin(), patterns[i].end());
    std::ostringstream k;
    k << std::setw(10) << std::setfill('0') << i;
    keys.push_back(k.str());
  }
  const auto clusters = average_linkage_clusters(vecs, threshold, keys);
  std::vector<std::size_t> label(patterns.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto m : clusters[c]) label[m] = c;
  }
  std::vector<bool> seen(clusters.size(), false);
  std::size_t covered = 0;
  std::vector<CoveragePoint> curve;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (!seen[label[i]]) {
      seen[label[i]] = true;
      ++covered;
    }
    curve.push_back({i + 1, static_cast<double>(covered) / static_cast<double>(clusters.size())});
  }
  return curve;
}

// Gold keyword patterns in corpus order, min-max scaled over every candidate
// pattern of the same datasets.
inline std::vector<DependentVector> keyword_patterns(const std::vector<Dataset>& sets,
                                                     const std::vector<std::vector<AnalyzedDocument>>& analyzed) {
  if (analyzed.size() != sets.size()) throw Error("keyword_patterns: one analysis per dataset required");
  std::vector<DependentVector> all, kw;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t d = 0; d < analyzed[s].size(); ++d) {
      const auto gold = present_gold_keys(sets[s].documents[d]);
      const std::set<std::string> gs(gold.begin(), gold.end());
      const auto& a = analyzed[s][d];
      for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        all.push_back(a.patterns[i].dependent);
        if (gs.count(a.candidates[i].key)) kw.push_back(a.patterns[i].dependent);
      }
    }
  }
  if (all.empty()) return {};
  const auto norm = nn::FeatureNormalization::fit(all);
  for (auto& v : kw) v = norm.apply(v);
  return kw;
}

// Long-format rows: dataset, feature, is_keyword, value.
struct FeatureRow {
  std::string dataset;
  std::string feature;
  bool is_keyword = false;
  double value = 0.0;
};

inline std::vector<FeatureRow> feature_rows(const Dataset& ds, const std::vector<AnalyzedDocument>& analyzed) {
  std::vector<FeatureRow> rows;
  for (std::size_t d = 0; d < analyzed.size(); ++d) {
    const auto gold = present_gold_keys(ds.documents[d]);
    const std::set<std::string> gs(gold.begin(), gold.end());
    const auto& a = analyzed[d];
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
      const bool kw = gs.count(a.candidates[i].key) > 0;
      for (std::size_t f = 0; f < kDependentFeatures; ++f) {
        rows.push_back({ds.name, std::string(kFeatureNames[f]), kw, a.patterns[i].dependent[f]});
      }
    }
  }
  return rows;
}

inline void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  out << "dataset,feature,is_keyword,value\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.feature << ',' << (r.is_keyword ? 1 : 0) << ',' << r.value << '\n';
  }
}

}  // namespace keyness
