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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "keyness/candidates.hpp"
#include "test_util.hpp"

namespace keyness {
namespace {

using testing::make_doc;

const CandidateTerm* find_term(const std::vector<CandidateTerm>& terms, const std::string& key) {
  for (const auto& t : terms) {
    if (t.key == key) return &t;
  }
  return nullptr;
}

TEST(Ngrams, ThreeDistinctWordsGiveSixKeys) {
  const auto terms = generate_ngrams(make_doc({"red fox runs"}));
  ASSERT_EQ(terms.size(), 6u);
  std::set<std::string> keys;
  for (const auto& t : terms) keys.insert(t.key);
  EXPECT_EQ(keys, (std::set<std::string>{"red", "fox", "runs", "red fox", "fox runs", "red fox runs"}));
}

TEST(Ngrams, RepeatedWordCollectsOccurrences) {
  const auto terms = generate_ngrams(make_doc({"a b a"}));
  const auto* a = find_term(terms, "a");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->frequency(), 2u);
  EXPECT_EQ(a->occurrences[0], (Span{0, 0, 1}));
  EXPECT_EQ(a->occurrences[1], (Span{0, 2, 1}));
}

TEST(Ngrams, NoCrossSentenceSpans) {
  const auto terms = generate_ngrams(make_doc({"alpha beta", "gamma delta"}));
  EXPECT_EQ(find_term(terms, "beta gamma"), nullptr);
  EXPECT_EQ(terms.size(), 6u);
}

TEST(Ngrams, PunctuationBreaksSpans) {
  const auto terms = generate_ngrams(make_doc({"alpha , beta"}));
  EXPECT_EQ(terms.size(), 2u);
  EXPECT_EQ(find_term(terms, ","), nullptr);
}

TEST(Ngrams, LengthCappedAtFour) {
  const auto terms = generate_ngrams(make_doc({"a b c d e"}));
  for (const auto& t : terms) {
    EXPECT_LE(t.length, kMaxNgram);
    EXPECT_EQ(text::split_ws(t.key).size(), t.length);
    EXPECT_FALSE(t.occurrences.empty());
  }
  // 5 + 4 + 3 + 2
  EXPECT_EQ(terms.size(), 14u);
}

TEST(Ngrams, EmptyDocument) {
  Document d;
  EXPECT_TRUE(generate_ngrams(d).empty());
}

TEST(Ngrams, SurfaceFormsPerOccurrence) {
  const auto terms = generate_ngrams(make_doc({"Landing gear", "the landing"}));
  const auto* t = find_term(terms, "landing");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->surface_forms, (std::vector<std::string>{"Landing", "landing"}));
}

const char* kHurricane =
    "# doc_id = h1\n"
    "# sublanguage = misc-news\n"
    "1\tThe\tthe\tDET\tDT\t_\t4\tdet\t_\tCase=Upper|Stop=Yes\n"
    "2\tAtlantic\tAtlantic\tPROPN\tNNP\t_\t4\tamod\t_\tCase=Upper|Stop=No\n"
    "3\thurricane\thurricane\tNOUN\tNN\t_\t4\tcompound\t_\tCase=Lower|Stop=No\n"
    "4\tseason\tseason\tNOUN\tNN\t_\t5\tnsubj\t_\tCase=Lower|Stop=No\n"
    "5\tbegan\tbegin\tVERB\tVBD\t_\t0\troot\t_\tCase=Lower|Stop=No\n"
    "6\t.\t.\tPUNCT\t.\t_\t5\tpunct\t_\tCase=Lower|Stop=No\n"
    "\n";

TEST(Quadruples, AtlanticHurricaneSeason) {
  const auto doc = testing::parse_string(kHurricane);
  const auto terms = generate_ngrams(doc);
  const auto* t = find_term(terms, "atlantic hurricane season");
  ASSERT_NE(t, nullptr);
  const auto q = quadruples(*t, doc);
  EXPECT_EQ(q[0], (Quadruple{"NNP", kUpperCase, kNotStop, "amod"}));
  EXPECT_EQ(q[1], (Quadruple{"NN", kLowerCase, kNotStop, "compound"}));
  EXPECT_EQ(q[2], (Quadruple{"NN", kLowerCase, kNotStop, "nsubj"}));
  EXPECT_TRUE(q[3].is_padding());
  EXPECT_EQ(q[3], Quadruple::padding());
}

TEST(Quadruples, PaddingCounts) {
  const auto doc = testing::parse_string(kHurricane);
  const auto terms = generate_ngrams(doc);
  for (const auto& t : terms) {
    const auto q = quadruples(t, doc);
    const auto pads = std::count_if(q.begin(), q.end(), [](const Quadruple& x) { return x.is_padding(); });
    EXPECT_EQ(static_cast<std::size_t>(pads), kQuadrupleLength - t.length) << t.key;
  }
  const auto* uni = find_term(terms, "season");
  const auto* quad = find_term(terms, "the atlantic hurricane season");
  ASSERT_NE(uni, nullptr);
  ASSERT_NE(quad, nullptr);
}

TEST(Quadruples, FirstOccurrenceOnly) {
  auto doc = make_doc({"storm hits", "storm passes"});
  doc.sentences[1][0].pos = "VB";
  const auto terms = generate_ngrams(doc);
  EXPECT_EQ(quadruples(*find_term(terms, "storm"), doc)[0].pos, "NN");
}

TEST(Wellformedness, SubtractsCoupledProbabilities) {
  nn::Wellformedness w{0.2, 0.8};
  EXPECT_NEAR(w.omega(), 0.6, 1e-15);
}

TEST(Wellformedness, TieIsNotACandidate) {
  auto model = nn::IdentifierModel::create({}, 7);
  testing::pin_identifier_output(model, 0.0, 0.0);
  const auto doc = make_doc({"red fox runs"});
  for (const auto& t : generate_ngrams(doc)) {
    EXPECT_DOUBLE_EQ(wellformedness(model, t, doc), 0.0);
  }
  EXPECT_TRUE(select_candidates(model, doc).empty());
}

TEST(Selection, AllIllFormedGivesEmpty) {
  auto model = nn::IdentifierModel::create({}, 7);
  testing::pin_identifier_output(model, 2.0, -2.0);
  EXPECT_TRUE(select_candidates(model, make_doc({"red fox runs", "a b c d e"})).empty());
}

TEST(Selection, IsAFilterOverNgrams) {
  const auto model = nn::IdentifierModel::create({}, 11);
  const auto doc = testing::parse_string(kHurricane);
  const auto all = score_ngrams(model, generate_ngrams(doc), doc);
  const auto selected = select_candidates(model, doc);
  std::size_t positive = 0;
  for (const auto& t : all) {
    ASSERT_TRUE(t.wellformedness.has_value());
    EXPECT_GE(*t.wellformedness, -1.0);
    EXPECT_LE(*t.wellformedness, 1.0);
    if (*t.wellformedness > 0) ++positive;
  }
  EXPECT_EQ(selected.size(), positive);
  for (const auto& s : selected) {
    const auto* t = find_term(all, s.key);
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(*t->wellformedness, *s.wellformedness);
    EXPECT_GT(*s.wellformedness, 0.0);
  }
}

TEST(Selection, IdenticalQuadruplesShareOmega) {
  const auto model = nn::IdentifierModel::create({}, 3);
  const auto doc = make_doc({"red fox", "blue owl"});
  const auto terms = generate_ngrams(doc);
  EXPECT_EQ(wellformedness(model, *find_term(terms, "red fox"), doc),
            wellformedness(model, *find_term(terms, "blue owl"), doc));
}

std::vector<CandidateTerm> terms_from_keys(const std::vector<std::string>& keys) {
  std::vector<CandidateTerm> out;
  for (const auto& k : keys) {
    CandidateTerm t;
    t.key = k;
    t.length = text::split_ws(k).size();
    t.occurrences.push_back({0, 0, t.length});
    out.push_back(t);
  }
  return out;
}

void expect_partition(const std::vector<TermGroup>& groups, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& g : groups) {
    EXPECT_FALSE(g.members.empty());
    for (auto m : g.members) ++seen.at(m);
  }
  for (auto c : seen) EXPECT_EQ(c, 1);
}

TEST(Clustering, OrthogonalVectorsStaySingletons) {
  TableEmbedder e;
  e.insert("a", {1, 0, 0});
  e.insert("b", {0, 1, 0});
  e.insert("c", {0, 0, 1});
  const auto groups = cluster_terms(terms_from_keys({"a", "b", "c"}), e, 0.1);
  EXPECT_EQ(groups.size(), 3u);
  expect_partition(groups, 3);
}

TEST(Clustering, SameKeyDifferentSurfaceJoins) {
  // Two candidates carrying one key (e.g. from two documents' surface forms)
  // embed identically.
  LexicalEmbedder e;
  auto terms = terms_from_keys({"flight crew", "flight crew", "runway"});
  terms[1].surface_forms = {"Flight Crew"};
  const auto groups = cluster_terms(terms, e, 0.1);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].members, (std::vector<std::size_t>{0, 1}));
}

TEST(Clustering, EmergencyLandingGroup) {
  // In-group cosine distances below 0.1, cross-group near 1.
  TableEmbedder e;
  e.insert("emergency landing", {1.0, 0.10, 0.00, 0.0});
  e.insert("crash landing", {1.0, 0.00, 0.10, 0.0});
  e.insert("landing", {1.0, 0.05, 0.05, 0.0});
  e.insert("flight crew", {0.0, 0.00, 0.00, 1.0});
  for (const auto& a : {"emergency landing", "crash landing", "landing"}) {
    for (const auto& b : {"emergency landing", "crash landing", "landing"}) {
      EXPECT_LT(cosine_distance(*e.embed(a), *e.embed(b)), 0.1);
    }
  }
  const auto terms = terms_from_keys({"emergency landing", "flight crew", "crash landing", "landing"});
  const auto groups = cluster_terms(terms, e, 0.1);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].members, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(groups[1].members, (std::vector<std::size_t>{1}));
}

TEST(Clustering, MissingEmbeddingBecomesSingleton) {
  TableEmbedder e;
  e.insert("a", {1, 0});
  e.insert("b", {1, 0.01});
  const auto groups = cluster_terms(terms_from_keys({"a", "zzz", "b"}), e, 0.1);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].members, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(groups[1].members, (std::vector<std::size_t>{1}));
}

TEST(Clustering, RejectsNonPositiveThreshold) {
  LexicalEmbedder e;
  EXPECT_THROW(cluster_terms(terms_from_keys({"a"}), e, 0.0), Error);
}

// Exhaustive average linkage without the component split, as an oracle.
std::vector<std::vector<std::size_t>> naive_average_linkage(
    const std::vector<std::vector<double>>& v, double threshold) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < v.size(); ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = 2.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double s = 0.0;
        for (auto a : clusters[i]) for (auto b : clusters[j]) s += cosine_distance(v[a], v[b]);
        s /= double(clusters[i].size() * clusters[j].size());
        if (s < best) { best = s; bi = i; bj = j; }
      }
    }
    if (best >= threshold) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

TEST(Clustering, MatchesNaiveAverageLinkage) {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(14);
    std::vector<std::vector<double>> v(n, std::vector<double>(3));
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& x : v[i]) x = rng.uniform(0.0, 1.0);
      keys.push_back("k" + std::to_string(100 + i));
    }
    for (double t : {0.02, 0.05, 0.1, 0.3}) {
      EXPECT_EQ(average_linkage_clusters(v, t, keys), naive_average_linkage(v, t))
          << "trial " << trial << " threshold " << t;
    }
  }
}

TEST(Clustering, LowerThresholdNeverFewerGroups) {
  Rng rng(99);
  std::vector<std::string> keys;
  for (int i = 0; i < 60; ++i) {
    std::string k;
    for (int c = 0; c < 2 + int(rng.below(3)); ++c) k += char('a' + rng.below(4));
    keys.push_back(k + (i % 3 == 0 ? " landing" : ""));
  }
  const auto terms = terms_from_keys(keys);
  LexicalEmbedder e;
  std::size_t prev = 0;
  for (double t : {0.9, 0.7, 0.5, 0.3, 0.1, 0.05, 0.01}) {
    const auto groups = cluster_terms(terms, e, t);
    expect_partition(groups, terms.size());
    EXPECT_GE(groups.size(), prev) << "threshold " << t;
    prev = groups.size();
  }
}

TEST(Embedding, LexicalIsNormalizedAndDeterministic) {
  LexicalEmbedder e;
  const auto a = e.embed("emergency landing");
  ASSERT_TRUE(a.has_value());
  double n = 0;
  for (double x : *a) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
  EXPECT_EQ(*a, *e.embed("emergency landing"));
  EXPECT_LT(cosine_distance(*a, *e.embed("crash landing")), cosine_distance(*a, *e.embed("flight crew")));
}

TEST(Embedding, TableFileFormat) {
  const auto path = std::filesystem::temp_directory_path() / "keyness_table_test.tsv";
  {
    std::ofstream out(path);
    out << "3\nemergency landing\t1 0 0\nflight crew\t0 1 0.5\n";
  }
  const auto t = TableEmbedder::load(path);
  EXPECT_EQ(t.dimension(), 3u);
  EXPECT_EQ(*t.embed("flight crew"), (std::vector<double>{0, 1, 0.5}));
  EXPECT_FALSE(t.embed("landing").has_value());
  {
    std::ofstream out(path);
    out << "3\nbad\t1 0\n";
  }
  EXPECT_THROW(TableEmbedder::load(path), ParseError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace keyness
