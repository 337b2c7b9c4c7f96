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

#include <cmath>
#include <filesystem>
#include <fstream>

#include "keyness/corpus.hpp"
#include "test_util.hpp"

namespace keyness {
namespace {

namespace fs = std::filesystem;
using testing::make_doc;
using testing::parse_string;

const char* kTwoSentences =
    "# doc_id = d1\n"
    "# sublanguage = misc-news\n"
    "1\tThe\tthe\tDET\tDT\t_\t4\tdet\t_\tCase=Upper|Stop=Yes\n"
    "2\tAtlantic\tAtlantic\tPROPN\tNNP\t_\t4\tamod\t_\tCase=Upper|Stop=No\n"
    "3\thurricane\thurricane\tNOUN\tNN\t_\t4\tcompound\t_\tCase=Lower|Stop=No\n"
    "4\tseason\tseason\tNOUN\tNN\t_\t5\tnsubj\t_\tCase=Lower|Stop=No\n"
    "5\tbegan\tbegin\tVERB\tVBD\t_\t0\troot\t_\tCase=Lower|Stop=No\n"
    "\n"
    "1\tStorms\tstorm\tNOUN\tNNS\t_\t2\tnsubj\t_\tCase=Upper|Stop=No\n"
    "2\tformed\tform\tVERB\tVBD\t_\t0\troot\t_\tCase=Lower|Stop=No\n"
    "3\tquickly\tquickly\tADV\tRB\t_\t2\tadvmod\t_\tCase=Lower|Stop=No\n"
    "4\t.\t.\tPUNCT\t.\t_\t2\tpunct\t_\tCase=Lower|Stop=No\n"
    "\n";

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("keyness_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p) << content;
    return p;
  }
  fs::path dir_;
};

TEST(Conllu, CountsSentencesAndWords) {
  const auto d = parse_string(kTwoSentences);
  EXPECT_EQ(d.id, "d1");
  EXPECT_EQ(d.sublanguage, "misc-news");
  EXPECT_EQ(d.sentence_count(), 2u);
  EXPECT_EQ(d.word_count(), 9u);
}

TEST(Conllu, TokenFields) {
  const auto d = parse_string(kTwoSentences);
  const auto& s = d.sentences[0];
  EXPECT_EQ(s[1].case_status, CaseStatus::upper);
  EXPECT_EQ(s[2].case_status, CaseStatus::lower);
  EXPECT_EQ(s[3].case_status, CaseStatus::lower);
  EXPECT_EQ(s[1].pos, "NNP");
  EXPECT_EQ(s[1].dep_rel, "amod");
  EXPECT_EQ(s[1].head_index, 3);
  EXPECT_EQ(s[4].head_index, -1);
  EXPECT_TRUE(s[0].is_stop);
  EXPECT_EQ(d.sentences[1][2].sentence_index, 1u);
  EXPECT_EQ(d.sentences[1][2].token_index, 2u);
  EXPECT_EQ(d.sentences[1][0].lemma, "storm");
}

TEST(Conllu, EmptyInputIsParseError) {
  EXPECT_THROW(parse_string(""), ParseError);
  EXPECT_THROW(parse_string("# doc_id = x\n# sublanguage = science\n"), ParseError);
}

TEST(Conllu, MalformedLineReportsLineNumber) {
  const std::string bad =
      "# doc_id = x\n# sublanguage = science\n"
      "1\tA\ta\tDET\tDT\t_\t0\troot\n";
  try {
    parse_string(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(Conllu, HeadOutOfRange) {
  const std::string bad =
      "# doc_id = x\n# sublanguage = science\n"
      "1\tA\ta\tDET\tDT\t_\t7\tdet\t_\t_\n\n";
  EXPECT_THROW(parse_string(bad), ParseError);
}

TEST(Conllu, MissingSublanguage) {
  const std::string doc = "# doc_id = x\n1\tA\ta\tDET\tDT\t_\t0\troot\t_\t_\n\n";
  EXPECT_THROW(parse_string(doc), DataError);
  EXPECT_EQ(parse_string(doc, std::string("medicine")).sublanguage, "medicine");
}

TEST(Conllu, UnknownSublanguageFallsBack) {
  const std::string doc =
      "# doc_id = x\n# sublanguage = astrology\n1\tA\ta\tDET\tDT\t_\t0\troot\t_\t_\n\n";
  EXPECT_EQ(parse_string(doc).sublanguage, "unknown");
}

TEST(Conllu, DerivesCaseAndStopWithoutMisc) {
  const std::string doc =
      "# doc_id = x\n# sublanguage = science\n"
      "1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
      "2\tcell\tcell\tNOUN\tNN\t_\t0\troot\t_\t_\n\n";
  const auto d = parse_string(doc);
  EXPECT_EQ(d.sentences[0][0].case_status, CaseStatus::upper);
  EXPECT_EQ(d.sentences[0][1].case_status, CaseStatus::lower);
}

TEST(Conllu, SkipsMultiwordAndEmptyNodes) {
  const std::string doc =
      "# doc_id = x\n# sublanguage = science\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\tVBP\t_\t2\taux\t_\t_\n"
      "2\tn't\tnot\tPART\tRB\t_\t0\troot\t_\t_\n"
      "2.1\tx\tx\tX\tX\t_\t_\t_\t_\t_\n\n";
  EXPECT_EQ(parse_string(doc).word_count(), 2u);
}

TEST(Conllu, WriteRoundTrip) {
  const auto d = parse_string(kTwoSentences);
  std::ostringstream out;
  write_conllu(out, d);
  const auto e = parse_string(out.str());
  ASSERT_EQ(e.sentence_count(), d.sentence_count());
  for (std::size_t s = 0; s < d.sentences.size(); ++s) {
    for (std::size_t i = 0; i < d.sentences[s].size(); ++i) {
      const auto& a = d.sentences[s][i];
      const auto& b = e.sentences[s][i];
      EXPECT_EQ(a.surface, b.surface);
      EXPECT_EQ(a.lemma, b.lemma);
      EXPECT_EQ(a.pos, b.pos);
      EXPECT_EQ(a.dep_rel, b.dep_rel);
      EXPECT_EQ(a.head_index, b.head_index);
      EXPECT_EQ(a.case_status, b.case_status);
      EXPECT_EQ(a.is_stop, b.is_stop);
    }
  }
}

TEST_F(TempDir, DatasetLoadsDocuments) {
  write("a.conllu", kTwoSentences);
  write("b.conllu", kTwoSentences);
  const auto m = write("m.json", R"({"name": "toy", "sublanguage": "misc-news", "split": "test",
    "documents": [{"id": "a", "path": "a.conllu", "gold_keywords": ["hurricane season"]},
                  {"id": "b", "path": "b.conllu", "gold_keywords": []}]})");
  const auto ds = load_dataset(m);
  EXPECT_EQ(ds.name, "toy");
  EXPECT_EQ(ds.split, Split::test);
  ASSERT_EQ(ds.documents.size(), 2u);
  EXPECT_EQ(ds.documents[0].id, "a");
  EXPECT_EQ(ds.documents[0].gold_keywords, std::vector<std::string>{"hurricane season"});
  EXPECT_EQ(ds.documents[1].sublanguage, "misc-news");
}

TEST_F(TempDir, DatasetMissingFileNamesPath) {
  const auto m = write("m.json", R"({"name": "toy", "sublanguage": "science", "split": "train",
    "documents": [{"id": "a", "path": "nowhere.conllu"}]})");
  try {
    load_dataset(m);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("nowhere.conllu"), std::string::npos);
  }
}

TEST_F(TempDir, DatasetDuplicateId) {
  write("a.conllu", kTwoSentences);
  const auto m = write("m.json", R"({"name": "toy", "sublanguage": "science", "split": "train",
    "documents": [{"id": "a", "path": "a.conllu"}, {"id": "a", "path": "a.conllu"}]})");
  EXPECT_THROW(load_dataset(m), DataError);
}

TEST_F(TempDir, DatasetUnknownSublanguageWarns) {
  write("a.conllu", kTwoSentences);
  const auto m = write("m.json", R"({"name": "toy", "sublanguage": "astrology", "split": "train",
    "documents": [{"id": "a", "path": "a.conllu"}]})");
  const auto ds = load_dataset(m);
  EXPECT_EQ(ds.sublanguage, "unknown");
  EXPECT_EQ(ds.documents[0].sublanguage, "unknown");
}

TEST(Stats, TermInEveryDocument) {
  const std::vector<Document> docs = {make_doc({"storm hits coast"}, "1"), make_doc({"storm passes"}, "2")};
  const auto s = build_corpus_stats(docs);
  EXPECT_EQ(s.document_count, 2u);
  EXPECT_EQ(s.df("storm"), 2u);
  EXPECT_DOUBLE_EQ(std::log(double(s.document_count) / double(s.df("storm"))), 0.0);
  EXPECT_EQ(s.ref_size, 5u);
}

TEST(Stats, RareTermIdf) {
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) docs.push_back(make_doc({i == 3 ? "rare word" : "common word"}, std::to_string(i)));
  const auto s = build_corpus_stats(docs);
  EXPECT_EQ(s.df("rare"), 1u);
  EXPECT_NEAR(std::log(double(s.document_count) / double(s.df("rare"))), std::log(10.0), 1e-12);
  EXPECT_NEAR(std::log(10.0), 2.3026, 1e-4);
}

TEST(Stats, SingleDocument) {
  const auto s = build_corpus_stats(std::vector<Document>{make_doc({"a b a", "c"})});
  EXPECT_EQ(s.document_count, 1u);
  for (const auto& [k, df] : s.doc_frequency) EXPECT_EQ(df, 1u) << k;
  EXPECT_EQ(s.ref_count("a"), 2u);
}

TEST(Stats, OrderIndependentAndConsistent) {
  std::vector<Document> docs = {make_doc({"x y z", "y z"}, "1"), make_doc({"z y"}, "2"),
                                make_doc({"x , x"}, "3")};
  const auto a = build_corpus_stats(docs);
  std::reverse(docs.begin(), docs.end());
  EXPECT_EQ(a, build_corpus_stats(docs));
  for (const auto& [k, df] : a.doc_frequency) {
    EXPECT_GE(df, 1u);
    EXPECT_GE(a.ref_count(k), df);
    EXPECT_LE(a.ref_count(k), a.ref_size);
    EXPECT_LE(df, a.document_count);
  }
}

TEST_F(TempDir, StatsRoundTripAndVersionCheck) {
  const auto s = build_corpus_stats(std::vector<Document>{make_doc({"a b c"}, "1"), make_doc({"b c"}, "2")});
  const auto p = dir_ / "stats.json";
  save_stats(s, p);
  EXPECT_EQ(load_stats(p), s);
  auto j = to_json(s);
  j["format_version"] = 99;
  std::ofstream(p) << j.dump();
  EXPECT_THROW(load_stats(p), FormatError);
}

TEST(Profile, PopulationStd) {
  const auto p = ngram_frequency_profile(std::unordered_map<std::string, std::size_t>{{"a", 3}, {"b", 1}});
  EXPECT_DOUBLE_EQ(p.of_length(1).mean, 2.0);
  EXPECT_DOUBLE_EQ(p.of_length(1).std, 1.0);
  EXPECT_FALSE(p.of_length(2).present);
  EXPECT_EQ(p.of_length(2).mean, 0.0);
}

TEST(Profile, AllSingletons) {
  const auto p = ngram_frequency_profile(make_doc({"a b c d"}));
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_TRUE(p.of_length(n).present);
    EXPECT_DOUBLE_EQ(p.of_length(n).mean, 1.0);
    EXPECT_DOUBLE_EQ(p.of_length(n).std, 0.0);
  }
}

TEST(Profile, AbsentCategoryInShortDocument) {
  const auto p = ngram_frequency_profile(make_doc({"a b"}));
  EXPECT_TRUE(p.of_length(2).present);
  EXPECT_FALSE(p.of_length(3).present);
  EXPECT_FALSE(p.of_length(4).present);
}

TEST(Profile, DoublingScalesLinearly) {
  const std::unordered_map<std::string, std::size_t> base = {{"a", 3}, {"b", 1}, {"c", 5}, {"a b", 2}};
  std::unordered_map<std::string, std::size_t> twice;
  for (const auto& [k, v] : base) twice[k] = 2 * v;
  const auto p = ngram_frequency_profile(base);
  const auto q = ngram_frequency_profile(twice);
  for (std::size_t n = 1; n <= 2; ++n) {
    EXPECT_NEAR(q.of_length(n).mean, 2 * p.of_length(n).mean, 1e-12);
    EXPECT_NEAR(q.of_length(n).std, 2 * p.of_length(n).std, 1e-12);
  }
}

TEST(Profile, SentenceOrderInvariant) {
  const auto a = ngram_frequency_profile(make_doc({"a b c", "b c d", "a a"}));
  const auto b = ngram_frequency_profile(make_doc({"a a", "b c d", "a b c"}));
  for (std::size_t n = 1; n <= 4; ++n) {
    EXPECT_EQ(a.of_length(n).mean, b.of_length(n).mean);
    EXPECT_EQ(a.of_length(n).std, b.of_length(n).std);
  }
}

TEST(GoldKeys, MatchesSurfaceOrLemma) {
  auto d = parse_string(kTwoSentences);
  d.gold_keywords = {"Atlantic Hurricane Season", "storms", "volcano"};
  const auto keys = present_gold_keys(d);
  EXPECT_EQ(keys, (std::vector<std::string>{"atlantic hurricane season", "storm"}));
}

}  // namespace
}  // namespace keyness
