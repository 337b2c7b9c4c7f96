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
#include <istream>
#include <optional>
#include <sstream>
#include <string>

#include "keyness/corpus/document.hpp"
#include "keyness/error.hpp"
#include "keyness/log.hpp"
#include "keyness/text.hpp"

namespace keyness {

namespace detail {

inline std::optional<std::string> misc_value(const std::string& misc, std::string_view name) {
  if (misc == "_") return std::nullopt;
  for (const auto& item : text::split(misc, '|')) {
    const auto eq = item.find('=');
    if (eq != std::string::npos && std::string_view(item).substr(0, eq) == name) {
      return item.substr(eq + 1);
    }
  }
  return std::nullopt;
}

inline void finish_sentence(Document& doc, Sentence& sent, const std::string& path,
                            std::size_t line) {
  if (sent.empty()) return;
  const auto n = static_cast<int>(sent.size());
  for (auto& tok : sent) {
    if (tok.head_index < -1 || tok.head_index >= n) {
      throw ParseError(path, line, "head index out of sentence bounds");
    }
    tok.sentence_index = doc.sentences.size();
  }
  doc.sentences.push_back(std::move(sent));
  sent.clear();
}

}  // namespace detail

// Reads one document in CoNLL-U. Document metadata comes from `# doc_id = ...`
// and `# sublanguage = ...` comment lines; `sublanguage_override`, when given,
// wins over the file. MISC may carry Case=Upper|Lower and Stop=Yes|No; when
// absent they are derived from the surface form and default to non-stop.
inline Document parse_conllu(std::istream& in, const std::string& path = "<stream>",
                             const std::optional<std::string>& sublanguage_override = {}) {
  Document doc;
  std::optional<std::string> sublanguage;
  Sentence sent;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      detail::finish_sentence(doc, sent, path, lineno);
      continue;
    }
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto name = text::trim(std::string_view(line).substr(1, eq - 1));
      const auto value = std::string(text::trim(std::string_view(line).substr(eq + 1)));
      if (name == "doc_id" || name == "newdoc id") doc.id = value;
      else if (name == "sublanguage") sublanguage = value;
      continue;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(path, lineno, "expected 10 tab-separated columns, got " +
                                         std::to_string(cols.size()));
    }
    // Multiword ranges (1-2) and empty nodes (1.1) carry no syntactic tokens.
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    Token tok;
    std::size_t id = 0;
    int head = 0;
    try {
      id = std::stoul(cols[0]);
      head = cols[6] == "_" ? 0 : std::stoi(cols[6]);
    } catch (const std::exception&) {
      throw ParseError(path, lineno, "non-numeric ID or HEAD");
    }
    if (id != sent.size() + 1) {
      throw ParseError(path, lineno, "token ID " + cols[0] + " out of sequence");
    }
    if (cols[1].empty() || cols[1] == "_") throw ParseError(path, lineno, "empty FORM");
    tok.surface = cols[1];
    tok.lemma = cols[2] == "_" ? cols[1] : cols[2];
    tok.upos = cols[3];
    tok.pos = cols[4] != "_" ? cols[4] : cols[3];
    tok.head_index = head - 1;
    tok.dep_rel = cols[7];
    tok.token_index = sent.size();
    const auto case_v = detail::misc_value(cols[9], "Case");
    if (case_v) {
      if (*case_v == "Upper") tok.case_status = CaseStatus::upper;
      else if (*case_v == "Lower") tok.case_status = CaseStatus::lower;
      else throw ParseError(path, lineno, "Case must be Upper or Lower");
    } else {
      tok.case_status = std::isupper(static_cast<unsigned char>(tok.surface[0]))
                            ? CaseStatus::upper
                            : CaseStatus::lower;
    }
    const auto stop_v = detail::misc_value(cols[9], "Stop");
    if (stop_v && *stop_v != "Yes" && *stop_v != "No") {
      throw ParseError(path, lineno, "Stop must be Yes or No");
    }
    tok.is_stop = stop_v && *stop_v == "Yes";
    sent.push_back(std::move(tok));
  }
  detail::finish_sentence(doc, sent, path, lineno + 1);
  if (doc.sentences.empty()) throw ParseError(path, lineno, "document has no tokens");
  if (sublanguage_override) sublanguage = sublanguage_override;
  if (!sublanguage) {
    throw DataError(path + ": missing '# sublanguage' metadata and no override given");
  }
  if (!is_registered_sublanguage(*sublanguage)) {
    log::warn(path, ": unknown sublanguage '", *sublanguage, "', using 'unknown'");
    sublanguage = "unknown";
  }
  doc.sublanguage = *sublanguage;
  if (doc.id.empty()) doc.id = std::filesystem::path(path).stem().string();
  return doc;
}

inline Document load_parsed_document(const std::filesystem::path& path,
                                     const std::optional<std::string>& sublanguage_override = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open document '" + path.string() + "'");
  return parse_conllu(in, path.string(), sublanguage_override);
}

// Writes a document back out in the same CoNLL-U dialect the loader reads.
inline void write_conllu(std::ostream& out, const Document& doc) {
  out << "# doc_id = " << doc.id << '\n' << "# sublanguage = " << doc.sublanguage << '\n';
  for (const auto& sent : doc.sentences) {
    for (const auto& t : sent) {
      out << t.token_index + 1 << '\t' << t.surface << '\t' << t.lemma << '\t' << t.upos << '\t'
          << t.pos << '\t' << "_\t" << t.head_index + 1 << '\t' << t.dep_rel << "\t_\t"
          << "Case=" << (t.case_status == CaseStatus::upper ? "Upper" : "Lower")
          << "|Stop=" << (t.is_stop ? "Yes" : "No") << '\n';
    }
    out << '\n';
  }
}

}  // namespace keyness
