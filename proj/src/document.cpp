#include "cordtag/document.hpp"

namespace cordtag {

std::string_view to_string(Scope scope) {
  return scope == Scope::Abstracts ? "abstracts" : "fulltext";
}

std::optional<Scope> scope_from_string(std::string_view name) {
  if (name == "abstracts") return Scope::Abstracts;
  if (name == "fulltext") return Scope::Fulltext;
  return std::nullopt;
}

std::string joined_abstract(const Document& doc) {
  std::string joined;
  for (std::size_t i = 0; i < doc.abstract_paragraphs.size(); ++i) {
    if (i > 0) joined += ' ';
    joined += doc.abstract_paragraphs[i];
  }
  return joined;
}

std::vector<ParagraphRef> paragraphs(const Document& doc, Scope scope) {
  std::vector<ParagraphRef> refs;
  refs.push_back({doc.paper_id, 0, doc.title});
  refs.push_back({doc.paper_id, 1, joined_abstract(doc)});
  if (scope == Scope::Fulltext) {
    for (std::size_t i = 0; i < doc.body_paragraphs.size(); ++i) {
      refs.push_back({doc.paper_id, i + 2, doc.body_paragraphs[i]});
    }
  }
  return refs;
}

}  // namespace cordtag
