#ifndef CORDTAG_DOCUMENT_HPP
#define CORDTAG_DOCUMENT_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cordtag {

// Which paragraphs a run or dump covers.
enum class Scope { Abstracts, Fulltext };

std::string_view to_string(Scope scope);
std::optional<Scope> scope_from_string(std::string_view name);

// A corpus document in the paragraph-indexed model: index 0 is the title,
// index 1 the abstract, indices >= 2 the body paragraphs in order.
struct Document {
  std::string paper_id;
  std::string title;
  std::vector<std::string> abstract_paragraphs;
  std::vector<std::string> body_paragraphs;

  friend bool operator==(const Document&, const Document&) = default;
};

// One addressable paragraph of a document.
struct ParagraphRef {
  std::string paper_id;
  std::size_t paragraph = 0;
  std::string text;

  friend bool operator==(const ParagraphRef&, const ParagraphRef&) = default;
};

// Expands a document into its indexed paragraphs. Index 1 joins all abstract
// paragraphs with a single space. Scope::Abstracts yields indices {0, 1};
// Scope::Fulltext appends the body paragraphs at indices 2 and up. Both
// scopes always include indices 0 and 1, even when empty.
std::vector<ParagraphRef> paragraphs(const Document& doc, Scope scope);

// The abstract paragraph as stored at index 1.
std::string joined_abstract(const Document& doc);

}  // namespace cordtag

#endif  // CORDTAG_DOCUMENT_HPP
