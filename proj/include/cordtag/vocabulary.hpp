#ifndef CORDTAG_VOCABULARY_HPP
#define CORDTAG_VOCABULARY_HPP

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordtag/entity.hpp"

namespace cordtag {

class VocabularyError : public std::runtime_error {
 public:
  enum class Kind { UnknownEntityType, EmptyTerm, MalformedRow };

  VocabularyError(Kind kind, const std::string& msg, int line = 0)
      : std::runtime_error(msg), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

struct VocabularyEntry {
  std::string term;
  Entity entity;

  friend bool operator==(const VocabularyEntry&,
                         const VocabularyEntry&) = default;
};

// A term lexicon. Terms of at least kCaseFoldMinLength scalars match
// case-insensitively (ASCII fold); shorter terms match exact-case, since
// short symbols like gene names are case-sensitive homonym hazards.
struct Vocabulary {
  static constexpr std::size_t kCaseFoldMinLength = 5;

  std::vector<VocabularyEntry> entries;
};

// Parses the vocabulary file format: one row per entity,
// `entity_id<TAB>entity_type<TAB>term1|term2|...`, UTF-8, '#' comment lines.
// Entity ids must carry a MESH:/OMIM:/GENE:/TAXON: prefix. Duplicate
// (term, entity) pairs are collapsed.
Vocabulary load_vocabulary(std::string_view text);

Vocabulary load_vocabulary_file(const std::filesystem::path& path);

}  // namespace cordtag

#endif  // CORDTAG_VOCABULARY_HPP
