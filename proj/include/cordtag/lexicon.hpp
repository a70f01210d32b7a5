#ifndef CORDTAG_LEXICON_HPP
#define CORDTAG_LEXICON_HPP

#include <memory>
#include <unordered_map>
#include <vector>

#include "cordtag/document.hpp"
#include "cordtag/entity.hpp"
#include "cordtag/vocabulary.hpp"

namespace cordtag {

// Dictionary tagger over a fixed vocabulary. Matches must begin and end at
// token boundaries: no alphanumeric run may cross a match border. Hyphens and
// spaces inside terms are matched literally. Within one entity type, longest
// match wins; ties go to the smaller start, then the smaller entity id.
// Mentions of different types may overlap.
//
// Thread-safe for concurrent tag() calls once constructed.
class LexiconTagger {
 public:
  explicit LexiconTagger(const Vocabulary& vocab);

  std::vector<EntityMention> tag(const ParagraphRef& paragraph) const;

 private:
  struct Node {
    std::unordered_map<char32_t, std::unique_ptr<Node>> children;
    std::vector<Entity> entities;  // terminal payload
  };

  static void insert(Node& root, const std::u32string& term,
                     const Entity& entity);
  void collect(const Node& root, const std::u32string& text, std::size_t start,
               bool folded, std::vector<EntityMention>& out,
               const ParagraphRef& paragraph) const;

  Node exact_root_;   // terms shorter than Vocabulary::kCaseFoldMinLength
  Node folded_root_;  // longer terms, stored case-folded
};

// Removes same-type overlaps: the longer mention wins, ties broken by the
// smaller start, then the lexicographically smaller entity id. Mentions of
// different entity types never suppress each other. Output is sorted by
// (start, end, entity_type, entity_id).
std::vector<EntityMention> resolve_overlaps(std::vector<EntityMention> mentions);

// One-shot convenience: builds a LexiconTagger and tags a single paragraph.
std::vector<EntityMention> tag_paragraph(const Vocabulary& vocab,
                                         const ParagraphRef& paragraph);

}  // namespace cordtag

#endif  // CORDTAG_LEXICON_HPP
