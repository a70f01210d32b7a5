#include "cordtag/lexicon.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "cordtag/text.hpp"

namespace cordtag {

namespace {

// True if a match may start at position `pos`: no alphanumeric run crosses
// the left border.
bool boundary_before(const std::u32string& text, std::size_t pos) {
  if (pos == 0) return true;
  return !(is_word_char(text[pos - 1]) && is_word_char(text[pos]));
}

// True if a match may end just before position `pos` (exclusive end).
bool boundary_after(const std::u32string& text, std::size_t pos) {
  if (pos >= text.size()) return true;
  return !(is_word_char(text[pos - 1]) && is_word_char(text[pos]));
}

bool spans_overlap(const Location& a, const Location& b) {
  return a.start <= b.end && b.start <= a.end;
}

}  // namespace

LexiconTagger::LexiconTagger(const Vocabulary& vocab) {
  for (const VocabularyEntry& entry : vocab.entries) {
    std::u32string term = utf8_decode(entry.term);
    if (term.empty()) continue;
    if (term.size() >= Vocabulary::kCaseFoldMinLength) {
      insert(folded_root_, fold(term), entry.entity);
    } else {
      insert(exact_root_, term, entry.entity);
    }
  }
}

void LexiconTagger::insert(Node& root, const std::u32string& term,
                           const Entity& entity) {
  Node* node = &root;
  for (char32_t c : term) {
    auto& child = node->children[c];
    if (!child) child = std::make_unique<Node>();
    node = child.get();
  }
  if (std::find(node->entities.begin(), node->entities.end(), entity) ==
      node->entities.end()) {
    node->entities.push_back(entity);
  }
}

void LexiconTagger::collect(const Node& root, const std::u32string& text,
                            std::size_t start, bool folded,
                            std::vector<EntityMention>& out,
                            const ParagraphRef& paragraph) const {
  const Node* node = &root;
  for (std::size_t pos = start; pos < text.size(); ++pos) {
    char32_t c = folded ? fold_char(text[pos]) : text[pos];
    auto it = node->children.find(c);
    if (it == node->children.end()) return;
    node = it->second.get();
    if (!node->entities.empty() && boundary_after(text, pos + 1)) {
      for (const Entity& entity : node->entities) {
        EntityMention mention;
        mention.paper_id = paragraph.paper_id;
        mention.location = {paragraph.paragraph, start, pos};
        mention.entity = entity;
        out.push_back(std::move(mention));
      }
    }
  }
}

std::vector<EntityMention> LexiconTagger::tag(
    const ParagraphRef& paragraph) const {
  std::u32string text = utf8_decode(paragraph.text);
  if (text.empty()) return {};
  std::vector<EntityMention> candidates;
  for (std::size_t start = 0; start < text.size(); ++start) {
    if (!boundary_before(text, start)) continue;
    collect(exact_root_, text, start, false, candidates, paragraph);
    collect(folded_root_, text, start, true, candidates, paragraph);
  }
  // The two tries hold disjoint term lengths, but distinct vocabulary terms
  // can fold to the same form and yield the same (span, entity) twice.
  std::set<std::tuple<std::size_t, std::size_t, EntityType, std::string>> seen;
  std::vector<EntityMention> unique;
  unique.reserve(candidates.size());
  for (EntityMention& m : candidates) {
    if (seen.emplace(m.location.start, m.location.end, m.entity.entity_type,
                     m.entity.entity_id)
            .second) {
      unique.push_back(std::move(m));
    }
  }
  std::vector<EntityMention> kept = resolve_overlaps(std::move(unique));
  for (EntityMention& m : kept) {
    m.entity_str = utf8_encode(
        text.substr(m.location.start, m.location.end - m.location.start + 1));
  }
  return kept;
}

std::vector<EntityMention> resolve_overlaps(
    std::vector<EntityMention> mentions) {
  auto length = [](const EntityMention& m) {
    return m.location.end - m.location.start + 1;
  };
  std::stable_sort(mentions.begin(), mentions.end(),
                   [&](const EntityMention& a, const EntityMention& b) {
                     std::size_t la = length(a), lb = length(b);
                     if (la != lb) return la > lb;
                     if (a.location.start != b.location.start)
                       return a.location.start < b.location.start;
                     if (a.entity.entity_id != b.entity.entity_id)
                       return a.entity.entity_id < b.entity.entity_id;
                     return a.entity.entity_type < b.entity.entity_type;
                   });
  std::vector<EntityMention> kept;
  for (EntityMention& candidate : mentions) {
    bool blocked = false;
    for (const EntityMention& k : kept) {
      if (k.entity.entity_type == candidate.entity.entity_type &&
          spans_overlap(k.location, candidate.location)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(std::move(candidate));
  }
  std::sort(kept.begin(), kept.end(),
            [](const EntityMention& a, const EntityMention& b) {
              return std::tie(a.location.start, a.location.end,
                              a.entity.entity_type, a.entity.entity_id) <
                     std::tie(b.location.start, b.location.end,
                              b.entity.entity_type, b.entity.entity_id);
            });
  return kept;
}

std::vector<EntityMention> tag_paragraph(const Vocabulary& vocab,
                                         const ParagraphRef& paragraph) {
  return LexiconTagger(vocab).tag(paragraph);
}

}  // namespace cordtag
