#ifndef CORDTAG_ENTITY_HPP
#define CORDTAG_ENTITY_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>

namespace cordtag {

// The four entity types the pipeline recognizes. Serialized exactly as
// "Chemical", "Disease", "Gene", "Species".
enum class EntityType { Chemical, Disease, Gene, Species };

inline constexpr EntityType kAllEntityTypes[] = {
    EntityType::Chemical, EntityType::Disease, EntityType::Gene,
    EntityType::Species};

std::string_view to_string(EntityType type);
std::optional<EntityType> entity_type_from_string(std::string_view name);

// A vocabulary entity: identifier plus type. Identifiers carry a source
// prefix (MESH:, OMIM:, GENE:, TAXON:) so Disease ids from MeSH and OMIM
// cannot collide in the same field.
struct Entity {
  std::string entity_id;
  EntityType entity_type = EntityType::Chemical;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// Position of a mention inside a document. Paragraph 0 is the title, 1 the
// abstract, 2 and up the body paragraphs. start/end are paragraph-local
// scalar offsets; end is the index of the last character (inclusive).
struct Location {
  std::size_t paragraph = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Location&, const Location&) = default;
};

struct EntityMention {
  std::string paper_id;
  Location location;
  std::string entity_str;
  Entity entity;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

// Canonical mention order used by queries and exports.
inline bool mention_less(const EntityMention& a, const EntityMention& b) {
  return std::tie(a.paper_id, a.location.paragraph, a.location.start,
                  a.location.end, a.entity.entity_type, a.entity.entity_id) <
         std::tie(b.paper_id, b.location.paragraph, b.location.start,
                  b.location.end, b.entity.entity_type, b.entity.entity_id);
}

}  // namespace cordtag

#endif  // CORDTAG_ENTITY_HPP
