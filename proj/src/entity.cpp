#include "cordtag/entity.hpp"

namespace cordtag {

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::Chemical:
      return "Chemical";
    case EntityType::Disease:
      return "Disease";
    case EntityType::Gene:
      return "Gene";
    case EntityType::Species:
      return "Species";
  }
  throw std::logic_error("unknown EntityType");
}

std::optional<EntityType> entity_type_from_string(std::string_view name) {
  if (name == "Chemical") return EntityType::Chemical;
  if (name == "Disease") return EntityType::Disease;
  if (name == "Gene") return EntityType::Gene;
  if (name == "Species") return EntityType::Species;
  return std::nullopt;
}

}  // namespace cordtag
