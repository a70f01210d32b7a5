#ifndef CORDTAG_EXPORT_HPP
#define CORDTAG_EXPORT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordtag/document.hpp"
#include "cordtag/entity.hpp"
#include "cordtag/store.hpp"

namespace cordtag {

class ExportError : public std::runtime_error {
 public:
  enum class Kind { WriteFailure };

  ExportError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Writes the mention dump for the scope: a JSON object mapping every stored
// paper_id to its (possibly empty) list of mention records
//
//   {"location": {"paragraph": p, "start": s, "end": e},
//    "entity_str": ..., "entity_type": ..., "entity_id": ...}
//
// with paragraph 0 = title, 1 = abstract, >= 2 = body, and `end` the
// inclusive index of the mention's last character. Keys are sorted, indented
// two spaces, UTF-8, trailing newline. Repeated exports of an unchanged
// store are byte-identical. Returns the number of exported mentions.
std::uint64_t export_json(const Store& store, Scope scope,
                          const std::filesystem::path& destination);

// Writes composed PubTator files (docs_per_file corpus documents each) into
// the destination directory as part-00000.pubtator, part-00001.pubtator, ...
// Title and abstract mentions become document-level annotations with
// exclusive ends; body paragraphs ride as pseudo-documents in the external
// adapter's packaging, so the export round-trips through the PubTator
// parser. Returns the number of files written.
std::size_t export_pubtator(const Store& store, Scope scope,
                            const std::filesystem::path& destination_dir,
                            std::size_t docs_per_file = 100);

// Mention counts per entity type for both dump scopes (the published
// statistics table shape: 2 scopes x 4 types).
struct StatsTable {
  std::array<std::uint64_t, 4> abstracts{};  // kAllEntityTypes order
  std::array<std::uint64_t, 4> fulltext{};
};

StatsTable compute_stats(const Store& store);

// Renders the table with scopes as rows and entity types as columns.
std::string render_stats(const StatsTable& stats);

struct ValidationIssue {
  std::string paper_id;
  std::size_t record_index = 0;
  std::string message;
};

// Re-checks an exported JSON dump against the store: schema shape, known
// entity types, and span integrity of every record. Returns all issues
// found; empty means the dump is valid.
std::vector<ValidationIssue> validate_dump(const std::filesystem::path& dump,
                                           const Store& store);

}  // namespace cordtag

#endif  // CORDTAG_EXPORT_HPP
