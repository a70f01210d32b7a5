#ifndef CORDTAG_STORE_HPP
#define CORDTAG_STORE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordtag/document.hpp"
#include "cordtag/entity.hpp"

namespace cordtag {

class StoreError : public std::runtime_error {
 public:
  enum class Kind { StorageFailure, SpanIntegrityViolation, SchemaTooNew };

  StoreError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct MentionFilter {
  std::optional<std::vector<std::string>> paper_ids;
  std::optional<std::vector<EntityType>> entity_types;
  Scope scope = Scope::Fulltext;
};

struct StoredDocumentInfo {
  std::string paper_id;
  std::string title;
  std::size_t paragraph_count = 0;
};

// Relational persistence for documents, paragraphs and mentions, backed by a
// single SQLite database file. Paragraph text is stored so span integrity is
// enforceable at insert time and exports need no re-ingest.
//
// Tables: documents, paragraphs, mentions, runs, completions, schema_version.
// Mentions are unique on (paper_id, paragraph, start, end, entity_type,
// entity_id). A handle may be shared across threads; operations serialize on
// an internal mutex and writes are transactional.
class Store {
 public:
  // Opens or creates the database. ":memory:" yields a private in-memory
  // store. Refuses databases written by a newer schema version.
  explicit Store(const std::filesystem::path& db_path);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Documents ---------------------------------------------------------------

  // Inserts or replaces a document and its paragraphs. Mentions on
  // paragraphs whose text changed or which no longer exist are deleted, and
  // completion marks are cleared when content changed. Upserting identical
  // content is a no-op.
  void upsert_document(const Document& doc);

  std::size_t document_count() const;
  std::vector<std::string> paper_ids() const;  // sorted
  std::optional<StoredDocumentInfo> document_info(
      const std::string& paper_id) const;
  std::vector<ParagraphRef> document_paragraphs(const std::string& paper_id,
                                                Scope scope) const;
  std::optional<std::string> paragraph_text(const std::string& paper_id,
                                            std::size_t paragraph) const;

  // Runs and mentions --------------------------------------------------------

  std::int64_t begin_run(const std::string& config_fingerprint);
  void finish_run(std::int64_t run_id);

  // Transactionally inserts mentions. Every mention must reproduce the
  // stored paragraph text slice [start..end] exactly; any violation rolls the
  // whole batch back. Duplicates under the uniqueness key are ignored.
  // Returns the number of newly inserted rows.
  std::size_t insert_mentions(std::int64_t run_id,
                              const std::string& backend,
                              const std::vector<EntityMention>& mentions);

  // Inserts one document's mentions and marks the document complete for
  // (backend, fingerprint), in a single transaction. Returns newly inserted
  // counts per entity type, indexed like kAllEntityTypes.
  std::array<std::size_t, 4> commit_document_results(
      std::int64_t run_id, const std::string& paper_id,
      const std::string& backend, const std::string& config_fingerprint,
      const std::vector<EntityMention>& mentions);

  bool is_complete(const std::string& paper_id, const std::string& backend,
                   const std::string& config_fingerprint) const;
  std::vector<std::string> completed_papers(
      const std::string& backend, const std::string& config_fingerprint) const;

  // Sorted by (paper_id, paragraph, start, end, entity_type, entity_id).
  std::vector<EntityMention> query_mentions(const MentionFilter& filter) const;
  std::uint64_t mention_count() const;
  // Mention counts per entity type within the scope's paragraphs.
  std::array<std::uint64_t, 4> mention_counts(Scope scope) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cordtag

#endif  // CORDTAG_STORE_HPP
