#ifndef CORDTAG_BACKEND_HPP
#define CORDTAG_BACKEND_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cordtag/document.hpp"
#include "cordtag/entity.hpp"
#include "cordtag/pubtator.hpp"

namespace cordtag {

enum class BackendKind { BuiltinLexicon, ExternalProcess };

struct TaggerBackendConfig {
  std::string name;  // unique label; recorded as mention provenance
  BackendKind kind = BackendKind::BuiltinLexicon;
  std::vector<EntityType> entity_types;

  // builtin-lexicon
  std::string vocabulary_path;

  // external-process
  std::string command_template;  // must contain {input} and {output}
  std::string scratch_root;      // per-batch work dirs are created below this
  double timeout_seconds = 300.0;
  int batch_size = 0;  // documents per invocation; 0 = pipeline batch size
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind {
    InvalidConfig,
    ProcessTimeout,
    NonZeroExit,
    OutputUnparseable,
    OffsetUnmappable,
  };

  BackendError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void validate_backend_config(const TaggerBackendConfig& config);

// One document's worth of work handed to a backend.
struct DocumentInput {
  std::string paper_id;
  std::vector<ParagraphRef> paragraphs;
};

// A tagger that annotates batches of documents. Implementations must be safe
// to call concurrently from multiple worker threads.
class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;

  virtual const std::string& name() const = 0;
  virtual const std::vector<EntityType>& entity_types() const = 0;
  // Content-based identity used for resume bookkeeping; stable across runs
  // and worker counts, changes when the backend's behavior would change.
  virtual std::string fingerprint() const = 0;

  virtual std::vector<EntityMention> tag_batch(
      const std::vector<DocumentInput>& batch) = 0;
};

// Builds the backend described by the config (loads vocabularies, checks the
// command template). Throws BackendError(InvalidConfig).
std::shared_ptr<TaggerBackend> make_backend(const TaggerBackendConfig& config);

// Paragraph <-> PubTator packaging for external tools. Each paragraph rides
// as its own pseudo-document: id "<paper_id>:<paragraph>", a synthetic title
// equal to that id, and the paragraph text as the abstract. This keeps the
// offset mapping reversible and batch membership self-identifying.
std::string pseudo_doc_id(const std::string& paper_id, std::size_t paragraph);
std::optional<std::pair<std::string, std::size_t>> parse_pseudo_doc_id(
    const std::string& doc_id);
pubtator::PubTatorDocument package_paragraph(const ParagraphRef& paragraph);

// Converts a document-level annotation on a packaged pseudo-document back to
// a paragraph-local location (inclusive end). Throws
// BackendError(OffsetUnmappable) when the annotation starts inside the
// synthetic title or on the separator.
Location map_offsets(const pubtator::PubTatorDocument& origin,
                     const pubtator::RawAnnotation& annotation,
                     std::size_t paragraph_index);

}  // namespace cordtag

#endif  // CORDTAG_BACKEND_HPP
