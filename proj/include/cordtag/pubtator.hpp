#ifndef CORDTAG_PUBTATOR_HPP
#define CORDTAG_PUBTATOR_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// PubTator exchange format:
//
//   <id>|t|<title>
//   <id>|a|<abstract>
//   <id>\t<start>\t<end>\t<surface>\t<type>\t<entity_id>
//
// Annotation offsets are document-level scalar offsets into the virtual text
// `title + " " + abstract`. A composed file holds several documents separated
// by blank lines. Output uses \n line endings; \r\n is accepted on input.

namespace cordtag {
namespace pubtator {

struct RawAnnotation {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string surface;
  std::string type_label;
  std::string id_label;

  friend bool operator==(const RawAnnotation&, const RawAnnotation&) = default;
};

struct PubTatorDocument {
  std::string doc_id;
  std::string title;
  std::string abstract_text;
  std::vector<RawAnnotation> annotations;

  friend bool operator==(const PubTatorDocument&,
                         const PubTatorDocument&) = default;
};

class PubTatorError : public std::runtime_error {
 public:
  enum class Kind {
    MalformedLine,
    IdMismatch,
    SpanOutOfBounds,
    SurfaceMismatch,
    InvariantViolation,
    DirectoryUnreadable,
  };

  PubTatorError(Kind kind, const std::string& msg, int line = 0,
                int block = -1);

  Kind kind() const { return kind_; }
  // 1-based line within the document block; 0 if not line-specific.
  int line() const { return line_; }
  // 0-based block index within a composed file; -1 outside composed parsing.
  int block() const { return block_; }

 private:
  Kind kind_;
  int line_;
  int block_;
};

// Parses one PubTator document: a |t| line, a |a| line with the same id, then
// zero or more 6-field annotation lines. Every annotation is checked against
// the document text (bounds and surface).
PubTatorDocument parse_single(std::string_view text);

// Parses a composed file: blocks separated by one or more blank lines. Empty
// input yields an empty list. Parse errors carry the failing block's index.
std::vector<PubTatorDocument> parse_composed(std::string_view text);

// Checks document invariants: id free of '|' and tabs, no newlines or tabs in
// title/abstract, every annotation in bounds with surface equal to the text
// slice. Throws PubTatorError(InvariantViolation).
void validate_document(const PubTatorDocument& doc);

// Serializes a document; validates first. parse_single(serialize(d)) == d.
std::string serialize(const PubTatorDocument& doc);

// Serializes several documents with blank-line separators.
std::string serialize_composed(const std::vector<PubTatorDocument>& docs);

struct ScanEntry {
  std::string file_name;
  std::filesystem::path path;
  std::vector<PubTatorDocument> documents;
  std::optional<std::string> error;  // set when the file failed to parse
};

inline const std::vector<std::string> kDefaultScanExtensions = {".txt",
                                                                ".pubtator"};

// Reads every file with a matching extension in lexicographic file-name
// order. Per-file parse failures are reported in the entry instead of
// aborting the scan. Throws PubTatorError(DirectoryUnreadable) if the
// directory itself cannot be read.
std::vector<ScanEntry> scan_directory(
    const std::filesystem::path& dir,
    const std::vector<std::string>& extensions = kDefaultScanExtensions);

}  // namespace pubtator
}  // namespace cordtag

#endif  // CORDTAG_PUBTATOR_HPP
