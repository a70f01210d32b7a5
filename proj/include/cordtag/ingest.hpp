#ifndef CORDTAG_INGEST_HPP
#define CORDTAG_INGEST_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordtag/document.hpp"

namespace cordtag {

class Store;

class IngestError : public std::runtime_error {
 public:
  enum class Kind { JsonMalformed, MissingPaperId, MissingBodyText };

  IngestError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Reads a CORD-19 JSON parse. Only paper_id, metadata.title, abstract[].text
// and body_text[].text are consulted; everything else is ignored. A missing
// abstract yields an empty abstract list; a missing body_text key is an
// error. Paragraph texts are newline-normalized (internal line breaks become
// single spaces).
Document parse_cord19(std::string_view json_text);

struct IngestReport {
  std::size_t ingested = 0;
  std::size_t failed = 0;
  std::size_t duplicates = 0;  // paper_ids seen more than once; last one wins
  std::vector<std::string> messages;
};

// Ingests every *.json file in the directory (lexicographic file order) into
// the store. Per-file failures are recorded in the report, not thrown.
// Re-running over an unchanged directory leaves the store unchanged.
IngestReport ingest_collection(const std::filesystem::path& dir, Store& store);

}  // namespace cordtag

#endif  // CORDTAG_INGEST_HPP
