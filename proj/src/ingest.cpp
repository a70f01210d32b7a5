#include "cordtag/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "cordtag/store.hpp"
#include "cordtag/text.hpp"

namespace cordtag {

namespace {

// Paragraph texts must stay free of newlines and tabs so offsets are stable
// and the PubTator packaging of paragraphs is well-formed. Replacement is
// one character for one character.
std::string flatten_paragraph(std::string_view raw) {
  std::string text = normalize_newlines(raw);
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\t', ' ');
  return text;
}

std::vector<std::string> read_paragraph_array(const nlohmann::json& node) {
  std::vector<std::string> out;
  if (!node.is_array()) {
    throw IngestError(IngestError::Kind::JsonMalformed,
                      "paragraph list is not an array");
  }
  for (const auto& item : node) {
    if (!item.is_object() || !item.contains("text") ||
        !item["text"].is_string()) {
      throw IngestError(IngestError::Kind::JsonMalformed,
                        "paragraph entry without a \"text\" string");
    }
    out.push_back(flatten_paragraph(item["text"].get<std::string>()));
  }
  return out;
}

}  // namespace

Document parse_cord19(std::string_view json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(IngestError::Kind::JsonMalformed, e.what());
  }
  if (!root.is_object()) {
    throw IngestError(IngestError::Kind::JsonMalformed,
                      "top-level JSON value is not an object");
  }
  Document doc;
  if (!root.contains("paper_id") || !root["paper_id"].is_string() ||
      root["paper_id"].get<std::string>().empty()) {
    throw IngestError(IngestError::Kind::MissingPaperId,
                      "missing or empty paper_id");
  }
  doc.paper_id = root["paper_id"].get<std::string>();
  if (root.contains("metadata") && root["metadata"].is_object() &&
      root["metadata"].contains("title") &&
      root["metadata"]["title"].is_string()) {
    doc.title = flatten_paragraph(root["metadata"]["title"].get<std::string>());
  }
  if (root.contains("abstract")) {
    doc.abstract_paragraphs = read_paragraph_array(root["abstract"]);
  }
  if (!root.contains("body_text")) {
    throw IngestError(IngestError::Kind::MissingBodyText,
                      "missing body_text field in \"" + doc.paper_id + "\"");
  }
  doc.body_paragraphs = read_paragraph_array(root["body_text"]);
  return doc;
}

IngestReport ingest_collection(const std::filesystem::path& dir,
                               Store& store) {
  IngestReport report;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw std::runtime_error("not a readable directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });
  std::unordered_set<std::string> seen;
  for (const std::filesystem::path& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      ++report.failed;
      report.messages.push_back(path.filename().string() + ": unreadable");
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      Document doc = parse_cord19(buf.str());
      if (!seen.insert(doc.paper_id).second) {
        ++report.duplicates;
        report.messages.push_back(path.filename().string() +
                                  ": duplicate paper_id \"" + doc.paper_id +
                                  "\", replacing earlier version");
      }
      store.upsert_document(doc);
      ++report.ingested;
    } catch (const std::exception& e) {
      ++report.failed;
      report.messages.push_back(path.filename().string() + ": " + e.what());
    }
  }
  return report;
}

}  // namespace cordtag
