#include "cordtag/vocabulary.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cordtag/text.hpp"

namespace cordtag {

namespace {

const char* kIdPrefixes[] = {"MESH:", "OMIM:", "GENE:", "TAXON:"};

bool has_known_prefix(std::string_view id) {
  for (const char* prefix : kIdPrefixes) {
    if (id.rfind(prefix, 0) == 0 && id.size() > std::string_view(prefix).size()) {
      return true;
    }
  }
  return false;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

}  // namespace

Vocabulary load_vocabulary(std::string_view text) {
  Vocabulary vocab;
  std::set<std::tuple<std::string, std::string, EntityType>> seen;
  std::string normalized = normalize_newlines(text);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= normalized.size()) {
    std::size_t nl = normalized.find('\n', pos);
    std::string_view line;
    if (nl == std::string::npos) {
      if (pos >= normalized.size()) break;
      line = std::string_view(normalized).substr(pos);
      pos = normalized.size() + 1;
    } else {
      line = std::string_view(normalized).substr(pos, nl - pos);
      pos = nl + 1;
    }
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> fields = split(line, '\t');
    if (fields.size() != 3) {
      throw VocabularyError(VocabularyError::Kind::MalformedRow,
                            "expected 3 tab-separated columns, got " +
                                std::to_string(fields.size()),
                            line_no);
    }
    std::string_view id = fields[0];
    if (id.empty() || !has_known_prefix(id)) {
      throw VocabularyError(
          VocabularyError::Kind::MalformedRow,
          "entity id \"" + std::string(id) +
              "\" lacks a MESH:/OMIM:/GENE:/TAXON: prefix",
          line_no);
    }
    auto type = entity_type_from_string(fields[1]);
    if (!type) {
      throw VocabularyError(VocabularyError::Kind::UnknownEntityType,
                            "unknown entity type \"" + std::string(fields[1]) +
                                "\"",
                            line_no);
    }
    for (std::string_view term : split(fields[2], '|')) {
      if (term.empty()) {
        throw VocabularyError(VocabularyError::Kind::EmptyTerm,
                              "empty term for entity \"" + std::string(id) +
                                  "\"",
                              line_no);
      }
      if (seen.emplace(std::string(term), std::string(id), *type).second) {
        vocab.entries.push_back(
            {std::string(term), Entity{std::string(id), *type}});
      }
    }
  }
  return vocab;
}

Vocabulary load_vocabulary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw VocabularyError(VocabularyError::Kind::MalformedRow,
                          "cannot open vocabulary file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_vocabulary(buf.str());
}

}  // namespace cordtag
