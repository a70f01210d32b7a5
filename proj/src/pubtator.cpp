#include "cordtag/pubtator.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cordtag/text.hpp"

namespace cordtag {
namespace pubtator {

namespace {

struct TextLine {
  std::string id;
  char marker = 0;  // 't' or 'a'
  std::string text;
};

// Splits `line` as `<id>|t|<text>` or `<id>|a|<text>`. The text part may
// itself contain '|'. Returns nullopt if the shape does not match.
std::optional<TextLine> try_text_line(std::string_view line) {
  std::size_t p1 = line.find('|');
  if (p1 == std::string_view::npos || p1 == 0) return std::nullopt;
  std::size_t p2 = line.find('|', p1 + 1);
  if (p2 == std::string_view::npos || p2 != p1 + 2) return std::nullopt;
  char marker = line[p1 + 1];
  if (marker != 't' && marker != 'a') return std::nullopt;
  std::string_view id = line.substr(0, p1);
  if (id.find('\t') != std::string_view::npos) return std::nullopt;
  TextLine out;
  out.id = std::string(id);
  out.marker = marker;
  out.text = std::string(line.substr(p2 + 1));
  return out;
}

std::optional<std::size_t> parse_offset(std::string_view field) {
  std::size_t value = 0;
  if (field.empty()) return std::nullopt;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string normalized = normalize_newlines(text);
  std::size_t pos = 0;
  while (pos <= normalized.size()) {
    std::size_t nl = normalized.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < normalized.size()) {
        lines.push_back(normalized.substr(pos));
      }
      break;
    }
    lines.push_back(normalized.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

void check_annotations(const PubTatorDocument& doc, PubTatorError::Kind bounds,
                       PubTatorError::Kind surface, int first_anno_line) {
  std::u32string doc_text = utf8_decode(doc.title);
  doc_text.push_back(U' ');
  doc_text += utf8_decode(doc.abstract_text);
  for (std::size_t i = 0; i < doc.annotations.size(); ++i) {
    const RawAnnotation& a = doc.annotations[i];
    int line = first_anno_line > 0 ? first_anno_line + static_cast<int>(i) : 0;
    if (a.start >= a.end || a.end > doc_text.size()) {
      throw PubTatorError(bounds,
                          "annotation span [" + std::to_string(a.start) + "," +
                              std::to_string(a.end) + ") out of bounds for \"" +
                              doc.doc_id + "\" (text length " +
                              std::to_string(doc_text.size()) + ")",
                          line);
    }
    std::string slice =
        utf8_encode(doc_text.substr(a.start, a.end - a.start));
    if (slice != a.surface) {
      throw PubTatorError(surface,
                          "annotation surface \"" + a.surface +
                              "\" does not match text slice \"" + slice +
                              "\" in \"" + doc.doc_id + "\"",
                          line);
    }
  }
}

}  // namespace

PubTatorError::PubTatorError(Kind kind, const std::string& msg, int line,
                             int block)
    : std::runtime_error(msg), kind_(kind), line_(line), block_(block) {}

PubTatorDocument parse_single(std::string_view text) {
  std::vector<std::string> lines = split_lines(text);
  while (!lines.empty() && is_blank(lines.back())) {
    lines.pop_back();
  }
  PubTatorDocument doc;
  bool have_title = false;
  bool have_abstract = false;
  int first_anno_line = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    int line_no = static_cast<int>(i) + 1;
    if (auto tl = try_text_line(line)) {
      if (tl->marker == 't') {
        if (have_title) {
          throw PubTatorError(PubTatorError::Kind::MalformedLine,
                              "duplicate title line", line_no);
        }
        doc.doc_id = tl->id;
        doc.title = tl->text;
        have_title = true;
      } else {
        if (!have_title) {
          throw PubTatorError(PubTatorError::Kind::MalformedLine,
                              "abstract line before title line", line_no);
        }
        if (have_abstract) {
          throw PubTatorError(PubTatorError::Kind::MalformedLine,
                              "duplicate abstract line", line_no);
        }
        if (tl->id != doc.doc_id) {
          throw PubTatorError(PubTatorError::Kind::IdMismatch,
                              "abstract id \"" + tl->id +
                                  "\" does not match title id \"" +
                                  doc.doc_id + "\"",
                              line_no);
        }
        doc.abstract_text = tl->text;
        have_abstract = true;
      }
      continue;
    }
    std::vector<std::string_view> fields = split_tabs(line);
    if (fields.size() == 6) {
      if (!have_title || !have_abstract) {
        throw PubTatorError(PubTatorError::Kind::MalformedLine,
                            "annotation line before title/abstract lines",
                            line_no);
      }
      auto start = parse_offset(fields[1]);
      auto end = parse_offset(fields[2]);
      if (!start || !end) {
        throw PubTatorError(PubTatorError::Kind::MalformedLine,
                            "non-numeric annotation offsets", line_no);
      }
      if (fields[0] != doc.doc_id) {
        throw PubTatorError(PubTatorError::Kind::IdMismatch,
                            "annotation id \"" + std::string(fields[0]) +
                                "\" does not match document id \"" +
                                doc.doc_id + "\"",
                            line_no);
      }
      RawAnnotation anno;
      anno.start = *start;
      anno.end = *end;
      anno.surface = std::string(fields[3]);
      anno.type_label = std::string(fields[4]);
      anno.id_label = std::string(fields[5]);
      if (first_anno_line == 0) {
        first_anno_line = line_no;
      }
      doc.annotations.push_back(std::move(anno));
      continue;
    }
    throw PubTatorError(
        PubTatorError::Kind::MalformedLine,
        "line is neither a |t|/|a| line nor a 6-field annotation", line_no);
  }
  if (!have_title) {
    throw PubTatorError(PubTatorError::Kind::MalformedLine,
                        "missing title line", 0);
  }
  if (!have_abstract) {
    throw PubTatorError(PubTatorError::Kind::MalformedLine,
                        "missing abstract line", 0);
  }
  check_annotations(doc, PubTatorError::Kind::SpanOutOfBounds,
                    PubTatorError::Kind::SurfaceMismatch, first_anno_line);
  return doc;
}

std::vector<PubTatorDocument> parse_composed(std::string_view text) {
  std::vector<PubTatorDocument> docs;
  std::vector<std::string> lines = split_lines(text);
  std::vector<std::string> block;
  int block_index = 0;
  auto flush = [&]() {
    if (block.empty()) return;
    std::string joined;
    for (const std::string& l : block) {
      joined += l;
      joined += '\n';
    }
    try {
      docs.push_back(parse_single(joined));
    } catch (const PubTatorError& e) {
      throw PubTatorError(e.kind(),
                          "block " + std::to_string(block_index) + ": " +
                              e.what(),
                          e.line(), block_index);
    }
    block.clear();
    ++block_index;
  };
  for (const std::string& line : lines) {
    if (is_blank(line)) {
      flush();
    } else {
      block.push_back(line);
    }
  }
  flush();
  return docs;
}

void validate_document(const PubTatorDocument& doc) {
  auto fail = [](const std::string& msg) {
    throw PubTatorError(PubTatorError::Kind::InvariantViolation, msg);
  };
  if (doc.doc_id.empty()) fail("empty document id");
  if (doc.doc_id.find('|') != std::string::npos ||
      doc.doc_id.find('\t') != std::string::npos) {
    fail("document id \"" + doc.doc_id + "\" contains '|' or tab");
  }
  for (const std::string* s : {&doc.title, &doc.abstract_text}) {
    if (s->find('\n') != std::string::npos ||
        s->find('\r') != std::string::npos) {
      fail("title/abstract contains a newline in \"" + doc.doc_id + "\"");
    }
    if (s->find('\t') != std::string::npos) {
      fail("title/abstract contains a tab in \"" + doc.doc_id + "\"");
    }
  }
  for (const RawAnnotation& a : doc.annotations) {
    if (a.type_label.empty() || a.id_label.empty()) {
      fail("annotation with empty type or id in \"" + doc.doc_id + "\"");
    }
    for (const std::string* s : {&a.surface, &a.type_label, &a.id_label}) {
      if (s->find('\t') != std::string::npos ||
          s->find('\n') != std::string::npos) {
        fail("annotation field contains tab or newline in \"" + doc.doc_id +
             "\"");
      }
    }
  }
  try {
    check_annotations(doc, PubTatorError::Kind::InvariantViolation,
                      PubTatorError::Kind::InvariantViolation, 0);
  } catch (const PubTatorError& e) {
    if (e.kind() == PubTatorError::Kind::InvariantViolation) throw;
    throw PubTatorError(PubTatorError::Kind::InvariantViolation, e.what());
  }
}

std::string serialize(const PubTatorDocument& doc) {
  validate_document(doc);
  std::string out;
  out += doc.doc_id;
  out += "|t|";
  out += doc.title;
  out += '\n';
  out += doc.doc_id;
  out += "|a|";
  out += doc.abstract_text;
  out += '\n';
  for (const RawAnnotation& a : doc.annotations) {
    out += doc.doc_id;
    out += '\t';
    out += std::to_string(a.start);
    out += '\t';
    out += std::to_string(a.end);
    out += '\t';
    out += a.surface;
    out += '\t';
    out += a.type_label;
    out += '\t';
    out += a.id_label;
    out += '\n';
  }
  return out;
}

std::string serialize_composed(const std::vector<PubTatorDocument>& docs) {
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i > 0) out += '\n';
    out += serialize(docs[i]);
  }
  return out;
}

std::vector<ScanEntry> scan_directory(
    const std::filesystem::path& dir,
    const std::vector<std::string>& extensions) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw PubTatorError(PubTatorError::Kind::DirectoryUnreadable,
                        "not a readable directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (std::find(extensions.begin(), extensions.end(), ext) !=
        extensions.end()) {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    throw PubTatorError(PubTatorError::Kind::DirectoryUnreadable,
                        "failed to scan directory: " + dir.string());
  }
  std::sort(files.begin(), files.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });
  std::vector<ScanEntry> out;
  out.reserve(files.size());
  for (const std::filesystem::path& path : files) {
    ScanEntry entry;
    entry.file_name = path.filename().string();
    entry.path = path;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      entry.error = "unreadable file";
      out.push_back(std::move(entry));
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      entry.documents = parse_composed(buf.str());
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace pubtator
}  // namespace cordtag
