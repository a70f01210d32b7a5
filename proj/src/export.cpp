#include "cordtag/export.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cordtag/backend.hpp"
#include "cordtag/pubtator.hpp"
#include "cordtag/text.hpp"

namespace cordtag {

namespace {

nlohmann::json mention_record(const EntityMention& m) {
  nlohmann::json record;
  record["location"]["paragraph"] = m.location.paragraph;
  record["location"]["start"] = m.location.start;
  record["location"]["end"] = m.location.end;
  record["entity_str"] = m.entity_str;
  record["entity_type"] = std::string(to_string(m.entity.entity_type));
  record["entity_id"] = m.entity.entity_id;
  return record;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  out << data;
  if (!out) {
    throw ExportError(ExportError::Kind::WriteFailure,
                      "cannot write " + path.string());
  }
}

}  // namespace

std::uint64_t export_json(const Store& store, Scope scope,
                          const std::filesystem::path& destination) {
  // nlohmann::json objects keep keys sorted, which the dump format requires.
  nlohmann::json root = nlohmann::json::object();
  for (const std::string& paper_id : store.paper_ids()) {
    root[paper_id] = nlohmann::json::array();
  }
  MentionFilter filter;
  filter.scope = scope;
  std::uint64_t count = 0;
  for (const EntityMention& m : store.query_mentions(filter)) {
    root[m.paper_id].push_back(mention_record(m));
    ++count;
  }
  write_file(destination, root.dump(2) + "\n");
  return count;
}

std::size_t export_pubtator(const Store& store, Scope scope,
                            const std::filesystem::path& destination_dir,
                            std::size_t docs_per_file) {
  if (docs_per_file == 0) docs_per_file = 1;
  std::vector<std::string> papers = store.paper_ids();
  if (!papers.empty()) {
    std::filesystem::create_directories(destination_dir);
  }

  std::size_t files_written = 0;
  std::vector<pubtator::PubTatorDocument> blocks;
  std::size_t docs_in_file = 0;

  auto flush = [&]() {
    if (blocks.empty()) return;
    std::ostringstream name;
    name << "part-" << std::setw(5) << std::setfill('0') << files_written
         << ".pubtator";
    write_file(destination_dir / name.str(),
               pubtator::serialize_composed(blocks));
    ++files_written;
    blocks.clear();
    docs_in_file = 0;
  };

  for (const std::string& paper_id : papers) {
    std::vector<ParagraphRef> paras = store.document_paragraphs(paper_id, scope);
    MentionFilter filter;
    filter.paper_ids = std::vector<std::string>{paper_id};
    filter.scope = scope;
    std::vector<EntityMention> mentions = store.query_mentions(filter);

    // Title + abstract carry document-level offsets in one block.
    pubtator::PubTatorDocument main_doc;
    main_doc.doc_id = paper_id;
    for (const ParagraphRef& p : paras) {
      if (p.paragraph == 0) main_doc.title = p.text;
      if (p.paragraph == 1) main_doc.abstract_text = p.text;
    }
    std::size_t title_len = utf8_length(main_doc.title);
    std::map<std::size_t, pubtator::PubTatorDocument> body_blocks;
    for (const ParagraphRef& p : paras) {
      if (p.paragraph >= 2) {
        body_blocks.emplace(p.paragraph, package_paragraph(p));
      }
    }
    for (const EntityMention& m : mentions) {
      pubtator::RawAnnotation anno;
      anno.surface = m.entity_str;
      anno.type_label = std::string(to_string(m.entity.entity_type));
      anno.id_label = m.entity.entity_id;
      if (m.location.paragraph == 0) {
        anno.start = m.location.start;
        anno.end = m.location.end + 1;
        main_doc.annotations.push_back(std::move(anno));
      } else if (m.location.paragraph == 1) {
        anno.start = title_len + 1 + m.location.start;
        anno.end = title_len + 1 + m.location.end + 1;
        main_doc.annotations.push_back(std::move(anno));
      } else {
        auto it = body_blocks.find(m.location.paragraph);
        if (it == body_blocks.end()) continue;  // paragraph outside scope
        std::size_t offset = utf8_length(it->second.title) + 1;
        anno.start = offset + m.location.start;
        anno.end = offset + m.location.end + 1;
        it->second.annotations.push_back(std::move(anno));
      }
    }
    blocks.push_back(std::move(main_doc));
    for (auto& [index, block] : body_blocks) {
      blocks.push_back(std::move(block));
    }
    if (++docs_in_file == docs_per_file) flush();
  }
  flush();
  return files_written;
}

StatsTable compute_stats(const Store& store) {
  StatsTable stats;
  stats.abstracts = store.mention_counts(Scope::Abstracts);
  stats.fulltext = store.mention_counts(Scope::Fulltext);
  return stats;
}

std::string render_stats(const StatsTable& stats) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "Corpus";
  for (EntityType type : kAllEntityTypes) {
    std::string header(to_string(type));
    if (type != EntityType::Species) header += "s";
    out << std::right << std::setw(12) << header;
  }
  out << "\n";
  auto row = [&](const char* label, const std::array<std::uint64_t, 4>& counts) {
    out << std::left << std::setw(12) << label;
    for (std::uint64_t c : counts) {
      out << std::right << std::setw(12) << c;
    }
    out << "\n";
  };
  row("Abstracts", stats.abstracts);
  row("Fulltexts", stats.fulltext);
  return out.str();
}

std::vector<ValidationIssue> validate_dump(const std::filesystem::path& dump,
                                           const Store& store) {
  std::vector<ValidationIssue> issues;
  auto report = [&](const std::string& paper, std::size_t index,
                    const std::string& message) {
    issues.push_back({paper, index, message});
  };

  std::ifstream in(dump, std::ios::binary);
  if (!in) {
    report("", 0, "cannot open dump file: " + dump.string());
    return issues;
  }
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    report("", 0, std::string("dump is not valid JSON: ") + e.what());
    return issues;
  }
  if (!root.is_object()) {
    report("", 0, "top-level JSON value must be an object");
    return issues;
  }

  for (const auto& [paper_id, records] : root.items()) {
    if (!records.is_array()) {
      report(paper_id, 0, "value is not an array of mention records");
      continue;
    }
    auto info = store.document_info(paper_id);
    if (!info) {
      report(paper_id, 0, "paper is not present in the store");
      continue;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      const nlohmann::json& r = records[i];
      if (!r.is_object() || r.size() != 4 || !r.contains("location") ||
          !r.contains("entity_str") || !r.contains("entity_type") ||
          !r.contains("entity_id")) {
        report(paper_id, i,
               "record must have exactly location, entity_str, entity_type, "
               "entity_id");
        continue;
      }
      const nlohmann::json& loc = r["location"];
      if (!loc.is_object() || loc.size() != 3 || !loc.contains("paragraph") ||
          !loc.contains("start") || !loc.contains("end") ||
          !loc["paragraph"].is_number_unsigned() ||
          !loc["start"].is_number_unsigned() ||
          !loc["end"].is_number_unsigned()) {
        report(paper_id, i,
               "location must have non-negative integer paragraph, start, "
               "end");
        continue;
      }
      if (!r["entity_str"].is_string() || !r["entity_type"].is_string() ||
          !r["entity_id"].is_string()) {
        report(paper_id, i, "entity fields must be strings");
        continue;
      }
      std::string type_name = r["entity_type"].get<std::string>();
      if (!entity_type_from_string(type_name)) {
        report(paper_id, i, "unknown entity_type \"" + type_name + "\"");
        continue;
      }
      if (r["entity_id"].get<std::string>().empty()) {
        report(paper_id, i, "empty entity_id");
        continue;
      }
      std::size_t paragraph = loc["paragraph"].get<std::size_t>();
      std::size_t start = loc["start"].get<std::size_t>();
      std::size_t end = loc["end"].get<std::size_t>();
      auto text = store.paragraph_text(paper_id, paragraph);
      if (!text) {
        report(paper_id, i,
               "paragraph " + std::to_string(paragraph) + " does not exist");
        continue;
      }
      if (start > end) {
        report(paper_id, i, "start > end");
        continue;
      }
      std::string slice = utf8_slice(*text, start, end + 1);
      std::string entity_str = r["entity_str"].get<std::string>();
      if (slice != entity_str) {
        report(paper_id, i,
               "entity_str \"" + entity_str +
                   "\" does not match paragraph slice \"" + slice + "\"");
      }
    }
  }
  return issues;
}

}  // namespace cordtag
