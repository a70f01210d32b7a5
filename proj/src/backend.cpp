#include "cordtag/backend.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "cordtag/hash.hpp"
#include "cordtag/lexicon.hpp"
#include "cordtag/subprocess.hpp"
#include "cordtag/text.hpp"
#include "cordtag/vocabulary.hpp"

namespace cordtag {

namespace {

std::string types_key(const std::vector<EntityType>& types) {
  std::string key;
  for (EntityType t : kAllEntityTypes) {
    if (std::find(types.begin(), types.end(), t) != types.end()) {
      key += to_string(t);
      key += ',';
    }
  }
  return key;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BackendError(BackendError::Kind::InvalidConfig,
                       "cannot read file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class LexiconBackend : public TaggerBackend {
 public:
  LexiconBackend(TaggerBackendConfig config, const std::string& vocab_text)
      : config_(std::move(config)),
        fingerprint_(fnv1a_hex("builtin-lexicon\n" +
                               types_key(config_.entity_types) + "\n" +
                               vocab_text)) {
    Vocabulary vocab = load_vocabulary(vocab_text);
    Vocabulary filtered;
    for (VocabularyEntry& entry : vocab.entries) {
      if (std::find(config_.entity_types.begin(), config_.entity_types.end(),
                    entry.entity.entity_type) != config_.entity_types.end()) {
        filtered.entries.push_back(std::move(entry));
      }
    }
    tagger_ = std::make_unique<LexiconTagger>(filtered);
  }

  const std::string& name() const override { return config_.name; }
  const std::vector<EntityType>& entity_types() const override {
    return config_.entity_types;
  }
  std::string fingerprint() const override { return fingerprint_; }

  std::vector<EntityMention> tag_batch(
      const std::vector<DocumentInput>& batch) override {
    std::vector<EntityMention> out;
    for (const DocumentInput& doc : batch) {
      for (const ParagraphRef& paragraph : doc.paragraphs) {
        std::vector<EntityMention> found = tagger_->tag(paragraph);
        out.insert(out.end(), std::make_move_iterator(found.begin()),
                   std::make_move_iterator(found.end()));
      }
    }
    return out;
  }

 private:
  TaggerBackendConfig config_;
  std::string fingerprint_;
  std::unique_ptr<LexiconTagger> tagger_;
};

class ExternalProcessBackend : public TaggerBackend {
 public:
  explicit ExternalProcessBackend(TaggerBackendConfig config)
      : config_(std::move(config)),
        fingerprint_(fnv1a_hex(
            "external-process\n" + types_key(config_.entity_types) + "\n" +
            config_.command_template + "\n" +
            std::to_string(config_.timeout_seconds) + "\n" +
            std::to_string(config_.batch_size))) {
    if (config_.scratch_root.empty()) {
      config_.scratch_root =
          (std::filesystem::temp_directory_path() / "cordtag-scratch")
              .string();
    }
  }

  const std::string& name() const override { return config_.name; }
  const std::vector<EntityType>& entity_types() const override {
    return config_.entity_types;
  }
  std::string fingerprint() const override { return fingerprint_; }

  std::vector<EntityMention> tag_batch(
      const std::vector<DocumentInput>& batch) override {
    if (batch.empty()) return {};

    std::vector<pubtator::PubTatorDocument> pseudo_docs;
    std::unordered_map<std::string, std::pair<const DocumentInput*, std::size_t>>
        by_id;  // pseudo id -> (document, paragraph index)
    for (const DocumentInput& doc : batch) {
      for (const ParagraphRef& paragraph : doc.paragraphs) {
        pubtator::PubTatorDocument pd = package_paragraph(paragraph);
        by_id.emplace(pd.doc_id,
                      std::make_pair(&doc, paragraph.paragraph));
        pseudo_docs.push_back(std::move(pd));
      }
    }

    // In-flight batches never share a working directory.
    static std::atomic<std::uint64_t> counter{0};
    std::filesystem::path work_dir =
        std::filesystem::path(config_.scratch_root) /
        (config_.name + "-" + std::to_string(getpid()) + "-" +
         std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(work_dir);
    std::filesystem::path input_path = work_dir / "input.pubtator";
    std::filesystem::path output_path = work_dir / "output.pubtator";

    {
      std::ofstream out(input_path, std::ios::binary);
      out << pubtator::serialize_composed(pseudo_docs);
      if (!out) {
        throw BackendError(BackendError::Kind::InvalidConfig,
                           "cannot write " + input_path.string());
      }
    }

    std::string command = substitute(config_.command_template,
                                     input_path.string(), output_path.string());
    CommandResult result =
        run_command(command, work_dir, config_.timeout_seconds);
    if (result.timed_out) {
      throw BackendError(BackendError::Kind::ProcessTimeout,
                         "backend \"" + config_.name + "\" exceeded " +
                             std::to_string(config_.timeout_seconds) +
                             "s (work dir " + work_dir.string() + ")");
    }
    if (result.exit_code != 0) {
      throw BackendError(BackendError::Kind::NonZeroExit,
                         "backend \"" + config_.name + "\" exited with " +
                             std::to_string(result.exit_code) + " (work dir " +
                             work_dir.string() + ")");
    }
    if (!std::filesystem::exists(output_path)) {
      throw BackendError(BackendError::Kind::OutputUnparseable,
                         "backend \"" + config_.name +
                             "\" produced no output file");
    }

    std::vector<pubtator::PubTatorDocument> output_docs;
    try {
      output_docs = pubtator::parse_composed(read_file(output_path));
    } catch (const pubtator::PubTatorError& e) {
      throw BackendError(BackendError::Kind::OutputUnparseable,
                         "backend \"" + config_.name + "\" output: " +
                             e.what() + " (work dir " + work_dir.string() +
                             ")");
    }

    std::vector<EntityMention> mentions;
    for (const pubtator::PubTatorDocument& doc : output_docs) {
      auto it = by_id.find(doc.doc_id);
      if (it == by_id.end()) {
        throw BackendError(BackendError::Kind::OutputUnparseable,
                           "backend \"" + config_.name +
                               "\" returned unknown document id \"" +
                               doc.doc_id + "\"");
      }
      const DocumentInput& origin_doc = *it->second.first;
      std::size_t paragraph_index = it->second.second;
      for (const pubtator::RawAnnotation& anno : doc.annotations) {
        auto type = entity_type_from_string(anno.type_label);
        if (!type || std::find(config_.entity_types.begin(),
                               config_.entity_types.end(),
                               *type) == config_.entity_types.end()) {
          continue;  // outside this backend's declared types
        }
        EntityMention mention;
        mention.paper_id = origin_doc.paper_id;
        mention.location = map_offsets(doc, anno, paragraph_index);
        mention.entity_str = anno.surface;
        mention.entity = Entity{anno.id_label, *type};
        mentions.push_back(std::move(mention));
      }
    }
    std::filesystem::remove_all(work_dir);
    return mentions;
  }

 private:
  static std::string substitute(std::string text, const std::string& input,
                                const std::string& output) {
    auto replace_all = [](std::string& s, const std::string& from,
                          const std::string& to) {
      std::size_t pos = 0;
      while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
      }
    };
    replace_all(text, "{input}", input);
    replace_all(text, "{output}", output);
    return text;
  }

  TaggerBackendConfig config_;
  std::string fingerprint_;
};

}  // namespace

void validate_backend_config(const TaggerBackendConfig& config) {
  auto fail = [](const std::string& msg) {
    throw BackendError(BackendError::Kind::InvalidConfig, msg);
  };
  if (config.name.empty()) fail("backend without a name");
  if (config.entity_types.empty()) {
    fail("backend \"" + config.name + "\" declares no entity types");
  }
  for (std::size_t i = 0; i < config.entity_types.size(); ++i) {
    for (std::size_t j = i + 1; j < config.entity_types.size(); ++j) {
      if (config.entity_types[i] == config.entity_types[j]) {
        fail("backend \"" + config.name + "\" repeats an entity type");
      }
    }
  }
  if (config.kind == BackendKind::BuiltinLexicon) {
    if (config.vocabulary_path.empty()) {
      fail("backend \"" + config.name + "\" needs a vocabulary path");
    }
  } else {
    if (config.command_template.find("{input}") == std::string::npos ||
        config.command_template.find("{output}") == std::string::npos) {
      fail("backend \"" + config.name +
           "\" command template must contain {input} and {output}");
    }
    if (config.timeout_seconds <= 0) {
      fail("backend \"" + config.name + "\" timeout must be positive");
    }
    if (config.batch_size < 0) {
      fail("backend \"" + config.name + "\" batch size must be >= 1");
    }
  }
}

std::shared_ptr<TaggerBackend> make_backend(const TaggerBackendConfig& config) {
  validate_backend_config(config);
  if (config.kind == BackendKind::BuiltinLexicon) {
    std::string vocab_text = read_file(config.vocabulary_path);
    try {
      return std::make_shared<LexiconBackend>(config, vocab_text);
    } catch (const VocabularyError& e) {
      throw BackendError(BackendError::Kind::InvalidConfig,
                         "vocabulary " + config.vocabulary_path + ": " +
                             e.what());
    }
  }
  return std::make_shared<ExternalProcessBackend>(config);
}

std::string pseudo_doc_id(const std::string& paper_id, std::size_t paragraph) {
  return paper_id + ":" + std::to_string(paragraph);
}

std::optional<std::pair<std::string, std::size_t>> parse_pseudo_doc_id(
    const std::string& doc_id) {
  std::size_t colon = doc_id.rfind(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 >= doc_id.size()) {
    return std::nullopt;
  }
  std::size_t index = 0;
  for (std::size_t i = colon + 1; i < doc_id.size(); ++i) {
    char c = doc_id[i];
    if (c < '0' || c > '9') return std::nullopt;
    index = index * 10 + static_cast<std::size_t>(c - '0');
  }
  return std::make_pair(doc_id.substr(0, colon), index);
}

pubtator::PubTatorDocument package_paragraph(const ParagraphRef& paragraph) {
  pubtator::PubTatorDocument doc;
  doc.doc_id = pseudo_doc_id(paragraph.paper_id, paragraph.paragraph);
  doc.title = doc.doc_id;
  doc.abstract_text = paragraph.text;
  return doc;
}

Location map_offsets(const pubtator::PubTatorDocument& origin,
                     const pubtator::RawAnnotation& annotation,
                     std::size_t paragraph_index) {
  std::size_t abstract_offset = utf8_length(origin.title) + 1;
  if (annotation.start < abstract_offset) {
    throw BackendError(
        BackendError::Kind::OffsetUnmappable,
        "annotation [" + std::to_string(annotation.start) + "," +
            std::to_string(annotation.end) +
            ") starts inside the synthetic title of \"" + origin.doc_id +
            "\"");
  }
  Location loc;
  loc.paragraph = paragraph_index;
  loc.start = annotation.start - abstract_offset;
  loc.end = annotation.end - abstract_offset - 1;
  return loc;
}

}  // namespace cordtag
