#ifndef CORDTAG_TESTS_HELPERS_HPP
#define CORDTAG_TESTS_HELPERS_HPP

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cordtag/document.hpp"
#include "cordtag/entity.hpp"
#include "cordtag/pubtator.hpp"
#include "cordtag/text.hpp"
#include "cordtag/vocabulary.hpp"

namespace cordtag::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("cordtag-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------
// Random generators (seeded, deterministic).

inline std::string random_word(std::mt19937& rng, int min_len = 1,
                               int max_len = 8) {
  static const std::string letters =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  std::string word;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    word += letters[pick(rng)];
  }
  return word;
}

inline std::string random_text(std::mt19937& rng, int min_words,
                               int max_words) {
  std::uniform_int_distribution<int> words(min_words, max_words);
  std::uniform_int_distribution<int> sep(0, 9);
  std::string text;
  int n = words(rng);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      int s = sep(rng);
      if (s < 7) {
        text += ' ';
      } else if (s < 8) {
        text += ", ";
      } else if (s < 9) {
        text += '-';
      } else {
        text += ". ";
      }
    }
    text += random_word(rng);
  }
  return text;
}

inline const char* id_prefix_for(EntityType type, std::mt19937& rng) {
  switch (type) {
    case EntityType::Chemical:
      return "MESH:";
    case EntityType::Disease:
      return (rng() % 2) ? "MESH:" : "OMIM:";
    case EntityType::Gene:
      return "GENE:";
    case EntityType::Species:
      return "TAXON:";
  }
  return "MESH:";
}

// A valid PubTator document with consistent annotations over random spans.
inline pubtator::PubTatorDocument random_pubtator_document(std::mt19937& rng) {
  pubtator::PubTatorDocument doc;
  doc.doc_id = random_word(rng, 1, 10);
  doc.title = random_text(rng, 1, 8);
  doc.abstract_text = random_text(rng, 0, 30);
  if (rng() % 10 == 0) {
    doc.title += "|x|odd";  // pipes in text are legal
  }
  std::u32string text = utf8_decode(doc.title);
  text.push_back(U' ');
  text += utf8_decode(doc.abstract_text);
  std::uniform_int_distribution<int> anno_count(0, 5);
  int n = anno_count(rng);
  for (int i = 0; i < n && text.size() >= 2; ++i) {
    std::uniform_int_distribution<std::size_t> start_dist(0, text.size() - 2);
    std::size_t start = start_dist(rng);
    std::uniform_int_distribution<std::size_t> end_dist(start + 1,
                                                        std::min(text.size(),
                                                                 start + 12));
    std::size_t end = end_dist(rng);
    pubtator::RawAnnotation anno;
    anno.start = start;
    anno.end = end;
    anno.surface = utf8_encode(text.substr(start, end - start));
    EntityType type =
        kAllEntityTypes[std::uniform_int_distribution<int>(0, 3)(rng)];
    anno.type_label = std::string(to_string(type));
    anno.id_label =
        std::string(id_prefix_for(type, rng)) + random_word(rng, 3, 8);
    doc.annotations.push_back(std::move(anno));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Brute-force tagging oracle: tests every substring of the paragraph against
// every vocabulary entry, keeps token-boundary-aligned hits, and applies the
// published overlap policy. Independent of the trie implementation.

inline bool oracle_is_word(char32_t c) {
  if (c < 0x80) {
    return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z') ||
           (c >= U'a' && c <= U'z');
  }
  return true;
}

inline std::u32string oracle_fold(std::u32string s) {
  for (char32_t& c : s) {
    if (c >= U'A' && c <= U'Z') c += 32;
  }
  return s;
}

inline std::vector<EntityMention> oracle_tag(const Vocabulary& vocab,
                                             const ParagraphRef& paragraph) {
  std::u32string text = utf8_decode(paragraph.text);
  std::size_t n = text.size();
  std::vector<EntityMention> candidates;
  std::set<std::tuple<std::size_t, std::size_t, EntityType, std::string>> seen;
  for (std::size_t s = 0; s < n; ++s) {
    if (s > 0 && oracle_is_word(text[s - 1]) && oracle_is_word(text[s])) {
      continue;
    }
    for (std::size_t e = s + 1; e <= n; ++e) {
      if (e < n && oracle_is_word(text[e - 1]) && oracle_is_word(text[e])) {
        continue;
      }
      std::u32string slice = text.substr(s, e - s);
      for (const VocabularyEntry& entry : vocab.entries) {
        std::u32string term = utf8_decode(entry.term);
        bool match =
            term.size() >= Vocabulary::kCaseFoldMinLength
                ? oracle_fold(slice) == oracle_fold(term)
                : slice == term;
        if (!match) continue;
        if (!seen
                 .emplace(s, e - 1, entry.entity.entity_type,
                          entry.entity.entity_id)
                 .second) {
          continue;
        }
        EntityMention m;
        m.paper_id = paragraph.paper_id;
        m.location = {paragraph.paragraph, s, e - 1};
        m.entity_str = utf8_encode(slice);
        m.entity = entry.entity;
        candidates.push_back(std::move(m));
      }
    }
  }
  // Longest wins within a type; ties to the smaller start, then the smaller
  // entity id. Cross-type overlaps are kept.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const EntityMention& a, const EntityMention& b) {
                     std::size_t la = a.location.end - a.location.start;
                     std::size_t lb = b.location.end - b.location.start;
                     if (la != lb) return la > lb;
                     if (a.location.start != b.location.start)
                       return a.location.start < b.location.start;
                     return a.entity.entity_id < b.entity.entity_id;
                   });
  std::vector<EntityMention> kept;
  for (const EntityMention& c : candidates) {
    bool blocked = false;
    for (const EntityMention& k : kept) {
      if (k.entity.entity_type == c.entity.entity_type &&
          k.location.start <= c.location.end &&
          c.location.start <= k.location.end) {
        blocked = true;
        break;
      }
    }
    if (!blocked) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const EntityMention& a, const EntityMention& b) {
              return std::tie(a.location.start, a.location.end,
                              a.entity.entity_type, a.entity.entity_id) <
                     std::tie(b.location.start, b.location.end,
                              b.entity.entity_type, b.entity.entity_id);
            });
  return kept;
}

// Random (vocabulary, text) cases for oracle-equivalence checks. Texts are
// built from a mix of vocabulary terms (sometimes case-mangled) and noise.
struct OracleCase {
  Vocabulary vocab;
  std::string text;
};

inline OracleCase random_oracle_case(std::mt19937& rng) {
  OracleCase out;
  std::uniform_int_distribution<int> term_count(1, 12);
  std::set<std::string> used;
  int terms = term_count(rng);
  for (int i = 0; i < terms; ++i) {
    std::uniform_int_distribution<int> parts_dist(1, 2);
    std::string term;
    int parts = parts_dist(rng);
    for (int p = 0; p < parts; ++p) {
      if (p > 0) term += (rng() % 2) ? "-" : " ";
      term += random_word(rng, 2, 7);
    }
    if (!used.insert(term).second) continue;
    EntityType type =
        kAllEntityTypes[std::uniform_int_distribution<int>(0, 3)(rng)];
    Entity entity{std::string(id_prefix_for(type, rng)) +
                      std::to_string(i) + random_word(rng, 2, 4),
                  type};
    out.vocab.entries.push_back({term, entity});
  }
  std::uniform_int_distribution<int> token_count(0, 20);
  int tokens = token_count(rng);
  std::string text;
  for (int i = 0; i < tokens; ++i) {
    if (i > 0) {
      switch (rng() % 6) {
        case 0:
          text += ", ";
          break;
        case 1:
          text += "-";
          break;
        default:
          text += " ";
      }
    }
    if (rng() % 5 < 2 && !out.vocab.entries.empty()) {
      std::uniform_int_distribution<std::size_t> pick(
          0, out.vocab.entries.size() - 1);
      std::string term = out.vocab.entries[pick(rng)].term;
      if (rng() % 3 == 0) {
        for (char& c : term) {
          if (rng() % 2 && c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
        }
      }
      text += term;
    } else {
      text += random_word(rng, 1, 7);
    }
  }
  out.text = text;
  return out;
}

// A deterministic fixture vocabulary with `size` single-word terms cycling
// through the entity types.
inline std::string fixture_vocabulary_text(std::size_t size) {
  std::string text = "# fixture vocabulary\n";
  for (std::size_t i = 0; i < size; ++i) {
    EntityType type = kAllEntityTypes[i % 4];
    std::string id;
    switch (type) {
      case EntityType::Chemical:
        id = "MESH:D" + std::to_string(100000 + i);
        break;
      case EntityType::Disease:
        id = (i % 8 < 4 ? "MESH:D" : "OMIM:") + std::to_string(200000 + i);
        break;
      case EntityType::Gene:
        id = "GENE:" + std::to_string(300000 + i);
        break;
      case EntityType::Species:
        id = "TAXON:" + std::to_string(400000 + i);
        break;
    }
    std::string term = "term" + std::to_string(i) + "x";
    text += id + "\t" + std::string(to_string(type)) + "\t" + term;
    if (i % 7 == 0) {
      text += "|term" + std::to_string(i) + "alias";
    }
    text += "\n";
  }
  return text;
}

// A CORD-19 style corpus whose paragraphs embed fixture vocabulary terms.
inline std::string cord19_json(const Document& doc) {
  std::string json = "{\"paper_id\":\"" + doc.paper_id + "\",";
  json += "\"metadata\":{\"title\":\"" + doc.title + "\"},";
  json += "\"abstract\":[";
  for (std::size_t i = 0; i < doc.abstract_paragraphs.size(); ++i) {
    if (i) json += ",";
    json += "{\"text\":\"" + doc.abstract_paragraphs[i] + "\"}";
  }
  json += "],\"body_text\":[";
  for (std::size_t i = 0; i < doc.body_paragraphs.size(); ++i) {
    if (i) json += ",";
    json += "{\"text\":\"" + doc.body_paragraphs[i] + "\"}";
  }
  json += "]}";
  return json;
}

inline Document random_fixture_document(std::mt19937& rng, std::size_t index,
                                        std::size_t vocab_size,
                                        int body_paragraphs) {
  auto sentence = [&](int terms) {
    std::string text = random_text(rng, 2, 6);
    for (int t = 0; t < terms; ++t) {
      std::uniform_int_distribution<std::size_t> pick(0, vocab_size - 1);
      text += " term" + std::to_string(pick(rng)) + "x";
      text += " " + random_word(rng, 2, 6);
    }
    return text;
  };
  Document doc;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "p%05zu", index);
  doc.paper_id = buf;
  doc.title = sentence(1);
  doc.abstract_paragraphs.push_back(sentence(2));
  for (int i = 0; i < body_paragraphs; ++i) {
    doc.body_paragraphs.push_back(sentence(2));
  }
  return doc;
}

}  // namespace cordtag::testing

#endif  // CORDTAG_TESTS_HELPERS_HPP
