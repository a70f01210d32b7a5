#include <doctest.h>

#include <random>

#include "cordtag/backend.hpp"
#include "cordtag/text.hpp"
#include "helpers.hpp"

using namespace cordtag;
namespace ct = cordtag::testing;

namespace {

const char* kAnnotateScript = R"(#!/bin/sh
# Echoes the composed input and appends one Disease annotation per document
# covering the first five characters of the abstract.
awk -F'|' '
/\|t\|/ { id=$1; title=$3; print; next }
/\|a\|/ { print; L=length(title); printf "%s\t%d\t%d\tcovid\tDisease\tMESH:D000086382\n", id, L+1, L+6; next }
{ print }
' "$1" > "$2"
)";

TaggerBackendConfig external_config(const std::string& name,
                                    const std::string& command,
                                    const std::filesystem::path& scratch,
                                    double timeout = 10.0) {
  TaggerBackendConfig config;
  config.name = name;
  config.kind = BackendKind::ExternalProcess;
  config.entity_types = {EntityType::Disease};
  config.command_template = command;
  config.scratch_root = scratch.string();
  config.timeout_seconds = timeout;
  return config;
}

std::vector<DocumentInput> sample_batch() {
  DocumentInput doc;
  doc.paper_id = "p1";
  doc.paragraphs = {{"p1", 2, "covid spreads fast"}, {"p1", 3, "covid mutates"}};
  return {doc};
}

}  // namespace

TEST_SUITE("backend") {

TEST_CASE("pseudo document packaging") {
  ParagraphRef paragraph{"p1", 2, "some text"};
  pubtator::PubTatorDocument doc = package_paragraph(paragraph);
  CHECK(doc.doc_id == "p1:2");
  CHECK(doc.title == "p1:2");
  CHECK(doc.abstract_text == "some text");
  CHECK(doc.annotations.empty());

  auto parsed = parse_pseudo_doc_id("p1:2");
  REQUIRE(parsed.has_value());
  CHECK(parsed->first == "p1");
  CHECK(parsed->second == 2);
  CHECK(!parse_pseudo_doc_id("plain").has_value());
  CHECK(!parse_pseudo_doc_id("p1:").has_value());
  CHECK(!parse_pseudo_doc_id("p1:x2").has_value());
}

TEST_CASE("map_offsets arithmetic") {
  pubtator::PubTatorDocument origin;
  origin.doc_id = "p1:2";
  origin.title = "p1:2";  // 4 scalars
  origin.abstract_text = "covid spreads";
  pubtator::RawAnnotation anno{5, 10, "covid", "Disease", "MESH:X"};
  Location loc = map_offsets(origin, anno, 2);
  CHECK(loc.paragraph == 2);
  CHECK(loc.start == 0);
  CHECK(loc.end == 4);
}

TEST_CASE("map_offsets rejects annotations in the synthetic title") {
  pubtator::PubTatorDocument origin;
  origin.doc_id = "p1:2";
  origin.title = "p1:2";
  origin.abstract_text = "covid";
  pubtator::RawAnnotation anno{0, 3, "p1:", "Disease", "MESH:X"};
  try {
    map_offsets(origin, anno, 2);
    FAIL("expected OffsetUnmappable");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::OffsetUnmappable);
  }
  // Starting exactly on the separator space is also unmappable.
  pubtator::RawAnnotation sep{4, 6, " c", "Disease", "MESH:X"};
  CHECK_THROWS_AS(map_offsets(origin, sep, 2), BackendError);
}

TEST_CASE("map_offsets round trip over random spans") {
  std::mt19937 rng(61);
  for (int round = 0; round < 200; ++round) {
    std::string text = ct::random_text(rng, 1, 12);
    ParagraphRef paragraph{"pp", 1 + rng() % 9, text};
    pubtator::PubTatorDocument origin = package_paragraph(paragraph);
    std::u32string doc_text = utf8_decode(origin.title);
    doc_text.push_back(U' ');
    doc_text += utf8_decode(origin.abstract_text);
    std::size_t base = utf8_length(origin.title) + 1;
    std::size_t text_len = utf8_length(text);
    if (text_len == 0) continue;
    std::uniform_int_distribution<std::size_t> start_dist(0, text_len - 1);
    std::size_t s = start_dist(rng);
    std::uniform_int_distribution<std::size_t> end_dist(s + 1, text_len);
    std::size_t e = end_dist(rng);
    pubtator::RawAnnotation anno;
    anno.start = base + s;
    anno.end = base + e;
    anno.surface = utf8_encode(doc_text.substr(anno.start, anno.end - anno.start));
    Location loc = map_offsets(origin, anno, paragraph.paragraph);
    CHECK(loc.start == s);
    CHECK(loc.end == e - 1);
    CHECK(utf8_slice(text, loc.start, loc.end + 1) == anno.surface);
  }
}

TEST_CASE("external backend with copy stub finds nothing") {
  ct::TempDir dir("ext-copy");
  ct::write_file(dir.path() / "copy.sh", "#!/bin/sh\ncp \"$1\" \"$2\"\n");
  auto backend = make_backend(external_config(
      "copy", "sh " + (dir.path() / "copy.sh").string() + " {input} {output}",
      dir.path() / "scratch"));
  CHECK(backend->tag_batch(sample_batch()).empty());
}

TEST_CASE("external backend remaps annotations to paragraph coordinates") {
  ct::TempDir dir("ext-anno");
  ct::write_file(dir.path() / "annotate.sh", kAnnotateScript);
  auto backend = make_backend(external_config(
      "anno",
      "sh " + (dir.path() / "annotate.sh").string() + " {input} {output}",
      dir.path() / "scratch"));
  auto mentions = backend->tag_batch(sample_batch());
  REQUIRE(mentions.size() == 2);
  for (const EntityMention& m : mentions) {
    CHECK(m.paper_id == "p1");
    CHECK(m.location.start == 0);
    CHECK(m.location.end == 4);
    CHECK(m.entity_str == "covid");
    CHECK(m.entity.entity_type == EntityType::Disease);
    CHECK(m.entity.entity_id == "MESH:D000086382");
  }
  CHECK(mentions[0].location.paragraph == 2);
  CHECK(mentions[1].location.paragraph == 3);
}

TEST_CASE("annotations outside the declared types are dropped") {
  ct::TempDir dir("ext-drop");
  ct::write_file(dir.path() / "annotate.sh", kAnnotateScript);
  TaggerBackendConfig config = external_config(
      "anno",
      "sh " + (dir.path() / "annotate.sh").string() + " {input} {output}",
      dir.path() / "scratch");
  config.entity_types = {EntityType::Gene};  // stub emits Disease
  auto backend = make_backend(config);
  CHECK(backend->tag_batch(sample_batch()).empty());
}

TEST_CASE("timeout kills the batch") {
  ct::TempDir dir("ext-slow");
  ct::write_file(dir.path() / "slow.sh", "#!/bin/sh\nsleep 5\ncp \"$1\" \"$2\"\n");
  auto backend = make_backend(external_config(
      "slow", "sh " + (dir.path() / "slow.sh").string() + " {input} {output}",
      dir.path() / "scratch", 0.3));
  try {
    backend->tag_batch(sample_batch());
    FAIL("expected ProcessTimeout");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::ProcessTimeout);
  }
}

TEST_CASE("nonzero exit and unparseable output are distinct errors") {
  ct::TempDir dir("ext-bad");
  ct::write_file(dir.path() / "fail.sh", "#!/bin/sh\nexit 3\n");
  auto failing = make_backend(external_config(
      "fail", "sh " + (dir.path() / "fail.sh").string() + " {input} {output}",
      dir.path() / "scratch"));
  try {
    failing->tag_batch(sample_batch());
    FAIL("expected NonZeroExit");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::NonZeroExit);
  }

  ct::write_file(dir.path() / "garbage.sh",
                 "#!/bin/sh\necho 'not pubtator at all' > \"$2\"\n");
  auto garbage = make_backend(external_config(
      "garbage",
      "sh " + (dir.path() / "garbage.sh").string() + " {input} {output}",
      dir.path() / "scratch"));
  try {
    garbage->tag_batch(sample_batch());
    FAIL("expected OutputUnparseable");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendError::Kind::OutputUnparseable);
  }
}

TEST_CASE("config validation") {
  TaggerBackendConfig config;
  config.name = "x";
  config.kind = BackendKind::ExternalProcess;
  config.entity_types = {EntityType::Gene};
  config.command_template = "tool {input}";  // missing {output}
  CHECK_THROWS_AS(validate_backend_config(config), BackendError);
  config.command_template = "tool {input} {output}";
  config.timeout_seconds = 0;
  CHECK_THROWS_AS(validate_backend_config(config), BackendError);
  config.timeout_seconds = 5;
  validate_backend_config(config);  // now valid

  TaggerBackendConfig lex;
  lex.name = "lex";
  lex.kind = BackendKind::BuiltinLexicon;
  lex.entity_types = {};
  lex.vocabulary_path = "vocab.tsv";
  CHECK_THROWS_AS(validate_backend_config(lex), BackendError);  // no types
}

}  // TEST_SUITE
