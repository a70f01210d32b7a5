#include <doctest.h>

#include <random>

#include "cordtag/lexicon.hpp"
#include "helpers.hpp"

using namespace cordtag;
namespace ct = cordtag::testing;

namespace {

Vocabulary vocab_of(
    std::initializer_list<std::pair<const char*, Entity>> entries) {
  Vocabulary vocab;
  for (const auto& [term, entity] : entries) {
    vocab.entries.push_back({term, entity});
  }
  return vocab;
}

}  // namespace

TEST_SUITE("lexicon") {

TEST_CASE("single match with inclusive end") {
  Vocabulary vocab =
      vocab_of({{"simvastatin", {"MESH:D019821", EntityType::Chemical}}});
  ParagraphRef paragraph{"p1", 2, "Simvastatin reduces risk."};
  auto mentions = tag_paragraph(vocab, paragraph);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].location.paragraph == 2);
  CHECK(mentions[0].location.start == 0);
  CHECK(mentions[0].location.end == 10);
  CHECK(mentions[0].entity_str == "Simvastatin");  // original casing
  CHECK(mentions[0].entity.entity_id == "MESH:D019821");
}

TEST_CASE("empty vocabulary and empty text") {
  Vocabulary empty;
  CHECK(tag_paragraph(empty, {"p", 0, "some text"}).empty());
  Vocabulary vocab = vocab_of({{"virus", {"TAXON:1", EntityType::Species}}});
  CHECK(tag_paragraph(vocab, {"p", 0, ""}).empty());
}

TEST_CASE("longest match suppresses the shorter same-type hit") {
  Vocabulary vocab =
      vocab_of({{"covid", {"MESH:C1", EntityType::Disease}},
                {"covid-19", {"MESH:C2", EntityType::Disease}}});
  auto mentions = tag_paragraph(vocab, {"p", 1, "covid-19 outbreak"});
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_str == "covid-19");
  CHECK(mentions[0].location.start == 0);
  CHECK(mentions[0].location.end == 7);
}

TEST_CASE("cross-type overlaps are kept") {
  Vocabulary vocab = vocab_of({{"lambda", {"GENE:7", EntityType::Gene}},
                               {"lambda", {"TAXON:9", EntityType::Species}}});
  auto mentions = tag_paragraph(vocab, {"p", 1, "the lambda strain"});
  CHECK(mentions.size() == 2);
}

TEST_CASE("matches align to token boundaries") {
  Vocabulary vocab = vocab_of({{"ovid", {"MESH:X", EntityType::Disease}},
                               {"cov", {"MESH:Y", EntityType::Disease}}});
  // no hits inside the word "covid"
  CHECK(tag_paragraph(vocab, {"p", 0, "covid"}).empty());
  CHECK(tag_paragraph(vocab, {"p", 0, "an ovid remark"}).size() == 1);
}

TEST_CASE("short terms are case-sensitive, long terms are not") {
  Vocabulary vocab = vocab_of({{"APC", {"GENE:324", EntityType::Gene}},
                               {"simvastatin", {"MESH:D0", EntityType::Chemical}}});
  CHECK(tag_paragraph(vocab, {"p", 0, "APC pathway"}).size() == 1);
  CHECK(tag_paragraph(vocab, {"p", 0, "apc pathway"}).empty());
  CHECK(tag_paragraph(vocab, {"p", 0, "SIMVASTATIN works"}).size() == 1);
}

TEST_CASE("multi-word and hyphenated terms match") {
  Vocabulary vocab =
      vocab_of({{"breast cancer", {"MESH:D001943", EntityType::Disease}}});
  auto mentions = tag_paragraph(vocab, {"p", 3, "Breast Cancer screening"});
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_str == "Breast Cancer");
  CHECK(mentions[0].location.end == 12);
}

TEST_CASE("resolve_overlaps basic rules") {
  CHECK(resolve_overlaps({}).empty());

  EntityMention a{"p", {1, 0, 5}, "foobar", {"MESH:B", EntityType::Disease}};
  EntityMention b{"p", {1, 0, 5}, "foobar", {"MESH:A", EntityType::Disease}};
  auto kept = resolve_overlaps({a, b});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].entity.entity_id == "MESH:A");  // tie broken by smaller id

  EntityMention small{"p", {1, 0, 5}, "sixchr", {"MESH:A", EntityType::Disease}};
  EntityMention large{"p", {1, 0, 8}, "ninechars", {"MESH:B", EntityType::Disease}};
  kept = resolve_overlaps({small, large});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].location.end == 8);  // longest wins
}

TEST_CASE("resolve_overlaps never crosses types") {
  std::mt19937 rng(55);
  for (int round = 0; round < 100; ++round) {
    std::vector<EntityMention> mentions;
    std::uniform_int_distribution<int> count(0, 12);
    int n = count(rng);
    for (int i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> start(0, 30);
      std::size_t s = start(rng);
      std::uniform_int_distribution<std::size_t> end(s, s + 10);
      EntityType type =
          kAllEntityTypes[std::uniform_int_distribution<int>(0, 3)(rng)];
      mentions.push_back({"p",
                          {1, s, end(rng)},
                          "x",
                          {"MESH:" + std::to_string(i), type}});
    }
    auto kept = resolve_overlaps(mentions);
    // no same-type overlaps survive
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        if (kept[i].entity.entity_type != kept[j].entity.entity_type) continue;
        bool overlap = kept[i].location.start <= kept[j].location.end &&
                       kept[j].location.start <= kept[i].location.end;
        CHECK(!overlap);
      }
    }
    // per type, the kept set equals resolving that type alone
    for (EntityType type : kAllEntityTypes) {
      std::vector<EntityMention> of_type;
      for (const auto& m : mentions) {
        if (m.entity.entity_type == type) of_type.push_back(m);
      }
      std::vector<EntityMention> kept_of_type;
      for (const auto& m : kept) {
        if (m.entity.entity_type == type) kept_of_type.push_back(m);
      }
      CHECK(resolve_overlaps(of_type) == kept_of_type);
    }
  }
}

TEST_CASE("matches oracle on randomized inputs") {
  std::mt19937 rng(56);
  for (int round = 0; round < 300; ++round) {
    ct::OracleCase c = ct::random_oracle_case(rng);
    ParagraphRef paragraph{"p", 1, c.text};
    CAPTURE(c.text);
    auto got = tag_paragraph(c.vocab, paragraph);
    auto expected = ct::oracle_tag(c.vocab, paragraph);
    CHECK(got == expected);
  }
}

TEST_CASE("span integrity of produced mentions") {
  std::mt19937 rng(57);
  for (int round = 0; round < 100; ++round) {
    ct::OracleCase c = ct::random_oracle_case(rng);
    ParagraphRef paragraph{"p", 1, c.text};
    for (const EntityMention& m : tag_paragraph(c.vocab, paragraph)) {
      CHECK(utf8_slice(paragraph.text, m.location.start, m.location.end + 1) ==
            m.entity_str);
    }
  }
}

}  // TEST_SUITE
