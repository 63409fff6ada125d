#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "genvar/deriver.hpp"
#include "genvar/errors.hpp"
#include "genvar/text.hpp"

using namespace genvar;

namespace {

struct Triple {
  std::string fem;
  std::string masc;
  std::string neut;
};

// Hand-checked variant triples. Each feminine/masculine pair differs only
// at pronoun positions; the neutral rewrite additionally carries the
// agreement changes.
const std::vector<Triple>& triples() {
  static const std::vector<Triple> t = {
      {"She gave her her umbrella.", "He gave him his umbrella.",
       "They gave them their umbrella."},
      {"The teacher compared my poem with one of hers.",
       "The teacher compared my poem with one of his.",
       "The teacher compared my poem with one of theirs."},
      {"Is she your teacher?", "Is he your teacher?", "Are they your teacher?"},
      {"Her bike is red.", "His bike is red.", "Their bike is red."},
      {"She wasn't there when it happened.", "He wasn't there when it happened.",
       "They weren't there when it happened."},
      {"She taught herself to paint.", "He taught himself to paint.",
       "They taught themselves to paint."},
      {"The prize is hers.", "The prize is his.", "The prize is theirs."},
      {"Satoshi Kon was a Japanese film director and she made many films.",
       "Satoshi Kon was a Japanese film director and he made many films.",
       "Satoshi Kon was a Japanese film director and they made many films."},
      {"She saw her play baseball.", "He saw him play baseball.",
       "They saw them play baseball."},
      {"I told her about the plan.", "I told him about the plan.",
       "I told them about the plan."},
      {"She does what she wants.", "He does what he wants.", "They do what they want."},
      {"Has she finished her homework?", "Has he finished his homework?",
       "Have they finished their homework?"},
      {"Everyone respects her because the work is hers.",
       "Everyone respects him because the work is his.",
       "Everyone respects them because the work is theirs."},
      {"Her friend saw her leave.", "His friend saw him leave.",
       "Their friend saw them leave."},
      {"HER BIKE IS RED.", "HIS BIKE IS RED.", "THEIR BIKE IS RED."},
  };
  return t;
}

// Token-by-token substitution for sentences whose pronouns are all
// unambiguous; used as an independent check on derive_gendered.
std::string brute_force(const std::string& sentence, Gender target) {
  std::vector<TextPatch> patches;
  for (const Token& tok : tokenize(sentence)) {
    auto cells = classify(tok.lower);
    if (cells.empty() || cells.front().gender == Gender::Neutral) continue;
    REQUIRE(cells.size() == 1);
    std::string_view surface = map_pronoun(cells.front().category, target);
    patches.push_back({tok.core_begin, tok.core.size(), apply_case_pattern(tok.core, surface)});
  }
  return apply_patches(sentence, std::move(patches));
}

}  // namespace

TEST_CASE("align pairs pronoun and agreement substitutions") {
  auto edits = align("He runs.", "They run.");
  REQUIRE(edits.size() == 2);
  CHECK(edits[0].position == 0);
  CHECK(edits[0].original == "He");
  CHECK(edits[0].neutral == "They");
  CHECK(edits[0].kind == EditKind::Pronoun);
  CHECK(edits[0].category == PronounCategory::Subject);
  CHECK(edits[0].gender == Gender::Masculine);
  CHECK(edits[0].consistent);
  CHECK(edits[1].position == 1);
  CHECK(edits[1].original == "runs");
  CHECK(edits[1].neutral == "run");
  CHECK(edits[1].kind == EditKind::Agreement);
}

TEST_CASE("align of identical sentences is empty") {
  CHECK(align("Nothing changes here.", "Nothing changes here.").empty());
}

TEST_CASE("neutral surface resolves the ambiguous pronouns") {
  auto object_her = align("I saw her run.", "I saw them run.");
  REQUIRE(object_her.size() == 1);
  CHECK(object_her[0].category == PronounCategory::Object);
  CHECK(object_her[0].gender == Gender::Feminine);

  auto possdet_her = align("I like her hat.", "I like their hat.");
  REQUIRE(possdet_her.size() == 1);
  CHECK(possdet_her[0].category == PronounCategory::PossessiveDeterminer);

  auto possdet_his = align("I like his hat.", "I like their hat.");
  REQUIRE(possdet_his.size() == 1);
  CHECK(possdet_his[0].category == PronounCategory::PossessiveDeterminer);
  CHECK(possdet_his[0].gender == Gender::Masculine);

  auto posspron_his = align("That pen is his.", "That pen is theirs.");
  REQUIRE(posspron_his.size() == 1);
  CHECK(posspron_his[0].category == PronounCategory::PossessivePronoun);

  auto reference_row = align("She saw her play baseball.", "They saw them play baseball.");
  REQUIRE(reference_row.size() == 2);
  CHECK(reference_row[1].original == "her");
  CHECK(reference_row[1].category == PronounCategory::Object);
}

TEST_CASE("unambiguous original wins over a contradicting neutral token") {
  auto edits = align("I saw him.", "I saw their.");
  REQUIRE(edits.size() == 1);
  CHECK(edits[0].category == PronounCategory::Object);
  CHECK_FALSE(edits[0].consistent);
  CHECK(derive_gendered("I saw him.", "I saw their.", Gender::Feminine) == "I saw her.");
}

TEST_CASE("alignment failures are rejected with positions") {
  CHECK_THROWS_WITH_AS(align("He runs.", "They run fast."),
                       doctest::Contains("token counts differ"), AlignmentError);
  CHECK_THROWS_WITH_AS(align("The mother left.", "The parent left."),
                       doctest::Contains("neither a pronoun nor an agreement change"),
                       AlignmentError);
  // "her" has no possessive-pronoun reading, and the original is ambiguous,
  // so nothing can resolve the pair.
  CHECK_THROWS_AS(align("I like her.", "I like theirs."), AlignmentError);
}

TEST_CASE("derive_gendered round trips through the variant triples") {
  for (const Triple& t : triples()) {
    CAPTURE(t.fem);
    CHECK(derive_gendered(t.fem, t.neut, Gender::Masculine) == t.masc);
    CHECK(derive_gendered(t.masc, t.neut, Gender::Feminine) == t.fem);
    CHECK(derive_gendered(t.fem, t.neut, Gender::Feminine) == t.fem);
    CHECK(derive_gendered(t.masc, t.neut, Gender::Masculine) == t.masc);
  }
}

TEST_CASE("derivation only touches pronoun tokens") {
  for (const Triple& t : triples()) {
    CAPTURE(t.fem);
    auto fem_tokens = tokenize(t.fem);
    auto out_tokens = tokenize(derive_gendered(t.fem, t.neut, Gender::Masculine));
    REQUIRE(fem_tokens.size() == out_tokens.size());
    for (std::size_t i = 0; i < fem_tokens.size(); ++i) {
      if (fem_tokens[i].lower == out_tokens[i].lower) continue;
      CHECK_FALSE(classify(fem_tokens[i].lower).empty());
      CHECK_FALSE(classify(out_tokens[i].lower).empty());
    }
  }
}

TEST_CASE("brute-force substitution agrees on unambiguous sentences") {
  const std::vector<std::string> unambiguous = {
      "She is sure of herself, and the car is hers.",
      "He told me himself.",
      "Everyone thanked him.",
  };
  for (const std::string& s : unambiguous) {
    CAPTURE(s);
    for (Gender g : {Gender::Feminine, Gender::Masculine}) {
      CHECK(derive_gendered(s, brute_force(s, Gender::Neutral), g) == brute_force(s, g));
    }
  }
}

TEST_CASE("mixed-gender sentences are rejected") {
  CHECK_THROWS_WITH_AS(
      derive_gendered("Her father left her the car in his will.",
                      "Their father left them the car in their will.", Gender::Masculine),
      doctest::Contains("mixes feminine and masculine"), DataError);
}

TEST_CASE("a pronoun the neutral rewrite missed is an error") {
  CHECK_THROWS_WITH_AS(derive_gendered("She saw her.", "They saw her.", Gender::Masculine),
                       doctest::Contains("not neutralized"), AlignmentError);
}

TEST_CASE("neutral target is out of scope") {
  CHECK_THROWS_AS(derive_gendered("She runs.", "They run.", Gender::Neutral), DataError);
}

TEST_CASE("derivation is deterministic") {
  const Triple& t = triples().front();
  CHECK(derive_gendered(t.fem, t.neut, Gender::Masculine) ==
        derive_gendered(t.fem, t.neut, Gender::Masculine));
}
