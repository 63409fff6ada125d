#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "genvar/deriver.hpp"
#include "genvar/errors.hpp"
#include "genvar/evaluator.hpp"

using namespace genvar;

namespace {

WordList test_nouns() {
  WordList list;
  for (const char* w : {"mother", "sister", "daughter", "wife", "aunt", "grandmother", "woman",
                        "women", "girl", "queen", "actress", "waitress", "mrs", "mrs.", "ms",
                        "ms.", "lady", "she", "her", "hers", "herself"}) {
    list.add(w);
  }
  return list;
}

bool has(const std::vector<ErrorLabel>& labels, ErrorLabel label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

TestTuple make_test_tuple(Subtype subtype, OriginalGender og, Gender requested,
                     const std::string& original, const std::string& reference,
                     const std::string& id = "t", const std::string& lang = "tr") {
  TestTuple t;
  t.id = id;
  t.source_lang = lang;
  t.source = "src";
  t.original = original;
  t.original_gender = og;
  t.requested_gender = requested;
  t.reference = reference;
  t.subtype = subtype;
  return t;
}

}  // namespace

TEST_CASE("error label names round-trip") {
  for (ErrorLabel label :
       {ErrorLabel::ExtraneousNounChange, ErrorLabel::ExtraneousPronounChange,
        ErrorLabel::MissingNounChange, ErrorLabel::MissingPronounChange, ErrorLabel::Comma,
        ErrorLabel::OtherCorrections, ErrorLabel::Pos, ErrorLabel::Sva,
        ErrorLabel::ThemToThemselves, ErrorLabel::NoneResponse, ErrorLabel::OtherModifications}) {
    CHECK(error_label_from_string(to_string(label)) == label);
  }
  CHECK_FALSE(error_label_from_string("wat").has_value());
}

TEST_CASE("relaxed neutral match accepts the rule neutralization of the original") {
  const std::string original = "the man has something under his coat";
  CHECK(relaxed_neutral_match("the man has something under their coat", original,
                              Subtype::Negative));
  CHECK_FALSE(relaxed_neutral_match("the person has something under their coat", original,
                                    Subtype::Negative));
  CHECK(relaxed_neutral_match(original, original, Subtype::Negative));
  CHECK_THROWS_AS(relaxed_neutral_match("x", "x", Subtype::PronounOnly), DataError);
}

TEST_CASE("classifier reproduces the documented error examples") {
  WordList nouns = test_nouns();

  SUBCASE("comma") {
    auto labels = classify_error(
        "Well, you surprised me!, Afshin said as she opened the door and saw Mary standing there.",
        "Well, you surprised me!, Afshin said as they opened the door and saw Mary standing there.",
        "Well, you surprised me! Afshin said as they opened the door and saw Mary standing there.",
        nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::Comma});
  }
  SUBCASE("other corrections") {
    auto labels = classify_error("I have never heard of him before that.",
                                 "I have never heard of them before that.",
                                 "I had never heard of them before that.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::OtherCorrections});
  }
  SUBCASE("pos") {
    auto labels = classify_error("The secretary noted down what her boss had said.",
                                 "The secretary noted down what their boss had said.",
                                 "The secretary noted down what they boss had said.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::Pos});
  }
  SUBCASE("sva") {
    auto labels =
        classify_error("Does she come here every week?", "Do they come here every week?",
                       "Does they come here every week?", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::Sva});
  }
  SUBCASE("them to themselves") {
    auto labels =
        classify_error("She saw her play baseball.", "They saw them play baseball.",
                       "They saw themselves play baseball.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::ThemToThemselves});
  }
  SUBCASE("literal none") {
    auto labels = classify_error("He has no capacity to be a teacher.",
                                 "They have no capacity to be a teacher.", "none", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::NoneResponse});
  }
  SUBCASE("identity output when a change was required") {
    auto labels = classify_error("Her bike is red.", "Their bike is red.", "Her bike is red.",
                                 nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::NoneResponse});
  }
  SUBCASE("other modifications") {
    auto labels = classify_error(
        "In any case, I will tell him about the critical tone your House has adopted on this issue.",
        "In any case, I will tell them about the critical tone your House has adopted on this issue.",
        "In any case, I will tell them about the critical tone their House has adopted on this issue.",
        nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::OtherModifications});
  }
}

TEST_CASE("classifier covers the human-annotation categories") {
  WordList nouns = test_nouns();

  SUBCASE("extraneous noun change") {
    auto labels = classify_error("The man has something under his coat.",
                                 "The man has something under their coat.",
                                 "The person has something under their coat.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::ExtraneousNounChange});
  }
  SUBCASE("extraneous pronoun change on a negative item") {
    auto labels = classify_error("He kept his word.", "He kept his word.",
                                 "He kept their word.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::ExtraneousPronounChange});
  }
  SUBCASE("missing pronoun change") {
    auto labels = classify_error("She gave her her umbrella.", "They gave them their umbrella.",
                                 "They gave her their umbrella.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::MissingPronounChange});
  }
  SUBCASE("missing noun change") {
    auto labels = classify_error("Her mother called.", "Their parent called.",
                                 "Their mother called.", nouns);
    CHECK(labels == std::vector<ErrorLabel>{ErrorLabel::MissingNounChange});
  }
}

TEST_CASE("classifier residual behavior") {
  WordList nouns = test_nouns();
  CHECK(classify_error("a", "Same text.", "Same text.", nouns).empty());

  // Dropped words leave no alignable positions.
  auto dropped = classify_error(
      "They advised him to give up smoking, but he wouldn't listen to him.",
      "They advised them to give up smoking, but they wouldn't listen to them.",
      "They advised them to give up smoking, but they wouldn't listen.", nouns);
  CHECK(dropped == std::vector<ErrorLabel>{ErrorLabel::OtherModifications});

  auto tense = classify_error("The news that she had got injured was a shock to her.",
                              "The news that they had got injured was a shock to them.",
                              "The news that they had gotten injured was a shock to them.", nouns);
  CHECK(tense == std::vector<ErrorLabel>{ErrorLabel::OtherModifications});

  auto name_swap = classify_error("Jim was able to hold back his anger and avoid a fight.",
                                  "Jim was able to hold back their anger and avoid a fight.",
                                  "They were able to hold back their anger and avoid a fight.",
                                  nouns);
  CHECK(has(name_swap, ErrorLabel::OtherModifications));
  CHECK(has(name_swap, ErrorLabel::Sva));
}

TEST_CASE("variant consistency accepts gender-only diffs") {
  WordList nouns = test_nouns();
  CHECK(check_variant_consistency("She gave her her umbrella.", "He gave him his umbrella.",
                                  "They gave them their umbrella.", nouns));
  CHECK(check_variant_consistency("Her mother called.", "His father called.",
                                  "Their parent called.", nouns));
  CHECK(check_variant_consistency("same", "same", "same", nouns));
  CHECK_FALSE(check_variant_consistency("She left early.", "He departed early.",
                                        "They left early.", nouns));
  CHECK_FALSE(check_variant_consistency("She left early.", "He left very early.",
                                        "They left early.", nouns));
}

TEST_CASE("tuple scoring handles matches, None and relaxed matches") {
  WordList nouns = test_nouns();

  TestTuple positive = make_test_tuple(Subtype::PronounOnly, OriginalGender::Feminine,
                                  Gender::Masculine, "She runs.", "He runs.");
  ScoredTuple hit = score_tuple(positive, "He runs.", nouns);
  CHECK(hit.exact);
  CHECK(hit.relaxed);
  CHECK(hit.errors.empty());
  CHECK(hit.wer == 0.0);
  CHECK_FALSE(hit.none_output);

  ScoredTuple none = score_tuple(positive, "None", nouns);
  CHECK_FALSE(none.exact);
  CHECK(none.none_output);
  CHECK(none.effective_hypothesis == "She runs.");
  CHECK(none.errors == std::vector<ErrorLabel>{ErrorLabel::NoneResponse});

  TestTuple negative =
      make_test_tuple(Subtype::Negative, OriginalGender::Negative, Gender::Neutral,
                 "The man has something under his coat.", "The man has something under his coat.");
  ScoredTuple relaxed = score_tuple(negative, "The man has something under their coat.", nouns);
  CHECK_FALSE(relaxed.exact);
  CHECK(relaxed.relaxed);

  ScoredTuple negative_none = score_tuple(negative, "none", nouns);
  CHECK(negative_none.exact);
  CHECK(negative_none.none_output);
}

TEST_CASE("aggregation fills cells, overall rows and the negative gender pairing") {
  WordList nouns = test_nouns();
  std::vector<ScoredTuple> scored;

  auto add = [&](Subtype st, OriginalGender og, Gender rg, const std::string& orig,
                 const std::string& ref, const std::string& hyp, const std::string& id) {
    scored.push_back(score_tuple(make_test_tuple(st, og, rg, orig, ref, id), hyp, nouns));
  };

  add(Subtype::PronounOnly, OriginalGender::Feminine, Gender::Masculine, "She runs.", "He runs.",
      "He runs.", "a");
  add(Subtype::PronounOnly, OriginalGender::Feminine, Gender::Masculine, "She naps.", "He naps.",
      "She naps.", "b");
  add(Subtype::GenderedNoun, OriginalGender::Feminine, Gender::Masculine, "Her mother called.",
      "His father called.", "His father called.", "c");
  // Negative instance d: both gendered outputs match.
  add(Subtype::Negative, OriginalGender::Negative, Gender::Feminine, "He kept his word.",
      "He kept his word.", "He kept his word.", "d");
  add(Subtype::Negative, OriginalGender::Negative, Gender::Masculine, "He kept his word.",
      "He kept his word.", "He kept his word.", "d");
  // Negative instance e: the feminine output drifted.
  add(Subtype::Negative, OriginalGender::Negative, Gender::Feminine, "He kept his word.",
      "He kept his word.", "She kept her word.", "e");
  add(Subtype::Negative, OriginalGender::Negative, Gender::Masculine, "He kept his word.",
      "He kept his word.", "He kept his word.", "e");

  EvalReport report = aggregate(scored);

  CellKey pronoun_cell{"tr", Subtype::PronounOnly, OriginalGender::Feminine, Gender::Masculine};
  REQUIRE(report.cells.count(pronoun_cell) == 1);
  const CellScore& cell = report.cells.at(pronoun_cell);
  CHECK(cell.n == 2);
  CHECK(cell.exact_rate() == doctest::Approx(0.5));
  CHECK(cell.error_counts.at(ErrorLabel::NoneResponse) == 1);

  OverallKey overall_key{"tr", OriginalGender::Feminine, Gender::Masculine};
  REQUIRE(report.overall.count(overall_key) == 1);
  CHECK(report.overall.at(overall_key).n == 3);
  CHECK(report.overall.at(overall_key).exact_count == 2);

  REQUIRE(report.negative_gender.count("tr") == 1);
  CHECK(report.negative_gender.at("tr").instances == 2);
  CHECK(report.negative_gender.at("tr").both_match == 1);
  CHECK(report.negative_gender.at("tr").rate() == doctest::Approx(0.5));

  SUBCASE("aggregate is order independent") {
    std::mt19937 rng(3);
    std::shuffle(scored.begin(), scored.end(), rng);
    EvalReport again = aggregate(scored);
    CHECK(again.cells.at(pronoun_cell).exact_count ==
          report.cells.at(pronoun_cell).exact_count);
    CHECK(again.negative_gender.at("tr").both_match == 1);
    CHECK(again.overall.size() == report.overall.size());
  }

  SUBCASE("report renderers emit every cell") {
    std::ostringstream rows;
    write_report_rows(report, rows);
    std::size_t lines = 0;
    std::string line;
    std::istringstream in(rows.str());
    while (std::getline(in, line)) {
      ++lines;
      CHECK(line.find("\"language\":\"tr\"") != std::string::npos);
    }
    CHECK(lines == report.cells.size() + report.overall.size() + 1);

    std::string text = render_report(report);
    CHECK(text.find("Language: tr") != std::string::npos);
    CHECK(text.find("Pronoun-Only") != std::string::npos);
    CHECK(text.find("gender (both variants unchanged): 0.500") != std::string::npos);
  }
}

TEST_CASE("exact implies relaxed over randomized tuples") {
  WordList nouns = test_nouns();
  std::mt19937 rng(17);
  const std::vector<std::string> sentences = {
      "She runs.", "He runs.", "They run.", "Her bike is red.", "His bike is red.",
      "Their bike is red.", "none", "Something else entirely."};
  for (int trial = 0; trial < 300; ++trial) {
    bool negative = rng() % 3 == 0;
    const std::string& orig = sentences[rng() % sentences.size()];
    const std::string& ref = negative ? orig : sentences[rng() % sentences.size()];
    TestTuple t = make_test_tuple(negative ? Subtype::Negative : Subtype::PronounOnly,
                             negative ? OriginalGender::Negative : OriginalGender::Feminine,
                             static_cast<Gender>(rng() % 3), orig, ref);
    ScoredTuple s = score_tuple(t, sentences[rng() % sentences.size()], nouns);
    if (s.exact) CHECK(s.relaxed);
    CHECK(s.wer >= 0.0);
  }
}

TEST_CASE("derived references close the loop with the evaluator") {
  WordList nouns = test_nouns();
  const std::string fem = "She gave her her umbrella.";
  const std::string neut = "They gave them their umbrella.";
  TestTuple t = make_test_tuple(Subtype::PronounOnly, OriginalGender::Feminine, Gender::Masculine,
                           fem, "He gave him his umbrella.");
  ScoredTuple s = score_tuple(t, derive_gendered(fem, neut, Gender::Masculine), nouns);
  CHECK(s.exact);
}
