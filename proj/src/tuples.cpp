#include "genvar/tuples.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <set>
#include <utility>

#include <json.hpp>

#include "genvar/errors.hpp"

namespace genvar {

namespace {

using nlohmann::json;

struct NamedOriginalGender {
  OriginalGender value;
  std::string_view name;
};

constexpr std::array<NamedOriginalGender, 5> kOriginalGenders = {{
    {OriginalGender::Feminine, "feminine"},
    {OriginalGender::Masculine, "masculine"},
    {OriginalGender::MixedFM, "mixed_fm"},
    {OriginalGender::MixedMF, "mixed_mf"},
    {OriginalGender::Negative, "negative"},
}};

struct NamedSubtype {
  Subtype value;
  std::string_view name;
};

constexpr std::array<NamedSubtype, 3> kSubtypes = {{
    {Subtype::PronounOnly, "pronoun_only"},
    {Subtype::GenderedNoun, "gendered_noun"},
    {Subtype::Negative, "negative"},
}};

TestTuple base_tuple(const Instance& instance, Subtype subtype) {
  TestTuple t;
  t.id = instance.id;
  t.source_lang = instance.source_lang;
  t.source = instance.source;
  t.subtype = subtype;
  return t;
}

}  // namespace

std::string_view to_string(OriginalGender g) {
  for (const auto& e : kOriginalGenders) {
    if (e.value == g) return e.name;
  }
  return "";
}

std::string_view to_string(Subtype s) {
  for (const auto& e : kSubtypes) {
    if (e.value == s) return e.name;
  }
  return "";
}

std::optional<OriginalGender> original_gender_from_string(std::string_view s) {
  for (const auto& e : kOriginalGenders) {
    if (e.name == s) return e.value;
  }
  return std::nullopt;
}

std::optional<Subtype> subtype_from_string(std::string_view s) {
  for (const auto& e : kSubtypes) {
    if (e.name == s) return e.value;
  }
  return std::nullopt;
}

Subtype mark_subtype(const Instance& instance) {
  if (instance.agme_count == 0) return Subtype::Negative;
  bool has_noun_label = false;
  for (Label label : instance.labels) has_noun_label = has_noun_label || mentions_gendered_noun(label);
  if (instance.has_label(Label::TargetOnlyGenderedPronoun) && !has_noun_label) {
    return Subtype::PronounOnly;
  }
  return Subtype::GenderedNoun;
}

std::vector<TestTuple> extract(const Instance& instance, std::vector<std::string>* warnings) {
  std::vector<TestTuple> tuples;
  if (instance.agme_count >= 3) return tuples;

  Subtype subtype = mark_subtype(instance);

  if (instance.agme_count == 0) {
    if (!instance.original) {
      throw DataError("instance " + instance.id + ": negative instance without an original translation");
    }
    for (Gender g : {Gender::Feminine, Gender::Masculine, Gender::Neutral}) {
      TestTuple t = base_tuple(instance, subtype);
      t.original = *instance.original;
      t.original_gender = OriginalGender::Negative;
      t.requested_gender = g;
      t.reference = *instance.original;
      tuples.push_back(std::move(t));
    }
    return tuples;
  }

  if (!instance.feminine || !instance.masculine) {
    throw DataError("instance " + instance.id + ": positive instance is missing a gendered reference");
  }

  auto add = [&](const std::string& original, OriginalGender og, Gender requested,
                 const std::string& reference) {
    TestTuple t = base_tuple(instance, subtype);
    t.original = original;
    t.original_gender = og;
    t.requested_gender = requested;
    t.reference = reference;
    tuples.push_back(std::move(t));
  };

  add(*instance.feminine, OriginalGender::Feminine, Gender::Masculine, *instance.masculine);
  if (instance.neutral) {
    add(*instance.feminine, OriginalGender::Feminine, Gender::Neutral, *instance.neutral);
  }
  add(*instance.masculine, OriginalGender::Masculine, Gender::Feminine, *instance.feminine);
  if (instance.neutral) {
    add(*instance.masculine, OriginalGender::Masculine, Gender::Neutral, *instance.neutral);
  }

  if (instance.agme_count == 2) {
    const std::array<std::pair<OriginalGender, const std::optional<std::string>*>, 2> mixed = {{
        {OriginalGender::MixedFM, &instance.mixed_fm},
        {OriginalGender::MixedMF, &instance.mixed_mf},
    }};
    for (const auto& [og, slot] : mixed) {
      if (!*slot) {
        if (warnings) {
          warnings->push_back("instance " + instance.id + ": no " +
                              std::string(to_string(og)) +
                              " translation; skipping its mixed tuples");
        }
        continue;
      }
      add(**slot, og, Gender::Feminine, *instance.feminine);
      add(**slot, og, Gender::Masculine, *instance.masculine);
      if (instance.neutral) add(**slot, og, Gender::Neutral, *instance.neutral);
    }
  }
  return tuples;
}

ExtractionResult extract_corpus(const std::vector<Instance>& corpus) {
  ExtractionResult result;
  for (const Instance& instance : corpus) {
    std::vector<TestTuple> tuples = extract(instance, &result.warnings);
    result.tuples.insert(result.tuples.end(), std::make_move_iterator(tuples.begin()),
                         std::make_move_iterator(tuples.end()));
  }
  return result;
}

std::map<TupleGroupKey, std::size_t> group_counts(const std::vector<TestTuple>& tuples) {
  std::map<TupleGroupKey, std::size_t> counts;
  for (const TestTuple& t : tuples) {
    ++counts[{t.source_lang, t.subtype, t.original_gender}];
  }
  return counts;
}

std::map<CategoryKey, std::size_t> category_summary(const std::vector<TestTuple>& tuples) {
  std::map<CategoryKey, std::size_t> counts;
  std::set<std::pair<std::string, OriginalGender>> seen_mixed;
  std::set<std::string> seen_negative;
  for (const TestTuple& t : tuples) {
    switch (t.original_gender) {
      case OriginalGender::Feminine:
        if (t.requested_gender == Gender::Masculine) {
          ++counts[{t.source_lang, t.subtype, false}];
        }
        break;
      case OriginalGender::Masculine:
        break;
      case OriginalGender::MixedFM:
      case OriginalGender::MixedMF:
        if (seen_mixed.insert({t.id, t.original_gender}).second) {
          ++counts[{t.source_lang, t.subtype, true}];
        }
        break;
      case OriginalGender::Negative:
        if (seen_negative.insert(t.id).second) {
          ++counts[{t.source_lang, t.subtype, false}];
        }
        break;
    }
  }
  return counts;
}

namespace {

std::string serialize_tuple(const TestTuple& t) {
  json j;
  j["id"] = t.id;
  j["source_lang"] = t.source_lang;
  j["source"] = t.source;
  j["original"] = t.original;
  j["original_gender"] = std::string(to_string(t.original_gender));
  j["requested_gender"] = std::string(to_string(t.requested_gender));
  j["reference"] = t.reference;
  j["subtype"] = std::string(to_string(t.subtype));
  return j.dump();
}

TestTuple parse_tuple(const std::string& line, const std::string& file, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(file, lineno, e.what());
  }
  if (!j.is_object()) throw ParseError(file, lineno, "tuple record must be a JSON object");
  const std::array<std::string_view, 8> required = {
      "id",     "source_lang",     "source",    "original",
      "original_gender", "requested_gender", "reference", "subtype"};
  for (std::string_view key : required) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(file, lineno, "missing or non-string field \"" + std::string(key) + "\"");
    }
  }
  TestTuple t;
  t.id = j["id"].get<std::string>();
  t.source_lang = j["source_lang"].get<std::string>();
  t.source = j["source"].get<std::string>();
  t.original = j["original"].get<std::string>();
  t.reference = j["reference"].get<std::string>();
  auto og = original_gender_from_string(j["original_gender"].get<std::string>());
  if (!og) {
    throw ParseError(file, lineno,
                     "unknown original_gender \"" + j["original_gender"].get<std::string>() + "\"");
  }
  t.original_gender = *og;
  auto rg = gender_from_string(j["requested_gender"].get<std::string>());
  if (!rg) {
    throw ParseError(file, lineno,
                     "unknown requested_gender \"" + j["requested_gender"].get<std::string>() + "\"");
  }
  t.requested_gender = *rg;
  auto st = subtype_from_string(j["subtype"].get<std::string>());
  if (!st) {
    throw ParseError(file, lineno, "unknown subtype \"" + j["subtype"].get<std::string>() + "\"");
  }
  t.subtype = *st;
  return t;
}

}  // namespace

void write_tuples(const std::vector<TestTuple>& tuples, std::ostream& out) {
  for (const TestTuple& t : tuples) out << serialize_tuple(t) << '\n';
}

void write_tuples(const std::vector<TestTuple>& tuples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_tuples(tuples, out);
}

std::vector<TestTuple> load_tuples(std::istream& in, const std::string& name) {
  std::vector<TestTuple> tuples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tuples.push_back(parse_tuple(line, name, lineno));
  }
  return tuples;
}

std::vector<TestTuple> load_tuples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_tuples(in, path);
}

}  // namespace genvar
