#include "genvar/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "genvar/errors.hpp"
#include "genvar/text.hpp"

namespace genvar {

namespace {

struct LabelName {
  Label label;
  std::string_view name;
};

constexpr std::array<LabelName, 9> kLabelNames = {{
    {Label::TargetOnlyGenderedNoun, "target_only_gendered_noun"},
    {Label::TargetOnlyGenderedPronoun, "target_only_gendered_pronoun"},
    {Label::TargetOnlyGenderedNounPronoun, "target_only_gendered_noun+pronoun"},
    {Label::SourceTargetGenderedNoun, "source+target_gendered_noun"},
    {Label::SourceTargetGenderedNounPronoun, "source+target_gendered_noun+pronoun"},
    {Label::SourceGenderedNounTargetPronoun, "source_gendered_noun_target_pronoun"},
    {Label::Name, "name"},
    {Label::NonAgmeName, "non-AGME-name"},
    {Label::Mixed, "mixed"},
}};

const std::array<std::string_view, 4> kSourceLangs = {"tr", "fa", "fi", "hu"};

}  // namespace

std::string_view to_string(Label label) {
  for (const auto& e : kLabelNames) {
    if (e.label == label) return e.name;
  }
  return "";
}

std::optional<Label> label_from_string(std::string_view s) {
  for (const auto& e : kLabelNames) {
    if (e.name == s) return e.label;
  }
  // Aliases: the statistics table swaps noun/pronoun in the source_* name,
  // and prose refers to the pronoun label with a trailing "only".
  if (s == "source_gendered_pronoun_target_noun") return Label::SourceGenderedNounTargetPronoun;
  if (s == "target_gendered_pronoun_only") return Label::TargetOnlyGenderedPronoun;
  return std::nullopt;
}

bool is_positive_label(Label label) {
  return label == Label::TargetOnlyGenderedNoun || label == Label::TargetOnlyGenderedPronoun ||
         label == Label::TargetOnlyGenderedNounPronoun;
}

bool mentions_gendered_noun(Label label) {
  return label == Label::TargetOnlyGenderedNoun ||
         label == Label::TargetOnlyGenderedNounPronoun ||
         label == Label::SourceTargetGenderedNoun ||
         label == Label::SourceTargetGenderedNounPronoun ||
         label == Label::SourceGenderedNounTargetPronoun;
}

bool Instance::has_label(Label label) const {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

namespace {

// True when the label marks a person whose gender the source sentence
// already fixes (a gendered noun on the source side).
bool is_source_marked_label(Label label) {
  return label == Label::SourceTargetGenderedNoun ||
         label == Label::SourceTargetGenderedNounPronoun ||
         label == Label::SourceGenderedNounTargetPronoun;
}

[[noreturn]] void violation(const Instance& inst, const std::string& rule) {
  throw DataError("instance '" + inst.id + "': " + rule);
}

}  // namespace

void Instance::validate() const {
  if (id.empty()) throw DataError("instance with empty id");
  if (std::find(kSourceLangs.begin(), kSourceLangs.end(), source_lang) == kSourceLangs.end())
    violation(*this, "unsupported source_lang '" + source_lang + "'");
  if (source.empty()) violation(*this, "empty source sentence");
  if (agme_count < 0) violation(*this, "negative agme_count");

  bool has_positive = std::any_of(labels.begin(), labels.end(), is_positive_label);
  bool has_mixed = has_label(Label::Mixed);
  if ((agme_count == 0) != (!has_positive && !has_mixed))
    violation(*this, "agme_count and labels disagree: zero AGMEs requires no "
                     "target_only_* label and no mixed label, and vice versa");
  if (has_mixed && !std::any_of(labels.begin(), labels.end(), is_source_marked_label))
    violation(*this, "mixed label without any source-marked (source+target_* / "
                     "source_gendered_noun_target_pronoun) label");

  if (agme_count == 0) {
    if (!original) violation(*this, "negative instance missing the original translation");
    if (feminine || masculine || neutral || mixed_fm || mixed_mf)
      violation(*this, "negative instance must carry exactly one translation (original)");
  } else {
    if (!feminine) violation(*this, "positive instance missing feminine translation");
    if (!masculine) violation(*this, "positive instance missing masculine translation");
    if (original) violation(*this, "positive instance must not carry an original slot");
    if ((mixed_fm || mixed_mf) && agme_count < 2)
      violation(*this, "mixed-gender translations require at least two AGMEs");
  }
}

namespace {

using nlohmann::json;

std::optional<std::string> take_translation(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_string()) throw DataError(std::string("translation '") + key + "' is not a string");
  std::string s = v.get<std::string>();
  // The corpus marks "no suitable neutral form" with an empty or missing
  // value; both normalize to absent.
  if (s.empty()) return std::nullopt;
  return s;
}

Instance instance_from_json(const json& obj) {
  if (!obj.is_object()) throw DataError("record is not an object");
  for (const char* key : {"id", "source_lang", "source", "translations", "labels", "agme_count"}) {
    if (!obj.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  }

  Instance inst;
  inst.id = obj.at("id").get<std::string>();
  inst.source_lang = obj.at("source_lang").get<std::string>();
  inst.source = obj.at("source").get<std::string>();

  const json& tr = obj.at("translations");
  if (!tr.is_object()) throw DataError("'translations' is not an object");
  for (const auto& [key, value] : tr.items()) {
    static const std::array<std::string_view, 6> known = {"feminine", "masculine", "neutral",
                                                          "original", "mixed_fm", "mixed_mf"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw DataError("unknown translation slot '" + key + "'");
    (void)value;
  }
  inst.feminine = take_translation(tr, "feminine");
  inst.masculine = take_translation(tr, "masculine");
  inst.neutral = take_translation(tr, "neutral");
  inst.original = take_translation(tr, "original");
  inst.mixed_fm = take_translation(tr, "mixed_fm");
  inst.mixed_mf = take_translation(tr, "mixed_mf");

  const json& labels = obj.at("labels");
  if (!labels.is_array()) throw DataError("'labels' is not an array");
  for (const json& item : labels) {
    if (!item.is_string()) throw DataError("label is not a string");
    auto label = label_from_string(item.get<std::string>());
    if (!label)
      throw DataError("instance '" + inst.id + "': unknown label '" + item.get<std::string>() +
                      "'");
    inst.labels.push_back(*label);
  }
  std::sort(inst.labels.begin(), inst.labels.end());
  inst.labels.erase(std::unique(inst.labels.begin(), inst.labels.end()), inst.labels.end());

  const json& agme = obj.at("agme_count");
  if (!agme.is_number_integer()) throw DataError("'agme_count' is not an integer");
  inst.agme_count = agme.get<int>();

  inst.validate();
  return inst;
}

json instance_to_json(const Instance& inst) {
  json tr = json::object();
  auto put = [&tr](const char* key, const std::optional<std::string>& v) {
    if (v) tr[key] = *v;
  };
  put("feminine", inst.feminine);
  put("masculine", inst.masculine);
  put("neutral", inst.neutral);
  put("original", inst.original);
  put("mixed_fm", inst.mixed_fm);
  put("mixed_mf", inst.mixed_mf);

  json labels = json::array();
  for (Label l : inst.labels) labels.push_back(std::string(to_string(l)));

  return json{{"id", inst.id},
              {"source_lang", inst.source_lang},
              {"source", inst.source},
              {"translations", tr},
              {"labels", labels},
              {"agme_count", inst.agme_count}};
}

}  // namespace

Instance parse_instance(const std::string& json_line, const std::string& file, std::size_t line) {
  json obj;
  try {
    obj = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ParseError(file, line, e.what());
  }
  try {
    return instance_from_json(obj);
  } catch (const json::exception& e) {
    throw ParseError(file, line, e.what());
  }
}

std::vector<Instance> load_corpus(std::istream& in, const std::string& name) {
  std::vector<Instance> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (normalize_whitespace(line).empty()) continue;
    corpus.push_back(parse_instance(line, name, lineno));
  }
  return corpus;
}

std::vector<Instance> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open corpus file");
  return load_corpus(in, path);
}

std::string serialize_instance(const Instance& instance) {
  return instance_to_json(instance).dump();
}

void serialize_corpus(const std::vector<Instance>& corpus, std::ostream& out) {
  for (const Instance& inst : corpus) out << serialize_instance(inst) << '\n';
}

void serialize_corpus(const std::vector<Instance>& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  serialize_corpus(corpus, out);
}

double quantile(const std::vector<double>& sorted_values, double p) {
  if (sorted_values.empty()) return 0;
  if (sorted_values.size() == 1) return sorted_values.front();
  double h = p * static_cast<double>(sorted_values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

namespace {

Quantiles summarize(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  Quantiles q;
  if (values.empty()) return q;
  q.min = values.front();
  q.q1 = quantile(values, 0.25);
  q.median = quantile(values, 0.5);
  q.q3 = quantile(values, 0.75);
  q.max = values.back();
  return q;
}

}  // namespace

CorpusStats compute_stats(const std::vector<Instance>& corpus) {
  CorpusStats stats;
  stats.total = corpus.size();
  std::vector<double> source_lengths, target_lengths;
  source_lengths.reserve(corpus.size());
  target_lengths.reserve(corpus.size());
  for (const Instance& inst : corpus) {
    for (Label l : inst.labels) ++stats.label_counts[l];
    ++stats.agme_histogram[inst.agme_count];
    source_lengths.push_back(static_cast<double>(split_tokens(inst.source).size()));
    // Representative target: the feminine variant for positives, the
    // single invariant translation for negatives.
    const std::optional<std::string>& target = inst.is_negative() ? inst.original : inst.feminine;
    if (target) target_lengths.push_back(static_cast<double>(split_tokens(*target).size()));
  }
  stats.source_length = summarize(std::move(source_lengths));
  stats.target_length = summarize(std::move(target_lengths));
  return stats;
}

std::string normalize_word(std::string_view token) {
  auto tokens = tokenize(token);
  if (tokens.empty()) return "";
  return tokens.front().lower;
}

WordList WordList::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open word list");
  WordList list;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (const std::string& token : split_tokens(line)) list.add(token);
  }
  return list;
}

void WordList::add(std::string_view token) {
  std::string normalized = normalize_word(token);
  if (!normalized.empty()) tokens_.insert(std::move(normalized));
}

bool WordList::contains(std::string_view token) const {
  return tokens_.count(normalize_word(token)) > 0;
}

bool word_list_filter(std::string_view /*source*/, std::string_view target,
                      const WordList& words) {
  for (const Token& token : tokenize(target)) {
    if (!token.lower.empty() && words.contains(token.lower)) return true;
  }
  return false;
}

bool language_id_filter(std::string_view source, std::string_view lang,
                        const LanguageIdScorer& scorer, double threshold) {
  double score = scorer.score(source, lang);
  if (!(score >= 0.0 && score <= 1.0))
    throw DataError("language-ID score out of range: " + std::to_string(score));
  return score >= threshold;
}

}  // namespace genvar
