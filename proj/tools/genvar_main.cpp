#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "genvar/corpus.hpp"
#include "genvar/deriver.hpp"
#include "genvar/errors.hpp"
#include "genvar/evaluator.hpp"
#include "genvar/gender.hpp"
#include "genvar/llm.hpp"
#include "genvar/neutral_rewriter.hpp"
#include "genvar/tuples.hpp"

using namespace genvar;

namespace {

// Exit codes: 0 ok, 1 usage, 2 bad data, 3 transport trouble.
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kTransportError = 3;

std::ostream& open_output(std::optional<std::ofstream>& holder, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  holder.emplace(path, std::ios::binary);
  if (!holder->good()) throw DataError("cannot open output file " + path);
  return *holder;
}

std::istream& open_input(std::optional<std::ifstream>& holder, const std::string& path) {
  if (path.empty() || path == "-") return std::cin;
  holder.emplace(path, std::ios::binary);
  if (!holder->good()) throw DataError("cannot open input file " + path);
  return *holder;
}

// The English translation an instance was published with; negatives carry
// it explicitly, positives fall back to a gendered reference.
std::string instance_translation(const Instance& inst) {
  for (const auto& slot : {inst.original, inst.feminine, inst.masculine}) {
    if (slot && !slot->empty()) return *slot;
  }
  return "";
}

RewriterLexicon load_lexicon(const std::string& path) {
  return path.empty() ? RewriterLexicon::builtin() : RewriterLexicon::from_file(path);
}

int run_validate(const std::string& corpus_path) {
  std::vector<Instance> corpus = load_corpus(corpus_path);
  std::map<std::string, std::size_t> by_language;
  std::size_t negatives = 0;
  for (const Instance& inst : corpus) {
    ++by_language[inst.source_lang];
    if (inst.is_negative()) ++negatives;
  }
  std::cout << corpus.size() << " instances ok (" << negatives << " negative)\n";
  for (const auto& [language, count] : by_language) {
    std::cout << "  " << language << ": " << count << '\n';
  }
  return 0;
}

int run_stats(const std::string& corpus_path, const std::string& out_path) {
  CorpusStats stats = compute_stats(load_corpus(corpus_path));
  nlohmann::json j;
  j["total"] = stats.total;
  j["labels"] = nlohmann::json::object();
  for (const auto& [label, count] : stats.label_counts) {
    j["labels"][std::string(to_string(label))] = count;
  }
  j["agme_histogram"] = nlohmann::json::object();
  for (const auto& [agmes, count] : stats.agme_histogram) {
    j["agme_histogram"][std::to_string(agmes)] = count;
  }
  auto quantiles = [](const Quantiles& q) {
    return nlohmann::json{
        {"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
  };
  j["source_length"] = quantiles(stats.source_length);
  j["target_length"] = quantiles(stats.target_length);

  std::optional<std::ofstream> holder;
  open_output(holder, out_path) << j.dump(2) << '\n';
  return 0;
}

int run_filter(const std::string& corpus_path, const std::string& words_path,
               const std::string& out_path, double lang_score, double lang_threshold) {
  std::vector<Instance> corpus = load_corpus(corpus_path);
  WordList words = WordList::from_file(words_path);
  std::optional<ConstantScorer> scorer;
  if (lang_score >= 0) scorer.emplace(lang_score);

  std::vector<Instance> kept;
  for (const Instance& inst : corpus) {
    if (!word_list_filter(inst.source, instance_translation(inst), words)) continue;
    if (scorer && !language_id_filter(inst.source, inst.source_lang, *scorer, lang_threshold)) {
      continue;
    }
    kept.push_back(inst);
  }
  std::optional<std::ofstream> holder;
  serialize_corpus(kept, open_output(holder, out_path));
  std::cerr << "kept " << kept.size() << " of " << corpus.size() << " instances\n";
  return 0;
}

int run_tuples(const std::string& corpus_path, const std::string& out_path) {
  ExtractionResult result = extract_corpus(load_corpus(corpus_path));
  for (const std::string& warning : result.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  std::optional<std::ofstream> holder;
  write_tuples(result.tuples, open_output(holder, out_path));

  // Keep the summary clear of the tuple stream when both go to stdout.
  std::ostream& info = out_path.empty() || out_path == "-" ? std::cerr : std::cout;
  info << result.tuples.size() << " tuples\n";
  for (const auto& [key, count] : category_summary(result.tuples)) {
    info << "  " << key.source_lang << "  " << to_string(key.subtype)
         << (key.subtype == Subtype::Negative ? "" : key.mixed_original ? " (mix)" : " (f/m)")
         << ": " << count << '\n';
  }
  return 0;
}

int run_neutralize(const std::string& in_path, const std::string& out_path,
                   const std::string& lexicon_path) {
  RewriterLexicon lexicon = load_lexicon(lexicon_path);
  std::optional<std::ifstream> in_holder;
  std::istream& in = open_input(in_holder, in_path);
  std::optional<std::ofstream> out_holder;
  std::ostream& out = open_output(out_holder, out_path);

  std::string line;
  while (std::getline(in, line)) {
    out << rewrite_neutral(line, lexicon).text << '\n';
  }
  return 0;
}

int run_derive(const std::string& gender_name, const std::string& original,
               const std::string& neutral, const std::string& in_path,
               const std::string& out_path) {
  Gender target = *gender_from_string(gender_name);  // flag values pre-checked
  std::optional<std::ofstream> out_holder;
  std::ostream& out = open_output(out_holder, out_path);

  if (!original.empty() || !neutral.empty()) {
    out << derive_gendered(original, neutral, target) << '\n';
    return 0;
  }
  std::optional<std::ifstream> in_holder;
  std::istream& in = open_input(in_holder, in_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(in_path.empty() ? "<stdin>" : in_path, line_no,
                       "expected 'original<TAB>neutral'");
    }
    out << derive_gendered(line.substr(0, tab), line.substr(tab + 1), target) << '\n';
  }
  return 0;
}

int run_rewrite_llm(const std::string& corpus_path, const std::string& out_path,
                    const std::string& cache_dir, const std::string& template_path,
                    const std::string& model, std::size_t concurrency, std::size_t max_attempts,
                    bool offline) {
  PromptTemplate tmpl = template_path.empty() ? PromptTemplate::builtin_turkish()
                                              : PromptTemplate::from_file(template_path);
  std::vector<Instance> corpus = load_corpus(corpus_path);

  std::vector<RewriteTask> tasks;
  std::size_t skipped = 0;
  for (const Instance& inst : corpus) {
    std::string translation = instance_translation(inst);
    if (inst.source_lang != tmpl.language || translation.empty()) {
      ++skipped;
      continue;
    }
    tasks.push_back({inst.id, inst.source_lang, inst.source, translation});
  }
  if (tasks.empty()) {
    throw DataError("no instance matches the template language '" + tmpl.language + "'");
  }
  if (skipped > 0) std::cerr << "skipped " << skipped << " instances\n";

  std::optional<HttpChatTransport> http;
  if (!offline) http.emplace();
  DiskCacheTransport transport(cache_dir, offline ? nullptr : &*http);

  RewriteOptions options;
  options.model = model;
  options.max_attempts = max_attempts;
  BatchOutcome outcome = rewrite_batch(tasks, transport, tmpl, options, concurrency);

  std::optional<std::ofstream> holder;
  std::ostream& out = open_output(holder, out_path);
  for (const auto& [id, result] : outcome.results) {
    nlohmann::json j;
    j["id"] = id;
    j["neutral"] = result.neutral;
    j["feminine"] = result.feminine;
    j["masculine"] = result.masculine;
    j["none"] = result.none_flag;
    out << j.dump() << '\n';
  }
  std::cerr << outcome.results.size() << " instances rewritten, transcripts cached in "
            << cache_dir << '\n';
  for (const auto& [id, message] : outcome.failures) {
    std::cerr << "failed " << id << ": " << message << '\n';
  }
  return outcome.failures.empty() ? 0 : kTransportError;
}

struct StoredRewrite {
  std::string neutral, feminine, masculine;
};

std::map<std::string, StoredRewrite> load_results(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open results file " + path);
  std::map<std::string, StoredRewrite> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(path, line_no, "invalid JSON");
    try {
      results[j.at("id").get<std::string>()] = {j.at("neutral").get<std::string>(),
                                                j.at("feminine").get<std::string>(),
                                                j.at("masculine").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return results;
}

std::vector<ScoredTuple> score_tuples(const std::string& tuples_path,
                                      const std::string& words_path,
                                      const std::string& results_path, bool rule,
                                      const std::string& language, const std::string& subtype) {
  std::vector<TestTuple> tuples = load_tuples(tuples_path);
  if (!language.empty() || !subtype.empty()) {
    std::optional<Subtype> want = subtype_from_string(subtype);
    std::erase_if(tuples, [&](const TestTuple& t) {
      if (!language.empty() && t.source_lang != language) return true;
      if (!subtype.empty() && t.subtype != *want) return true;
      return false;
    });
    if (tuples.empty()) throw DataError("no tuples match the requested slice");
  }
  WordList words = WordList::from_file(words_path);
  std::vector<ScoredTuple> scored;
  scored.reserve(tuples.size());

  if (rule) {
    std::size_t fallbacks = 0;
    for (const TestTuple& t : tuples) {
      std::string hypothesis;
      try {
        std::string neutral = rewrite_neutral(t.original).text;
        hypothesis = t.requested_gender == Gender::Neutral
                         ? neutral
                         : derive_gendered(t.original, neutral, t.requested_gender);
      } catch (const DataError&) {
        // Outside the rule path's reach (mixed originals, gendered nouns);
        // score the unchanged original like a None response.
        hypothesis = t.original;
        ++fallbacks;
      }
      scored.push_back(score_tuple(t, hypothesis, words));
    }
    if (fallbacks > 0) {
      std::cerr << fallbacks << " tuples outside the rule path kept the original\n";
    }
    return scored;
  }

  std::map<std::string, StoredRewrite> results = load_results(results_path);
  for (const TestTuple& t : tuples) {
    auto it = results.find(t.id);
    if (it == results.end()) throw DataError("no rewrite result for instance '" + t.id + "'");
    const StoredRewrite& r = it->second;
    const std::string& hypothesis = t.requested_gender == Gender::Neutral    ? r.neutral
                                    : t.requested_gender == Gender::Feminine ? r.feminine
                                                                             : r.masculine;
    scored.push_back(score_tuple(t, hypothesis, words));
  }
  return scored;
}

int run_evaluate(const std::string& tuples_path, const std::string& words_path,
                 const std::string& results_path, bool rule, const std::string& language,
                 const std::string& subtype, const std::string& out_path, bool human_readable) {
  EvalReport report =
      aggregate(score_tuples(tuples_path, words_path, results_path, rule, language, subtype));
  std::optional<std::ofstream> holder;
  std::ostream& out = open_output(holder, out_path);
  if (human_readable) {
    out << render_report(report);
  } else {
    write_report_rows(report, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rewrites English translations into gender variants and scores rewriters"};
  app.require_subcommand(1);

  std::string corpus_path, out_path, in_path, words_path, template_path, cache_dir;
  std::string lexicon_path, results_path, tuples_path, gender_name, original, neutral;
  std::string eval_language, eval_subtype;
  std::string model = "gpt-4";
  double lang_score = -1.0;
  double lang_threshold = 0.7;
  std::size_t concurrency = 4;
  std::size_t max_attempts = 3;
  bool offline = false;
  bool rule = false;

  CLI::App* validate = app.add_subcommand("validate", "check a corpus file and print counts");
  validate->add_option("--corpus", corpus_path, "corpus, one JSON record per line")->required();

  CLI::App* stats = app.add_subcommand("stats", "label and length statistics for a corpus");
  stats->add_option("--corpus", corpus_path)->required();
  stats->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* filter = app.add_subcommand("filter", "keep instances with gendered-word targets");
  filter->add_option("--corpus", corpus_path)->required();
  filter->add_option("--words", words_path, "gendered word list, one token per line")->required();
  filter->add_option("--out", out_path);
  filter->add_option("--lang-score", lang_score,
                     "constant language-id score stub, enables the language filter");
  filter->add_option("--lang-threshold", lang_threshold, "minimum score")
      ->capture_default_str();

  CLI::App* tuples = app.add_subcommand("tuples", "expand a corpus into evaluation tuples");
  tuples->add_option("--corpus", corpus_path)->required();
  tuples->add_option("--out", out_path, "tuple file (default stdout)");

  CLI::App* neutralize = app.add_subcommand("neutralize",
                                            "rewrite gendered pronouns to singular they");
  neutralize->add_option("--in", in_path, "sentences, one per line (default stdin)");
  neutralize->add_option("--out", out_path);
  neutralize->add_option("--lexicon", lexicon_path, "override the disambiguation word sets");

  CLI::App* derive = app.add_subcommand("derive",
                                        "derive a gendered rewrite from original + neutral");
  derive->add_option("--gender", gender_name, "target gender")
      ->required()
      ->check(CLI::IsMember({"feminine", "masculine"}));
  CLI::Option* original_opt = derive->add_option("--original", original, "original sentence");
  CLI::Option* neutral_opt = derive->add_option("--neutral", neutral, "its neutral rewrite");
  CLI::Option* derive_in = derive->add_option("--in", in_path,
                                              "original<TAB>neutral lines (default stdin)");
  original_opt->needs(neutral_opt);
  neutral_opt->needs(original_opt);
  derive_in->excludes(original_opt);
  derive->add_option("--out", out_path);

  CLI::App* rewrite_llm = app.add_subcommand(
      "rewrite-llm", "produce neutral/feminine/masculine variants through a chat model");
  rewrite_llm->add_option("--corpus", corpus_path)->required();
  rewrite_llm->add_option("--out", out_path, "results file (default stdout)");
  rewrite_llm->add_option("--cache", cache_dir, "transcript cache directory")->required();
  rewrite_llm->add_option("--template", template_path,
                          "prompt template file (default: builtin Turkish)");
  rewrite_llm->add_option("--model", model)->capture_default_str();
  rewrite_llm->add_option("--concurrency", concurrency)->capture_default_str();
  rewrite_llm->add_option("--max-attempts", max_attempts)->capture_default_str();
  rewrite_llm->add_flag("--offline", offline, "serve cached transcripts only, no endpoint");

  auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--tuples", tuples_path, "tuple file from the tuples subcommand")
        ->required();
    cmd->add_option("--words", words_path, "gendered word list")->required();
    CLI::Option* results_opt =
        cmd->add_option("--results", results_path, "rewrite-llm output to score");
    CLI::Option* rule_opt =
        cmd->add_flag("--rule", rule, "score the builtin rule rewriter instead");
    results_opt->excludes(rule_opt);
    cmd->add_option("--language", eval_language, "score only this source language")
        ->check(CLI::IsMember({"tr", "fa", "fi", "hu"}));
    cmd->add_option("--subtype", eval_subtype, "score only this tuple subtype")
        ->check(CLI::IsMember({"pronoun_only", "gendered_noun", "negative"}));
    cmd->add_option("--out", out_path);
  };
  CLI::App* evaluate = app.add_subcommand("evaluate", "score rewrites, one JSON row per cell");
  add_eval_options(evaluate);
  CLI::App* report = app.add_subcommand("report", "score rewrites and print summary tables");
  add_eval_options(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*validate) return run_validate(corpus_path);
    if (*stats) return run_stats(corpus_path, out_path);
    if (*filter) return run_filter(corpus_path, words_path, out_path, lang_score, lang_threshold);
    if (*tuples) return run_tuples(corpus_path, out_path);
    if (*neutralize) return run_neutralize(in_path, out_path, lexicon_path);
    if (*derive) return run_derive(gender_name, original, neutral, in_path, out_path);
    if (*rewrite_llm) {
      return run_rewrite_llm(corpus_path, out_path, cache_dir, template_path, model, concurrency,
                             max_attempts, offline);
    }
    if (*evaluate) {
      if (!rule && results_path.empty()) {
        std::cerr << "evaluate needs --results or --rule\n";
        return kUsageError;
      }
      return run_evaluate(tuples_path, words_path, results_path, rule, eval_language,
                          eval_subtype, out_path, false);
    }
    if (*report) {
      if (!rule && results_path.empty()) {
        std::cerr << "report needs --results or --rule\n";
        return kUsageError;
      }
      return run_evaluate(tuples_path, words_path, results_path, rule, eval_language,
                          eval_subtype, out_path, true);
    }
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return kTransportError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
