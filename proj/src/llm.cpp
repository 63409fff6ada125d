#include "genvar/llm.hpp"

#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "genvar/errors.hpp"

namespace genvar {

namespace {

std::string_view ltrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

// "5." or "5)" at the start of a line opens the answer section.
bool is_step_marker(std::string_view line, char digit) {
  std::string_view t = ltrim(line);
  return t.size() >= 2 && t[0] == digit && (t[1] == '.' || t[1] == ')');
}

std::string_view strip_step_marker(std::string_view line) {
  std::string_view t = ltrim(line);
  return t.substr(2);
}

bool is_none_text(std::string_view s) {
  std::string_view t = trim(s);
  while (!t.empty() && (t.back() == '.' || t.back() == '!')) t.remove_suffix(1);
  if (t.size() != 4) return false;
  const char* none = "none";
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::tolower(static_cast<unsigned char>(t[i])) != none[i]) return false;
  }
  return true;
}

// "a. text", "b) text" and friends; the letter selects the variant slot.
std::optional<std::pair<char, std::string>> parse_item_line(std::string_view line) {
  std::string_view t = ltrim(line);
  if (t.size() < 2) return std::nullopt;
  char letter = t[0];
  if (letter < 'a' || letter > 'c') return std::nullopt;
  if (t[1] != '.' && t[1] != ')') return std::nullopt;
  return std::make_pair(letter, std::string(trim(t.substr(2))));
}

// The step-5 lines of a transcript or worked example, marker removed.
std::optional<std::vector<std::string_view>> step5_region(
    const std::vector<std::string_view>& lines) {
  std::optional<std::size_t> at;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_step_marker(lines[i], '5')) at = i;
  }
  if (!at) return std::nullopt;
  std::vector<std::string_view> region;
  region.push_back(strip_step_marker(lines[*at]));
  region.insert(region.end(), lines.begin() + static_cast<std::ptrdiff_t>(*at) + 1, lines.end());
  return region;
}

struct Step5Answer {
  bool none = false;
  std::optional<std::string> a, b, c;
};

std::optional<Step5Answer> parse_step5(const std::vector<std::string_view>& region) {
  for (std::string_view line : region) {
    if (trim(line).empty()) continue;
    if (is_none_text(line)) return Step5Answer{true, {}, {}, {}};
    break;
  }
  Step5Answer answer;
  for (std::string_view line : region) {
    auto item = parse_item_line(line);
    if (!item) continue;
    auto& slot = item->first == 'a' ? answer.a : item->first == 'b' ? answer.b : answer.c;
    if (!slot) slot = std::move(item->second);
  }
  if (!answer.a && !answer.b && !answer.c) return std::nullopt;
  return answer;
}

constexpr char kTurkishTemplateText[] =
    R"PROMPT(language: tr

I need help with a linguistic annotation task for a translation. I will give you an Turkish sentence along with its translation into English. I would like you to help me find Arbitrarily Gender-Marked Entities (AGMEs), where someone is mentioned without any marked gender in the Turkish sentence, but in the translation they have gender marking. Please follow the following steps:

1. Identify all unique individuals mentioned in the English translation in the third person and find all words that explicitly indicate those individuals' genders.
    - Group words for each individual separately, considering possessive determiners (e.g., "his", "her") as referring to a separate individual from the one indicated by the noun they modify. For example, in "his uncle," "his" and "uncle" refer to two separate individuals.
    - Pay attention to gender indicated by kinship terms and other gendered nouns, like "mother", "nephew", "actress".
    - If the gender is explicitly indicated by pronouns in the target language, consider that gender information for the analysis. (i.e. "she", "he", "him", "her", "his", "hers", "himself", "herself" all explicitly indicate gender)
    - Treat names as if they do not indicate a gender, even if they are often associated with a gender. For example, "Michael" could be either male or female, so it does not mark gender.
    - Pay attention to how forms or "to be" (particularly "is") can join two mentions of the same individual. For example, in "She is my daughter," "daughter" and "she" refer to the same person.

2. Find all words in the Turkish source sentence that refer to each of the individuals found in step one.

3. For each individual, do any of the corresponding words in the Turkish source explicitly indicate a gender.
    - Remember, pay attention to gender indicated by kinship words. For example, words like "erkek", "kız" , "amca", "anne" all explicitly indicate gender.
    - Remember that some kinship words in Turkish are gender-neutral, such as yeğen. Do not include these as marking gender.
    - Treat names as if they do not (e.g. 'Michael' can refer equally well to a man or woman).

4. Identify any instances where the gender-neutral terms in Turkish have been translated into gender-specific terms in English (AGMEs).
    - Answer separately for each individual identified.

5. Next create a set of variant translations with the following notes:
    - If no changes are needed, then just use the original translation exactly as it is.
    - Remember to only change the words referring to AGMEs.
    - if any gendered words refer to non-AGMEs, leave them untouched.
    - Do not make assumptions about heterosexual relationships. Men can have husbands and boyfriends. Women can have wives and girlfriends.

Please create these three variant translations:
  a. If any individuals are AGMEs and are referred to with gendered words in English, rewrite the English translation changing only those words to use their gender-neutral variants where possible. Use singular "they" instead of he, she, etc. Use "themselves" for gender neutral singular reflexives (never "themself"). Change nothing else.
  b. rewrite the English translation so that any masculine words referring to AGMEs are replaced by their feminine variants. Don't change any words referring to non-AGMEs. Change nothing else.
  c. rewrite the English translation so that any feminine words referring to AGMEs are replaced by their masculine variants. Don't change any words referring to non-AGMEs. Change nothing else.

Example 1 -
Source Sentence: Amcası kendi kendine konuşuyor.
Original Translation: His uncle talks to himself.
1. individual 1: "His" is masculine.
   individual 2: "uncle", "himself" are masculine.
2. individual 1: no explicit words in the source
   indiviudal 2: "Amcası", "kendi kendine"
3. individual 1: no words indicate gender
   indivudual 2: "Amcası" is masculine.
4. individual 1: AGME - masculine in translation ("His"), but gender neutral in the source (no explicit words)
   individual 2: not an AGME - gender is masculine in both the source ("Amcası") and translation ("uncle")
5. a. Their uncle talks to himself.
   b. Her uncle talks to himself.
   c. His uncle talks to himself.

Example 2 -
Source Sentence: Annem öğle yemeğini yalnız yiyordu.
Original Translation: My mother ate her lunch alone.
1. individual 1: "mother", "her" are feminine.
2. individual 1: "Annem"
3. individual 1: "Annem" is feminine.
4. individual 1: not an AGME since gender is feminine in both the source and translation
5. None

Example 3 -
Source Sentence: O benim kızım
Original Translation: She is my daughter.
1. individual 1: "she", "daughter" are feminine.
2. individual 1: "O", "kızım"
3. individual 1: "kızım" is feminine.
4. individual 1: not an AGME since gender is feminine in both the source and translation
5. None
)PROMPT";

PromptTemplate parse_template_text(std::string_view text, const std::string& source_name) {
  auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  constexpr std::string_view kLanguageKey = "language:";
  if (i == lines.size() || !trim(lines[i]).starts_with(kLanguageKey)) {
    throw ParseError(source_name, i + 1, "expected a 'language: <code>' header line");
  }
  PromptTemplate tmpl;
  tmpl.language = std::string(trim(trim(lines[i]).substr(kLanguageKey.size())));
  ++i;

  std::size_t body_begin = i;
  std::vector<std::size_t> headers;
  for (std::size_t j = i; j < lines.size(); ++j) {
    if (ltrim(lines[j]).starts_with("Example ")) headers.push_back(j);
  }
  auto block_text = [&](std::size_t begin, std::size_t end) {
    while (begin < end && trim(lines[begin]).empty()) ++begin;
    while (end > begin && trim(lines[end - 1]).empty()) --end;
    std::string out;
    for (std::size_t j = begin; j < end; ++j) {
      if (j > begin) out.push_back('\n');
      out += lines[j];
    }
    return out;
  };
  std::size_t instructions_end = headers.empty() ? lines.size() : headers.front();
  tmpl.instructions = block_text(body_begin, instructions_end);
  for (std::size_t h = 0; h < headers.size(); ++h) {
    std::size_t end = h + 1 < headers.size() ? headers[h + 1] : lines.size();
    tmpl.examples.push_back(block_text(headers[h], end));
  }
  tmpl.validate();
  return tmpl;
}

}  // namespace

void PromptTemplate::validate() const {
  if (language.empty()) throw DataError("prompt template needs a source language code");
  if (instructions.empty()) throw DataError("prompt template needs an instruction body");
  auto lines = split_lines(instructions);
  for (char digit = '1'; digit <= '5'; ++digit) {
    bool found = false;
    for (std::string_view line : lines) {
      if (is_step_marker(line, digit)) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw DataError(std::string("prompt instructions must number steps 1 to 5; step ") + digit +
                      " is missing");
    }
  }
  if (examples.size() != 3) {
    throw DataError("prompt template must carry exactly three worked examples, got " +
                    std::to_string(examples.size()));
  }
  std::size_t none_count = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto region = step5_region(split_lines(examples[i]));
    std::optional<Step5Answer> answer;
    if (region) answer = parse_step5(*region);
    if (!answer || (!answer->none && !(answer->a && answer->b && answer->c))) {
      throw DataError("worked example " + std::to_string(i + 1) +
                      " has no step 5 answer with items a/b/c or None");
    }
    if (answer->none) ++none_count;
  }
  if (none_count == 0) {
    throw DataError("at least one worked example must answer None at step 5");
  }
}

PromptTemplate PromptTemplate::builtin_turkish() {
  return parse_template_text(kTurkishTemplateText, "<builtin turkish template>");
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open prompt template " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_template_text(buffer.str(), path.string());
}

std::string build_prompt(const PromptTemplate& tmpl, std::string_view source_lang,
                         std::string_view source, std::string_view original) {
  if (tmpl.language != source_lang) {
    throw DataError("prompt template is for '" + tmpl.language + "' but the instance is '" +
                    std::string(source_lang) + "'");
  }
  std::string out = tmpl.instructions;
  for (const std::string& example : tmpl.examples) {
    out += "\n\n";
    out += example;
  }
  out += "\n\nSource Sentence: ";
  out += source;
  out += "\nOriginal Translation: ";
  out += original;
  return out;
}

RewriteResult parse_response(std::string_view raw, std::string_view original) {
  auto fail = [&](const std::string& reason) -> ParseError {
    return ParseError(reason + "\n--- transcript ---\n" + std::string(raw));
  };
  auto region = step5_region(split_lines(raw));
  if (!region) throw fail("model response has no step 5 section");

  RewriteResult result;
  result.raw = std::string(raw);
  auto answer = parse_step5(*region);
  if (!answer) throw fail("step 5 contains neither variant items nor None");
  if (answer->none) {
    result.none_flag = true;
    result.neutral = result.feminine = result.masculine = std::string(original);
    return result;
  }
  std::string missing;
  if (!answer->a) missing += "a";
  if (!answer->b) missing += "b";
  if (!answer->c) missing += "c";
  if (!missing.empty()) throw fail("step 5 is missing item(s) " + missing);
  if (answer->a->empty() || answer->b->empty() || answer->c->empty())
    throw fail("step 5 has an item with no text");
  result.neutral = *answer->a;
  result.feminine = *answer->b;
  result.masculine = *answer->c;
  return result;
}

std::string render_variants(const RewriteResult& result) {
  if (result.none_flag) return "5. None";
  return "5. a. " + result.neutral + "\n   b. " + result.feminine + "\n   c. " + result.masculine;
}

RewriteResult rewrite(std::string_view source_lang, std::string_view source,
                      std::string_view original, ChatTransport& transport,
                      const PromptTemplate& tmpl, const RewriteOptions& options) {
  if (options.max_attempts == 0) throw DataError("rewrite needs at least one attempt");
  TransportRequest request;
  request.model = options.model;
  request.messages.push_back({"user", build_prompt(tmpl, source_lang, source, original)});

  std::string last_error;
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    try {
      TransportResponse response = transport.complete(request);
      return parse_response(response.text, original);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw TransportError("transport failed after " + std::to_string(options.max_attempts) +
                       " attempts; last error: " + last_error);
}

BatchOutcome rewrite_batch(const std::vector<RewriteTask>& tasks, ChatTransport& transport,
                           const PromptTemplate& tmpl, const RewriteOptions& options,
                           std::size_t concurrency) {
  std::vector<std::optional<RewriteResult>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const RewriteTask& task = tasks[i];
      try {
        results[i] = rewrite(task.source_lang, task.source, task.original, transport, tmpl,
                             options);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  std::size_t workers = std::min(concurrency == 0 ? 1 : concurrency, tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  BatchOutcome out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (results[i]) {
      out.results[tasks[i].id] = std::move(*results[i]);
    } else {
      out.failures[tasks[i].id] = errors[i];
    }
  }
  return out;
}

MockTransport::MockTransport(std::function<std::string(const TransportRequest&)> responder)
    : responder_(std::move(responder)) {}

void MockTransport::enqueue(std::string reply_text) {
  std::lock_guard lock(mutex_);
  script_.emplace_back(false, std::move(reply_text));
}

void MockTransport::enqueue_failure(std::string message) {
  std::lock_guard lock(mutex_);
  script_.emplace_back(true, std::move(message));
}

TransportResponse MockTransport::complete(const TransportRequest& request) {
  std::unique_lock lock(mutex_);
  requests_.push_back(request);
  if (!script_.empty()) {
    auto [is_failure, payload] = std::move(script_.front());
    script_.pop_front();
    if (is_failure) throw TransportError(payload);
    return {std::move(payload), {}};
  }
  if (responder_) {
    auto responder = responder_;
    lock.unlock();
    return {responder(request), {}};
  }
  throw TransportError("mock transport has no scripted reply left");
}

DiskCacheTransport::DiskCacheTransport(std::filesystem::path dir, ChatTransport* upstream)
    : dir_(std::move(dir)), upstream_(upstream) {
  std::filesystem::create_directories(dir_);
}

std::string DiskCacheTransport::cache_key(const TransportRequest& request) {
  std::uint64_t hash = 14695981039346656037ULL;
  auto feed = [&hash](std::string_view s) {
    for (unsigned char c : s) {
      hash ^= c;
      hash *= 1099511628211ULL;
    }
    hash ^= 0x1f;
    hash *= 1099511628211ULL;
  };
  feed(request.model);
  feed(std::to_string(request.temperature));
  for (const ChatMessage& m : request.messages) {
    feed(m.role);
    feed(m.content);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

TransportResponse DiskCacheTransport::complete(const TransportRequest& request) {
  std::filesystem::path entry = dir_ / (cache_key(request) + ".txt");
  if (std::filesystem::exists(entry)) {
    std::ifstream in(entry, std::ios::binary);
    if (!in) throw TransportError("cannot read cached response " + entry.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return {buffer.str(), {}};
  }
  if (!upstream_) {
    throw TransportError("no cached response for this request (key " + cache_key(request) +
                         ") and no upstream transport");
  }
  TransportResponse response = upstream_->complete(request);
  // Write-then-rename keeps concurrent readers away from partial files.
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  std::filesystem::path tmp = entry;
  tmp += "." + tid.str() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << response.text;
  }
  std::filesystem::rename(tmp, entry);
  return response;
}

HttpChatTransport::HttpChatTransport() {
  const char* endpoint = std::getenv("GENVAR_LLM_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0') {
    throw TransportError(
        "GENVAR_LLM_ENDPOINT is not set; export it (and GENVAR_LLM_API_KEY) to reach a chat "
        "endpoint");
  }
  std::string url = endpoint;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("GENVAR_LLM_ENDPOINT must be a full URL, got '" + url + "'");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = url;
    path_ = "/";
  } else {
    base_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (base_.starts_with("https://")) {
    throw TransportError("built without TLS support; use an http endpoint or a local proxy");
  }
#endif
  if (const char* key = std::getenv("GENVAR_LLM_API_KEY")) api_key_ = key;
}

TransportResponse HttpChatTransport::complete(const TransportRequest& request) {
  nlohmann::json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["messages"] = nlohmann::json::array();
  for (const ChatMessage& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }

  httplib::Client client(base_);
  client.set_connection_timeout(static_cast<time_t>(connect_timeout_seconds), 0);
  client.set_read_timeout(static_cast<time_t>(read_timeout_seconds), 0);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
    headers.emplace("api-key", api_key_);
  }
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("cannot reach " + base_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
  }
  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty() ||
      !parsed["choices"][0].contains("message") ||
      !parsed["choices"][0]["message"].contains("content")) {
    throw TransportError("chat endpoint response lacks choices[0].message.content: " +
                         res->body.substr(0, 200));
  }
  TransportResponse response;
  response.text = parsed["choices"][0]["message"]["content"].get<std::string>();
  if (parsed.contains("usage")) {
    response.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
    response.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
  }
  return response;
}

std::string zero_shot_neutral_prompt(std::string_view input_text) {
  std::string out =
      "Change all gendered pronouns to use singular \"they\" instead. Don't modify anything "
      "else : ";
  out += input_text;
  return out;
}

std::string few_shot_neutral_prompt(std::string_view input_text) {
  static constexpr char kFewShot[] =
      R"(Change all gendered pronouns to use singular "they" instead. Don't modify anything else.

input : His bike is better than mine.
gender neutral variant : Their bike is better than mine.

input : Jack bores me with stories about her trip.
gender neutral variant: Jack bores me with stories about their trip.

input : He kissed him goodbye and left, never to be seen again.
gender neutral variant : They kissed them goodbye and left, never to be seen again.

input : Is she your teacher?
gender neutral variant : Are they your teacher?

input : Anime director Satoshi Kon died of pancreatic cancer on August 24, 2010, shortly before her 47th birthday.
gender neutral variant : Anime director Satoshi Kon died of pancreatic cancer on August 24, 2010, shortly before their 47th birthday.

input : )";
  std::string out = kFewShot;
  out += input_text;
  out += "\ngender neutral variant :";
  return out;
}

std::string parse_last_line_response(std::string_view raw) {
  auto lines = split_lines(raw);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::string_view line = trim(*it);
    if (line.empty()) continue;
    constexpr std::string_view kEchoPrefix = "gender neutral variant";
    if (line.size() >= kEchoPrefix.size()) {
      bool echoed = true;
      for (std::size_t i = 0; i < kEchoPrefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(line[i])) != kEchoPrefix[i]) {
          echoed = false;
          break;
        }
      }
      if (echoed) {
        std::string_view rest = ltrim(line.substr(kEchoPrefix.size()));
        if (!rest.empty() && rest.front() == ':') {
          line = trim(rest.substr(1));
        }
      }
    }
    if (line.empty()) break;
    return std::string(line);
  }
  throw ParseError("model response has no usable rewrite line\n--- transcript ---\n" +
                   std::string(raw));
}

}  // namespace genvar
