#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "genvar/errors.hpp"
#include "genvar/llm.hpp"

using namespace genvar;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string transcript(const std::string& name) {
  return read_file(std::filesystem::path(TEST_DATA_DIR) / "transcripts" / name);
}

struct EnvGuard {
  explicit EnvGuard(const char* n) : name(n) {
    if (const char* v = std::getenv(n)) saved = v;
  }
  ~EnvGuard() {
    if (saved) {
      setenv(name, saved->c_str(), 1);
    } else {
      unsetenv(name);
    }
  }
  const char* name;
  std::optional<std::string> saved;
};

struct TempDir {
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("genvar_llm_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static std::atomic<int>& counter() {
    static std::atomic<int> c{0};
    return c;
  }
  std::filesystem::path path;
};

}  // namespace

TEST_CASE("builtin turkish template is valid and loadable from disk") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();
  CHECK(tmpl.language == "tr");
  REQUIRE(tmpl.examples.size() == 3);
  CHECK(tmpl.examples[0].starts_with("Example 1 -"));
  CHECK(tmpl.instructions.find("Please create these three variant translations:") !=
        std::string::npos);
  CHECK(tmpl.instructions.find("never \"themself\"") != std::string::npos);

  PromptTemplate from_disk =
      PromptTemplate::from_file(std::filesystem::path(GENVAR_DATA_DIR) / "prompt_turkish.txt");
  CHECK(from_disk == tmpl);
}

TEST_CASE("template validation rejects structural defects") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();

  SUBCASE("wrong example count") {
    tmpl.examples.pop_back();
    CHECK_THROWS_AS(tmpl.validate(), DataError);
  }
  SUBCASE("no example answers None") {
    for (std::string& example : tmpl.examples) {
      auto at = example.find("5. None");
      if (at != std::string::npos) {
        example.replace(at, 7, "5. a. x\n   b. y\n   c. z");
      }
    }
    CHECK_THROWS_WITH_AS(tmpl.validate(), doctest::Contains("None"), DataError);
  }
  SUBCASE("missing step number") {
    tmpl.instructions = "1. a\n2. b\n4. d\n5. e";
    CHECK_THROWS_WITH_AS(tmpl.validate(), doctest::Contains("step 3"), DataError);
  }
  SUBCASE("missing language") {
    tmpl.language.clear();
    CHECK_THROWS_AS(tmpl.validate(), DataError);
  }
  SUBCASE("example without a step 5 answer") {
    tmpl.examples[0] = "Example 1 -\nSource Sentence: x\n1. nothing\n2. nothing";
    CHECK_THROWS_AS(tmpl.validate(), DataError);
  }
}

TEST_CASE("template files without a language header are rejected") {
  TempDir dir;
  std::filesystem::create_directories(dir.path);
  std::filesystem::path bad = dir.path / "bad_template.txt";
  std::ofstream(bad) << "1. step\nExample 1 -\n5. None\n";
  CHECK_THROWS_AS(PromptTemplate::from_file(bad), ParseError);
  CHECK_THROWS_AS(PromptTemplate::from_file(dir.path / "no_such_file.txt"), DataError);
}

TEST_CASE("build_prompt fills the slots and keeps the figure structure") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();
  std::string prompt = build_prompt(tmpl, "tr", "Amcası kendi kendine konuşuyor.",
                                    "His uncle talks to himself.");
  CHECK(prompt.starts_with("I need help with a linguistic annotation task"));
  CHECK(prompt.find("Example 3 -") != std::string::npos);
  CHECK(prompt.ends_with("Source Sentence: Amcası kendi kendine konuşuyor.\n"
                         "Original Translation: His uncle talks to himself."));

  CHECK(build_prompt(tmpl, "tr", "", "x").ends_with("Source Sentence: \nOriginal Translation: x"));
  CHECK_THROWS_WITH_AS(build_prompt(tmpl, "fa", "a", "b"), doctest::Contains("'fa'"), DataError);
}

TEST_CASE("parse_response extracts the step 5 variants") {
  std::string raw = transcript("example1.txt");
  RewriteResult result = parse_response(raw, "His uncle talks to himself.");
  CHECK(result.neutral == "Their uncle talks to himself.");
  CHECK(result.feminine == "Her uncle talks to himself.");
  CHECK(result.masculine == "His uncle talks to himself.");
  CHECK_FALSE(result.none_flag);
  CHECK(result.raw == raw);
}

TEST_CASE("parse_response maps None to identity variants") {
  const std::string original = "My mother ate her lunch alone.";
  for (const char* name : {"example2_none.txt", "none_lowercase.txt",
                           "none_trailing_period.txt"}) {
    CAPTURE(name);
    RewriteResult result = parse_response(transcript(name), original);
    CHECK(result.none_flag);
    CHECK(result.neutral == original);
    CHECK(result.feminine == original);
    CHECK(result.masculine == original);
  }
}

TEST_CASE("parse_response tolerates marker variations") {
  for (const char* name : {"paren_markers.txt", "items_on_own_lines.txt",
                           "commentary_after_items.txt", "duplicate_item.txt"}) {
    CAPTURE(name);
    RewriteResult result = parse_response(transcript(name), "He runs fast.");
    CHECK(result.neutral == "They run fast.");
    CHECK(result.feminine == "She runs fast.");
    CHECK(result.masculine == "He runs fast.");
  }
}

TEST_CASE("parse_response failures keep the transcript") {
  CHECK_THROWS_WITH_AS(parse_response(transcript("missing_item_c.txt"), "x"),
                       doctest::Contains("missing item(s) c"), ParseError);
  CHECK_THROWS_WITH_AS(parse_response(transcript("missing_item_c.txt"), "x"),
                       doctest::Contains("She runs fast."), ParseError);
  CHECK_THROWS_WITH_AS(parse_response(transcript("empty_item_text.txt"), "x"),
                       doctest::Contains("no text"), ParseError);
  for (const char* name :
       {"no_step_five.txt", "step5_empty.txt", "empty.txt", "garbage_json.txt",
        "missing_item_a.txt", "missing_items_bc.txt", "wrong_letters.txt", "numeric_items.txt",
        "prose_answer.txt"}) {
    CAPTURE(name);
    CHECK_THROWS_AS(parse_response(transcript(name), "x"), ParseError);
  }
  CHECK_THROWS_AS(parse_response("", "x"), ParseError);
}

TEST_CASE("render_variants and parse_response round-trip") {
  RewriteResult result;
  result.neutral = "Their bike is red.";
  result.feminine = "Her bike is red.";
  result.masculine = "His bike is red.";
  RewriteResult back = parse_response(render_variants(result), "whatever");
  CHECK(back.neutral == result.neutral);
  CHECK(back.feminine == result.feminine);
  CHECK(back.masculine == result.masculine);

  RewriteResult none;
  none.none_flag = true;
  none.neutral = none.feminine = none.masculine = "Same.";
  CHECK(render_variants(none) == "5. None");
  RewriteResult none_back = parse_response(render_variants(none), "Same.");
  CHECK(none_back.none_flag);
  CHECK(none_back.neutral == "Same.");
  CHECK(none_back.feminine == "Same.");
  CHECK(none_back.masculine == "Same.");
}

TEST_CASE("rewrite composes prompt, transport and parser") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();
  MockTransport transport;
  transport.enqueue(transcript("example1.txt"));

  RewriteResult result = rewrite("tr", "Amcası kendi kendine konuşuyor.",
                                 "His uncle talks to himself.", transport, tmpl);
  CHECK(result.neutral == "Their uncle talks to himself.");

  REQUIRE(transport.requests().size() == 1);
  const TransportRequest& request = transport.requests()[0];
  CHECK(request.temperature == 0.0);
  CHECK(request.model == "gpt-4");
  REQUIRE(request.messages.size() == 1);
  CHECK(request.messages[0].role == "user");
  CHECK(request.messages[0].content ==
        build_prompt(tmpl, "tr", "Amcası kendi kendine konuşuyor.",
                     "His uncle talks to himself."));
}

TEST_CASE("rewrite retries transient transport failures only") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();

  SUBCASE("recovers within the attempt budget") {
    MockTransport transport;
    transport.enqueue_failure("connection reset");
    transport.enqueue_failure("timeout");
    transport.enqueue(transcript("example2_none.txt"));
    RewriteResult result = rewrite("tr", "s", "My mother ate her lunch alone.", transport, tmpl);
    CHECK(result.none_flag);
    CHECK(transport.requests().size() == 3);
  }
  SUBCASE("gives up after max_attempts") {
    MockTransport transport;
    transport.enqueue_failure("down");
    transport.enqueue_failure("down");
    RewriteOptions options;
    options.max_attempts = 2;
    CHECK_THROWS_WITH_AS(rewrite("tr", "s", "o", transport, tmpl, options),
                         doctest::Contains("after 2 attempts"), TransportError);
    CHECK(transport.requests().size() == 2);
  }
  SUBCASE("does not retry parse failures") {
    MockTransport transport;
    transport.enqueue("word salad with no steps");
    CHECK_THROWS_AS(rewrite("tr", "s", "o", transport, tmpl), ParseError);
    CHECK(transport.requests().size() == 1);
  }
  SUBCASE("identical inputs through a deterministic transport give identical outputs") {
    MockTransport transport([&](const TransportRequest&) { return transcript("example1.txt"); });
    RewriteResult a = rewrite("tr", "s", "His uncle talks to himself.", transport, tmpl);
    RewriteResult b = rewrite("tr", "s", "His uncle talks to himself.", transport, tmpl);
    CHECK(a == b);
  }
}

TEST_CASE("disk cache serves repeats and replays without an upstream") {
  TempDir dir;
  std::atomic<int> upstream_calls{0};
  MockTransport upstream([&](const TransportRequest&) {
    ++upstream_calls;
    return std::string("5. None");
  });

  TransportRequest request;
  request.model = "gpt-4";
  request.messages.push_back({"user", "hello"});

  DiskCacheTransport cached(dir.path, &upstream);
  CHECK(cached.complete(request).text == "5. None");
  CHECK(upstream_calls == 1);
  CHECK(cached.complete(request).text == "5. None");
  CHECK(upstream_calls == 1);

  TransportRequest other = request;
  other.messages[0].content = "different";
  CHECK(DiskCacheTransport::cache_key(other) != DiskCacheTransport::cache_key(request));
  CHECK(cached.complete(other).text == "5. None");
  CHECK(upstream_calls == 2);

  DiskCacheTransport replay(dir.path);
  CHECK(replay.complete(request).text == "5. None");
  TransportRequest miss = request;
  miss.model = "gpt-4o";
  CHECK_THROWS_WITH_AS(replay.complete(miss), doctest::Contains("no cached response"),
                       TransportError);
}

TEST_CASE("cache keys are stable across processes") {
  TransportRequest request;
  request.model = "gpt-4";
  request.messages.push_back({"user", "hello"});
  CHECK(DiskCacheTransport::cache_key(request) == DiskCacheTransport::cache_key(request));
  CHECK(DiskCacheTransport::cache_key(request).size() == 16);
}

TEST_CASE("http transport talks to a chat completions endpoint") {
  httplib::Server server;
  std::string seen_auth;
  double seen_temperature = -1.0;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_auth = req.get_header_value("Authorization");
                auto body = nlohmann::json::parse(req.body);
                seen_temperature = body["temperature"].get<double>();
                nlohmann::json reply;
                reply["choices"][0]["message"]["content"] = "5. None";
                reply["usage"]["prompt_tokens"] = 12;
                reply["usage"]["completion_tokens"] = 3;
                res.set_content(reply.dump(), "application/json");
              });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  server.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "application/json");
  });

  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  EnvGuard endpoint_guard("GENVAR_LLM_ENDPOINT");
  EnvGuard key_guard("GENVAR_LLM_API_KEY");
  std::string base = "http://127.0.0.1:" + std::to_string(port);

  TransportRequest request;
  request.model = "gpt-4";
  request.messages.push_back({"user", "hi"});

  {
    setenv("GENVAR_LLM_ENDPOINT", (base + "/v1/chat/completions").c_str(), 1);
    setenv("GENVAR_LLM_API_KEY", "sk-test", 1);
    HttpChatTransport transport;
    TransportResponse response = transport.complete(request);
    CHECK(response.text == "5. None");
    CHECK(response.usage.prompt_tokens == 12);
    CHECK(response.usage.completion_tokens == 3);
    CHECK(seen_auth == "Bearer sk-test");
    CHECK(seen_temperature == 0.0);
  }
  {
    setenv("GENVAR_LLM_ENDPOINT", (base + "/broken").c_str(), 1);
    HttpChatTransport transport;
    CHECK_THROWS_WITH_AS(transport.complete(request), doctest::Contains("HTTP 500"),
                         TransportError);
  }
  {
    setenv("GENVAR_LLM_ENDPOINT", (base + "/garbage").c_str(), 1);
    HttpChatTransport transport;
    CHECK_THROWS_AS(transport.complete(request), TransportError);
  }
  {
    unsetenv("GENVAR_LLM_ENDPOINT");
    CHECK_THROWS_WITH_AS(HttpChatTransport(), doctest::Contains("GENVAR_LLM_ENDPOINT"),
                         TransportError);
  }

  server.stop();
  serving.join();
}

TEST_CASE("rewrite_batch keys results by id and isolates failures") {
  PromptTemplate tmpl = PromptTemplate::builtin_turkish();
  MockTransport transport([](const TransportRequest& request) {
    const std::string& prompt = request.messages.at(0).content;
    auto at = prompt.rfind("Original Translation: ");
    std::string original = prompt.substr(at + std::string("Original Translation: ").size());
    return "5. a. N " + original + "\n   b. F " + original + "\n   c. M " + original;
  });

  std::vector<RewriteTask> tasks;
  for (int i = 5; i >= 1; --i) {
    tasks.push_back({"t" + std::to_string(i), "tr", "src " + std::to_string(i),
                     "orig " + std::to_string(i)});
  }
  tasks.push_back({"bad", "fa", "src", "orig"});

  BatchOutcome outcome = rewrite_batch(tasks, transport, tmpl, {}, 3);
  CHECK(outcome.results.size() == 5);
  REQUIRE(outcome.failures.size() == 1);
  CHECK(outcome.failures.count("bad") == 1);
  CHECK(outcome.failures.at("bad").find("'fa'") != std::string::npos);
  for (int i = 1; i <= 5; ++i) {
    const RewriteResult& r = outcome.results.at("t" + std::to_string(i));
    CHECK(r.neutral == "N orig " + std::to_string(i));
    CHECK(r.masculine == "M orig " + std::to_string(i));
  }
  for (const TransportRequest& request : transport.requests()) {
    CHECK(request.temperature == 0.0);
  }

  BatchOutcome again = rewrite_batch(tasks, transport, tmpl, {}, 2);
  CHECK(again.results == outcome.results);
}

TEST_CASE("neutral-only prompts match the published wording") {
  CHECK(zero_shot_neutral_prompt("His bike is better than mine.") ==
        "Change all gendered pronouns to use singular \"they\" instead. Don't modify anything "
        "else : His bike is better than mine.");

  std::string few = few_shot_neutral_prompt("Is he your teacher?");
  CHECK(few.starts_with("Change all gendered pronouns to use singular \"they\" instead. Don't "
                        "modify anything else.\n"));
  CHECK(few.find("input : Jack bores me with stories about her trip.") != std::string::npos);
  CHECK(few.find("gender neutral variant : Are they your teacher?") != std::string::npos);
  CHECK(few.find("Satoshi Kon") != std::string::npos);
  CHECK(few.ends_with("input : Is he your teacher?\ngender neutral variant :"));
}

TEST_CASE("last-line parser handles chatty and echoing responses") {
  CHECK(parse_last_line_response("Their bike is better than mine.") ==
        "Their bike is better than mine.");
  CHECK(parse_last_line_response("Sure, here you go:\n\nThey run fast.\n\n") == "They run fast.");
  CHECK(parse_last_line_response("gender neutral variant : They run fast.") == "They run fast.");
  CHECK(parse_last_line_response("GENDER NEUTRAL VARIANT: They run fast.") == "They run fast.");
  CHECK_THROWS_AS(parse_last_line_response(""), ParseError);
  CHECK_THROWS_AS(parse_last_line_response("  \n \n"), ParseError);
  CHECK_THROWS_AS(parse_last_line_response("gender neutral variant :"), ParseError);
}
