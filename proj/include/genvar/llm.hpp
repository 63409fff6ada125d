#ifndef GENVAR_LLM_HPP
#define GENVAR_LLM_HPP

#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace genvar {

struct ChatMessage {
  std::string role;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct TransportRequest {
  std::string model;
  double temperature = 0.0;  // rewriting runs deterministically; nothing ever raises this
  std::vector<ChatMessage> messages;
  bool operator==(const TransportRequest&) const = default;
};

struct TransportUsage {
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  bool operator==(const TransportUsage&) const = default;
};

struct TransportResponse {
  std::string text;
  TransportUsage usage;
};

// Chat-completion backend. Implementations must be safe to call from
// multiple threads.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual TransportResponse complete(const TransportRequest& request) = 0;
};

// Scripted transport for tests. Replies are served from the enqueue()d
// script first; once the script is drained the responder callback (if any)
// takes over. Every request is recorded for inspection.
class MockTransport : public ChatTransport {
 public:
  MockTransport() = default;
  explicit MockTransport(std::function<std::string(const TransportRequest&)> responder);

  void enqueue(std::string reply_text);
  void enqueue_failure(std::string message);

  TransportResponse complete(const TransportRequest& request) override;

  // Not synchronized; read only after all in-flight calls finished.
  const std::vector<TransportRequest>& requests() const { return requests_; }

 private:
  std::mutex mutex_;
  std::deque<std::pair<bool, std::string>> script_;  // {is_failure, payload}
  std::function<std::string(const TransportRequest&)> responder_;
  std::vector<TransportRequest> requests_;
};

// Caches response text on disk keyed by a content hash of the request, so a
// rewriting run can be replayed offline. Without an upstream it serves
// cached entries only and fails on a miss.
class DiskCacheTransport : public ChatTransport {
 public:
  explicit DiskCacheTransport(std::filesystem::path dir, ChatTransport* upstream = nullptr);

  TransportResponse complete(const TransportRequest& request) override;

  static std::string cache_key(const TransportRequest& request);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  ChatTransport* upstream_;
};

// Talks to an OpenAI-style chat completion endpoint. The endpoint URL and
// key come from GENVAR_LLM_ENDPOINT and GENVAR_LLM_API_KEY; there is
// deliberately no way to pass credentials through code or flags.
class HttpChatTransport : public ChatTransport {
 public:
  HttpChatTransport();

  TransportResponse complete(const TransportRequest& request) override;

  std::size_t connect_timeout_seconds = 10;
  std::size_t read_timeout_seconds = 120;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;
};

// Chain-of-thought prompt: a 5-step instruction body plus three worked
// examples in one source language, with slots for the sentence under test.
struct PromptTemplate {
  std::string language;
  std::string instructions;
  std::vector<std::string> examples;

  void validate() const;

  static PromptTemplate builtin_turkish();
  static PromptTemplate from_file(const std::filesystem::path& path);

  bool operator==(const PromptTemplate&) const = default;
};

struct RewriteResult {
  std::string neutral;
  std::string feminine;
  std::string masculine;
  bool none_flag = false;  // set ⇒ all three variants equal the original translation
  std::string raw;

  bool operator==(const RewriteResult&) const = default;
};

std::string build_prompt(const PromptTemplate& tmpl, std::string_view source_lang,
                         std::string_view source, std::string_view original);

// Pulls the step-5 answer out of a model transcript: item a is the neutral
// variant, b the feminine, c the masculine; a bare "None" means the
// original needs no rewriting.
RewriteResult parse_response(std::string_view raw, std::string_view original);

// Inverse of parse_response on the variant fields (step-5 text only).
std::string render_variants(const RewriteResult& result);

struct RewriteOptions {
  std::string model = "gpt-4";
  std::size_t max_attempts = 3;
};

RewriteResult rewrite(std::string_view source_lang, std::string_view source,
                      std::string_view original, ChatTransport& transport,
                      const PromptTemplate& tmpl, const RewriteOptions& options = {});

struct RewriteTask {
  std::string id;
  std::string source_lang;
  std::string source;
  std::string original;
};

struct BatchOutcome {
  std::map<std::string, RewriteResult> results;   // keyed by task id
  std::map<std::string, std::string> failures;    // task id -> error message
};

BatchOutcome rewrite_batch(const std::vector<RewriteTask>& tasks, ChatTransport& transport,
                           const PromptTemplate& tmpl, const RewriteOptions& options = {},
                           std::size_t concurrency = 4);

// Neutral-only prompts for plain instruction-following models, and the
// parser for their single-line answers.
std::string zero_shot_neutral_prompt(std::string_view input_text);
std::string few_shot_neutral_prompt(std::string_view input_text);
std::string parse_last_line_response(std::string_view raw);

}  // namespace genvar

#endif
