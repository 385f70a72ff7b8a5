#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "adaptchunk/chunkers.hpp"
#include "adaptchunk/document.hpp"
#include "adaptchunk/token_counter.hpp"

namespace adaptchunk {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::string doc_id;  // not sent; lets replay clients find the transcript
};

// Chat-completion client. Implementations throw TransportError on network
// or service failures.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct LlmEndpoint {
  std::string url;  // e.g. http://localhost:8000/v1/chat
  std::string model = "gpt-5";
  std::string api_key_env = "ADAPTCHUNK_LLM_API_KEY";
  std::chrono::seconds timeout{120};
};

// POSTs {model, messages, temperature} as JSON and reads {text}. An
// OpenAI-style {choices:[{message:{content}}]} body is accepted as well.
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmEndpoint endpoint);
  std::string complete(const ChatRequest& request) override;

 private:
  LlmEndpoint endpoint_;
};

// Reads canned responses from `<dir>/<doc_id>.txt`. A missing transcript is
// reported as a transport failure.
class ReplayLlmClient final : public LlmClient {
 public:
  explicit ReplayLlmClient(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string complete(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
};

// Caps the number of requests in flight across threads.
class ThrottledLlmClient final : public LlmClient {
 public:
  ThrottledLlmClient(std::shared_ptr<LlmClient> inner, std::ptrdiff_t max_in_flight);
  std::string complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<LlmClient> inner_;
  std::counting_semaphore<1024> slots_;
};

struct RegexProposal {
  std::string pattern;
  std::string raw_llm_output;
  bool valid = false;
  std::string reason;  // why the proposal is invalid
};

// The delimiter-regex prompt with the document sample inserted.
std::string build_regex_prompt(std::string_view document_sample);

// Text between the first <regex> and the following </regex>, verbatim.
std::optional<std::string> extract_regex_tag(std::string_view llm_output);

// Sends the prompt with the first cfg.sample_budget tokens of the document.
// Malformed output yields valid=false; transport failures propagate.
RegexProposal propose_regex(LlmClient& llm, const Document& doc, const ChunkerConfig& cfg,
                            const TokenCounter& counter, std::string_view model = "gpt-5");

inline constexpr std::string_view kLlmRegexMethod = "llm-regex";
inline constexpr std::string_view kLlmRegexFallbackMethod = "llm-regex:fallback-recursive";

// Proposes a delimiter and splits on it. Invalid proposals, and patterns
// that hit the match cap (ten times the expected chunk count) or the time
// budget, fall back to recursive_split_merge. A transport failure is retried
// once and then propagates.
Chunking llm_regex_chunk(const Document& doc, LlmClient& llm, const ChunkerConfig& cfg, const TokenCounter& counter,
                         std::string_view model = "gpt-5");

}  // namespace adaptchunk
