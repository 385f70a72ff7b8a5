#include "adaptchunk/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adaptchunk/error.hpp"
#include "adaptchunk/regex_split.hpp"
#include "http.hpp"

namespace adaptchunk {

HttpLlmClient::HttpLlmClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.url.empty()) throw ConfigError("LLM endpoint URL is empty");
  http::split_url(endpoint_.url);
}

std::string HttpLlmClient::complete(const ChatRequest& request) {
  nlohmann::json body = {{"model", request.model.empty() ? endpoint_.model : request.model},
                         {"messages", nlohmann::json::array()},
                         {"temperature", request.temperature}};
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  http::Headers headers;
  if (const char* key = std::getenv(endpoint_.api_key_env.c_str()); key && *key) {
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }
  const auto res = http::post_json(endpoint_.url, body, headers, endpoint_.timeout);
  if (res.contains("text") && res["text"].is_string()) return res["text"].get<std::string>();
  try {
    return res.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw TransportError(endpoint_.url + ": response has neither 'text' nor 'choices'");
  }
}

std::string ReplayLlmClient::complete(const ChatRequest& request) {
  const auto path = dir_ / (request.doc_id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransportError("no replay transcript " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ThrottledLlmClient::ThrottledLlmClient(std::shared_ptr<LlmClient> inner, std::ptrdiff_t max_in_flight)
    : inner_(std::move(inner)), slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {}

std::string ThrottledLlmClient::complete(const ChatRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return inner_->complete(request);
}

namespace {

constexpr std::string_view kExampleInput = R"(# Regulation on Widget Safety

## Article 1. Subject matter
This Regulation lays down rules on the safety of widgets placed on the market.
It applies without prejudice to other Union law.

## Article 2. Definitions
For the purposes of this Regulation, the following definitions apply:

<Table>
| Term | Meaning |
|------|---------|
| widget | any device intended for consumers |
| operator | the manufacturer or the importer |
</Table>

## Article 3. Obligations of operators
1. Operators shall place only safe widgets on the market.
2. Operators shall keep technical documentation for ten years.[^1]

[^1]: The period starts on the date the widget is placed on the market.)";

constexpr std::string_view kExampleOutput = R"(\n(?=## Article \d+\.))";

}  // namespace

std::string build_regex_prompt(std::string_view document_sample) {
  std::string p;
  p += "<Task>\n";
  p += "Your task is to split a long document into self-contained and logically complete chunks to be used in a "
       "Retrieval Augmented Generation (RAG) system. Given a document text, choose the best **unique** "
       "regular-expression to be used as a *delimiter* to split it into small chunks using the Python `re` engine "
       "and the `re.split` function.\n";
  p += "</Task>\n\n";
  p += "<Output requirements>\n";
  p += "You **must** return only the answer in this format:\n";
  p += "    <regex>regex pattern here</regex>\n";
  p += "</Output requirements>\n\n";
  p += "<Splitting guidelines>\n";
  p += "    - The regex pattern **must** be valid.\n";
  p += "    - The chunks should be self-contained, logically complete and not too large.\n";
  p += "    - Do not split paragraphs.\n";
  p += "    - Do not split tables, marked between <Table> </Table> tags.\n";
  p += "    - Do not split figures, marked between <Figure> </Figure> tags.\n";
  p += "    - Do not split lists of short elements.\n";
  p += "    - Do not split titles from the text that follows them.\n";
  p += "    - Do not split footnotes from their parent text.\n";
  p += "</Splitting guidelines>\n\n";
  p += "<Splitting example>\n";
  p += "    <Example of input text>\n";
  p += kExampleInput;
  p += "\n    </Example of input text>\n\n";
  p += "    <Expected answer>\n";
  p += "        <regex>";
  p += kExampleOutput;
  p += "</regex>\n";
  p += "    </Expected answer>\n";
  p += "</Splitting example>\n\n";
  p += "Now, please apply this method to the following text between <Input> and </Input> markers:\n";
  p += "<Input>";
  p += document_sample;
  p += "</Input>";
  return p;
}

std::optional<std::string> extract_regex_tag(std::string_view out) {
  constexpr std::string_view open = "<regex>";
  constexpr std::string_view close = "</regex>";
  const auto a = out.find(open);
  if (a == std::string_view::npos) return std::nullopt;
  const auto b = out.find(close, a + open.size());
  if (b == std::string_view::npos) return std::nullopt;
  return std::string(out.substr(a + open.size(), b - a - open.size()));
}

RegexProposal propose_regex(LlmClient& llm, const Document& doc, const ChunkerConfig& cfg,
                            const TokenCounter& counter, std::string_view model) {
  const std::string& text = doc.text.str();
  const std::string_view sample = std::string_view(text).substr(0, counter.prefix_within(text, cfg.sample_budget));

  ChatRequest req{std::string(model), {{"user", build_regex_prompt(sample)}}, 0.0, doc.id};
  RegexProposal proposal;
  proposal.raw_llm_output = llm.complete(req);

  auto pattern = extract_regex_tag(proposal.raw_llm_output);
  if (!pattern) {
    proposal.reason = "no <regex> tags in the response";
    return proposal;
  }
  proposal.pattern = *pattern;
  if (proposal.pattern.empty()) {
    proposal.reason = "empty pattern";
    return proposal;
  }
  if (auto err = regex_compile_error(neutralize_capture_groups(proposal.pattern))) {
    proposal.reason = "pattern does not compile: " + *err;
    return proposal;
  }
  proposal.valid = true;
  return proposal;
}

Chunking llm_regex_chunk(const Document& doc, LlmClient& llm, const ChunkerConfig& cfg, const TokenCounter& counter,
                         std::string_view model) {
  RegexProposal proposal;
  try {
    proposal = propose_regex(llm, doc, cfg, counter, model);
  } catch (const TransportError&) {
    proposal = propose_regex(llm, doc, cfg, counter, model);
  }

  if (proposal.valid) {
    const std::size_t doc_tokens = counter.count(doc.text.str());
    const std::size_t expected = std::max<std::size_t>(1, (doc_tokens + cfg.target_size - 1) / cfg.target_size);
    RegexSplitLimits limits;
    limits.max_matches = 10 * expected;
    try {
      Chunking out = apply_regex_split(doc, proposal.pattern, counter, limits);
      out.method = std::string(kLlmRegexMethod);
      return out;
    } catch (const RegexSplitError&) {
      // Falls through to the deterministic fallback.
    }
  }
  Chunking out = recursive_split_merge(doc, cfg, counter);
  out.method = std::string(kLlmRegexFallbackMethod);
  return out;
}

}  // namespace adaptchunk
