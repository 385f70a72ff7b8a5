#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "adaptchunk/error.hpp"
#include "adaptchunk/llm.hpp"
#include "synth.hpp"

using namespace adaptchunk;

namespace {

class ScriptedLlm : public LlmClient {
 public:
  explicit ScriptedLlm(std::vector<std::string> replies, int failures = 0)
      : replies_(std::move(replies)), failures_(failures) {}
  std::string complete(const ChatRequest& r) override {
    requests.push_back(r);
    if (failures_-- > 0) throw TransportError("connection reset");
    return replies_.at(std::min(replies_.size() - 1, requests.size() - 1));
  }
  std::vector<ChatRequest> requests;

 private:
  std::vector<std::string> replies_;
  int failures_;
};

Document legal_doc() {
  std::string t = "# Widget Act\n\nPreamble text here.\n";
  for (int a = 1; a <= 6; ++a) {
    t += "\n## Article " + std::to_string(a) + ". Heading " + std::to_string(a) + "\n\n";
    for (int s = 0; s < 5; ++s) t += "Sentence " + std::to_string(s) + " of article " + std::to_string(a) + ". ";
    t += "\n";
  }
  Document d;
  d.id = "legal";
  d.text = Utf8Text(t);
  d.blocks.push_back({0, d.length(), BlockKind::kParagraph});
  return d;
}

std::vector<std::size_t> reference_cuts(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern, std::regex::ECMAScript | std::regex::multiline);
  std::vector<std::size_t> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    const auto at = static_cast<std::size_t>(it->position());
    if (at > 0 && at < text.size() && (out.empty() || out.back() < at)) out.push_back(at);
  }
  return out;
}

std::string input_section(const std::string& prompt) {
  const auto a = prompt.rfind("<Input>");
  const auto b = prompt.rfind("</Input>");
  return prompt.substr(a + 7, b - a - 7);
}

}  // namespace

TEST_CASE("tag extraction") {
  CHECK(extract_regex_tag(R"(<regex>\n## </regex>)") == std::string(R"(\n## )"));
  CHECK(extract_regex_tag("sure! <regex>a|b</regex> and <regex>c</regex>") == std::string("a|b"));
  CHECK_FALSE(extract_regex_tag("no tags here"));
  CHECK_FALSE(extract_regex_tag("<regex>unterminated"));
}

TEST_CASE("prompt carries the document sample") {
  const auto p = build_regex_prompt("SAMPLE TEXT");
  CHECK(p.find("<regex>regex pattern here</regex>") != std::string::npos);
  CHECK(input_section(p) == "SAMPLE TEXT");
  CHECK(p.find("**unique**") != std::string::npos);
}

TEST_CASE("proposals") {
  WhitespaceCounter ws;
  ChunkerConfig cfg;
  const auto doc = legal_doc();
  ScriptedLlm ok({R"(<regex>\n## </regex>)"});
  auto p = propose_regex(ok, doc, cfg, ws);
  CHECK(p.valid);
  CHECK(p.pattern == R"(\n## )");
  CHECK(ok.requests.at(0).doc_id == "legal");
  CHECK(ok.requests.at(0).temperature == 0.0);

  ScriptedLlm none({"no tags here"});
  CHECK_FALSE(propose_regex(none, doc, cfg, ws).valid);
  ScriptedLlm broken({"<regex>([unclosed</regex>"});
  auto b = propose_regex(broken, doc, cfg, ws);
  CHECK_FALSE(b.valid);
  CHECK(b.reason.find("compile") != std::string::npos);
  ScriptedLlm empty({"<regex></regex>"});
  CHECK_FALSE(propose_regex(empty, doc, cfg, ws).valid);
}

TEST_CASE("sample is the first sample_budget tokens") {
  WhitespaceCounter ws;
  synth::Rng rng(1);
  std::string t;
  for (int i = 0; i < 10000; ++i) t += synth::word(rng) + (i % 13 == 12 ? "\n" : " ");
  Document d;
  d.id = "big";
  d.text = Utf8Text(t);
  d.blocks.push_back({0, d.length(), BlockKind::kParagraph});
  ChunkerConfig cfg;
  ScriptedLlm llm({"<regex>x</regex>"});
  propose_regex(llm, d, cfg, ws);
  const auto sample = input_section(llm.requests.at(0).messages.at(0).content);
  CHECK(ws.count(sample) == 8000);
  CHECK(t.starts_with(sample));
}

TEST_CASE("valid proposal cuts at reference match starts") {
  WhitespaceCounter ws;
  ChunkerConfig cfg;
  const auto doc = legal_doc();
  const std::string pattern = R"(\n(?=## Article \d+\.))";
  ScriptedLlm llm({"<regex>" + pattern + "</regex>"});
  auto c = llm_regex_chunk(doc, llm, cfg, ws);
  CHECK(c.method == "llm-regex");
  CHECK(interior_boundaries(c) == reference_cuts(doc.text.str(), pattern));
  CHECK(c.chunks.size() == 7);
  for (std::size_t k = 1; k < c.chunks.size(); ++k) CHECK(doc.slice(c.chunks[k].start, c.chunks[k].end).starts_with("\n## Article"));
}

TEST_CASE("invalid proposal falls back deterministically") {
  WhitespaceCounter ws;
  ChunkerConfig cfg;
  cfg.target_size = 20;
  const auto doc = legal_doc();
  ScriptedLlm llm({"I cannot help with that."});
  auto c = llm_regex_chunk(doc, llm, cfg, ws);
  CHECK(c.method == "llm-regex:fallback-recursive");
  auto expected = recursive_split_merge(doc, cfg, ws);
  CHECK(c.chunks == expected.chunks);

  // a pattern matching far too often is treated the same way
  ScriptedLlm greedy({R"(<regex>\s</regex>)"});
  CHECK(llm_regex_chunk(doc, greedy, cfg, ws).method == "llm-regex:fallback-recursive");
}

TEST_CASE("valid pattern without matches gives one chunk") {
  WhitespaceCounter ws;
  ScriptedLlm llm({"<regex>ZZZ</regex>"});
  auto c = llm_regex_chunk(legal_doc(), llm, {}, ws);
  CHECK(c.method == "llm-regex");
  CHECK(c.chunks.size() == 1);
}

TEST_CASE("transport errors are retried once") {
  WhitespaceCounter ws;
  ScriptedLlm flaky({"<regex>ZZZ</regex>"}, 1);
  CHECK(llm_regex_chunk(legal_doc(), flaky, {}, ws).method == "llm-regex");
  CHECK(flaky.requests.size() == 2);
  ScriptedLlm down({"<regex>ZZZ</regex>"}, 2);
  CHECK_THROWS_AS(llm_regex_chunk(legal_doc(), down, {}, ws), TransportError);
}

TEST_CASE("replay client") {
  const auto dir = std::filesystem::temp_directory_path() / "adaptchunk_replay_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "legal.txt") << "<regex>\\n## </regex>";
  ReplayLlmClient replay(dir);
  ChatRequest req{"m", {}, 0.0, "legal"};
  CHECK(replay.complete(req) == "<regex>\\n## </regex>");
  req.doc_id = "missing";
  CHECK_THROWS_AS(replay.complete(req), TransportError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("http client speaks the chat contract") {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string auth, model;
  server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    model = body.at("model").get<std::string>();
    CHECK(body.at("messages").at(0).at("role") == "user");
    CHECK(body.at("temperature") == 0.0);
    if (calls++ == 0) {
      res.set_content(R"({"text": "<regex>a</regex>"})", "application/json");
    } else {
      res.set_content(R"({"choices": [{"message": {"content": "<regex>b</regex>"}}]})", "application/json");
    }
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content(R"({"error": "busy"})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("ADAPTCHUNK_TEST_LLM_KEY", "secret", 1);
  LlmEndpoint ep;
  ep.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
  ep.api_key_env = "ADAPTCHUNK_TEST_LLM_KEY";
  ep.timeout = std::chrono::seconds(5);
  HttpLlmClient client(ep);
  ChatRequest req{"gpt-5", {{"user", "hi"}}, 0.0, "d"};
  CHECK(client.complete(req) == "<regex>a</regex>");
  CHECK(client.complete(req) == "<regex>b</regex>");
  CHECK(auth == "Bearer secret");
  CHECK(model == "gpt-5");

  ep.url = "http://127.0.0.1:" + std::to_string(port) + "/fail";
  CHECK_THROWS_AS(HttpLlmClient(ep).complete(req), TransportError);
  ep.url = "http://127.0.0.1:1/none";
  CHECK_THROWS_AS(HttpLlmClient(ep).complete(req), TransportError);
  server.stop();
  t.join();
}

TEST_CASE("throttled client caps requests in flight") {
  class Slow : public LlmClient {
   public:
    std::atomic<int> now{0}, peak{0};
    std::string complete(const ChatRequest&) override {
      const int n = ++now;
      int p = peak.load();
      while (n > p && !peak.compare_exchange_weak(p, n)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      --now;
      return "";
    }
  };
  auto slow = std::make_shared<Slow>();
  ThrottledLlmClient throttled(slow, 2);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { throttled.complete({}); });
  for (auto& th : threads) th.join();
  CHECK(slow->peak.load() <= 2);
  CHECK(slow->peak.load() >= 1);
}
