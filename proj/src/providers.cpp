#include "adaptchunk/providers.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <unicode/uchar.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/unicode.hpp"
#include "http.hpp"

namespace adaptchunk {

using nlohmann::json;

bool EmbeddingVector::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double EmbeddingVector::norm() const {
  double s = 0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  if (values.size() != other.values.size()) throw InputError("embedding dimensions differ");
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * other.values[i];
  return s;
}

namespace {

void normalize(std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  if (s == 0) return;
  const double n = std::sqrt(s);
  for (double& x : v) x /= n;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> hash_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const auto cp = static_cast<UChar32>(decode_utf8(text, pos));
    if (!u_isalnum(cp)) {
      flush();
      continue;
    }
    icu::UnicodeString(u_tolower(cp)).toUTF8String(cur);
  }
  flush();
  return out;
}

EmbeddingVector hash_embed(std::string_view text, std::size_t d) {
  EmbeddingVector v{std::vector<double>(d, 0.0)};
  for (const auto& tok : hash_tokens(text)) v.values[fnv1a64(tok) % d] += 1.0;
  normalize(v.values);
  return v;
}

std::vector<EmbeddingVector> HashEmbedder::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(hash_embed(t, d_));
  return out;
}

HttpTransport::HttpTransport(std::string base_url, RetryPolicy retry, std::chrono::seconds timeout,
                             std::string api_key)
    : base_url_(std::move(base_url)), retry_(retry), timeout_(timeout), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  http::split_url(base_url_);
}

namespace {

template <typename F>
json with_retries(const RetryPolicy& retry, F&& call) {
  auto backoff = retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return call();
    } catch (const TransportError&) {
      if (attempt >= std::max(1, retry.max_attempts)) throw;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

}  // namespace

json HttpTransport::post(const std::string& path, const json& body) {
  http::Headers headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  return with_retries(retry_, [&] { return http::post_json(base_url_ + path, body, headers, timeout_); });
}

json HttpTransport::get(const std::string& path) {
  return with_retries(retry_, [&] { return http::get_json(base_url_ + path, timeout_); });
}

std::vector<EmbeddingVector> embed_batch_remote(JsonTransport& transport, std::span<const std::string> texts,
                                                const RemoteEmbedderOptions& options) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  for (std::size_t first = 0; first < texts.size(); first += batch) {
    const auto part = texts.subspan(first, std::min(batch, texts.size() - first));
    json body = {{"texts", json::array()}};
    for (const auto& t : part) body["texts"].push_back(t);
    const json res = with_retries(options.retry, [&] { return transport.post("/embed", body); });

    try {
      const auto dim = res.at("dim").get<std::size_t>();
      if (dim != options.dimension) {
        throw InputError("embedding dimension mismatch: declared " + std::to_string(options.dimension) +
                         ", served " + std::to_string(dim));
      }
      const auto& vectors = res.at("vectors");
      if (vectors.size() != part.size()) {
        throw InputError("provider returned " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(part.size()) + " texts");
      }
      for (const auto& row : vectors) {
        EmbeddingVector v{row.get<std::vector<double>>()};
        if (v.values.size() != dim) throw InputError("embedding dimension mismatch within response");
        normalize(v.values);
        out.push_back(std::move(v));
      }
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed /embed response: ") + e.what());
    }
  }
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::shared_ptr<JsonTransport> transport, RemoteEmbedderOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
  // Blank texts never reach the server; they embed to the zero vector.
  std::vector<std::string> sent;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].find_first_not_of(" \t\r\n\f\v") != std::string::npos) {
      sent.push_back(texts[i]);
      where.push_back(i);
    }
  }
  std::vector<EmbeddingVector> out(texts.size(), EmbeddingVector{std::vector<double>(options_.dimension, 0.0)});
  auto got = embed_batch_remote(*transport_, sent, options_);
  for (std::size_t j = 0; j < got.size(); ++j) out[where[j]] = std::move(got[j]);
  return out;
}

json check_health(JsonTransport& transport) {
  const json res = transport.get("/health");
  if (!res.is_object() || res.value("ok", false) != true) {
    throw TransportError("provider is not healthy: " + res.dump());
  }
  return res.value("models", json::object());
}

bool is_pronoun(std::string_view mention) {
  static const std::set<std::string, std::less<>> kPronouns = {
      "i",      "me",     "my",       "mine",      "myself",     "you",   "your",  "yours",    "yourself",
      "yourselves", "he", "him",      "his",       "himself",    "she",   "her",   "hers",     "herself",
      "it",     "its",    "itself",   "we",        "us",         "our",   "ours",  "ourselves", "they",
      "them",   "their",  "theirs",   "themselves"};
  std::string lower;
  for (char c : mention) {
    if (c == ' ' || c == '\t' || c == '\n') continue;
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return kPronouns.contains(lower);
}

std::vector<EntityPronounPair> pairs_from_clusters(const std::vector<std::vector<Span>>& clusters,
                                                   const Utf8Text& text) {
  std::vector<EntityPronounPair> out;
  for (auto mentions : clusters) {
    std::sort(mentions.begin(), mentions.end(),
              [](const Span& a, const Span& b) { return a.start != b.start ? a.start < b.start : a.end < b.end; });
    const Span* entity = nullptr;
    for (const Span& m : mentions) {
      if (!is_pronoun(text.slice(m.start, m.end))) {
        entity = &m;
        break;
      }
    }
    if (!entity) continue;
    for (const Span& m : mentions) {
      if (m.start > entity->start && is_pronoun(text.slice(m.start, m.end))) {
        out.push_back({entity->start, m.end, std::string(text.slice(entity->start, entity->end)),
                       std::string(text.slice(m.start, m.end))});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EntityPronounPair& a, const EntityPronounPair& b) { return a.pronoun_end < b.pronoun_end; });
  return out;
}

std::optional<std::vector<EntityPronounPair>> extract_coref_pairs_remote(JsonTransport& transport,
                                                                         const Utf8Text& text,
                                                                         std::string_view language) {
  if (!(language == "en" || language.starts_with("en-"))) return std::nullopt;
  const json res = transport.post("/coref", {{"text", text.str()}});
  const std::size_t L = text.length();
  auto check = [&](std::size_t a, std::size_t b) {
    if (a >= b || b > L) throw InputError("coref span [" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
  };
  std::vector<EntityPronounPair> pairs;
  try {
    if (res.contains("pairs")) {
      for (const auto& p : res["pairs"]) {
        EntityPronounPair pair{p.at("entity_start").get<std::size_t>(), p.at("pronoun_end").get<std::size_t>(),
                               p.value("entity_text", std::string{}), p.value("pronoun_text", std::string{})};
        check(pair.entity_start, pair.pronoun_end);
        pairs.push_back(std::move(pair));
      }
      std::stable_sort(pairs.begin(), pairs.end(), [](const EntityPronounPair& a, const EntityPronounPair& b) {
        return a.pronoun_end < b.pronoun_end;
      });
    } else if (res.contains("clusters")) {
      std::vector<std::vector<Span>> clusters;
      for (const auto& c : res["clusters"]) {
        auto& cluster = clusters.emplace_back();
        for (const auto& m : c) {
          Span s{m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>()};
          check(s.start, s.end);
          cluster.push_back(s);
        }
      }
      pairs = pairs_from_clusters(clusters, text);
    } else {
      throw TransportError("/coref response has neither 'pairs' nor 'clusters'");
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed /coref response: ") + e.what());
  }
  return pairs;
}

}  // namespace adaptchunk
