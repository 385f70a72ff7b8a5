#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adaptchunk/document.hpp"
#include "adaptchunk/separator_cascade.hpp"

namespace adaptchunk {

// Unit-norm vector, or all zeros for text without any token.
struct EmbeddingVector {
  std::vector<double> values;

  bool is_zero() const;
  double norm() const;
  // Dot product; 0 when either side is the zero vector.
  double dot(const EmbeddingVector& other) const;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  // One vector per text, in order. Safe to call concurrently.
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Lowercased runs of alphanumeric characters.
std::vector<std::string> hash_tokens(std::string_view text);

// Bag of hashed tokens: each token lands in bucket fnv1a64(token) % d, the
// counts are L2-normalized. No tokens gives the zero vector.
EmbeddingVector hash_embed(std::string_view text, std::size_t d = 256);

class HashEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::string_view kName = "hash";
  explicit HashEmbedder(std::size_t d = 256) : d_(d) {}
  std::string name() const override { return std::string(kName); }
  std::size_t dimension() const override { return d_; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  std::size_t d_;
};

// JSON request/response channel to a provider service.
class JsonTransport {
 public:
  virtual ~JsonTransport() = default;
  virtual nlohmann::json post(const std::string& path, const nlohmann::json& body) = 0;
  virtual nlohmann::json get(const std::string& path) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

// HTTP transport with retries and exponential backoff on TransportError.
class HttpTransport final : public JsonTransport {
 public:
  HttpTransport(std::string base_url, RetryPolicy retry = {}, std::chrono::seconds timeout = std::chrono::seconds(300),
                std::string api_key = {});
  nlohmann::json post(const std::string& path, const nlohmann::json& body) override;
  nlohmann::json get(const std::string& path) override;

 private:
  std::string base_url_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
  std::string api_key_;  // sent as a bearer token when set
};

struct RemoteEmbedderOptions {
  std::string name = "remote";
  std::size_t dimension = 1024;
  std::size_t batch_size = 64;
  RetryPolicy retry;
};

// POST /embed {"texts": [...]} -> {"dim": d, "vectors": [[...], ...]} in
// batches of at most options.batch_size. Vectors are re-normalized locally.
// Throws TransportError after retries and InputError when the served
// dimension differs from the declared one.
std::vector<EmbeddingVector> embed_batch_remote(JsonTransport& transport, std::span<const std::string> texts,
                                                const RemoteEmbedderOptions& options);

class RemoteEmbedder final : public EmbeddingProvider {
 public:
  RemoteEmbedder(std::shared_ptr<JsonTransport> transport, RemoteEmbedderOptions options);
  std::string name() const override { return options_.name; }
  std::size_t dimension() const override { return options_.dimension; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
  // Texts the server reported as truncated to its context length.
  std::size_t truncated() const { return truncated_.load(); }

 private:
  std::shared_ptr<JsonTransport> transport_;
  RemoteEmbedderOptions options_;
  std::atomic<std::size_t> truncated_{0};
};

// GET /health. Returns the "models" object; throws TransportError unless the
// service reports {"ok": true}.
nlohmann::json check_health(JsonTransport& transport);

bool is_pronoun(std::string_view mention);

// Entity-pronoun pairs from mention clusters: the earliest non-pronominal
// mention is the entity and every pronominal mention after it yields one
// pair. Clusters of pronouns only yield nothing. Sorted by pronoun_end.
std::vector<EntityPronounPair> pairs_from_clusters(const std::vector<std::vector<Span>>& clusters,
                                                   const Utf8Text& text);

// POST /coref {"text": ...}. The reply carries either "pairs" or mention
// "clusters" ([[start, end], ...] per cluster). Returns nullopt for
// non-English documents, where references cannot be scored.
std::optional<std::vector<EntityPronounPair>> extract_coref_pairs_remote(JsonTransport& transport,
                                                                         const Utf8Text& text,
                                                                         std::string_view language);

}  // namespace adaptchunk
