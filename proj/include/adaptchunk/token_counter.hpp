#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adaptchunk {

// Counts tokens in UTF-8 text. Implementations are stateless after
// construction and safe to call from many threads.
class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::string name() const = 0;
  virtual std::size_t count(std::string_view utf8) const = 0;

  // Length in bytes of the longest prefix of `utf8` holding at most
  // `max_tokens` tokens. The prefix always ends on a code point boundary.
  virtual std::size_t prefix_within(std::string_view utf8, std::size_t max_tokens) const;

  // True when count(a + b) <= count(a) + count(b) for all a, b, which lets
  // callers bound merged sizes without recounting.
  virtual bool subadditive() const { return false; }
};

// One token per maximal run of non-whitespace characters.
class WhitespaceCounter final : public TokenCounter {
 public:
  static constexpr std::string_view kName = "whitespace";
  std::string name() const override { return std::string(kName); }
  std::size_t count(std::string_view utf8) const override;
  std::size_t prefix_within(std::string_view utf8, std::size_t max_tokens) const override;
  bool subadditive() const override { return true; }
};

// Byte-pair encoding with the o200k_base vocabulary and pre-tokenizer.
// Special-token text is counted as ordinary text.
class BpeCounter final : public TokenCounter {
 public:
  static constexpr std::string_view kName = "bpe-o200k";

  // `vocab_path` is a `.tiktoken` file: base64 token, space, rank per line.
  explicit BpeCounter(const std::filesystem::path& vocab_path);
  ~BpeCounter() override;

  std::string name() const override { return std::string(kName); }
  std::size_t count(std::string_view utf8) const override;
  std::size_t prefix_within(std::string_view utf8, std::size_t max_tokens) const override;

  // Pre-tokenized pieces of `utf8` (exposed for tests).
  std::vector<std::string> pieces(std::string_view utf8) const;
  // Token count of one pre-tokenized piece.
  std::size_t count_piece(std::string_view piece) const;
  std::size_t vocab_size() const { return ranks_.size(); }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> ranks_;
  struct Pattern;
  std::unique_ptr<Pattern> pattern_;

  template <typename F>
  void for_each_piece(std::string_view utf8, F&& f) const;
};

struct CounterOptions {
  std::filesystem::path bpe_vocab;  // empty: use the bundled vocabulary
};

// Default location of the bundled o200k_base vocabulary. Honors the
// ADAPTCHUNK_DATA_DIR environment variable.
std::filesystem::path default_bpe_vocab_path();

// Registry lookup by name ("whitespace", "bpe-o200k"). Counters are cached
// and shared. Throws InputError for unknown names.
std::shared_ptr<const TokenCounter> make_counter(std::string_view name, const CounterOptions& options = {});

inline std::size_t count_tokens(std::string_view text, const TokenCounter& counter) { return counter.count(text); }
std::size_t count_tokens(std::string_view text, std::string_view counter_name);

}  // namespace adaptchunk
