#include "adaptchunk/token_counter.hpp"

#include <cstdlib>
#include <map>
#include <mutex>

#include <unicode/uchar.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/unicode.hpp"

#ifndef ADAPTCHUNK_DATA_DIR
#define ADAPTCHUNK_DATA_DIR "data"
#endif

namespace adaptchunk {

std::size_t TokenCounter::prefix_within(std::string_view utf8, std::size_t max_tokens) const {
  if (count(utf8) <= max_tokens) return utf8.size();
  // Binary search over code point boundaries; token counts grow with the
  // prefix for all shipped counters.
  std::vector<std::size_t> bounds{0};
  for (std::size_t pos = 0; pos < utf8.size();) {
    decode_utf8(utf8, pos);
    bounds.push_back(pos);
  }
  std::size_t lo = 0, hi = bounds.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (count(utf8.substr(0, bounds[mid])) <= max_tokens) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return bounds[lo];
}

namespace {

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

}  // namespace

std::size_t WhitespaceCounter::count(std::string_view utf8) const {
  std::size_t n = 0;
  bool in_word = false;
  for (std::size_t pos = 0; pos < utf8.size();) {
    const char32_t cp = decode_utf8(utf8, pos);
    const bool space = is_space(cp);
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::size_t WhitespaceCounter::prefix_within(std::string_view utf8, std::size_t max_tokens) const {
  std::size_t n = 0;
  bool in_word = false;
  for (std::size_t pos = 0; pos < utf8.size();) {
    const std::size_t at = pos;
    const char32_t cp = decode_utf8(utf8, pos);
    const bool space = is_space(cp);
    if (!space && !in_word && ++n > max_tokens) return at;
    in_word = !space;
  }
  return utf8.size();
}

std::filesystem::path default_bpe_vocab_path() {
  if (const char* dir = std::getenv("ADAPTCHUNK_DATA_DIR"); dir && *dir) {
    return std::filesystem::path(dir) / "o200k_base.tiktoken";
  }
  return std::filesystem::path(ADAPTCHUNK_DATA_DIR) / "o200k_base.tiktoken";
}

std::shared_ptr<const TokenCounter> make_counter(std::string_view name, const CounterOptions& options) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const TokenCounter>> cache;

  std::string key(name);
  if (name == BpeCounter::kName) key += "|" + options.bpe_vocab.string();

  std::lock_guard lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::shared_ptr<const TokenCounter> counter;
  if (name == WhitespaceCounter::kName) {
    counter = std::make_shared<WhitespaceCounter>();
  } else if (name == BpeCounter::kName) {
    counter = std::make_shared<BpeCounter>(options.bpe_vocab.empty() ? default_bpe_vocab_path() : options.bpe_vocab);
  } else {
    throw InputError("unknown token counter '" + std::string(name) + "'");
  }
  cache.emplace(key, counter);
  return counter;
}

std::size_t count_tokens(std::string_view text, std::string_view counter_name) {
  return make_counter(counter_name)->count(text);
}

}  // namespace adaptchunk
