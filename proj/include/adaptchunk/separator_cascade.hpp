#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adaptchunk/token_counter.hpp"
#include "adaptchunk/unicode.hpp"

#include <unicode/uversion.h>

U_NAMESPACE_BEGIN
class RegexPattern;
U_NAMESPACE_END

namespace adaptchunk {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

// Prioritized separator patterns, from Markdown headings down to single
// characters. Text is cut at the start of each match, so separators lead
// the segment that follows them. The last level must be the character
// level, which guarantees progress.
class SeparatorCascade {
 public:
  // Matches between any two characters; must close every cascade.
  static constexpr std::string_view kCharacterLevel = "(?s).";

  static std::vector<std::string> default_patterns();

  // Throws ConfigError when empty, when a pattern does not compile, or when
  // the last entry is not kCharacterLevel.
  explicit SeparatorCascade(std::vector<std::string> patterns = default_patterns());
  ~SeparatorCascade();
  SeparatorCascade(SeparatorCascade&&) noexcept;
  SeparatorCascade& operator=(SeparatorCascade&&) noexcept;

  const std::vector<std::string>& patterns() const { return patterns_; }

  // Splits characters [start, end) of `text` into contiguous segments of at
  // most `max_tokens` tokens each. A segment is only split further when it
  // exceeds the budget. Offsets are characters of `text`.
  std::vector<Span> split(const Utf8Text& text, const IcuText& icu_text, std::size_t start, std::size_t end,
                          std::size_t max_tokens, const TokenCounter& counter) const;

  std::vector<Span> split(const Utf8Text& text, std::size_t max_tokens, const TokenCounter& counter) const;

 private:
  std::vector<std::string> patterns_;
  std::vector<std::unique_ptr<icu::RegexPattern>> compiled_;  // all but the character level

  void split_range(const Utf8Text& text, const IcuText& icu_text, std::size_t start, std::size_t end,
                   std::size_t level, std::size_t max_tokens, const TokenCounter& counter,
                   std::vector<Span>& out) const;
};

// Convenience form returning segment texts, which concatenate to `text`.
std::vector<std::string> separator_cascade_split(std::string_view text, std::size_t max_tokens,
                                                 const TokenCounter& counter,
                                                 const SeparatorCascade& cascade = SeparatorCascade());

}  // namespace adaptchunk
