#include "adaptchunk/separator_cascade.hpp"

#include <unicode/regex.h>

#include "adaptchunk/error.hpp"

namespace adaptchunk {

std::vector<std::string> SeparatorCascade::default_patterns() {
  return {
      R"(^# )",
      R"(^## )",
      R"(^### )",
      R"(^#### )",
      R"(^##### )",
      R"(^###### )",
      R"(^ {0,3}(?:-[ \t]*){3,}$|^ {0,3}(?:\*[ \t]*){3,}$|^ {0,3}(?:_[ \t]*){3,}$)",  // horizontal rule
      R"(\n{2,})",                                                               // blank line
      R"(\n)",
      R"((?<=[.!?])[ \t]+)",  // after sentence-ending punctuation
      R"(\s+)",
      std::string(kCharacterLevel),
  };
}

SeparatorCascade::SeparatorCascade(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
  if (patterns_.empty()) throw ConfigError("separator cascade is empty");
  if (patterns_.back() != kCharacterLevel) {
    throw ConfigError("separator cascade must end with the character level \"" + std::string(kCharacterLevel) + "\"");
  }
  for (std::size_t i = 0; i + 1 < patterns_.size(); ++i) {
    UErrorCode status = U_ZERO_ERROR;
    UParseError perr;
    std::unique_ptr<icu::RegexPattern> p(
        icu::RegexPattern::compile(icu::UnicodeString::fromUTF8(patterns_[i]), UREGEX_MULTILINE, perr, status));
    if (U_FAILURE(status)) {
      throw ConfigError("separator pattern \"" + patterns_[i] + "\" does not compile: " + u_errorName(status));
    }
    compiled_.push_back(std::move(p));
  }
}

SeparatorCascade::~SeparatorCascade() = default;
SeparatorCascade::SeparatorCascade(SeparatorCascade&&) noexcept = default;
SeparatorCascade& SeparatorCascade::operator=(SeparatorCascade&&) noexcept = default;

std::vector<Span> SeparatorCascade::split(const Utf8Text& text, const IcuText& icu_text, std::size_t start,
                                          std::size_t end, std::size_t max_tokens,
                                          const TokenCounter& counter) const {
  std::vector<Span> out;
  if (start < end) split_range(text, icu_text, start, end, 0, max_tokens, counter, out);
  return out;
}

std::vector<Span> SeparatorCascade::split(const Utf8Text& text, std::size_t max_tokens,
                                          const TokenCounter& counter) const {
  const IcuText icu_text(text.str());
  return split(text, icu_text, 0, text.length(), max_tokens, counter);
}

void SeparatorCascade::split_range(const Utf8Text& text, const IcuText& icu_text, std::size_t start,
                                   std::size_t end, std::size_t level, std::size_t max_tokens,
                                   const TokenCounter& counter, std::vector<Span>& out) const {
  if (counter.count(text.slice(start, end)) <= max_tokens) {
    out.push_back({start, end});
    return;
  }
  for (std::size_t lv = level; lv < compiled_.size(); ++lv) {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::RegexMatcher> m(compiled_[lv]->matcher(icu_text.ustr(), status));
    // Transparent, non-anchoring bounds: `^` and look-behind see the
    // surrounding text, not the region edges.
    m->useTransparentBounds(true);
    m->useAnchoringBounds(false);
    m->region(icu_text.utf16_index(start), icu_text.utf16_index(end), status);

    std::vector<std::size_t> cuts;
    while (m->find(status)) {
      const std::size_t at = icu_text.char_offset(m->start(status));
      if (at > start && at < end && (cuts.empty() || cuts.back() < at)) cuts.push_back(at);
    }
    if (U_FAILURE(status)) throw Error(std::string("separator matching failed: ") + u_errorName(status));
    if (cuts.empty()) continue;

    std::size_t prev = start;
    cuts.push_back(end);
    for (std::size_t cut : cuts) {
      split_range(text, icu_text, prev, cut, lv + 1, max_tokens, counter, out);
      prev = cut;
    }
    return;
  }
  // Character level.
  for (std::size_t i = start; i < end; ++i) out.push_back({i, i + 1});
}

std::vector<std::string> separator_cascade_split(std::string_view text, std::size_t max_tokens,
                                                 const TokenCounter& counter, const SeparatorCascade& cascade) {
  const Utf8Text utf8{std::string(text)};
  std::vector<std::string> out;
  for (const Span& s : cascade.split(utf8, max_tokens, counter)) out.emplace_back(utf8.slice(s.start, s.end));
  return out;
}

}  // namespace adaptchunk
