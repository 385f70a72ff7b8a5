#include "adaptchunk/regex_split.hpp"

#include <memory>

#include <unicode/regex.h>

#include "adaptchunk/chunkers.hpp"

namespace adaptchunk {

namespace {

std::unique_ptr<icu::RegexPattern> compile(std::string_view pattern, UErrorCode& status) {
  UParseError perr;
  return std::unique_ptr<icu::RegexPattern>(icu::RegexPattern::compile(
      icu::UnicodeString::fromUTF8(icu::StringPiece(pattern.data(), static_cast<int32_t>(pattern.size()))),
      UREGEX_MULTILINE, perr, status));
}

}  // namespace

std::string neutralize_capture_groups(std::string_view p) {
  std::string out;
  out.reserve(p.size() + 8);
  std::size_t i = 0;
  while (i < p.size()) {
    const char c = p[i];
    if (c == '\\') {
      out.append(p.substr(i, 2));
      i += 2;
      continue;
    }
    if (c == '[') {
      // Copy the class verbatim; a ']' right after '[' or '[^' is literal.
      std::size_t j = i + 1;
      if (j < p.size() && p[j] == '^') ++j;
      if (j < p.size() && p[j] == ']') ++j;
      while (j < p.size() && p[j] != ']') j += p[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, p.size());
      out.append(p.substr(i, j - i));
      i = j;
      continue;
    }
    if (c == '(') {
      if (i + 1 < p.size() && p[i + 1] == '?') {
        const std::string_view rest = p.substr(i + 2);
        std::size_t name_open = 0;
        if (rest.starts_with("P<")) {
          name_open = 2;
        } else if (rest.starts_with("<") && !rest.starts_with("<=") && !rest.starts_with("<!")) {
          name_open = 1;
        } else if (rest.starts_with("'")) {
          name_open = 1;
        }
        if (name_open > 0) {
          const char close = rest[name_open - 1] == '\'' ? '\'' : '>';
          const std::size_t end = rest.find(close, name_open);
          if (end != std::string_view::npos) {
            out += "(?:";
            i += 2 + end + 1;
            continue;
          }
        }
        out += "(?";
        i += 2;
        continue;
      }
      out += "(?:";
      ++i;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::optional<std::string> regex_compile_error(std::string_view pattern) {
  UErrorCode status = U_ZERO_ERROR;
  auto compiled = compile(pattern, status);
  if (U_FAILURE(status)) return std::string(u_errorName(status));
  return std::nullopt;
}

std::vector<std::size_t> regex_cut_offsets(const Document& doc, std::string_view pattern,
                                           const RegexSplitLimits& limits) {
  const std::string rewritten = neutralize_capture_groups(pattern);
  UErrorCode status = U_ZERO_ERROR;
  auto compiled = compile(rewritten, status);
  if (U_FAILURE(status)) throw InputError("pattern does not compile: " + std::string(u_errorName(status)));

  const IcuText icu_text(doc.text.str());
  std::unique_ptr<icu::RegexMatcher> m(compiled->matcher(icu_text.ustr(), status));
  const auto budget_ms = static_cast<int32_t>(std::min<std::int64_t>(limits.time_budget.count(), INT32_MAX));
  m->setTimeLimit(budget_ms, status);
  const auto deadline = std::chrono::steady_clock::now() + limits.time_budget;

  const std::size_t L = doc.length();
  std::vector<std::size_t> cuts;
  while (m->find(status)) {
    const std::size_t at = icu_text.char_offset(m->start(status));
    if (at > 0 && at < L && (cuts.empty() || cuts.back() < at)) {
      cuts.push_back(at);
      if (cuts.size() > limits.max_matches) {
        throw RegexSplitError("pattern matched more than " + std::to_string(limits.max_matches) + " times");
      }
    }
    if (std::chrono::steady_clock::now() > deadline) throw RegexSplitError("pattern exceeded its time budget");
  }
  if (status == U_REGEX_TIME_OUT) throw RegexSplitError("pattern exceeded its time budget");
  if (status == U_REGEX_STACK_OVERFLOW) throw RegexSplitError("pattern overflowed the matcher stack");
  if (U_FAILURE(status)) throw RegexSplitError(std::string("matching failed: ") + u_errorName(status));
  return cuts;
}

Chunking apply_regex_split(const Document& doc, std::string_view pattern, const TokenCounter& counter,
                           const RegexSplitLimits& limits) {
  Chunking out = chunking_from_cuts(doc, regex_cut_offsets(doc, pattern, limits), "regex");
  count_chunk_tokens(doc, out, counter);
  return out;
}

}  // namespace adaptchunk
