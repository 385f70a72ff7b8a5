#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptchunk/document.hpp"
#include "adaptchunk/error.hpp"
#include "adaptchunk/token_counter.hpp"

namespace adaptchunk {

// Raised when a delimiter pattern matches too often or runs past its time
// budget.
class RegexSplitError : public Error {
 public:
  using Error::Error;
};

struct RegexSplitLimits {
  std::size_t max_matches = std::numeric_limits<std::size_t>::max();
  std::chrono::milliseconds time_budget{10000};
};

// Rewrites capturing and named groups as non-capturing ones. Escapes and
// character classes are left untouched.
std::string neutralize_capture_groups(std::string_view pattern);

// Compiles under the splitter's dialect (ICU, multiline). Returns the
// compiler's message on failure.
std::optional<std::string> regex_compile_error(std::string_view pattern);

// Character offsets in (0, L) where a non-overlapping match of `pattern`
// starts. Capture groups are neutralized first.
std::vector<std::size_t> regex_cut_offsets(const Document& doc, std::string_view pattern,
                                           const RegexSplitLimits& limits = {});

// Cuts the document at the start of every match, so the delimiter text
// leads the following chunk. No match yields a single chunk.
Chunking apply_regex_split(const Document& doc, std::string_view pattern, const TokenCounter& counter,
                           const RegexSplitLimits& limits = {});

}  // namespace adaptchunk
