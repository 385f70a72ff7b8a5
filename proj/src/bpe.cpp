#include <fstream>
#include <limits>
#include <string>

#include <unicode/regex.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/token_counter.hpp"
#include "adaptchunk/unicode.hpp"

namespace adaptchunk {

namespace {

// o200k_base pre-tokenizer. `\s` is spelled \p{White_Space} to match the
// Unicode definition used by the reference implementation; ICU's own `\s`
// omits U+000B and U+0085.
constexpr const char* kO200kPattern =
    R"([^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]*[\p{Ll}\p{Lm}\p{Lo}\p{M}]+(?i:'s|'t|'re|'ve|'m|'ll|'d)?)"
    R"(|[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]+[\p{Ll}\p{Lm}\p{Lo}\p{M}]*(?i:'s|'t|'re|'ve|'m|'ll|'d)?)"
    R"(|\p{N}{1,3})"
    R"(| ?[^\p{White_Space}\p{L}\p{N}]+[\r\n/]*)"
    R"(|\p{White_Space}*[\r\n]+)"
    R"(|\p{White_Space}+(?!\P{White_Space}))"
    R"(|\p{White_Space}+)";

constexpr std::uint32_t kNoRank = std::numeric_limits<std::uint32_t>::max();

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::string base64_decode(std::string_view in) {
  std::string out;
  out.reserve(in.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '=') break;
    const int v = base64_value(c);
    if (v < 0) throw InputError("invalid base64 in vocabulary: " + std::string(in));
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace

struct BpeCounter::Pattern {
  std::unique_ptr<icu::RegexPattern> regex;
};

BpeCounter::BpeCounter(const std::filesystem::path& vocab_path) : pattern_(std::make_unique<Pattern>()) {
  std::ifstream in(vocab_path);
  if (!in) throw InputError("cannot open BPE vocabulary " + vocab_path.string());
  ranks_.reserve(200000);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw InputError("malformed vocabulary line: " + line);
    ranks_.emplace(base64_decode(std::string_view(line).substr(0, sp)),
                   static_cast<std::uint32_t>(std::stoul(line.substr(sp + 1))));
  }
  if (ranks_.empty()) throw InputError("empty BPE vocabulary " + vocab_path.string());

  UErrorCode status = U_ZERO_ERROR;
  UParseError perr;
  pattern_->regex.reset(icu::RegexPattern::compile(icu::UnicodeString::fromUTF8(kO200kPattern), 0, perr, status));
  if (U_FAILURE(status)) throw Error(std::string("cannot compile pre-tokenizer: ") + u_errorName(status));
}

BpeCounter::~BpeCounter() = default;

template <typename F>
void BpeCounter::for_each_piece(std::string_view utf8, F&& f) const {
  if (utf8.empty()) return;
  const icu::UnicodeString text =
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::RegexMatcher> m(pattern_->regex->matcher(text, status));
  if (U_FAILURE(status)) throw Error(std::string("pre-tokenizer failed: ") + u_errorName(status));

  std::string piece;
  std::size_t byte_pos = 0;
  int32_t last = 0;
  auto emit = [&](int32_t from, int32_t to) {
    piece.clear();
    text.tempSubStringBetween(from, to).toUTF8String(piece);
    f(std::string_view(piece), byte_pos);
    byte_pos += piece.size();
  };
  while (m->find(status)) {
    const int32_t s = m->start(status);
    const int32_t e = m->end(status);
    if (s > last) emit(last, s);
    if (e > s) emit(s, e);
    last = e;
  }
  if (last < text.length()) emit(last, text.length());
}

namespace {

// Token boundaries of one piece after rank-ordered pair merging.
template <typename Ranks>
std::vector<std::size_t> merge_boundaries(const Ranks& ranks, std::string_view piece) {
  auto rank_of = [&](std::size_t a, std::size_t b) {
    auto it = ranks.find(piece.substr(a, b - a));
    return it == ranks.end() ? kNoRank : it->second;
  };
  std::vector<std::pair<std::size_t, std::uint32_t>> parts;
  parts.reserve(piece.size() + 1);
  for (std::size_t i = 0; i + 1 < piece.size(); ++i) parts.emplace_back(i, rank_of(i, i + 2));
  parts.emplace_back(piece.size() - 1, kNoRank);
  parts.emplace_back(piece.size(), kNoRank);

  auto get_rank = [&](std::size_t i) {
    return i + 3 < parts.size() ? rank_of(parts[i].first, parts[i + 3].first) : kNoRank;
  };
  for (;;) {
    std::uint32_t best = kNoRank;
    std::size_t at = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (parts[i].second < best) {
        best = parts[i].second;
        at = i;
      }
    }
    if (best == kNoRank) break;
    if (at > 0) parts[at - 1].second = get_rank(at - 1);
    parts[at].second = get_rank(at);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(at) + 1);
  }
  std::vector<std::size_t> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(p.first);
  return out;
}

}  // namespace

std::size_t BpeCounter::count_piece(std::string_view piece) const {
  if (piece.empty()) return 0;
  if (ranks_.find(piece) != ranks_.end()) return 1;
  return merge_boundaries(ranks_, piece).size() - 1;
}

std::size_t BpeCounter::count(std::string_view utf8) const {
  std::size_t n = 0;
  for_each_piece(utf8, [&](std::string_view piece, std::size_t) { n += count_piece(piece); });
  return n;
}

std::vector<std::string> BpeCounter::pieces(std::string_view utf8) const {
  std::vector<std::string> out;
  for_each_piece(utf8, [&](std::string_view piece, std::size_t) { out.emplace_back(piece); });
  return out;
}

std::size_t BpeCounter::prefix_within(std::string_view utf8, std::size_t max_tokens) const {
  std::size_t used = 0;
  std::size_t cut = utf8.size();
  bool done = false;
  for_each_piece(utf8, [&](std::string_view piece, std::size_t offset) {
    if (done) return;
    const std::size_t n = count_piece(piece);
    if (used + n <= max_tokens) {
      used += n;
      return;
    }
    done = true;
    std::size_t within = 0;
    if (n > 1) {
      const auto bounds = merge_boundaries(ranks_, piece);
      within = bounds[max_tokens - used];
      // Back up to a code point boundary.
      while (within > 0 && (static_cast<unsigned char>(piece[within]) & 0xC0) == 0x80) --within;
    }
    cut = offset + within;
  });
  return cut;
}

}  // namespace adaptchunk
