#include "adaptchunk/unicode.hpp"

#include <algorithm>

#include "adaptchunk/error.hpp"

namespace adaptchunk {

namespace {

int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

// Returns the sequence length at `pos`, or 0 if the bytes there are not a
// well-formed UTF-8 sequence (overlongs and surrogates included).
int checked_sequence(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  const int n = sequence_length(b0);
  if (n == 0 || pos + n > s.size()) return 0;
  char32_t cp = n == 1 ? b0 : (b0 & (0xFF >> (n + 1)));
  for (int i = 1; i < n; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return n;
}

}  // namespace

Utf8Text::Utf8Text(std::string utf8) : bytes_(std::move(utf8)) {
  offsets_.reserve(bytes_.size() + 1);
  std::size_t pos = 0;
  while (pos < bytes_.size()) {
    const int n = checked_sequence(bytes_, pos);
    if (n == 0) throw InputError("invalid UTF-8 at byte " + std::to_string(pos));
    offsets_.push_back(static_cast<std::uint32_t>(pos));
    pos += static_cast<std::size_t>(n);
  }
  offsets_.push_back(static_cast<std::uint32_t>(bytes_.size()));
  offsets_.shrink_to_fit();
}

std::size_t Utf8Text::char_offset(std::size_t byte_offset) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), byte_offset);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::string_view Utf8Text::slice(std::size_t start, std::size_t end) const {
  const std::size_t b0 = offsets_.at(start);
  const std::size_t b1 = offsets_.at(end);
  return std::string_view(bytes_).substr(b0, b1 - b0);
}

std::size_t utf8_length(std::string_view utf8) {
  std::size_t n = 0;
  for (char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  const int n = std::max(1, sequence_length(b0));
  char32_t cp = n == 1 ? b0 : (b0 & (0xFF >> (n + 1)));
  for (int i = 1; i < n && pos + i < s.size(); ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
  }
  pos += static_cast<std::size_t>(n);
  return cp;
}

bool is_valid_utf8(std::string_view utf8) {
  std::size_t pos = 0;
  while (pos < utf8.size()) {
    const int n = checked_sequence(utf8, pos);
    if (n == 0) return false;
    pos += static_cast<std::size_t>(n);
  }
  return true;
}

IcuText::IcuText(std::string_view utf8)
    : ustr_(icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())))) {
  const int32_t n = ustr_.length();
  to_char_.resize(static_cast<std::size_t>(n) + 1);
  from_char_.reserve(static_cast<std::size_t>(n) + 1);
  std::uint32_t ch = 0;
  for (int32_t i = 0; i < n; ++i) {
    if (from_char_.size() == ch) from_char_.push_back(i);
    to_char_[static_cast<std::size_t>(i)] = ch;
    // The trailing surrogate maps to the same character as its lead.
    if (!U16_IS_LEAD(ustr_.charAt(i)) || i + 1 >= n || !U16_IS_TRAIL(ustr_.charAt(i + 1))) ++ch;
  }
  to_char_[static_cast<std::size_t>(n)] = ch;
  from_char_.push_back(n);
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace adaptchunk
