#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/unistr.h>

namespace adaptchunk {

// UTF-8 text addressed by Unicode scalar-value (character) offsets.
class Utf8Text {
 public:
  Utf8Text() : offsets_{0} {}
  // Throws InputError on invalid UTF-8.
  explicit Utf8Text(std::string utf8);

  std::size_t length() const { return offsets_.size() - 1; }
  bool empty() const { return length() == 0; }
  const std::string& str() const { return bytes_; }

  std::size_t byte_offset(std::size_t char_offset) const { return offsets_.at(char_offset); }
  // Character offset of the code point containing `byte_offset`.
  std::size_t char_offset(std::size_t byte_offset) const;

  // Characters [start, end).
  std::string_view slice(std::size_t start, std::size_t end) const;

  friend bool operator==(const Utf8Text& a, const Utf8Text& b) { return a.bytes_ == b.bytes_; }

 private:
  std::string bytes_;
  std::vector<std::uint32_t> offsets_;
};

// Number of code points in valid UTF-8.
std::size_t utf8_length(std::string_view utf8);

// Decodes one code point starting at `pos`, advancing it. Assumes valid UTF-8.
char32_t decode_utf8(std::string_view utf8, std::size_t& pos);

bool is_valid_utf8(std::string_view utf8);

// ICU view of a UTF-8 string with a map from UTF-16 indices back to
// character offsets. Used wherever ICU regular expressions run.
class IcuText {
 public:
  explicit IcuText(std::string_view utf8);

  const icu::UnicodeString& ustr() const { return ustr_; }
  std::size_t char_offset(std::int32_t utf16_index) const {
    return to_char_[static_cast<std::size_t>(utf16_index)];
  }
  std::size_t length() const { return to_char_.back(); }
  std::int32_t utf16_index(std::size_t char_offset) const { return from_char_.at(char_offset); }

 private:
  icu::UnicodeString ustr_;
  std::vector<std::uint32_t> to_char_;
  std::vector<std::int32_t> from_char_;
};

std::string to_utf8(const icu::UnicodeString& s);

}  // namespace adaptchunk
