// Copyright 2026 The onconer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Code point level helpers. All offsets in the toolkit count Unicode scalar
// values, so text is decoded to UTF-32 before any offset arithmetic.

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "onconer/error.hpp"

namespace onconer::unicode {

inline std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const auto length = static_cast<std::int32_t>(bytes.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c;
    const std::int32_t at = i;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw DataError("invalid UTF-8 at byte " + std::to_string(at));
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }
inline bool is_lower(char32_t c) { return u_islower(static_cast<UChar32>(c)); }

inline bool is_mark(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

// Letters, digits and combining marks make up words.
inline bool is_word_char(char32_t c) {
  return is_letter(c) || is_digit(c) || is_mark(c);
}

inline bool is_space(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

inline bool is_newline(char32_t c) {
  return c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f' ||
         c == 0x85 || c == 0x2028 || c == 0x2029;
}

inline bool is_horizontal_space(char32_t c) { return c == U' ' || c == U'\t'; }

// Simple (one to one) case folding.
inline char32_t fold_case(char32_t c) {
  return static_cast<char32_t>(
      u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
}

namespace detail {

inline icu::UnicodeString to_icu(std::u32string_view text) {
  return icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()),
      static_cast<std::int32_t>(text.size()));
}

inline std::u32string from_icu(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  std::u32string out(static_cast<std::size_t>(s.countChar32()), U'\0');
  s.toUTF32(reinterpret_cast<UChar32*>(out.data()),
            static_cast<std::int32_t>(out.size()), status);
  if (U_FAILURE(status)) throw DataError("UTF-32 conversion failed");
  return out;
}

inline const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw DataError("ICU NFC unavailable");
  return *n;
}

inline const icu::Normalizer2& nfd_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw DataError("ICU NFD unavailable");
  return *n;
}

inline std::u32string apply(const icu::Normalizer2& n, std::u32string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = n.normalize(to_icu(text), status);
  if (U_FAILURE(status)) throw DataError("Unicode normalization failed");
  return from_icu(out);
}

}  // namespace detail

inline std::u32string to_nfc(std::u32string_view text) {
  return detail::apply(detail::nfc_instance(), text);
}

inline std::u32string to_nfd(std::u32string_view text) {
  return detail::apply(detail::nfd_instance(), text);
}

// True when NFC normalization never interacts across a break before `c`.
inline bool nfc_boundary_before(char32_t c) {
  return detail::nfc_instance().hasBoundaryBefore(static_cast<UChar32>(c));
}

}  // namespace onconer::unicode
