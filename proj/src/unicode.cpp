#include "unicode.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "dtopics/error.hpp"

namespace dtopics::unicode {
namespace {

// Calls fn(code_point, byte_offset, byte_length) for every code point.
// Ill-formed sequences are reported as U+FFFD.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) c = 0xFFFD;
    fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
  }
}

}  // namespace

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for_each_code_point(s, [&](UChar32 c, std::size_t off, std::size_t len) {
    if (u_isUWhiteSpace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.append(s.substr(off, len));
    }
  });
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string strip_punctuation(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for_each_code_point(s, [&](UChar32 c, std::size_t off, std::size_t len) {
    if ((U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) == 0) out.append(s.substr(off, len));
  });
  return out;
}

bool has_digit(std::string_view s) {
  bool found = false;
  for_each_code_point(s, [&](UChar32 c, std::size_t, std::size_t) {
    if (u_isdigit(c)) found = true;
  });
  return found;
}

std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for_each_code_point(s, [&](UChar32, std::size_t, std::size_t) { ++n; });
  return n;
}

std::string to_lower(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string to_upper(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toUpper(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

}  // namespace dtopics::unicode
