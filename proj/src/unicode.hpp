#pragma once

// UTF-8 helpers backed by ICU. Internal to the library.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dtopics::unicode {

std::string nfc(std::string_view s);

// Splits on Unicode white space.
std::vector<std::string> split_whitespace(std::string_view s);

// Removes every code point in general categories P* and S*.
std::string strip_punctuation(std::string_view s);

bool has_digit(std::string_view s);
std::size_t length(std::string_view s);  // in code points

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

}  // namespace dtopics::unicode
