#ifndef FPKIT_UTIL_STRINGS_H_
#define FPKIT_UTIL_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

namespace fpkit {

// ASCII lowercase; other bytes pass through.
std::string ToLower(std::string_view s);

bool Contains(std::string_view haystack, std::string_view needle);

std::vector<std::string> SplitString(std::string_view s, std::string_view sep);

// Decodes UTF-8 into code points. Invalid bytes map to U+FFFD.
std::u32string DecodeUtf8(std::string_view s);

}  // namespace fpkit

#endif  // FPKIT_UTIL_STRINGS_H_
