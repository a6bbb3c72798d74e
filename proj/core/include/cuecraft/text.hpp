#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cuecraft {

/// Splits text into sentences on `.`, `!` or `?` followed by whitespace (or end of
/// input). Terminal punctuation, trailing closing quotes and brackets stay with
/// the left segment. A period ending one of the known abbreviations ("Dr.",
/// "Mr.", "Mrs.", "Ms.", "e.g.", "i.e.") does not end a sentence. Never returns
/// empty segments.
std::vector<std::string> segment_sentences(std::string_view text);

/// Lowercases, replaces every non-alphanumeric ASCII byte with a space, and
/// splits on whitespace. Non-ASCII bytes are kept as part of words.
std::vector<std::string> tokenize_words(std::string_view text);

/// Number of whitespace-separated tokens.
std::int64_t whitespace_token_count(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view separator);

/// 64-bit FNV-1a. Stable across platforms; used for request fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

} // namespace cuecraft
