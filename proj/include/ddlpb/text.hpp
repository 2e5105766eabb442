#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ddlpb::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string_view trim(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Index key form for lemmas and aliases: trimmed, lowercased, inner
// whitespace runs replaced by '_' (the corpus spells phrasal lemmas that way).
std::string normalize_key(std::string_view s);

// Collapses whitespace runs outside of quoted sections ('..', "..", `..`,
// [..]) to a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Splits an identifier such as "PhoneRequests", "ad_info" or "HTTPLog2" into
// lowercase alphabetic words. Digits and punctuation separate words and are
// dropped.
std::vector<std::string> split_identifier(std::string_view ident);

// English plural to singular for lowercase ASCII nouns. Conservative: words
// ending in "ss", "us" or "is" are returned unchanged.
std::string singularize(std::string_view word);

// split_identifier followed by singularize on each word.
std::vector<std::string> name_tokens(std::string_view ident);

}  // namespace ddlpb::text
