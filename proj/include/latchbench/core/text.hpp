#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace latchbench::text {

std::string to_lower(std::string_view s);

std::string trim(std::string_view s);

/// Replaces each run of ASCII whitespace with one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// Case-fold plus whitespace collapse.
std::string fold(std::string_view s);

/// Number of sentences: maximal runs of text terminated by '.', '!' or '?'
/// (followed by whitespace or end of text). A trailing fragment without a
/// terminator counts as one sentence.
std::size_t count_sentences(std::string_view s);

/// Splits on sentence terminators using the same rule as count_sentences.
std::vector<std::string> split_sentences(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool is_word_char(char c);

/// True iff `needle` occurs in `haystack` with no word character directly
/// before or after the match. Both inputs are used as given.
bool contains_bounded(std::string_view haystack, std::string_view needle);

bool starts_with(std::string_view s, std::string_view prefix);

}  // namespace latchbench::text
