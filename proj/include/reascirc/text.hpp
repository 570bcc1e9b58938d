#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reascirc {

// ASCII lowercase; non-ASCII bytes pass through untouched.
std::string ascii_lower(std::string_view s);

std::string trim(std::string_view s);

// Evaluation tokenizer: lowercase, split .,!?;:'"() into their own tokens,
// collapse whitespace. "T. Rex?" -> ["t", ".", "rex", "?"]
std::vector<std::string> eval_tokenize(std::string_view text);

// Plain whitespace split, punctuation left attached ("T." survives).
std::vector<std::string> whitespace_tokenize(std::string_view text);

// Span containment: the full eval-token sequence of `needle` occurs
// contiguously in the eval tokens of `haystack`. Case-insensitive by
// construction of eval_tokenize. Empty needle never matches.
bool contains_token_span(std::string_view haystack, std::string_view needle);

// Contiguous subsequence test on pre-tokenized input.
bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle);

bool equals_ci(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& tokens,
                 std::string_view sep = " ");

}  // namespace reascirc
