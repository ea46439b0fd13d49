// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corerev::corpus {

inline constexpr std::string_view kUrlPlaceholder = "<URL>";
inline constexpr std::string_view kVersionPlaceholder = "<VERSIONNUM>";
inline constexpr std::string_view kHashPlaceholder = "<HASHID>";
inline constexpr std::string_view kNumberPlaceholder = "<NUM>";

bool is_placeholder(std::string_view token);

// Replaces project-specific spans of review text with placeholders, in this
// order:
//   1. URL:     "http://" or "https://" followed by a run of non-space bytes
//   2. version: v?\d+(\.\d+){1,3} not glued to a surrounding word
//   3. hash:    a whole word of 7-40 hex digits containing at least one
//               decimal digit and at least one letter a-f
//   4. number:  a whole word made only of decimal digits
// Everything else is copied unchanged. The function is idempotent.
std::string substitute_placeholders(std::string_view text);

// Deterministic rule-table lemmatizer for lowercase English words: an
// irregular-form table first, then suffix rules (-ies, -es after sibilants,
// -s, -ing, -ed) guarded by minimum stem lengths.
std::string lemmatize(std::string_view word);

// substitute -> split on anything outside [A-Za-z0-9_] (placeholders are
// kept whole) -> lowercase -> lemmatize. Placeholders pass through as-is.
std::vector<std::string> normalize_review(std::string_view text);

// Fraction of bytes that are 7-bit ASCII; 1.0 for empty text.
double ascii_ratio(std::string_view text);

}  // namespace corerev::corpus
