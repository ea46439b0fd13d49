// SPDX-License-Identifier: Apache-2.0
#include "corerev/corpus/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

namespace corerev::corpus {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex_letter(char c) {
  return (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view p) {
  if (s.size() - pos < p.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != p[i]) {
      return false;
    }
  }
  return true;
}

std::string replace_urls(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t scheme = 0;
    if (starts_with_ci(text, i, "https://")) {
      scheme = 8;
    } else if (starts_with_ci(text, i, "http://")) {
      scheme = 7;
    }
    if (scheme > 0 && i + scheme < text.size() && !is_space(text[i + scheme])) {
      std::size_t end = i + scheme;
      while (end < text.size() && !is_space(text[end])) ++end;
      out += kUrlPlaceholder;
      i = end;
    } else {
      out += text[i++];
    }
  }
  return out;
}

// Length of a version match starting at `pos`, or 0.
std::size_t match_version(std::string_view t, std::size_t pos) {
  if (pos > 0 && (is_word_char(t[pos - 1]) || t[pos - 1] == '.')) return 0;
  std::size_t i = pos;
  if (i < t.size() && (t[i] == 'v' || t[i] == 'V')) ++i;
  std::size_t digits_start = i;
  while (i < t.size() && is_digit(t[i])) ++i;
  if (i == digits_start) return 0;
  int groups = 0;
  while (groups < 3 && i + 1 < t.size() && t[i] == '.' && is_digit(t[i + 1])) {
    ++i;
    while (i < t.size() && is_digit(t[i])) ++i;
    ++groups;
  }
  if (groups == 0) return 0;
  if (i < t.size() && is_word_char(t[i])) return 0;
  return i - pos;
}

std::string replace_versions(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::size_t len = match_version(text, i); len > 0) {
      out += kVersionPlaceholder;
      i += len;
    } else {
      out += text[i++];
    }
  }
  return out;
}

bool is_hash_word(std::string_view w) {
  if (w.size() < 7 || w.size() > 40) return false;
  bool digit = false;
  bool letter = false;
  for (char c : w) {
    if (is_digit(c)) {
      digit = true;
    } else if (is_hex_letter(c)) {
      letter = true;
    } else {
      return false;
    }
  }
  return digit && letter;
}

bool is_number_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), is_digit);
}

// Hash and number rules both apply to whole words and never match the same
// word, so one pass with hash checked first preserves the rule order.
std::string replace_words(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      out += text[i++];
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_word_char(text[end])) ++end;
    std::string_view word = text.substr(i, end - i);
    if (is_hash_word(word)) {
      out += kHashPlaceholder;
    } else if (is_number_word(word)) {
      out += kNumberPlaceholder;
    } else {
      out += word;
    }
    i = end;
  }
  return out;
}

const std::unordered_map<std::string_view, std::string_view>& irregulars() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"these", "this"},       {"those", "that"},     {"is", "be"},
      {"are", "be"},           {"was", "be"},         {"were", "be"},
      {"been", "be"},          {"being", "be"},       {"am", "be"},
      {"has", "have"},         {"had", "have"},       {"having", "have"},
      {"does", "do"},          {"did", "do"},         {"done", "do"},
      {"doing", "do"},         {"goes", "go"},        {"went", "go"},
      {"gone", "go"},          {"made", "make"},      {"making", "make"},
      {"makes", "make"},       {"uses", "use"},       {"used", "use"},
      {"using", "use"},        {"children", "child"}, {"men", "man"},
      {"women", "woman"},      {"people", "person"},  {"indices", "index"},
      {"matrices", "matrix"},  {"vertices", "vertex"}, {"analyses", "analysis"},
      {"written", "write"},    {"wrote", "write"},    {"thrown", "throw"},
      {"threw", "throw"},      {"taken", "take"},     {"took", "take"},
      {"given", "give"},       {"gave", "give"},      {"seen", "see"},
      {"saw", "see"},          {"found", "find"},     {"kept", "keep"},
      {"left", "left"},        {"this", "this"},      {"its", "its"},
      {"yes", "yes"},          {"always", "always"},  {"unless", "unless"},
      {"less", "less"},        {"thus", "thus"},      {"perhaps", "perhaps"},
      {"whereas", "whereas"},  {"series", "series"},  {"during", "during"},
      {"thing", "thing"},      {"nothing", "nothing"}, {"something", "something"},
      {"anything", "anything"}, {"everything", "everything"},
      {"string", "string"},    {"spring", "spring"},  {"bring", "bring"},
  };
  return table;
}

bool has_vowel(std::string_view s) {
  return s.find_first_of("aeiouy") != std::string_view::npos;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Stem for -ing / -ed: at least three bytes with a vowel, undoubling a final
// doubled consonant other than l, s, z when that keeps three bytes.
std::string verbal_stem(std::string_view word, std::size_t suffix_len) {
  std::string_view stem = word.substr(0, word.size() - suffix_len);
  if (stem.size() < 3 || !has_vowel(stem)) return std::string(word);
  std::size_t n = stem.size();
  char last = stem[n - 1];
  if (n >= 4 && last == stem[n - 2] &&
      std::string_view("aeiouylsz").find(last) == std::string_view::npos) {
    stem.remove_suffix(1);
  }
  return std::string(stem);
}

}  // namespace

bool is_placeholder(std::string_view token) {
  return token == kUrlPlaceholder || token == kVersionPlaceholder ||
         token == kHashPlaceholder || token == kNumberPlaceholder;
}

std::string substitute_placeholders(std::string_view text) {
  return replace_words(replace_versions(replace_urls(text)));
}

std::string lemmatize(std::string_view word) {
  const auto& table = irregulars();
  if (auto it = table.find(word); it != table.end()) {
    return std::string(it->second);
  }
  if (word.size() <= 3) return std::string(word);

  if (word.size() > 4 && ends_with(word, "ies")) {
    return std::string(word.substr(0, word.size() - 3)) + "y";
  }
  if (ends_with(word, "es")) {
    std::string_view stem = word.substr(0, word.size() - 2);
    if (stem.size() >= 3 &&
        (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
         ends_with(stem, "ch") || ends_with(stem, "sh"))) {
      return std::string(stem);
    }
  }
  if (ends_with(word, "s")) {
    if (ends_with(word, "ss") || ends_with(word, "us") || ends_with(word, "is")) {
      return std::string(word);
    }
    return std::string(word.substr(0, word.size() - 1));
  }
  if (ends_with(word, "ing")) return verbal_stem(word, 3);
  if (ends_with(word, "ed") && !ends_with(word, "eed")) {
    return verbal_stem(word, 2);
  }
  return std::string(word);
}

std::vector<std::string> normalize_review(std::string_view text) {
  std::string substituted = substitute_placeholders(text);
  std::string_view s = substituted;
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<') {
      std::size_t close = s.find('>', i);
      if (close != std::string_view::npos &&
          is_placeholder(s.substr(i, close - i + 1))) {
        tokens.emplace_back(s.substr(i, close - i + 1));
        i = close + 1;
        continue;
      }
    }
    if (!is_word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < s.size() && is_word_char(s[end])) ++end;
    std::string word(s.substr(i, end - i));
    std::transform(word.begin(), word.end(), word.begin(), [](char c) {
      return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    });
    tokens.push_back(lemmatize(word));
    i = end;
  }
  return tokens;
}

double ascii_ratio(std::string_view text) {
  if (text.empty()) return 1.0;
  auto ascii = std::count_if(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x80;
  });
  return static_cast<double>(ascii) / static_cast<double>(text.size());
}

}  // namespace corerev::corpus
