// SPDX-License-Identifier: Apache-2.0
#include "corerev/embed/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/core.h>

#include "corerev/error.hpp"

namespace corerev::embed {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(unescape_line(line));
  return lines;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Vocab::Vocab() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

void Vocab::add(std::string token) {
  token_to_id_.emplace(token, static_cast<int>(id_to_token_.size()));
  id_to_token_.push_back(std::move(token));
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& corpora,
                   std::size_t cap) {
  if (cap < 1) throw ConfigError("vocabulary cap must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpora) {
    for (const std::string& tok : doc) {
      if (tok == kPadToken || tok == kUnkToken) continue;
      ++counts[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  // counts is already in lexicographic order; a stable sort by frequency
  // keeps that order among ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cap) ranked.resize(cap);
  Vocab vocab;
  for (auto& [tok, count] : ranked) vocab.add(tok);
  return vocab;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  Vocab vocab;
  for (const std::string& tok : tokens) {
    if (vocab.contains(tok)) {
      throw DataError(fmt::format("duplicate vocabulary entry \"{}\"", tok));
    }
    vocab.add(tok);
  }
  return vocab;
}

int Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw ConfigError(fmt::format("token id {} out of range", id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(std::string_view token) const {
  return token_to_id_.count(std::string(token)) > 0;
}

std::vector<std::string> Vocab::tokens() const {
  return {id_to_token_.begin() + 2, id_to_token_.end()};
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens,
                               std::size_t limit) const {
  std::vector<int> ids;
  std::size_t n = std::min(limit, tokens.size());
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(id(tokens[i]));
  return ids;
}

CharAlphabet::CharAlphabet() { ids_.fill(kUnkId); }

CharAlphabet CharAlphabet::build(const std::vector<std::string>& texts,
                                 std::size_t size) {
  if (size < 3) throw ConfigError("character alphabet size must be at least 3");
  std::array<std::size_t, 256> counts{};
  for (const std::string& t : texts) {
    for (char c : t) ++counts[static_cast<unsigned char>(c)];
  }
  std::vector<int> bytes;
  for (int b = 0; b < 256; ++b) {
    if (counts[static_cast<std::size_t>(b)] > 0) bytes.push_back(b);
  }
  std::stable_sort(bytes.begin(), bytes.end(), [&](int a, int b) {
    return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
  });
  if (bytes.size() > size - 2) bytes.resize(size - 2);
  std::string chars;
  for (int b : bytes) chars.push_back(static_cast<char>(b));
  return from_chars(chars, size);
}

CharAlphabet CharAlphabet::from_chars(const std::string& chars, std::size_t size) {
  if (chars.size() + 2 > size) {
    throw ConfigError(fmt::format("{} characters do not fit an alphabet of size {}",
                                  chars.size(), size));
  }
  CharAlphabet a;
  a.size_ = size;
  a.chars_ = chars;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    auto& slot = a.ids_[static_cast<unsigned char>(chars[i])];
    if (slot != kUnkId) {
      throw DataError("duplicate character in alphabet");
    }
    slot = static_cast<int>(i) + 2;
  }
  return a;
}

int CharAlphabet::id(char c) const { return ids_[static_cast<unsigned char>(c)]; }

std::vector<int> CharAlphabet::encode(std::string_view text,
                                      std::size_t limit) const {
  std::size_t n = std::min(limit, text.size());
  std::vector<int> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(id(text[i]));
  return ids;
}

std::string escape_line(std::string_view raw, bool escape_non_ascii) {
  std::string out;
  for (char c : raw) {
    auto u = static_cast<unsigned char>(c);
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else if (u < 0x20 || u == 0x7F || (escape_non_ascii && u >= 0x80)) {
      out += fmt::format("\\x{:02X}", u);
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape_line(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 >= s.size()) {
      out += s[i];
      continue;
    }
    char next = s[++i];
    if (next == 'n') {
      out += '\n';
    } else if (next == 'r') {
      out += '\r';
    } else if (next == 'x' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 &&
               hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += next;
    }
  }
  return out;
}

void save_vocab(const std::filesystem::path& path, const Vocab& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << escape_line(vocab.token(static_cast<int>(i))) << '\n';
  }
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2 || lines[0] != kPadToken || lines[1] != kUnkToken) {
    throw DataError(fmt::format("{} is not a vocabulary file", path.string()));
  }
  return Vocab::from_tokens({lines.begin() + 2, lines.end()});
}

void save_alphabet(const std::filesystem::path& path, const CharAlphabet& a) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out << a.size() << '\n';
  for (char c : a.chars()) out << escape_line(std::string(1, c), true) << '\n';
}

CharAlphabet load_alphabet(const std::filesystem::path& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw DataError(fmt::format("{} is empty", path.string()));
  std::size_t size = 0;
  try {
    size = std::stoul(lines[0]);
  } catch (const std::exception&) {
    throw DataError(fmt::format("{}: bad alphabet size", path.string()));
  }
  std::string chars;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].size() != 1) {
      throw DataError(fmt::format("{}:{}: expected one character", path.string(),
                                  i + 1));
    }
    chars += lines[i];
  }
  return CharAlphabet::from_chars(chars, size);
}

}  // namespace corerev::embed
