// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corerev::embed {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

// Frequency-capped token <-> id map. Ids are dense: PAD=0, UNK=1, then
// tokens by descending frequency with ties broken lexicographically.
class Vocab {
 public:
  Vocab();

  static Vocab build(const std::vector<std::vector<std::string>>& corpora,
                     std::size_t cap);
  // `tokens` excludes the reserved entries, which are always prepended.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  std::size_t size() const { return id_to_token_.size(); }
  int id(std::string_view token) const;
  const std::string& token(int id) const;
  bool contains(std::string_view token) const;
  // Non-reserved tokens in id order.
  std::vector<std::string> tokens() const;

  // Unknown tokens map to UNK; output is head-truncated to `limit`.
  std::vector<int> encode(const std::vector<std::string>& tokens,
                          std::size_t limit = kNoLimit) const;

  bool operator==(const Vocab& other) const {
    return id_to_token_ == other.id_to_token_;
  }

 private:
  void add(std::string token);

  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Byte-level alphabet for the one-hot character channel: PAD=0, UNK=1, then
// the (size - 2) most frequent bytes, ties broken by byte value.
class CharAlphabet {
 public:
  static constexpr std::size_t kDefaultSize = 60;

  CharAlphabet();

  static CharAlphabet build(const std::vector<std::string>& texts,
                            std::size_t size = kDefaultSize);
  // `chars` are the kept bytes in id order (ids 2..).
  static CharAlphabet from_chars(const std::string& chars, std::size_t size);

  // The one-hot width, including PAD and UNK, whether or not every slot is
  // filled.
  std::size_t size() const { return size_; }
  int id(char c) const;
  const std::string& chars() const { return chars_; }

  std::vector<int> encode(std::string_view text,
                          std::size_t limit = kNoLimit) const;

  bool operator==(const CharAlphabet& other) const {
    return size_ == other.size_ && chars_ == other.chars_;
  }

 private:
  std::size_t size_ = kDefaultSize;
  std::string chars_;
  std::array<int, 256> ids_{};
};

// Text formats: one entry per line, UTF-8 kept as-is; backslash, newline,
// carriage return and other control bytes are escaped (\\, \n, \r, \xHH).
// The alphabet file starts with its size and also escapes non-ASCII bytes,
// since its entries are single bytes.
void save_vocab(const std::filesystem::path& path, const Vocab& vocab);
Vocab load_vocab(const std::filesystem::path& path);
void save_alphabet(const std::filesystem::path& path, const CharAlphabet& a);
CharAlphabet load_alphabet(const std::filesystem::path& path);

std::string escape_line(std::string_view raw, bool escape_non_ascii = false);
std::string unescape_line(std::string_view escaped);

}  // namespace corerev::embed
