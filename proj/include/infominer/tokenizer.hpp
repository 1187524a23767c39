// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infominer/corpus.hpp"

namespace infominer {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;  // reserved, never emitted
inline constexpr std::size_t kNumSpecials = 4;
inline constexpr std::size_t kMaxSeqLen = 120;

/// Case-preserving pre-tokenization: split on Unicode whitespace, then peel
/// leading and trailing ASCII punctuation off each piece, one character per
/// token. "(hello!!)" -> "(", "hello", "!", "!", ")".
std::vector<std::string> pre_tokenize(std::string_view text);

class Vocab {
 public:
  /// Specials only.
  Vocab();

  /// Builds from an explicit id-ordered token list; the first four entries
  /// must be the specials. Throws DataError on duplicates.
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  bool contains(std::string_view token) const;
  /// kUnkId for unknown tokens.
  TokenId id_of(std::string_view token) const;

  /// One token per line, LF-terminated, line index = id.
  void write(std::ostream& out) const;
  std::string serialize() const;
  static Vocab read(std::istream& in);
  void save(const std::string& path) const;
  static Vocab load(const std::string& path);

  /// FNV-1a 64 of serialize(), as 16 lowercase hex digits.
  std::string hash() const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Tokens with frequency >= min_frequency, ordered by descending frequency,
/// ties by ascending byte-wise lexicographic order, after the four specials.
Vocab build_vocab(const std::vector<std::string>& texts, std::size_t min_frequency = 1);
Vocab build_vocab(const Corpus& corpus, std::size_t min_frequency = 1);

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;

  std::size_t true_length() const { return ids.size(); }
};

/// [CLS] followed by token ids, truncated to max_len (earliest tokens kept).
TokenSequence encode(std::string_view text, const Vocab& vocab,
                     std::size_t max_len = kMaxSeqLen);

/// Row-major ids and mask, rows padded with [PAD] to the longest sequence.
struct Batch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;

  TokenId id(std::size_t r, std::size_t c) const { return ids[r * width + c]; }
  bool valid(std::size_t r, std::size_t c) const { return mask[r * width + c] != 0; }
};

Batch pad_batch(const std::vector<TokenSequence>& seqs);

/// Inverse of pad_batch: drops the padded tail of each row.
std::vector<TokenSequence> unpad_batch(const Batch& batch);

}  // namespace infominer
