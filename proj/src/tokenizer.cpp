// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "infominer/error.hpp"
#include "infominer/text.hpp"

namespace infominer {

namespace {

const std::vector<std::string> kSpecials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> pre_tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto piece : split_whitespace(text)) {
    std::size_t begin = 0;
    std::size_t end = piece.size();
    while (begin < end && is_ascii_punct(piece[begin])) {
      out.emplace_back(1, piece[begin]);
      ++begin;
    }
    std::size_t core_end = end;
    while (core_end > begin && is_ascii_punct(piece[core_end - 1])) --core_end;
    if (core_end > begin) out.emplace_back(piece.substr(begin, core_end - begin));
    for (std::size_t i = core_end; i < end; ++i) out.emplace_back(1, piece[i]);
  }
  return out;
}

Vocab::Vocab() : Vocab(kSpecials) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kNumSpecials ||
      !std::equal(kSpecials.begin(), kSpecials.end(), tokens_.begin())) {
    throw DataError("vocabulary must start with [PAD], [UNK], [CLS], [SEP]");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty() || tokens_[i].find('\n') != std::string::npos) {
      throw DataError("invalid vocabulary token at id " + std::to_string(i));
    }
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

bool Vocab::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

TokenId Vocab::id_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

void Vocab::write(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

std::string Vocab::serialize() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

Vocab Vocab::read(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return Vocab(std::move(tokens));
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write(out);
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read(in);
}

std::string Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Vocab build_vocab(const std::vector<std::string>& texts, std::size_t min_frequency) {
  std::map<std::string, std::size_t> freq;
  for (const auto& text : texts) {
    for (auto& tok : pre_tokenize(text)) ++freq[std::move(tok)];
  }
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [tok, n] : freq) {
    if (n >= std::max<std::size_t>(min_frequency, 1) &&
        std::find(kSpecials.begin(), kSpecials.end(), tok) == kSpecials.end()) {
      entries.emplace_back(tok, n);
    }
  }
  // std::map iteration is already lexicographic, so a stable sort on
  // frequency alone yields the lexicographic tiebreak.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = kSpecials;
  for (auto& [tok, n] : entries) tokens.push_back(std::move(tok));
  return Vocab(std::move(tokens));
}

Vocab build_vocab(const Corpus& corpus, std::size_t min_frequency) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& inst : corpus.instances) texts.push_back(inst.text);
  return build_vocab(texts, min_frequency);
}

TokenSequence encode(std::string_view text, const Vocab& vocab, std::size_t max_len) {
  TokenSequence seq;
  seq.ids.push_back(kClsId);
  for (const auto& tok : pre_tokenize(text)) {
    if (seq.ids.size() >= max_len) break;
    seq.ids.push_back(vocab.id_of(tok));
  }
  seq.mask.assign(seq.ids.size(), 1);
  return seq;
}

Batch pad_batch(const std::vector<TokenSequence>& seqs) {
  Batch b;
  b.rows = seqs.size();
  for (const auto& s : seqs) b.width = std::max(b.width, s.ids.size());
  b.ids.assign(b.rows * b.width, kPadId);
  b.mask.assign(b.rows * b.width, 0);
  for (std::size_t r = 0; r < b.rows; ++r) {
    std::copy(seqs[r].ids.begin(), seqs[r].ids.end(), b.ids.begin() + r * b.width);
    std::copy(seqs[r].mask.begin(), seqs[r].mask.end(), b.mask.begin() + r * b.width);
  }
  return b;
}

std::vector<TokenSequence> unpad_batch(const Batch& batch) {
  std::vector<TokenSequence> out(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    for (std::size_t c = 0; c < batch.width && batch.valid(r, c); ++c) {
      out[r].ids.push_back(batch.id(r, c));
      out[r].mask.push_back(1);
    }
  }
  return out;
}

}  // namespace infominer
