// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

// Shared test fixtures: synthetic corpora and scratch directories.

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "infominer/corpus.hpp"
#include "infominer/pipeline.hpp"
#include "infominer/rng.hpp"

namespace infominer::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() /
            ("infominer-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Two disjoint topic vocabularies plus shared filler words. Tweet i uses
/// cluster i % 2; label k is "yes" for cluster 0 when k is even and for
/// cluster 1 when k is odd, so every label is separable by topic words.
/// Every seventh tweet has a missing q5.
inline Corpus toy_corpus(std::size_t n = 40, std::uint64_t seed = 7) {
  static const std::vector<std::string> cluster_words[2] = {
      {"vaccine", "virus", "cure", "hoax", "masks", "lockdown", "hospital", "doctors"},
      {"football", "music", "weather", "concert", "pizza", "holiday", "movie", "garden"}};
  static const std::vector<std::string> filler = {"the", "today", "people", "really", "we", "new"};
  Rng rng(seed);
  Corpus c;
  c.language = Language::En;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cluster = i % 2;
    std::string text;
    const std::size_t len = 4 + rng.uniform_index(5);
    for (std::size_t w = 0; w < len; ++w) {
      if (!text.empty()) text += ' ';
      text += rng.uniform_index(3) == 0 ? filler[rng.uniform_index(filler.size())]
                                        : cluster_words[cluster][rng.uniform_index(8)];
    }
    if (rng.uniform_index(4) == 0) text += " !";
    Instance inst;
    inst.id = "t" + std::to_string(i + 1);
    inst.text = text;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      const bool yes = (k % 2 == 0) == (cluster == 0);
      inst.labels[k] = yes ? LabelValue::Yes : LabelValue::No;
    }
    if (i % 7 == 3) inst.labels[4] = LabelValue::Missing;
    c.instances.push_back(std::move(inst));
  }
  return c;
}

inline void write_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  write_tsv(out, corpus);
}

/// Small, fast model and schedule for end-to-end runs on toy_corpus.
inline PipelineConfig toy_pipeline_config(const std::string& train_path,
                                          const std::string& output_dir) {
  PipelineConfig c;
  c.train_path = train_path;
  c.output_dir = output_dir;
  c.model.d_model = 16;
  c.model.n_heads = 2;
  c.model.n_layers = 1;
  c.model.d_ff = 32;
  c.model.max_seq_len = 32;
  c.training.learning_rate = 1e-3;
  c.training.epochs = 30;
  c.training.eval_interval_steps = 10;
  return c;
}

}  // namespace infominer::testing
