// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace infominer {

/// The seven binary tweet properties, in reporting order.
enum class LabelId : int { Q1 = 0, Q2, Q3, Q4, Q5, Q6, Q7 };

inline constexpr std::size_t kNumLabels = 7;

inline constexpr std::array<LabelId, kNumLabels> kAllLabels = {
    LabelId::Q1, LabelId::Q2, LabelId::Q3, LabelId::Q4,
    LabelId::Q5, LabelId::Q6, LabelId::Q7};

constexpr std::size_t index_of(LabelId id) { return static_cast<std::size_t>(id); }

/// "q1" ... "q7".
std::string_view label_key(LabelId id);
/// Short property name, e.g. "Verifiable Factual Claim".
std::string_view label_name(LabelId id);
/// The annotation question asked for the property.
std::string_view label_question(LabelId id);
/// Parses "q3", "Q3" or "3".
std::optional<LabelId> parse_label(std::string_view text);

enum class LabelValue { No, Yes, Missing };

/// "yes"/"no" (any case) and "nan"/empty for Missing.
std::optional<LabelValue> parse_label_value(std::string_view cell);
std::string_view label_value_text(LabelValue v);

struct Instance {
  std::string id;
  std::string text;
  std::array<LabelValue, kNumLabels> labels{};

  LabelValue label(LabelId id_) const { return labels[index_of(id_)]; }
};

enum class Language { En, Ar, Bg, Other };

std::string_view language_tag(Language lang);
Language parse_language(std::string_view tag);

struct Corpus {
  Language language = Language::Other;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

/// Which header columns hold what. Defaults follow the shared-task TSVs.
struct ColumnMap {
  std::string id_column = "tweet_no";
  std::string text_column = "tweet_text";
  std::array<std::string, kNumLabels> label_columns = {
      "q1_label", "q2_label", "q3_label", "q4_label",
      "q5_label", "q6_label", "q7_label"};
  /// Unlabeled (test-style) files: absent label columns read as Missing.
  bool allow_missing_label_columns = false;
};

Corpus load_tsv(std::istream& source, const ColumnMap& schema = {},
                Language language = Language::Other);
Corpus load_tsv_file(const std::string& path, const ColumnMap& schema = {},
                     Language language = Language::Other);

/// Writes id, text and label columns using the schema's column names.
/// Label cells are lowercase "yes"/"no"/"nan".
void write_tsv(std::ostream& out, const Corpus& corpus, const ColumnMap& schema = {});

struct BinaryItem {
  std::string id;
  std::string text;
  int cls = 0;

  friend bool operator==(const BinaryItem&, const BinaryItem&) = default;
};

struct BinaryDataset {
  LabelId label = LabelId::Q1;
  std::vector<BinaryItem> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

BinaryDataset binary_view(const Corpus& corpus, LabelId label);

struct ClassCounts {
  std::size_t n_class0 = 0;
  std::size_t n_class1 = 0;

  std::size_t total() const { return n_class0 + n_class1; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

ClassCounts class_counts(const BinaryDataset& ds);

/// Number of instances whose value for `label` is Missing.
std::size_t missing_count(const Corpus& corpus, LabelId label);

}  // namespace infominer
