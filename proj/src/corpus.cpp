// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "infominer/error.hpp"
#include "infominer/text.hpp"

namespace infominer {

namespace {

struct LabelInfo {
  std::string_view key;
  std::string_view name;
  std::string_view question;
};

constexpr std::array<LabelInfo, kNumLabels> kLabelInfo = {{
    {"q1", "Verifiable Factual Claim",
     "Does the tweet contain a verifiable factual claim?"},
    {"q2", "False Information",
     "To what extent does the tweet appear to contain false information?"},
    {"q3", "Interest to General Public",
     "Will the tweet have an effect on or be of interest to the general public?"},
    {"q4", "Harmfulness", "To what extent is the tweet harmful to the society?"},
    {"q5", "Need of Verification",
     "Do you think that a professional fact-checker should verify the claim in the tweet?"},
    {"q6", "Harmful to Society", "Is the tweet harmful for the society?"},
    {"q7", "Require attention",
     "Do you think that this tweet should get the attention of government entities?"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string_view label_key(LabelId id) { return kLabelInfo[index_of(id)].key; }
std::string_view label_name(LabelId id) { return kLabelInfo[index_of(id)].name; }
std::string_view label_question(LabelId id) { return kLabelInfo[index_of(id)].question; }

std::optional<LabelId> parse_label(std::string_view text) {
  std::string s = lower(text);
  if (!s.empty() && s.front() == 'q') s.erase(0, 1);
  if (s.size() != 1 || s[0] < '1' || s[0] > '7') return std::nullopt;
  return static_cast<LabelId>(s[0] - '1');
}

std::optional<LabelValue> parse_label_value(std::string_view cell) {
  const std::string s = lower(trim(cell));
  if (s == "yes") return LabelValue::Yes;
  if (s == "no") return LabelValue::No;
  if (s == "nan" || s.empty()) return LabelValue::Missing;
  return std::nullopt;
}

std::string_view label_value_text(LabelValue v) {
  switch (v) {
    case LabelValue::Yes: return "yes";
    case LabelValue::No: return "no";
    case LabelValue::Missing: break;
  }
  return "nan";
}

std::string_view language_tag(Language lang) {
  switch (lang) {
    case Language::En: return "en";
    case Language::Ar: return "ar";
    case Language::Bg: return "bg";
    case Language::Other: break;
  }
  return "other";
}

Language parse_language(std::string_view tag) {
  const std::string s = lower(tag);
  if (s == "en") return Language::En;
  if (s == "ar") return Language::Ar;
  if (s == "bg") return Language::Bg;
  return Language::Other;
}

Corpus load_tsv(std::istream& source, const ColumnMap& schema, Language language) {
  const std::string content{std::istreambuf_iterator<char>(source),
                            std::istreambuf_iterator<char>()};
  Corpus corpus;
  corpus.language = language;

  std::vector<std::string> header;
  std::size_t text_col = 0;
  std::optional<std::size_t> id_col;
  std::array<std::optional<std::size_t>, kNumLabels> label_cols{};
  std::unordered_set<std::string> seen_ids;

  std::size_t line_no = 0;
  std::size_t data_row = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!is_valid_utf8(line)) {
      throw DataError("line " + std::to_string(line_no) + ": invalid UTF-8", line_no);
    }

    if (header.empty()) {
      header = split_tabs(line);
      if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
      auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
      };
      const auto t = find(schema.text_column);
      if (!t) {
        throw DataError("header is missing text column '" + schema.text_column + "'",
                        line_no, schema.text_column);
      }
      text_col = *t;
      if (!schema.id_column.empty()) id_col = find(schema.id_column);
      for (std::size_t k = 0; k < kNumLabels; ++k) {
        label_cols[k] = find(schema.label_columns[k]);
        if (!label_cols[k] && !schema.allow_missing_label_columns) {
          throw DataError("header is missing label column '" + schema.label_columns[k] + "'",
                          line_no, schema.label_columns[k]);
        }
      }
      continue;
    }

    ++data_row;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " columns, found " +
                          std::to_string(fields.size()),
                      line_no);
    }

    Instance inst;
    inst.id = id_col ? std::string(trim(fields[*id_col])) : std::to_string(data_row);
    inst.text = fields[text_col];
    if (trim(inst.text).empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty tweet text", line_no,
                      schema.text_column);
    }
    if (!seen_ids.insert(inst.id).second) {
      throw DataError("line " + std::to_string(line_no) + ": duplicate id '" + inst.id + "'",
                      line_no, schema.id_column);
    }
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      if (!label_cols[k]) {
        inst.labels[k] = LabelValue::Missing;
        continue;
      }
      const auto& cell = fields[*label_cols[k]];
      const auto value = parse_label_value(cell);
      if (!value) {
        throw DataError("line " + std::to_string(line_no) + ", column '" +
                            schema.label_columns[k] + "': unknown label value '" + cell + "'",
                        line_no, schema.label_columns[k]);
      }
      inst.labels[k] = *value;
    }
    corpus.instances.push_back(std::move(inst));
  }
  return corpus;
}

Corpus load_tsv_file(const std::string& path, const ColumnMap& schema, Language language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_tsv(in, schema, language);
}

void write_tsv(std::ostream& out, const Corpus& corpus, const ColumnMap& schema) {
  out << schema.id_column << '\t' << schema.text_column;
  for (const auto& col : schema.label_columns) out << '\t' << col;
  out << '\n';
  for (const auto& inst : corpus.instances) {
    out << inst.id << '\t' << inst.text;
    for (auto v : inst.labels) out << '\t' << label_value_text(v);
    out << '\n';
  }
}

BinaryDataset binary_view(const Corpus& corpus, LabelId label) {
  BinaryDataset ds;
  ds.label = label;
  for (const auto& inst : corpus.instances) {
    const auto v = inst.label(label);
    if (v == LabelValue::Missing) continue;
    ds.items.push_back({inst.id, inst.text, v == LabelValue::Yes ? 1 : 0});
  }
  return ds;
}

ClassCounts class_counts(const BinaryDataset& ds) {
  ClassCounts c;
  for (const auto& item : ds.items) (item.cls == 1 ? c.n_class1 : c.n_class0)++;
  return c;
}

std::size_t missing_count(const Corpus& corpus, LabelId label) {
  return static_cast<std::size_t>(
      std::count_if(corpus.instances.begin(), corpus.instances.end(),
                    [&](const Instance& i) { return i.label(label) == LabelValue::Missing; }));
}

}  // namespace infominer
