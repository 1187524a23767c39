// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "infominer/corpus.hpp"
#include "infominer/error.hpp"
#include "infominer/rng.hpp"

using namespace infominer;

namespace {

const char* kHeader =
    "tweet_no\ttweet_text\tq1_label\tq2_label\tq3_label\tq4_label\tq5_label\tq6_label\tq7_label\n";

Corpus parse(const std::string& text, const ColumnMap& schema = {}) {
  std::istringstream in(text);
  return load_tsv(in, schema);
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("label schema has seven ordered properties") {
    CHECK(kAllLabels.size() == 7);
    CHECK(label_key(LabelId::Q1) == "q1");
    CHECK(label_name(LabelId::Q1) == "Verifiable Factual Claim");
    CHECK(label_name(LabelId::Q7) == "Require attention");
    CHECK(label_question(LabelId::Q6) == "Is the tweet harmful for the society?");
    CHECK(parse_label("Q3") == LabelId::Q3);
    CHECK(parse_label("7") == LabelId::Q7);
    CHECK_FALSE(parse_label("q8"));
    for (std::size_t i = 1; i < kAllLabels.size(); ++i) CHECK(kAllLabels[i - 1] < kAllLabels[i]);
  }

  TEST_CASE("label cells map case-insensitively") {
    CHECK(parse_label_value("YES") == LabelValue::Yes);
    CHECK(parse_label_value("No") == LabelValue::No);
    CHECK(parse_label_value("NaN") == LabelValue::Missing);
    CHECK(parse_label_value("") == LabelValue::Missing);
    CHECK_FALSE(parse_label_value("maybe"));
  }

  TEST_CASE("row with nan label becomes Missing") {
    const auto c = parse(std::string(kHeader) + "1\tmasks work\tyes\tno\tyes\tno\tnan\tno\tyes\n");
    REQUIRE(c.size() == 1);
    const auto& inst = c.instances[0];
    CHECK(inst.id == "1");
    CHECK(inst.text == "masks work");
    CHECK(inst.label(LabelId::Q1) == LabelValue::Yes);
    CHECK(inst.label(LabelId::Q2) == LabelValue::No);
    CHECK(inst.label(LabelId::Q5) == LabelValue::Missing);
    CHECK(inst.label(LabelId::Q7) == LabelValue::Yes);
  }

  TEST_CASE("header-only file yields an empty corpus") {
    CHECK(parse(kHeader).empty());
  }

  TEST_CASE("malformed row is reported by line") {
    const std::string text = std::string(kHeader) +
                             "1\ta\tyes\tno\tyes\tno\tno\tno\tyes\n"
                             "2\tb\tyes\tno\n"
                             "3\tc\tyes\tno\tyes\tno\tno\tno\tyes\n";
    try {
      parse(text);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("unknown label value names row and column") {
    const std::string text = std::string(kHeader) + "1\ta\tyes\tno\tyes\tperhaps\tno\tno\tyes\n";
    try {
      parse(text);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == "q4_label");
      CHECK(std::string(e.what()).find("q4_label") != std::string::npos);
    }
  }

  TEST_CASE("CRLF line endings and missing id column") {
    const std::string text =
        "tweet_text\tq1_label\tq2_label\tq3_label\tq4_label\tq5_label\tq6_label\tq7_label\r\n"
        "first tweet\tyes\tno\tyes\tno\tno\tno\tyes\r\n"
        "second tweet\tNO\tNO\tYES\tno\t\tno\tyes\r\n";
    const auto c = parse(text);
    REQUIRE(c.size() == 2);
    CHECK(c.instances[0].id == "1");
    CHECK(c.instances[1].id == "2");
    CHECK(c.instances[1].text == "second tweet");
    CHECK(c.instances[1].label(LabelId::Q5) == LabelValue::Missing);
    CHECK(c.instances[1].label(LabelId::Q7) == LabelValue::Yes);
  }

  TEST_CASE("structural errors") {
    SUBCASE("empty text") {
      CHECK_THROWS_AS(parse(std::string(kHeader) + "1\t   \tyes\tno\tyes\tno\tno\tno\tyes\n"),
                      DataError);
    }
    SUBCASE("duplicate id") {
      CHECK_THROWS_AS(parse(std::string(kHeader) + "1\ta\tyes\tno\tyes\tno\tno\tno\tyes\n" +
                            "1\tb\tyes\tno\tyes\tno\tno\tno\tyes\n"),
                      DataError);
    }
    SUBCASE("missing label column") {
      CHECK_THROWS_AS(parse("tweet_no\ttweet_text\tq1_label\n1\ta\tyes\n"), DataError);
    }
    SUBCASE("invalid UTF-8") {
      CHECK_THROWS_AS(parse(std::string(kHeader) + "1\ta\xC3\x28\tyes\tno\tyes\tno\tno\tno\tyes\n"),
                      DataError);
    }
  }

  TEST_CASE("unlabeled files load when allowed") {
    ColumnMap schema;
    schema.allow_missing_label_columns = true;
    const auto c = parse("tweet_no\ttweet_text\n9\tsome text\n", schema);
    REQUIRE(c.size() == 1);
    CHECK(c.instances[0].id == "9");
    for (auto l : kAllLabels) CHECK(c.instances[0].label(l) == LabelValue::Missing);
  }

  TEST_CASE("configurable column names") {
    ColumnMap schema;
    schema.text_column = "text";
    schema.id_column = "";
    for (std::size_t k = 0; k < kNumLabels; ++k) schema.label_columns[k] = "L" + std::to_string(k);
    const auto c = parse("L6\tL5\tL4\tL3\tL2\tL1\tL0\ttext\nyes\tno\tno\tno\tno\tno\tno\thi\n", schema);
    REQUIRE(c.size() == 1);
    CHECK(c.instances[0].label(LabelId::Q7) == LabelValue::Yes);
    CHECK(c.instances[0].label(LabelId::Q1) == LabelValue::No);
  }

  TEST_CASE("binary_view excludes Missing and keeps order") {
    auto c = testing::toy_corpus(10);
    c.instances[2].labels[1] = LabelValue::Missing;
    c.instances[7].labels[1] = LabelValue::Missing;
    const auto ds = binary_view(c, LabelId::Q2);
    CHECK(ds.size() == 8);
    CHECK(ds.label == LabelId::Q2);

    // Linear-scan oracle.
    std::vector<BinaryItem> expected;
    for (const auto& inst : c.instances) {
      if (inst.labels[1] == LabelValue::Missing) continue;
      expected.push_back({inst.id, inst.text, inst.labels[1] == LabelValue::Yes ? 1 : 0});
    }
    CHECK(ds.items == expected);
  }

  TEST_CASE("binary_view of all-Yes label is all ones") {
    auto c = testing::toy_corpus(6);
    for (auto& inst : c.instances) inst.labels[0] = LabelValue::Yes;
    const auto ds = binary_view(c, LabelId::Q1);
    CHECK(ds.size() == 6);
    for (const auto& item : ds.items) CHECK(item.cls == 1);
  }

  TEST_CASE("class_counts") {
    BinaryDataset ds;
    CHECK(class_counts(ds) == ClassCounts{0, 0});
    ds.items = {{"a", "x", 1}, {"b", "y", 1}, {"c", "z", 0}};
    CHECK(class_counts(ds) == ClassCounts{1, 2});

    Rng rng(99);
    BinaryDataset big;
    std::size_t ones = 0;
    for (int i = 0; i < 1000; ++i) {
      const int cls = static_cast<int>(rng.uniform_index(2));
      ones += static_cast<std::size_t>(cls);
      big.items.push_back({std::to_string(i), "t", cls});
    }
    const auto counts = class_counts(big);
    CHECK(counts.n_class1 == ones);
    CHECK(counts.n_class0 == 1000 - ones);
    CHECK(counts.total() == big.size());
  }

  TEST_CASE("binary_view plus Missing count covers the corpus") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      Corpus c;
      const std::size_t n = rng.uniform_index(30);
      for (std::size_t i = 0; i < n; ++i) {
        Instance inst{std::to_string(i), "text", {}};
        for (auto& v : inst.labels) v = static_cast<LabelValue>(rng.uniform_index(3));
        c.instances.push_back(inst);
      }
      for (auto l : kAllLabels) CHECK(binary_view(c, l).size() + missing_count(c, l) == c.size());
    }
  }

  TEST_CASE("re-serialization reproduces label cells up to case") {
    const std::string text = std::string(kHeader) +
                             "1\tfirst\tYES\tNo\tNaN\tno\tyes\tnan\tNO\n"
                             "2\tsecond one\tno\tyes\tyes\tYes\tno\tno\tno\n";
    const auto c = parse(text);
    std::ostringstream out;
    write_tsv(out, c);
    std::string lowered;
    for (std::size_t i = 0; i < text.size(); ++i) {
      lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    }
    // Ids and texts here are lowercase already, so the whole file matches.
    CHECK(out.str() == lowered);
    CHECK(parse(out.str()).instances[0].labels == c.instances[0].labels);
  }
}
