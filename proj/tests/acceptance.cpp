// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "infominer/checkpoint.hpp"
#include "infominer/encoder.hpp"
#include "infominer/ensemble.hpp"
#include "infominer/gradcheck.hpp"
#include "infominer/pipeline.hpp"
#include "infominer/sampling.hpp"
#include "infominer/tokenizer.hpp"
#include "infominer/trainer.hpp"

using namespace infominer;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// Classification loss of a fixed two-sequence batch, checked against
// central differences with h = 1e-5.
GradCheckResult check(EncoderModel<double>& model) {
  // Lengths 6 and 4; the second sequence is padded.
  std::vector<TokenSequence> seqs(2);
  seqs[0].ids = {kClsId, 7, 12, 19, 33, 48};
  seqs[1].ids = {kClsId, 5, 21, 40};
  for (auto& s : seqs) s.mask.assign(s.ids.size(), 1);
  const auto batch = pad_batch(seqs);
  const std::vector<int> gold = {1, 0};
  model.set_requires_grad(true);
  std::vector<NamedTensor> params;
  for (const auto& p : model.parameters()) params.push_back({p.name, p.tensor});
  return finite_diff_check(
      [&](Graph<double>& g) {
        Rng drop(0);
        return classification_loss(model, batch, gold, false, drop, g);
      },
      params, 1e-5);
}

// 1. Finite-difference gradient check on the tiny config.
Outcome gradients() {
  const auto t0 = Clock::now();
  ModelConfig c;
  c.vocab_size = 50;
  c.d_model = 8;
  c.n_heads = 2;
  c.n_layers = 1;
  c.d_ff = 16;
  c.max_seq_len = 6;
  c.dropout_rate = 0.0;
  Rng rng(2024);
  auto model = init_model<double>(c, rng);
  const auto at_init = check(model);
  // Move off the N(0, 0.02) init to a generic point: there, some gradients
  // are ~1e-8 and central differences at h=1e-5 are dominated by roundoff.
  for (const auto& p : model.parameters()) {
    auto t = p.tensor;
    for (auto& v : t.values()) v += rng.normal(0.0, 0.5);
  }
  const auto result = check(model);
  const double secs = seconds_since(t0);
  std::string worst;
  for (const auto& p : result.per_param) {
    if (p.max_error == result.max_error) worst = p.name;
  }
  Outcome o;
  o.pass = result.max_error < 1e-4 && secs < 30.0;
  o.detail = fmt("max relative error %.3g (limit 1e-4), %.2fs (limit 30s)", result.max_error, secs) +
             ", " + std::to_string(result.per_param.size()) + " parameters, worst " + worst +
             fmt(" (informational: %.3g at the untouched init)", at_init.max_error);
  return o;
}

// Brute-force confusion matrix: count each (gold, pred) cell by scanning
// for it, then per-class precision/recall/F1 from the cells.
double brute_macro_f1(const std::vector<int>& gold, const std::vector<int>& pred) {
  auto cell = [&](int g, int p) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) n += (gold[i] == g && pred[i] == p) ? 1 : 0;
    return static_cast<double>(n);
  };
  double sum = 0.0;
  for (int c = 0; c <= 1; ++c) {
    const double tp = cell(c, c), fp = cell(1 - c, c), fn = cell(c, 1 - c);
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return sum / 2.0;
}

// 2. macro_f1 against the brute-force oracle.
Outcome scorer() {
  Rng rng(31337);
  std::size_t mismatches = 0;
  const std::size_t trials = 5000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng.uniform_index(20);
    std::vector<int> g(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = static_cast<int>(rng.uniform_index(2));
      p[i] = static_cast<int>(rng.uniform_index(2));
    }
    if (macro_f1(g, p) != brute_macro_f1(g, p)) ++mismatches;
  }
  const std::vector<int> gold = {1, 1, 0, 0}, pred = {1, 0, 0, 0};
  const double fixture = macro_f1(gold, pred);
  Outcome o;
  o.pass = mismatches == 0 && std::abs(fixture - 11.0 / 15.0) <= 1e-9;
  o.detail = std::to_string(mismatches) + " mismatches over " + std::to_string(trials) +
             " random pairs; fixture " + fmt("%.9f (expected 0.733333333 +- 1e-9)", fixture);
  return o;
}

// 3. Mean F1 of two reference per-label rows.
Outcome reference_rows() {
  const std::vector<double> english_bert = {0.866, 0.461, 0.893, 0.740, 0.562, 0.285, 0.303};
  const std::vector<double> arabic_ours = {0.852, 0.704, 0.774, 0.743, 0.593, 0.698, 0.588};
  const double en = mean_f1(english_bert);
  const double ar = mean_f1(arabic_ours);
  Outcome o;
  o.pass = std::abs(en - 0.587) <= 0.0005 && std::abs(ar - 0.707) <= 0.0005;
  o.detail = fmt("English bert-base-cased %.5f (0.587 +- 0.0005), ", en) +
             fmt("Arabic InfoMiner %.5f (0.707 +- 0.0005)", ar);
  return o;
}

// 4. Uniform random baseline on balanced gold.
Outcome baseline() {
  const auto t0 = Clock::now();
  const std::size_t n = 10000;
  Rng rng(404);
  Corpus gold;
  gold.instances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gold.instances[i].id = std::to_string(i);
    gold.instances[i].text = "x";
  }
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    std::vector<int> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = i < n / 2 ? 1 : 0;
    shuffle_in_place(column, rng);
    for (std::size_t i = 0; i < n; ++i) {
      gold.instances[i].labels[k] = column[i] ? LabelValue::Yes : LabelValue::No;
    }
  }
  Rng draw(derive_seed(1, RngStream::Baseline));
  const auto report = score(gold, random_baseline(gold, draw));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = report.mean_f1 >= 0.47 && report.mean_f1 <= 0.53 && secs < 10.0;
  o.detail = fmt("mean macro F1 %.4f (range [0.47, 0.53]), %.2fs (limit 10s)", report.mean_f1, secs);
  return o;
}

// 5. Undersampling and split invariants on random datasets.
Outcome sampling() {
  Rng gen(5150);
  std::size_t failures = 0;
  std::string first;
  auto fail = [&](std::size_t t, const std::string& why) {
    if (failures++ == 0) first = "dataset " + std::to_string(t) + ": " + why;
  };
  for (std::size_t t = 0; t < 200; ++t) {
    const std::size_t n0 = 1 + gen.uniform_index(60);
    const std::size_t n1 = 1 + gen.uniform_index(60);
    BinaryDataset ds;
    ds.label = kAllLabels[gen.uniform_index(kNumLabels)];
    for (std::size_t i = 0; i < n0 + n1; ++i) {
      ds.items.push_back({"i" + std::to_string(t) + "_" + std::to_string(i), "t", i < n0 ? 0 : 1});
    }
    shuffle_in_place(ds.items, gen);
    std::multiset<std::string> input_ids;
    for (const auto& it : ds.items) input_ids.insert(it.id);

    Rng rng(derive_seed(t, RngStream::Undersample));
    const auto bal = undersample(ds, rng);
    const auto cc = class_counts(bal);
    const std::size_t n_min = std::min(n0, n1);
    if (cc.n_class0 != n_min || cc.n_class1 != n_min) fail(t, "unequal class counts");
    std::set<std::string> seen;
    for (const auto& it : bal.items) {
      if (!input_ids.count(it.id) || !seen.insert(it.id).second) fail(t, "not a subset");
      const auto orig = std::find_if(ds.items.begin(), ds.items.end(),
                                     [&](const BinaryItem& x) { return x.id == it.id; });
      if (orig == ds.items.end() || !(*orig == it)) fail(t, "item altered");
    }

    if (bal.size() >= 2 && n_min >= 2) {
      Rng srng(derive_seed(t, RngStream::Split));
      const auto parts = split(bal, srng, 0.8);
      std::multiset<std::string> joined;
      for (const auto* part : {&parts.train, &parts.validation})
        for (const auto& it : part->items) joined.insert(it.id);
      std::multiset<std::string> bal_ids;
      for (const auto& it : bal.items) bal_ids.insert(it.id);
      if (joined != bal_ids) fail(t, "split not disjoint/exhaustive");
      const auto tr = class_counts(parts.train);
      const auto expect = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n_min)));
      if (tr.n_class0 != expect || tr.n_class1 != expect) fail(t, "floor rule violated");
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = std::to_string(failures) + " violations over 200 datasets" +
             (first.empty() ? "" : " (first: " + first + ")");
  return o;
}

// 6. Learning-rate fixtures, exact.
Outcome schedule() {
  TrainConfig cfg;
  cfg.learning_rate = 1e-5;
  cfg.warmup_steps = 10;
  const double a = lr_at(4, 100, cfg), b = lr_at(9, 100, cfg), c = lr_at(55, 100, cfg);
  TrainConfig by_ratio;  // W = round(0.1 * 100) = 10
  const bool ratio_ok = lr_at(4, 100, by_ratio) == a && lr_at(9, 100, by_ratio) == b &&
                        lr_at(55, 100, by_ratio) == c;
  Outcome o;
  o.pass = a == 5e-6 && b == 1e-5 && c == 5e-6 && ratio_ok;
  char buf[200];
  std::snprintf(buf, sizeof buf, "step4 %.17g, step9 %.17g, step55 %.17g (bit-exact)", a, b, c);
  o.detail = buf;
  return o;
}

PipelineConfig separable_config(const testing::ScratchDir& dir, const std::string& out) {
  auto c = testing::toy_pipeline_config(dir.file("train.tsv"), dir.file(out));
  c.labels = {LabelId::Q1};
  c.seeds = {1, 2, 3};
  return c;
}

// 7. Three seeds fit the separable toy corpus.
Outcome learnability(const testing::ScratchDir& dir) {
  const auto t0 = Clock::now();
  const auto config = separable_config(dir, "learn");
  const auto result = cmd_pipeline(config);
  const double secs = seconds_since(t0);
  std::size_t max_steps = 0;
  for (const auto& job : result.jobs) max_steps = std::max(max_steps, job.history.total_steps);
  const double f1_q1 = result.report.labels.empty() ? 0.0 : result.report.labels[0].macro_f1;
  Outcome o;
  o.pass = f1_q1 == 1.0 && max_steps <= 300 && secs < 180.0;
  o.detail = fmt("fused train-set macro F1 %.4f (must be 1.0), ", f1_q1) +
             std::to_string(max_steps) + " steps per job (limit 300), " +
             fmt("%.1fs (limit 180s)", secs);
  return o;
}

// 8. Reruns reproduce bytes; checkpoints reproduce predictions.
Outcome determinism(const testing::ScratchDir& dir) {
  auto c1 = separable_config(dir, "det1");
  auto c2 = separable_config(dir, "det2");
  c1.training.epochs = c2.training.epochs = 10;
  const auto r1 = cmd_pipeline(c1);
  const auto r2 = cmd_pipeline(c2);
  bool same_ckpt = true;
  for (auto seed : c1.seeds) {
    const auto a = testing::read_bytes(job_paths(c1.output_dir, LabelId::Q1, seed).checkpoint);
    const auto b = testing::read_bytes(job_paths(c2.output_dir, LabelId::Q1, seed).checkpoint);
    same_ckpt &= !a.empty() && a == b;
  }
  const bool same_report =
      report_json(r1.report, "x") == report_json(r2.report, "x") &&
      testing::read_bytes(report_path(c1.output_dir)) == testing::read_bytes(report_path(c2.output_dir));

  // save -> load -> classify must match the in-memory model bit for bit.
  const auto corpus = testing::toy_corpus(40);
  const auto vocab = build_vocab(corpus);
  auto mc = c1.model;
  mc.vocab_size = vocab.size();
  Rng init(77);
  const auto model = init_model<float>(mc, init);
  const std::string path = dir.file("roundtrip.imck");
  save_checkpoint(path, model, vocab.hash(), c1.training, 0.5, "q1");
  const auto loaded = load_checkpoint(path, mc);
  std::vector<TokenSequence> seqs;
  for (const auto& inst : corpus.instances) seqs.push_back(encode(inst.text, vocab, mc.max_seq_len));
  const auto batch = pad_batch(seqs);
  Rng d1(0), d2(0);
  const auto p1 = classify(model, batch, false, d1);
  const auto p2 = classify(loaded.model, batch, false, d2);
  bool same_preds = p1.size() == p2.size();
  for (std::size_t i = 0; same_preds && i < p1.size(); ++i) {
    same_preds = p1[i].probabilities == p2[i].probabilities &&
                 p1[i].predicted_class == p2[i].predicted_class &&
                 p1[i].cls_hidden == p2[i].cls_hidden;
  }
  Outcome o;
  o.pass = same_ckpt && same_report && same_preds;
  o.detail = std::string("checkpoint bytes ") + (same_ckpt ? "identical" : "DIFFER") +
             ", score report " + (same_report ? "identical" : "DIFFERS") +
             ", reloaded predictions " + (same_preds ? "bit-exact" : "DIFFER");
  return o;
}

}  // namespace

int main() {
  testing::ScratchDir dir("acceptance");
  testing::write_corpus(dir.file("train.tsv"), testing::toy_corpus(40));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradients},
      {"scorer oracle equivalence", scorer},
      {"reference mean F1 arithmetic", reference_rows},
      {"random baseline", baseline},
      {"sampling invariants", sampling},
      {"schedule exactness", schedule},
      {"end-to-end learnability", [&] { return learnability(dir); }},
      {"determinism and round trip", [&] { return determinism(dir); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("[NOTE] 9. absolute shared-task F1 values need pretrained weights and the "
              "original corpora; not reproduced here\n");
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
