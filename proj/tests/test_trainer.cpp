// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "infominer/error.hpp"
#include "infominer/sampling.hpp"
#include "infominer/trainer.hpp"

using namespace infominer;

namespace {

NamedParam<double> param(const std::string& name, std::vector<double> values,
                         std::vector<double> grads) {
  const std::size_t n = values.size();
  auto t = Tensor<double>::from({n}, std::move(values), true);
  auto g = t.grad();
  for (std::size_t i = 0; i < grads.size(); ++i) g[i] = grads[i];
  return {name, t};
}

ModelConfig small_model(std::size_t vocab) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.d_model = 16;
  c.n_heads = 2;
  c.n_layers = 1;
  c.d_ff = 32;
  c.max_seq_len = 32;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("lr schedule fixtures") {
    TrainConfig cfg;
    cfg.warmup_steps = 10;
    CHECK(lr_at(9, 100, cfg) == 1e-5);
    CHECK(lr_at(4, 100, cfg) == 5e-6);
    CHECK(lr_at(55, 100, cfg) == 5e-6);
    CHECK(lr_at(100, 100, cfg) == 0.0);
    CHECK_THROWS_AS(lr_at(0, 0, cfg), ConfigError);
  }

  TEST_CASE("warmup from ratio rounds to nearest") {
    TrainConfig cfg;
    CHECK(warmup_steps_for(100, cfg) == 10);
    CHECK(warmup_steps_for(15, cfg) == 2);  // 1.5 rounds up
    CHECK(warmup_steps_for(14, cfg) == 1);
    cfg.warmup_steps = 7;
    CHECK(warmup_steps_for(14, cfg) == 7);
  }

  TEST_CASE("lr schedule shape") {
    TrainConfig cfg;
    const std::size_t total = 57;
    const std::size_t w = warmup_steps_for(total, cfg);
    double prev = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      const double lr = lr_at(s, total, cfg);
      CHECK(lr >= 0.0);
      CHECK(lr <= cfg.learning_rate);
      if (s < w) CHECK(lr > prev);
      if (s > w) CHECK(lr < prev);
      prev = lr;
    }
    CHECK(lr_at(w - 1, total, cfg) == cfg.learning_rate);
    CHECK(lr_at(w, total, cfg) == cfg.learning_rate);
    cfg.schedule = LrSchedule::Constant;
    CHECK(lr_at(total - 1, total, cfg) == cfg.learning_rate);
  }

  TEST_CASE("clip_global_norm") {
    SUBCASE("below threshold") {
      const std::vector params = {param("a", {0, 0}, {0.3, 0.4})};
      CHECK(clip_global_norm(params, 1.0) == 1.0);
      CHECK(params[0].tensor.grad()[0] == 0.3);
    }
    SUBCASE("3-4-5") {
      const std::vector params = {param("a", {0, 0}, {3, 4})};
      CHECK(clip_global_norm(params, 1.0) == doctest::Approx(0.2));
      CHECK(params[0].tensor.grad()[0] == doctest::Approx(0.6));
      CHECK(params[0].tensor.grad()[1] == doctest::Approx(0.8));
    }
    SUBCASE("random gradients end at norm <= 1") {
      Rng rng(3);
      for (int t = 0; t < 50; ++t) {
        std::vector<NamedParam<double>> params;
        for (int p = 0; p < 3; ++p) {
          std::vector<double> g(5);
          for (auto& x : g) x = rng.normal(0.0, 3.0);
          params.push_back(param("p" + std::to_string(p), std::vector<double>(5, 0.0), g));
        }
        clip_global_norm(params, 1.0);
        double sq = 0;
        for (const auto& p : params)
          for (double g : p.tensor.grad()) sq += g * g;
        CHECK(std::sqrt(sq) <= 1.0 + 1e-6);
      }
    }
    SUBCASE("non-finite gradient names the parameter") {
      const std::vector params = {param("ok", {0}, {1}), param("bad", {0}, {NAN})};
      try {
        clip_global_norm(params, 1.0);
        FAIL("expected TrainingError");
      } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
      }
    }
  }

  TEST_CASE("adam_step") {
    TrainConfig cfg;
    SUBCASE("zero gradient leaves parameters unchanged") {
      const std::vector params = {param("p", {1.5, -2.0}, {0, 0})};
      auto st = AdamState<double>::zeros_like(params);
      adam_step(params, st, 1e-3, cfg);
      CHECK(params[0].tensor[0] == 1.5);
      CHECK(params[0].tensor[1] == -2.0);
      CHECK(st.step == 1);
    }
    SUBCASE("first step moves by lr / (1 + eps)") {
      const std::vector params = {param("p", {0.0}, {1.0})};
      auto st = AdamState<double>::zeros_like(params);
      adam_step(params, st, 1e-5, cfg);
      CHECK(params[0].tensor[0] == doctest::Approx(-1e-5 / (1.0 + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("descends a quadratic monotonically") {
      auto p = param("p", {3.0}, {0.0});
      const std::vector params = {p};
      auto st = AdamState<double>::zeros_like(params);
      double prev = 0.5 * 9.0;
      for (int i = 0; i < 100; ++i) {
        p.tensor.grad()[0] = p.tensor[0];  // d/dp p^2/2
        adam_step(params, st, 1e-2, cfg);
        const double f = 0.5 * p.tensor[0] * p.tensor[0];
        CHECK(f < prev);
        prev = f;
      }
    }
  }

  TEST_CASE("early stopping rule") {
    EarlyStopping es(10);
    CHECK(es.update(1.0));
    CHECK_FALSE(es.should_stop());
    std::size_t rounds = 1;
    for (double loss = 1.1; !es.should_stop(); loss += 0.1) {
      CHECK_FALSE(es.update(loss));
      ++rounds;
    }
    CHECK(rounds == 11);
    CHECK(es.best_round() == 1);
    CHECK(es.best_loss() == 1.0);

    EarlyStopping ties(2);
    ties.update(0.5);
    CHECK_FALSE(ties.update(0.5));  // equal is not an improvement
    CHECK_FALSE(ties.should_stop());
    CHECK(ties.update(0.4));
  }

  TEST_CASE("history serializes as JSON lines") {
    TrainHistory h;
    h.rounds = {{10, 0.7, 0.6, 1e-3}, {20, 0.5, 0.4, 5e-4}};
    h.best_round = 1;
    h.total_steps = 20;
    h.stopping_reason = "completed";
    const auto text = history_to_jsonl(h);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("\"stopping_reason\":\"completed\"") != std::string::npos);
  }

  TEST_CASE("training fits a separable toy set and is deterministic") {
    const auto corpus = testing::toy_corpus(40);
    const auto ds = binary_view(corpus, LabelId::Q1);
    const auto vocab = build_vocab(corpus);
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 20;
    cfg.eval_interval_steps = 10;
    cfg.seed = 3;
    Rng init(derive_seed(cfg.seed, RngStream::Init));
    const auto model = init_model<float>(small_model(vocab.size()), init);

    const auto r1 = train(model, ds, ds, vocab, cfg);
    const auto r2 = train(model, ds, ds, vocab, cfg);
    CHECK(r1.history == r2.history);

    const auto& rounds = r1.history.rounds;
    REQUIRE_FALSE(rounds.empty());
    for (std::size_t i = 1; i < rounds.size(); ++i) CHECK(rounds[i].step > rounds[i - 1].step);
    for (const auto& r : rounds) CHECK(rounds[r1.history.best_round].validation_loss <= r.validation_loss);
    CHECK(r1.best_validation_loss == rounds[r1.history.best_round].validation_loss);

    const auto examples = encode_dataset(ds, vocab, 32);
    CHECK(dataset_loss(r1.model, examples, 8) == doctest::Approx(r1.best_validation_loss));
    std::vector<TokenSequence> seqs;
    for (const auto& e : examples) seqs.push_back(e.tokens);
    Rng drop(0);
    const auto preds = classify(r1.model, pad_batch(seqs), false, drop);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i].predicted_class == examples[i].cls;
    CHECK(correct == examples.size());
  }

  TEST_CASE("gradient accumulation and partial batches") {
    const auto corpus = testing::toy_corpus(13);
    const auto ds = binary_view(corpus, LabelId::Q2);
    const auto vocab = build_vocab(corpus);
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 2;
    cfg.batch_size = 4;
    cfg.gradient_accumulation_steps = 2;
    cfg.eval_interval_steps = 100;
    Rng init(1);
    const auto model = init_model<float>(small_model(vocab.size()), init);
    const auto r = train(model, ds, ds, vocab, cfg);
    // ceil(ceil(n/4)/2) optimizer steps per epoch; the final step is always evaluated.
    const std::size_t batches = (ds.size() + 3) / 4;
    CHECK(r.history.total_steps == 2 * ((batches + 1) / 2));
    REQUIRE(r.history.rounds.size() == 1);
    CHECK(r.history.rounds[0].step == r.history.total_steps);
    CHECK(r.history.stopping_reason == "completed");
  }

  TEST_CASE("early stopping halts training") {
    const auto corpus = testing::toy_corpus(20);
    const auto ds = binary_view(corpus, LabelId::Q1);
    // Validation labels flipped, so fitting the training set raises validation loss.
    auto flipped = ds;
    for (auto& it : flipped.items) it.cls = 1 - it.cls;
    const auto vocab = build_vocab(corpus);
    TrainConfig cfg;
    cfg.learning_rate = 3e-3;
    cfg.epochs = 200;
    cfg.eval_interval_steps = 1;
    cfg.patience_rounds = 3;
    Rng init(2);
    const auto r = train(init_model<float>(small_model(vocab.size()), init), ds, flipped, vocab, cfg);
    CHECK(r.history.stopping_reason == "early_stopping");
    CHECK(r.history.rounds.size() == r.history.best_round + 1 + cfg.patience_rounds);
  }

  TEST_CASE("invalid inputs") {
    const auto corpus = testing::toy_corpus(10);
    const auto ds = binary_view(corpus, LabelId::Q1);
    const auto vocab = build_vocab(corpus);
    Rng init(1);
    const auto model = init_model<float>(small_model(vocab.size()), init);
    TrainConfig cfg;
    CHECK_THROWS_AS(train(model, BinaryDataset{}, ds, vocab, cfg), TrainingError);
    CHECK_THROWS_AS(train(model, ds, BinaryDataset{}, vocab, cfg), TrainingError);
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(model, ds, ds, vocab, cfg), ConfigError);
    TrainConfig ok;
    Rng init2(1);
    const auto tiny = init_model<float>(small_model(kNumSpecials), init2);
    CHECK_THROWS_AS(train(tiny, ds, ds, vocab, ok), ConfigError);
  }
}
