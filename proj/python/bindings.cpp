// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infominer/checkpoint.hpp"
#include "infominer/config_json.hpp"
#include "infominer/corpus.hpp"
#include "infominer/encoder.hpp"
#include "infominer/ensemble.hpp"
#include "infominer/error.hpp"
#include "infominer/pipeline.hpp"
#include "infominer/sampling.hpp"
#include "infominer/tokenizer.hpp"
#include "infominer/trainer.hpp"

namespace py = pybind11;
using namespace infominer;

namespace {

LabelId label_arg(const std::string& text) {
  const auto id = parse_label(text);
  if (!id) throw py::value_error("unknown label '" + text + "'");
  return *id;
}

ColumnMap columns_arg(const std::string& columns_json) {
  ColumnMap c;
  if (!columns_json.empty()) merge_json(nlohmann::json::parse(columns_json), c);
  return c;
}

std::vector<int> classes(const BinaryDataset& ds) {
  std::vector<int> out;
  for (const auto& item : ds.items) out.push_back(item.cls);
  return out;
}

std::vector<std::vector<double>> classify_texts(const EncoderModel<float>& model,
                                                const Vocab& vocab,
                                                const std::vector<std::string>& texts) {
  std::vector<TokenSequence> seqs;
  for (const auto& t : texts) seqs.push_back(encode(t, vocab, model.config().max_seq_len));
  Rng unused(0);
  std::vector<std::vector<double>> out;
  if (seqs.empty()) return out;
  for (const auto& p : classify(model, pad_batch(seqs), false, unused)) {
    out.push_back(p.probabilities);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Per-label transformer tweet classifiers: data, training and scoring";

  static py::exception<Error> error_type(m, "InfominerError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(("[" + e.category() + "] " + e.what()).c_str());
    }
  });

  // corpus
  py::class_<Instance>(m, "Instance")
      .def_readonly("id", &Instance::id)
      .def_readonly("text", &Instance::text)
      .def("label", [](const Instance& i, const std::string& l) {
        return std::string(label_value_text(i.label(label_arg(l))));
      });
  py::class_<Corpus>(m, "Corpus")
      .def_readonly("instances", &Corpus::instances)
      .def("__len__", &Corpus::size);
  py::class_<BinaryDataset>(m, "BinaryDataset")
      .def("__len__", &BinaryDataset::size)
      .def_property_readonly("label", [](const BinaryDataset& d) { return std::string(label_key(d.label)); })
      .def_property_readonly("ids", [](const BinaryDataset& d) {
        std::vector<std::string> ids;
        for (const auto& item : d.items) ids.push_back(item.id);
        return ids;
      })
      .def_property_readonly("classes", &classes);

  m.def("label_keys", [] {
    std::vector<std::string> keys;
    for (auto l : kAllLabels) keys.emplace_back(label_key(l));
    return keys;
  });
  m.def("label_question", [](const std::string& l) { return std::string(label_question(label_arg(l))); });
  m.def("load_tsv", [](const std::string& path, const std::string& columns_json) {
    return load_tsv_file(path, columns_arg(columns_json));
  }, py::arg("path"), py::arg("columns_json") = "");
  m.def("binary_view", [](const Corpus& c, const std::string& l) { return binary_view(c, label_arg(l)); });
  m.def("class_counts", [](const BinaryDataset& d) {
    const auto c = class_counts(d);
    return std::make_pair(c.n_class0, c.n_class1);
  });

  // sampling
  m.def("undersample", [](const BinaryDataset& d, std::uint64_t seed) {
    Rng rng(seed);
    return undersample(d, rng);
  }, py::arg("dataset"), py::arg("seed"));
  m.def("split", [](const BinaryDataset& d, std::uint64_t seed, double ratio) {
    Rng rng(seed);
    auto pair = split(d, rng, ratio);
    return std::make_pair(std::move(pair.train), std::move(pair.validation));
  }, py::arg("dataset"), py::arg("seed"), py::arg("ratio") = 0.8);

  // tokenizer
  py::class_<Vocab>(m, "Vocab")
      .def("__len__", &Vocab::size)
      .def("tokens", &Vocab::tokens)
      .def("id_of", &Vocab::id_of)
      .def("hash", &Vocab::hash)
      .def("save", &Vocab::save)
      .def_static("load", &Vocab::load);
  m.def("pre_tokenize", &pre_tokenize);
  m.def("build_vocab", py::overload_cast<const std::vector<std::string>&, std::size_t>(&build_vocab),
        py::arg("texts"), py::arg("min_frequency") = 1);
  m.def("encode", [](const std::string& text, const Vocab& v, std::size_t max_len) {
    return encode(text, v, max_len).ids;
  }, py::arg("text"), py::arg("vocab"), py::arg("max_len") = kMaxSeqLen);

  // encoder / trainer
  py::class_<EncoderModel<float>>(m, "EncoderModel")
      .def_property_readonly("config_json", [](const EncoderModel<float>& e) { return to_json(e.config()).dump(); })
      .def("num_parameters", &EncoderModel<float>::num_parameters)
      .def("parameter_names", [](const EncoderModel<float>& e) {
        std::vector<std::string> names;
        for (const auto& p : e.parameters()) names.push_back(p.name);
        return names;
      });
  m.def("init_model", [](const std::string& config_json, std::uint64_t seed) {
    ModelConfig c;
    merge_json(nlohmann::json::parse(config_json), c);
    Rng rng = make_rng(seed, RngStream::Init);
    return init_model<float>(c, rng);
  }, py::arg("config_json"), py::arg("seed"));
  m.def("classify", &classify_texts, py::arg("model"), py::arg("vocab"), py::arg("texts"));
  m.def("load_checkpoint", [](const std::string& path) {
    auto ckpt = load_checkpoint(path);
    return py::make_tuple(std::move(ckpt.model), ckpt.label, ckpt.vocab_hash, ckpt.best_validation_loss);
  });
  m.def("lr_at", [](std::size_t step, std::size_t total, const std::string& train_json) {
    TrainConfig c;
    if (!train_json.empty()) merge_json(nlohmann::json::parse(train_json), c);
    return lr_at(step, total, c);
  }, py::arg("step"), py::arg("total_steps"), py::arg("train_json") = "");

  // scoring
  m.def("f1", [](const std::vector<int>& g, const std::vector<int>& p, int positive) {
    return f1(g, p, positive);
  });
  m.def("macro_f1", [](const std::vector<int>& g, const std::vector<int>& p) { return macro_f1(g, p); });
  m.def("mean_f1", [](const std::vector<double>& v) { return mean_f1(v); });
  m.def("majority_vote", [](const std::vector<std::vector<int>>& votes) {
    PredictionSet ps;
    ps.votes = votes;
    return majority_vote(ps);
  });

  // pipeline stages; configs travel as JSON text
  m.def("run_train", [](const std::string& config_json, const std::string& label, std::uint64_t seed) {
    auto cfg = pipeline_config_from_json(nlohmann::json::parse(config_json));
    const auto r = cmd_train(cfg, label_arg(label), seed);
    return r.paths.checkpoint.string();
  });
  m.def("run_predict", [](const std::string& checkpoint, const std::string& data, const std::string& out) {
    return cmd_predict(checkpoint, data, out, ColumnMap{}).columns.at(0);
  });
  m.def("run_score", [](const std::string& gold, const std::vector<std::string>& files) {
    return report_json(cmd_score(gold, files, ColumnMap{}), "infominer").dump();
  });
  m.def("run_pipeline", [](const std::string& config_json) {
    auto cfg = pipeline_config_from_json(nlohmann::json::parse(config_json));
    py::gil_scoped_release release;
    const auto result = cmd_pipeline(cfg);
    return report_json(result.report, "infominer").dump();
  });
}
