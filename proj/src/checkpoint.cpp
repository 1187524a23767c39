// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#include "infominer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "infominer/config_json.hpp"
#include "infominer/error.hpp"

namespace infominer {

namespace {

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xFF));
  buf.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

void write_checkpoint(std::ostream& out, const EncoderModel<float>& model,
                      const std::string& vocab_hash, const TrainConfig& train_config,
                      double best_validation_loss, const std::string& label) {
  const auto params = model.parameters();
  nlohmann::json header;
  header["model_config"] = to_json(model.config());
  header["train_config"] = to_json(train_config);
  header["vocab_hash"] = vocab_hash;
  header["best_validation_loss"] = best_validation_loss;
  header["label"] = label;
  auto& table = header["parameters"] = nlohmann::json::array();
  for (const auto& p : params) table.push_back({{"name", p.name}, {"shape", p.tensor.shape()}});
  const std::string header_text = header.dump();

  std::string buf;
  buf.append(kCheckpointMagic, 4);
  put_u16(buf, kCheckpointVersion);
  put_u32(buf, static_cast<std::uint32_t>(header_text.size()));
  buf += header_text;
  for (const auto& p : params) {
    for (float v : p.tensor.values()) put_u32(buf, std::bit_cast<std::uint32_t>(v));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected) {
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  constexpr std::size_t kPrefix = 4 + 2 + 4;
  if (bytes.size() < kPrefix) throw CheckpointError("checkpoint truncated before header");
  if (std::memcmp(data, kCheckpointMagic, 4) != 0) throw CheckpointError("bad checkpoint magic");
  const auto version = static_cast<std::uint16_t>(data[4] | data[5] << 8);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::size_t header_len = get_u32(data + 6);
  if (bytes.size() < kPrefix + header_len) throw CheckpointError("checkpoint header truncated");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kPrefix, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }

  ModelConfig mc;
  TrainConfig tc;
  std::string vocab_hash;
  std::string label;
  double best_loss = 0.0;
  std::vector<std::pair<std::string, Shape>> stored;
  try {
    merge_json(header.at("model_config"), mc);
    merge_json(header.at("train_config"), tc);
    vocab_hash = header.at("vocab_hash").get<std::string>();
    label = header.value("label", std::string());
    best_loss = header.at("best_validation_loss").is_null()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : header.at("best_validation_loss").get<double>();
    for (const auto& p : header.at("parameters")) {
      stored.emplace_back(p.at("name").get<std::string>(), p.at("shape").get<Shape>());
    }
    mc.validate();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("invalid config in checkpoint: ") + e.what());
  }

  if (expected && !(*expected == mc)) {
    throw CheckpointError("checkpoint model config differs from the expected config");
  }
  if (stored != EncoderModel<float>::parameter_layout(mc)) {
    throw CheckpointError("checkpoint parameter table does not match its model config");
  }

  EncoderModel<float> model(mc);
  const auto params = model.parameters();
  std::size_t n_values = 0;
  for (const auto& p : params) n_values += p.tensor.size();
  const std::size_t body = bytes.size() - kPrefix - header_len;
  if (body < n_values * 4) throw CheckpointError("checkpoint truncated in parameter data");
  if (body > n_values * 4) throw CheckpointError("unexpected trailing bytes in checkpoint");

  const unsigned char* cursor = data + kPrefix + header_len;
  for (auto& p : params) {
    auto t = p.tensor;
    for (auto& v : t.values()) {
      v = std::bit_cast<float>(get_u32(cursor));
      cursor += 4;
    }
  }
  return {mc, tc, std::move(vocab_hash), best_loss, std::move(label), std::move(model)};
}

void save_checkpoint(const std::string& path, const EncoderModel<float>& model,
                     const std::string& vocab_hash, const TrainConfig& train_config,
                     double best_validation_loss, const std::string& label) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_checkpoint(out, model, vocab_hash, train_config, best_validation_loss, label);
}

Checkpoint load_checkpoint(const std::string& path, const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_checkpoint(in, expected);
}

}  // namespace infominer
