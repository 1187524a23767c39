// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "infominer/encoder.hpp"
#include "infominer/trainer.hpp"

namespace infominer {

/// Checkpoint file layout (all integers little-endian):
///
///   "IMCK"                      4-byte magic
///   u16   format version        currently 1
///   u32   header length N
///   N     UTF-8 JSON header     model_config, parameters [{name, shape}],
///                               vocab_hash, train_config, best_validation_loss,
///                               label ("q1".."q7" or empty)
///   ...   parameter data        IEEE-754 binary32 values, little-endian,
///                               row-major, in header order
///
/// Nothing may follow the last parameter.
inline constexpr char kCheckpointMagic[4] = {'I', 'M', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model_config;
  TrainConfig train_config;
  std::string vocab_hash;
  double best_validation_loss = 0.0;
  std::string label;
  EncoderModel<float> model;
};

void write_checkpoint(std::ostream& out, const EncoderModel<float>& model,
                      const std::string& vocab_hash, const TrainConfig& train_config,
                      double best_validation_loss, const std::string& label = {});

/// Throws CheckpointError on a bad magic or version, a truncated or padded
/// file, or a parameter table that disagrees with the stored config (or with
/// `expected` when given). No model is returned on failure.
Checkpoint read_checkpoint(std::istream& in,
                           const std::optional<ModelConfig>& expected = std::nullopt);

void save_checkpoint(const std::string& path, const EncoderModel<float>& model,
                     const std::string& vocab_hash, const TrainConfig& train_config,
                     double best_validation_loss, const std::string& label = {});
Checkpoint load_checkpoint(const std::string& path,
                           const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace infominer
