// Copyright 2026 The InfoMiner Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "infominer/corpus.hpp"
#include "infominer/encoder.hpp"
#include "infominer/trainer.hpp"
#include "json.hpp"

namespace infominer {

// Serializers for the configuration structs. Readers start from the
// current value and override only the keys present; unknown keys throw
// ConfigError so typos do not pass silently.

nlohmann::json to_json(const ModelConfig& c);
void merge_json(const nlohmann::json& j, ModelConfig& c);

nlohmann::json to_json(const TrainConfig& c);
void merge_json(const nlohmann::json& j, TrainConfig& c);

nlohmann::json to_json(const ColumnMap& c);
void merge_json(const nlohmann::json& j, ColumnMap& c);

}  // namespace infominer
