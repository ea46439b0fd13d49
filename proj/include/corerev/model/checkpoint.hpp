// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "corerev/model/config.hpp"
#include "corerev/model/core.hpp"
#include "corerev/model/train.hpp"

namespace corerev::model {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ModelVocabs vocabs;
  CoreModelParams params;
  TrainingHistory history;
};

// One JSON header line {"format":"corerev-checkpoint","version":1,
// "config":{...},"arrays":[{"name","shape","offset","count"}...],
// "payload_floats":N,"vocab":{...},"history":{...}} followed by N
// little-endian float32 values in manifest order. Values are written as
// float32, so parameters that are already float32-exact round-trip bitwise.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws DataError on a missing file, wrong format or version, manifest
// inconsistencies, or a payload shorter or longer than declared.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace corerev::model
