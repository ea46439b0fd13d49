// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corerev/corpus/dataset.hpp"

namespace corerev::testsupport {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs `binary args...` through the shell with `env` prefixed (NAME=value
// entries). Arguments are single-quoted.
CommandResult run_command(const std::string& binary, const std::vector<std::string>& args,
                          const std::vector<std::string>& env = {});

void write_raw_dataset(const std::filesystem::path& path, const std::vector<corpus::RawPair>& pairs);

std::string read_file(const std::filesystem::path& path);

}  // namespace corerev::testsupport
