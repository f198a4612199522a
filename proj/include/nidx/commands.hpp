#pragma once

#include "nidx/config.hpp"

namespace nidx {

struct CommandResult {
  std::string text;
  std::string csv;
  bool ok = true;  // false: computation ran but reported a failing diagnostic
};

using ArgMap = std::map<std::string, std::string>;

// Shared command engine behind the CLI and the C API. Throws InputError for
// bad names/arguments and ComputeError for numeric failures. The env var
// NUMINDEX_SEED, when set, overrides the config seed.
CommandResult runCommand(const ConfigData& cfg, const std::string& command, const ArgMap& args);

const std::vector<std::string>& commandNames();

// 12-significant-digit, locale-independent scalar formatting used everywhere.
std::string fmtG(double v);

}  // namespace nidx
