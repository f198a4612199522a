#pragma once

#include <map>

#include "nidx/operators.hpp"

namespace nidx {

// Parsed workspace description: named spaces and operators plus run defaults.
struct ConfigData {
  Field field = Field::Real;
  std::vector<std::string> spaceOrder;
  std::map<std::string, SpacePtr> spaces;
  std::vector<std::string> operatorOrder;
  std::map<std::string, Operator> operators;
  Budget budget;
};

// Strict JSON schema: top-level keys field, spaces, operators, budgets, seed;
// unknown keys anywhere are errors. Complex scalars are [re, im] pairs.
ConfigData parseConfigText(const std::string& text, const std::string& origin);
ConfigData parseConfigFile(const std::string& path);

}  // namespace nidx
