#pragma once

#include <string>
#include <vector>

namespace nidx {

struct BenchOutcome {
  std::string id;
  bool pass = false;
  double observedLo = 0.0;
  double observedHi = 0.0;
  std::string expected;
  double seconds = 0.0;
  std::string detail;
};

struct BenchReport {
  std::vector<BenchOutcome> cases;
  bool allPass = true;
  std::string text;  // plain table
  std::string csv;   // case,status,observed_lo,observed_hi,expected,seconds
};

const std::vector<std::string>& benchCaseIds();

// filter: "all", an exact id, or a prefix ending in '*'.
BenchReport runBench(const std::string& filter);

}  // namespace nidx
