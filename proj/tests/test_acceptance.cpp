// Acceptance gate: runs the full bench registry and reports one pass/fail
// line per acceptance criterion. Exit status is nonzero when any criterion
// fails, so ctest surfaces regressions directly.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "nidx/bench.hpp"

namespace {

struct Criterion {
  const char* name;
  std::vector<std::string> prefixes;  // bench case ids (exact or prefix with '*')
};

bool matches(const std::string& id, const std::string& pat) {
  if (!pat.empty() && pat.back() == '*') return id.rfind(pat.substr(0, pat.size() - 1), 0) == 0;
  return id == pat;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"01 rotation radius matches the closed-form M_p on lp planes", {"mp-ellp-*"}},
      {"02 real Euclidean identity has structurally exact index zero", {"hilbert-real-zero"}},
      {"03 complex Euclidean identity has index one half", {"hilbert-complex-half"}},
      {"04 interpolated max-root family hits both endpoints and midpoint", {"zr-*"}},
      {"05 gamma dual family index equals gamma", {"gamma-dual-*"}},
      {"06 rank-one index is the product of the factor indices", {"rankone-product"}},
      {"07 diagonal sums take the minimum of the block indices", {"sum-min-*"}},
      {"08 layered sum example yields its two known index values", {"ygamma-*"}},
      {"09 adjoint index never exceeds the direct index", {"adjoint-suite"}},
      {"10 extensions of domain and codomain preserve the index", {"extension-suite"}},
      {"11 derivative and spatial radius methods agree", {"method-agreement"}},
      {"12 norm perturbation characterization of the index lower bound", {"characterization"}},
      {"13 Lipschitz slope sampling reproduces the linear radius", {"lip-linear"}},
  };

  nidx::BenchReport rep = nidx::runBench("all");

  // Every registered case must belong to exactly one criterion.
  int unmatched = 0;
  for (const nidx::BenchOutcome& c : rep.cases) {
    int hits = 0;
    for (const Criterion& cr : criteria)
      for (const std::string& p : cr.prefixes)
        if (matches(c.id, p)) ++hits;
    if (hits != 1) {
      std::fprintf(stderr, "case %s matched %d criteria\n", c.id.c_str(), hits);
      ++unmatched;
    }
  }

  int failures = unmatched;
  for (const Criterion& cr : criteria) {
    bool pass = true;
    int covered = 0;
    for (const nidx::BenchOutcome& c : rep.cases)
      for (const std::string& p : cr.prefixes)
        if (matches(c.id, p)) {
          ++covered;
          pass = pass && c.pass;
        }
    if (covered == 0) pass = false;
    std::printf("%s  criterion %s\n", pass ? "PASS" : "FAIL", cr.name);
    if (!pass) ++failures;
  }

  std::printf("%s\n", failures == 0 ? "ACCEPTANCE: ALL CRITERIA PASS"
                                    : "ACCEPTANCE: FAILURES PRESENT");
  if (failures != 0) std::fputs(rep.text.c_str(), stdout);
  return failures == 0 ? 0 : 1;
}
