#include "nidx/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "nidx/bench.hpp"
#include "nidx/lipschitz.hpp"
#include "nidx/numindex.hpp"

namespace nidx {

namespace {

std::string getArg(const ArgMap& args, const std::string& key) {
  auto it = args.find(key);
  if (it == args.end()) throw InputError("missing required argument --" + key);
  return it->second;
}

std::string getArg(const ArgMap& args, const std::string& key, const std::string& dflt) {
  auto it = args.find(key);
  return it == args.end() ? dflt : it->second;
}

double numArg(const ArgMap& args, const std::string& key, double dflt) {
  auto it = args.find(key);
  if (it == args.end()) return dflt;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw InputError("");
    return v;
  } catch (...) {
    throw InputError("argument --" + key + " must be a number, got \"" + it->second + "\"");
  }
}

SpacePtr spaceArg(const ConfigData& cfg, const ArgMap& args, const std::string& key) {
  std::string name = getArg(args, key);
  auto it = cfg.spaces.find(name);
  if (it == cfg.spaces.end()) throw InputError("unknown space \"" + name + "\"");
  return it->second;
}

Operator opArg(const ConfigData& cfg, const ArgMap& args, const std::string& key) {
  std::string name = getArg(args, key);
  auto it = cfg.operators.find(name);
  if (it == cfg.operators.end()) throw InputError("unknown operator \"" + name + "\"");
  return it->second;
}

// Comma-separated coordinates; complex spaces take either realified 2d values
// (re,im interleaved) or d values read as real parts.
Vec vecArg(const SpacePtr& s, const ArgMap& args, const std::string& key) {
  std::string text = getArg(args, key);
  Vec vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw InputError("");
    } catch (...) {
      throw InputError("argument --" + key + ": bad coordinate \"" + tok + "\"");
    }
  }
  if (int(vals.size()) == s->realDim()) return vals;
  if (int(vals.size()) == s->dim() && s->field() == Field::Complex) {
    Vec out(size_t(s->realDim()), 0.0);
    for (int j = 0; j < s->dim(); ++j) out[size_t(2 * j)] = vals[size_t(j)];
    return out;
  }
  throw InputError("argument --" + key + ": expected " + std::to_string(s->realDim()) +
                   " coordinates for space " + s->label());
}

std::string fmtVec(const Vec& v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmtG(v[i]);
  }
  return out + ")";
}

std::string fmtInterval(const Interval& iv) {
  return "[" + fmtG(iv.lo) + ", " + fmtG(iv.hi) + "]";
}

const char* methodName(IndexMethod m) {
  switch (m) {
    case IndexMethod::Structural: return "structural";
    case IndexMethod::BruteForce: return "bruteforce";
    default: return "optimizer";
  }
}

CommandResult cmdNorm(const ConfigData& cfg, const ArgMap& args) {
  SpacePtr s = spaceArg(cfg, args, "space");
  Vec x = vecArg(s, args, "x");
  CommandResult r;
  std::ostringstream out;
  out << "space: " << s->label() << " (" << s->familyName() << ", dim " << s->dim() << ")\n"
      << "x: " << fmtVec(x) << "\n"
      << "norm = " << fmtG(s->norm(x)) << "\n"
      << "dualNorm = " << fmtG(s->dualNorm(x)) << "\n";
  r.text = out.str();
  return r;
}

CommandResult cmdOpNorm(const ConfigData& cfg, const ArgMap& args) {
  Operator G = opArg(cfg, args, "G");
  OpNormResult n = opNorm(G, cfg.budget);
  CommandResult r;
  std::ostringstream out;
  out << "operator: " << getArg(args, "G") << " : " << G.dom->label() << " -> "
      << G.cod->label() << "\n"
      << "opnorm in " << fmtInterval(n.iv) << "\n"
      << "certified: " << (n.certified ? "yes" : "no") << "\n";
  r.text = out.str();
  return r;
}

CommandResult cmdVRadius(const ConfigData& cfg, const ArgMap& args) {
  Operator G = opArg(cfg, args, "G");
  Operator T = opArg(cfg, args, "T");
  RadiusEstimate e = vRadius(G, T, cfg.budget);
  CommandResult r;
  std::ostringstream out;
  out << "vradius(" << getArg(args, "G") << ", " << getArg(args, "T") << ") in "
      << fmtInterval(e.value) << "\n"
      << "lower certified: " << (e.lowerCertified ? "yes" : "no") << "\n";
  r.text = out.str();
  return r;
}

CommandResult cmdNIndex(const ConfigData& cfg, const ArgMap& args) {
  Operator G = opArg(cfg, args, "G");
  std::string method = getArg(args, "method", "auto");
  IndexReport rep;
  if (method == "auto") {
    rep = nIndex(G, cfg.budget);
  } else if (method == "structural") {
    auto s = nIndexStructural(G, cfg.budget);
    if (!s) throw ComputeError("no structural rule applies to this operator");
    rep = *s;
  } else if (method == "optimizer") {
    rep = nIndexUpper(G, cfg.budget);
  } else if (method == "bruteforce") {
    rep = nIndexBruteForce(G, numArg(args, "mesh", 0.1), cfg.budget);
  } else {
    throw InputError("--method must be auto|structural|optimizer|bruteforce");
  }
  CommandResult r;
  std::ostringstream out;
  out << "nindex(" << getArg(args, "G") << ") in " << fmtInterval(rep.value) << "\n"
      << "method: " << methodName(rep.method) << "\n";
  if (!rep.notes.empty()) out << "notes: " << rep.notes << "\n";
  r.text = out.str();
  return r;
}

CommandResult cmdRange(const ConfigData& cfg, const ArgMap& args) {
  Operator G = opArg(cfg, args, "G");
  Operator T = opArg(cfg, args, "T");
  double delta = numArg(args, "delta", 1e-2);
  int count = int(numArg(args, "count", 200));
  RangeCloud c = rangeCloud(G, T, delta, count, cfg.budget.seed);
  CommandResult r;
  std::ostringstream out;
  out << "range cloud for (" << getArg(args, "G") << ", " << getArg(args, "T")
      << "), delta = " << fmtG(delta) << "\n"
      << "samples: " << c.samples << ", recorded: " << c.points.size() << "\n"
      << "hullRadius = " << fmtG(c.hullRadius) << "\n";
  r.text = out.str();
  r.csv = rangeCloudCsv(c);
  return r;
}

CommandResult cmdScan(const ConfigData& cfg, const ArgMap& args) {
  SpacePtr X = spaceArg(cfg, args, "X");
  SpacePtr Y = spaceArg(cfg, args, "Y");
  int count = int(numArg(args, "count", 6));
  auto reports = indexValueScan(X, Y, count, cfg.budget);
  CommandResult r;
  std::ostringstream out;
  out << "index scan " << X->label() << " -> " << Y->label() << " (" << reports.size()
      << " distinct values)\n";
  for (size_t k = 0; k < reports.size(); ++k)
    out << k << ": " << fmtInterval(reports[k].value) << " " << methodName(reports[k].method)
        << "\n";
  r.text = out.str();
  return r;
}

CommandResult cmdLip(const ConfigData& cfg, const ArgMap& args) {
  SpacePtr s = spaceArg(cfg, args, "space");
  std::string mapName = getArg(args, "map", "radial");
  LipschitzMap F;
  if (mapName == "radial") {
    F = radialMap(s);
  } else if (mapName == "abs") {
    F = componentAbsMap(s);
  } else if (mapName == "linear") {
    Operator A = opArg(cfg, args, "G");
    F = linearMap(A);
  } else {
    throw InputError("--map must be radial|abs|linear");
  }
  int pairs = int(numArg(args, "pairs", 2000));
  double lower = lipRadiusLower(F, pairs, cfg.budget.seed);
  RangeCloud c = lipRangeSample(F, std::min(pairs, 500), cfg.budget.seed);
  CommandResult r;
  std::ostringstream out;
  out << "lipschitz map: " << mapName << " on " << s->label() << "\n"
      << "pairs: " << pairs << "\n"
      << "lipRadiusLower = " << fmtG(lower) << "\n";
  r.text = out.str();
  r.csv = rangeCloudCsv(c);
  return r;
}

CommandResult cmdBench(const ConfigData&, const ArgMap& args) {
  BenchReport rep = runBench(getArg(args, "filter", "all"));
  CommandResult r;
  r.text = rep.text;
  r.csv = rep.csv;
  r.ok = rep.allPass;
  return r;
}

}  // namespace

std::string fmtG(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

const std::vector<std::string>& commandNames() {
  static const std::vector<std::string> names = {"norm", "opnorm", "vradius", "nindex",
                                                 "range", "scan",   "lip",     "bench"};
  return names;
}

CommandResult runCommand(const ConfigData& cfg, const std::string& command, const ArgMap& args) {
  ConfigData local = cfg;
  if (const char* env = std::getenv("NUMINDEX_SEED")) {
    try {
      local.budget.seed = std::stoull(env);
    } catch (...) {
      throw InputError("NUMINDEX_SEED must be an integer");
    }
  }
  if (command == "norm") return cmdNorm(local, args);
  if (command == "opnorm") return cmdOpNorm(local, args);
  if (command == "vradius") return cmdVRadius(local, args);
  if (command == "nindex") return cmdNIndex(local, args);
  if (command == "range") return cmdRange(local, args);
  if (command == "scan") return cmdScan(local, args);
  if (command == "lip") return cmdLip(local, args);
  if (command == "bench") return cmdBench(local, args);
  throw InputError("unknown command \"" + command + "\"");
}

}  // namespace nidx
