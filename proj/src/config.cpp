#include "nidx/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nidx {

namespace {

// ordered_json keeps declaration order, so spaces may reference any space
// declared above them and reports stay in config order.
using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw InputError(origin + ": " + msg);
}

void requireKeys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& origin, const std::string& where) {
  if (!obj.is_object()) fail(origin, where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(origin, where + ": unknown key \"" + it.key() + "\"");
}

double numberAt(const json& v, const std::string& origin, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
    return std::numeric_limits<double>::infinity();
  fail(origin, where + " must be a number (or \"inf\")");
}

// A scalar entry: plain number (real part) or [re, im].
Scalar scalarAt(const json& v, Field field, const std::string& origin,
                const std::string& where) {
  if (v.is_number()) return Scalar(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    if (field == Field::Real && v[1].get<double>() != 0.0)
      fail(origin, where + ": complex entry in a real-field config");
    return Scalar(v[0].get<double>(), v[1].get<double>());
  }
  fail(origin, where + " must be a number or an [re, im] pair");
}

Vec vectorAt(const json& v, Field field, const std::string& origin, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(origin, where + " must be a non-empty array");
  Vec out(field == Field::Complex ? 2 * v.size() : v.size(), 0.0);
  for (size_t j = 0; j < v.size(); ++j)
    setScalar(out, int(j), field, scalarAt(v[j], field, origin, where));
  return out;
}

SpacePtr parseSpace(const std::string& name, const json& entry, Field field,
                    const std::map<std::string, SpacePtr>& known, const std::string& origin) {
  const std::string where = "space \"" + name + "\"";
  requireKeys(entry, {"family", "params"}, origin, where);
  if (!entry.contains("family") || !entry["family"].is_string())
    fail(origin, where + ": missing \"family\" string");
  std::string familyName = entry["family"].get<std::string>();
  json params = entry.contains("params") ? entry["params"] : json::object();

  auto paramKeys = [&](const std::set<std::string>& allowed) {
    requireKeys(params, allowed, origin, where + " params");
  };
  auto needNumber = [&](const char* key) {
    if (!params.contains(key)) fail(origin, where + ": missing param \"" + key + "\"");
    return numberAt(params[key], origin, where + " param \"" + key + "\"");
  };

  if (familyName == "lp") {
    paramKeys({"dim", "p"});
    double dim = needNumber("dim"), p = needNumber("p");
    if (dim < 1 || dim != std::floor(dim)) fail(origin, where + ": dim must be a positive integer");
    if (!(p >= 1.0)) fail(origin, where + ": p must be in [1, inf]");
    return Space::makeLp(field, int(dim), p, name);
  }
  if (familyName == "wmr") {
    paramKeys({"r"});
    double r = needNumber("r");
    if (r < 0.0 || r > 1.0) fail(origin, where + ": r must be in [0, 1]");
    return Space::makeWeightedMaxRoot(field, r, name);
  }
  if (familyName == "gamma" || familyName == "gammadual") {
    paramKeys({"gamma"});
    double g = needNumber("gamma");
    if (g < 0.0 || g > 1.0) fail(origin, where + ": gamma must be in [0, 1]");
    return Space::makeGamma(field, g, familyName == "gammadual", name);
  }
  if (familyName == "poly") {
    paramKeys({"funcs"});
    if (!params.contains("funcs") || !params["funcs"].is_array() || params["funcs"].empty())
      fail(origin, where + ": missing \"funcs\" array");
    std::vector<Vec> funcs;
    for (const json& f : params["funcs"])
      funcs.push_back(vectorAt(f, field, origin, where + " functional"));
    return Space::makePolyhedral(field, std::move(funcs), name);
  }
  if (familyName == "sum") {
    paramKeys({"outer", "parts"});
    if (!params.contains("outer")) fail(origin, where + ": missing \"outer\"");
    double p = numberAt(params["outer"], origin, where + " outer");
    if (!(p >= 1.0)) fail(origin, where + ": outer exponent must be in [1, inf]");
    if (!params.contains("parts") || !params["parts"].is_array() || params["parts"].empty())
      fail(origin, where + ": missing \"parts\" array of space names");
    std::vector<SpacePtr> parts;
    for (const json& pn : params["parts"]) {
      if (!pn.is_string()) fail(origin, where + ": parts entries must be space names");
      auto it = known.find(pn.get<std::string>());
      if (it == known.end())
        fail(origin, where + ": undeclared part space \"" + pn.get<std::string>() + "\"");
      parts.push_back(it->second);
    }
    SpacePtr outer = Space::makeLp(Field::Real, int(parts.size()), p);
    return Space::makeAbsoluteSum(outer, std::move(parts), name);
  }
  if (familyName == "dualof") {
    paramKeys({"inner"});
    if (!params.contains("inner") || !params["inner"].is_string())
      fail(origin, where + ": missing \"inner\" space name");
    auto it = known.find(params["inner"].get<std::string>());
    if (it == known.end())
      fail(origin, where + ": undeclared inner space \"" +
                       params["inner"].get<std::string>() + "\"");
    return Space::makeDualOf(it->second, name);
  }
  fail(origin, where + ": unknown family \"" + familyName + "\"");
}

Operator parseOperator(const std::string& name, const json& entry, const ConfigData& cfg,
                       const std::string& origin) {
  const std::string where = "operator \"" + name + "\"";
  requireKeys(entry, {"domain", "codomain", "matrix", "normalize"}, origin, where);
  for (const char* key : {"domain", "codomain"})
    if (!entry.contains(key) || !entry[key].is_string())
      fail(origin, where + ": missing \"" + std::string(key) + "\" space name");
  auto lookup = [&](const std::string& ref) {
    auto it = cfg.spaces.find(ref);
    if (it == cfg.spaces.end()) fail(origin, where + ": undeclared space \"" + ref + "\"");
    return it->second;
  };
  SpacePtr dom = lookup(entry["domain"].get<std::string>());
  SpacePtr cod = lookup(entry["codomain"].get<std::string>());
  if (!entry.contains("matrix")) fail(origin, where + ": missing \"matrix\"");
  const json& m = entry["matrix"];
  Operator G = zeroOp(dom, cod);
  if (m.is_string() && m.get<std::string>() == "identity") {
    if (dom->dim() != cod->dim())
      fail(origin, where + ": \"identity\" requires equal domain and codomain dimensions");
    for (int i = 0; i < dom->dim(); ++i) G.at(i, i) = 1.0;
  } else if (m.is_array()) {
    if (int(m.size()) != cod->dim())
      fail(origin, where + ": matrix must have codomain-dim rows");
    for (int i = 0; i < cod->dim(); ++i) {
      if (!m[size_t(i)].is_array() || int(m[size_t(i)].size()) != dom->dim())
        fail(origin, where + ": each row must have domain-dim entries");
      for (int j = 0; j < dom->dim(); ++j)
        G.at(i, j) = scalarAt(m[size_t(i)][size_t(j)], cfg.field, origin, where + " matrix entry");
    }
  } else {
    fail(origin, where + ": matrix must be a row array or \"identity\"");
  }
  bool normalize = false;
  if (entry.contains("normalize")) {
    if (!entry["normalize"].is_boolean()) fail(origin, where + ": normalize must be a boolean");
    normalize = entry["normalize"].get<bool>();
  }
  if (normalize) G = normalizeOp(G, cfg.budget);
  return G;
}

}  // namespace

ConfigData parseConfigText(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": " + e.what());
  }
  requireKeys(root, {"field", "spaces", "operators", "budgets", "seed"}, origin, "config");

  ConfigData cfg;
  if (root.contains("field")) {
    if (!root["field"].is_string()) fail(origin, "field must be \"real\" or \"complex\"");
    std::string f = root["field"].get<std::string>();
    if (f == "real")
      cfg.field = Field::Real;
    else if (f == "complex")
      cfg.field = Field::Complex;
    else
      fail(origin, "field must be \"real\" or \"complex\"");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) fail(origin, "seed must be an integer");
    cfg.budget.seed = root["seed"].get<uint64_t>();
  }
  if (root.contains("budgets")) {
    const json& b = root["budgets"];
    requireKeys(b, {"starts", "iterations", "gridDepth"}, origin, "budgets");
    if (b.contains("starts")) cfg.budget.starts = int(numberAt(b["starts"], origin, "starts"));
    if (b.contains("iterations"))
      cfg.budget.iterations = int(numberAt(b["iterations"], origin, "iterations"));
    if (b.contains("gridDepth"))
      cfg.budget.gridDepth = int(numberAt(b["gridDepth"], origin, "gridDepth"));
    if (cfg.budget.starts < 0 || cfg.budget.iterations < 1 || cfg.budget.gridDepth < 1)
      fail(origin, "budgets values must be positive");
  }
  if (root.contains("spaces")) {
    if (!root["spaces"].is_object()) fail(origin, "spaces must be an object of named entries");
    for (auto it = root["spaces"].begin(); it != root["spaces"].end(); ++it) {
      cfg.spaces[it.key()] = parseSpace(it.key(), it.value(), cfg.field, cfg.spaces, origin);
      cfg.spaceOrder.push_back(it.key());
    }
  }
  if (root.contains("operators")) {
    if (!root["operators"].is_object())
      fail(origin, "operators must be an object of named entries");
    for (auto it = root["operators"].begin(); it != root["operators"].end(); ++it) {
      cfg.operators.emplace(it.key(), parseOperator(it.key(), it.value(), cfg, origin));
      cfg.operatorOrder.push_back(it.key());
    }
  }
  return cfg;
}

ConfigData parseConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config file not found: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfigText(ss.str(), path);
}

}  // namespace nidx
