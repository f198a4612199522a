// Command-line front end. Links only the C API (numindex.h).
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "numindex.h"

namespace {

struct SubSpec {
  std::string name;
  std::string help;
  // option name -> help; values land in the arg map under the option name
  std::vector<std::pair<std::string, std::string>> options;
};

const std::vector<SubSpec>& subSpecs() {
  static const std::vector<SubSpec> specs = {
      {"norm",
       "Evaluate the norm and dual norm of a vector in a configured space",
       {{"space", "space name from the config"},
        {"x", "comma-separated coordinates"}}},
      {"opnorm", "Operator norm enclosure", {{"G", "operator name"}}},
      {"vradius",
       "Numerical radius of T with respect to the norm-one operator G",
       {{"G", "reference operator name"}, {"T", "operator name"}}},
      {"nindex",
       "Numerical index enclosure for an operator",
       {{"G", "operator name"},
        {"method", "auto|structural|optimizer|bruteforce (default auto)"},
        {"mesh", "operator-sphere mesh for bruteforce (default 0.1)"}}},
      {"range",
       "Sample the numerical range cloud of (G, T)",
       {{"G", "reference operator name"},
        {"T", "operator name"},
        {"delta", "alignment slack (default 1e-2)"},
        {"count", "sample count (default 200)"}}},
      {"scan",
       "Scan distinct index values between two spaces",
       {{"X", "domain space name"},
        {"Y", "codomain space name"},
        {"count", "operators to try (default 6)"}}},
      {"lip",
       "Lipschitz numerical radius lower bound by pair sampling",
       {{"space", "space name"},
        {"map", "radial|abs|linear (default radial)"},
        {"G", "operator name when map=linear"},
        {"pairs", "pair count (default 2000)"}}},
      {"bench",
       "Run the reproduction benchmark suite",
       {{"filter", "all, exact id, or prefix ending in * (default all)"}}},
  };
  return specs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numindex: numerical index and numerical radius computations"};
  app.require_subcommand(1);

  std::string configPath;
  std::string outPath;
  struct SubState {
    CLI::App* sub = nullptr;
    std::map<std::string, std::string> args;
  };
  std::map<std::string, SubState> states;

  for (const SubSpec& spec : subSpecs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    SubState& st = states[spec.name];
    st.sub = sub;
    sub->add_option("-c,--config", configPath, "JSON config file");
    sub->add_option("-o,--out", outPath, "write CSV output to this file");
    for (const auto& [opt, help] : spec.options) {
      std::string flags = "--" + opt;
      if (opt.size() == 1) flags = "-" + opt + "," + flags;
      sub->add_option_function<std::string>(
          flags, [&st, key = opt](const std::string& v) { st.args[key] = v; }, help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const SubState* active = nullptr;
  std::string command;
  for (auto& [name, st] : states)
    if (st.sub->parsed()) {
      active = &st;
      command = name;
    }
  if (!active) {
    std::cerr << "error: no subcommand given\n";
    return 2;
  }
  if (configPath.empty() && command != "bench") {
    std::cerr << "error: --config is required\n";
    return 2;
  }

  numindex_workspace* ws = nullptr;
  int rc = configPath.empty() ? numindex_workspace_from_json("{}", &ws)
                              : numindex_workspace_from_file(configPath.c_str(), &ws);
  if (rc != NUMINDEX_OK) {
    std::cerr << "error: " << numindex_last_error() << "\n";
    return rc;
  }

  std::vector<const char*> keys, values;
  for (const auto& [k, v] : active->args) {
    keys.push_back(k.c_str());
    values.push_back(v.c_str());
  }
  char* text = nullptr;
  char* csv = nullptr;
  rc = numindex_run(ws, command.c_str(), keys.data(), values.data(), int(keys.size()), &text,
                    &csv);
  if (text) {
    std::cout << text;
    numindex_string_free(text);
  }
  if (rc != NUMINDEX_OK && !(rc == NUMINDEX_ERR_COMPUTE && text)) {
    std::cerr << "error: " << numindex_last_error() << "\n";
  }
  if (csv) {
    if (!outPath.empty()) {
      std::ofstream out(outPath, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write " << outPath << "\n";
        numindex_string_free(csv);
        numindex_workspace_free(ws);
        return 2;
      }
      out << csv;
    }
    numindex_string_free(csv);
  }
  numindex_workspace_free(ws);
  return rc;
}
