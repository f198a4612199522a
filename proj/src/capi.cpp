#include "numindex.h"

#include <cstring>
#include <new>

#include "nidx/commands.hpp"

using nidx::ComputeError;
using nidx::InputError;

struct numindex_workspace {
  nidx::ConfigData cfg;
};

namespace {

thread_local std::string lastError;

char* dupString(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int guard(const std::function<void()>& body) {
  try {
    body();
    lastError.clear();
    return NUMINDEX_OK;
  } catch (const InputError& e) {
    lastError = e.what();
    return NUMINDEX_ERR_INPUT;
  } catch (const ComputeError& e) {
    lastError = e.what();
    return NUMINDEX_ERR_COMPUTE;
  } catch (const std::exception& e) {
    lastError = e.what();
    return NUMINDEX_ERR_COMPUTE;
  }
}

}  // namespace

extern "C" {

int numindex_workspace_from_file(const char* path, numindex_workspace** out) {
  if (!path || !out) {
    lastError = "null argument";
    return NUMINDEX_ERR_INPUT;
  }
  *out = nullptr;
  return guard([&] {
    auto* ws = new numindex_workspace{nidx::parseConfigFile(path)};
    *out = ws;
  });
}

int numindex_workspace_from_json(const char* json_text, numindex_workspace** out) {
  if (!json_text || !out) {
    lastError = "null argument";
    return NUMINDEX_ERR_INPUT;
  }
  *out = nullptr;
  return guard([&] {
    auto* ws = new numindex_workspace{nidx::parseConfigText(json_text, "<json>")};
    *out = ws;
  });
}

void numindex_workspace_free(numindex_workspace* ws) { delete ws; }

int numindex_run(numindex_workspace* ws, const char* command, const char* const* keys,
                 const char* const* values, int nargs, char** text_out, char** csv_out) {
  if (!ws || !command || (nargs > 0 && (!keys || !values))) {
    lastError = "null argument";
    return NUMINDEX_ERR_INPUT;
  }
  if (text_out) *text_out = nullptr;
  if (csv_out) *csv_out = nullptr;
  bool diagnostic = false;
  int rc = guard([&] {
    nidx::ArgMap args;
    for (int i = 0; i < nargs; ++i) {
      if (!keys[i] || !values[i]) throw InputError("null argument entry");
      args[keys[i]] = values[i];
    }
    nidx::CommandResult r = nidx::runCommand(ws->cfg, command, args);
    if (text_out) *text_out = dupString(r.text);
    if (csv_out && !r.csv.empty()) *csv_out = dupString(r.csv);
    diagnostic = !r.ok;
  });
  if (rc == NUMINDEX_OK && diagnostic) {
    lastError = "command reported failing results";
    return NUMINDEX_ERR_COMPUTE;
  }
  return rc;
}

const char* numindex_last_error(void) { return lastError.c_str(); }

void numindex_string_free(char* s) { delete[] s; }

}  // extern "C"
