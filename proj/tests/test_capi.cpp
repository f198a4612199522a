#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "numindex.h"

namespace {

const char* kConfig = R"({
  "field": "real",
  "spaces": {
    "l2": {"family": "lp", "params": {"dim": 2, "p": 2}},
    "linf2": {"family": "lp", "params": {"dim": 2, "p": "inf"}}
  },
  "operators": {
    "Gid": {"domain": "linf2", "codomain": "linf2", "matrix": "identity"},
    "rot": {"domain": "l2", "codomain": "l2", "matrix": [[0, 1], [-1, 0]]}
  },
  "seed": 3
})";

}  // namespace

TEST_CASE("workspace round trip: create, run, free") {
  numindex_workspace* ws = nullptr;
  REQUIRE(numindex_workspace_from_json(kConfig, &ws) == NUMINDEX_OK);
  REQUIRE(ws != nullptr);

  const char* keys[] = {"space", "x"};
  const char* vals[] = {"l2", "3,4"};
  char* text = nullptr;
  char* csv = nullptr;
  REQUIRE(numindex_run(ws, "norm", keys, vals, 2, &text, &csv) == NUMINDEX_OK);
  REQUIRE(text != nullptr);
  REQUIRE(std::string(text).find("5") != std::string::npos);
  numindex_string_free(text);
  numindex_string_free(csv);

  // out-pointers are optional
  REQUIRE(numindex_run(ws, "norm", keys, vals, 2, nullptr, nullptr) == NUMINDEX_OK);
  numindex_workspace_free(ws);
}

TEST_CASE("csv-producing command returns a payload") {
  numindex_workspace* ws = nullptr;
  REQUIRE(numindex_workspace_from_json(kConfig, &ws) == NUMINDEX_OK);
  const char* keys[] = {"G", "T", "count"};
  const char* vals[] = {"Gid", "rot", "40"};
  char* csv = nullptr;
  // rot maps linf2 to the wrong spaces -- expect an input error first
  REQUIRE(numindex_run(ws, "range", keys, vals, 3, nullptr, &csv) == NUMINDEX_ERR_INPUT);
  const char* valsOk[] = {"Gid", "Gid", "40"};
  REQUIRE(numindex_run(ws, "range", keys, valsOk, 3, nullptr, &csv) == NUMINDEX_OK);
  REQUIRE(csv != nullptr);
  REQUIRE(std::strncmp(csv, "re,im", 5) == 0);
  numindex_string_free(csv);
  numindex_workspace_free(ws);
}

TEST_CASE("input errors yield code 2 and a message") {
  numindex_workspace* ws = nullptr;
  REQUIRE(numindex_workspace_from_json("{\"field\":\"real\",\"spaces\":{},\"operators\":{},\"bogus\":1}",
                                       &ws) == NUMINDEX_ERR_INPUT);
  REQUIRE(ws == nullptr);
  REQUIRE(std::string(numindex_last_error()).find("bogus") != std::string::npos);

  REQUIRE(numindex_workspace_from_json("not json at all", &ws) == NUMINDEX_ERR_INPUT);
  REQUIRE(numindex_workspace_from_file("/no/such/file.json", &ws) == NUMINDEX_ERR_INPUT);

  REQUIRE(numindex_workspace_from_json(kConfig, &ws) == NUMINDEX_OK);
  REQUIRE(numindex_run(ws, "frobnicate", nullptr, nullptr, 0, nullptr, nullptr) ==
          NUMINDEX_ERR_INPUT);
  REQUIRE(numindex_last_error()[0] != '\0');
  const char* keys[] = {"G"};
  const char* vals[] = {"no_such_op"};
  REQUIRE(numindex_run(ws, "opnorm", keys, vals, 1, nullptr, nullptr) == NUMINDEX_ERR_INPUT);
  numindex_workspace_free(ws);
}

TEST_CASE("null argument handling") {
  REQUIRE(numindex_workspace_from_json(nullptr, nullptr) == NUMINDEX_ERR_INPUT);
  REQUIRE(numindex_run(nullptr, "norm", nullptr, nullptr, 0, nullptr, nullptr) ==
          NUMINDEX_ERR_INPUT);
  numindex_workspace_free(nullptr);  // must be a no-op
  numindex_string_free(nullptr);     // must be a no-op
}
