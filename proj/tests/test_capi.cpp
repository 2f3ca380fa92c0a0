// Exercises the shared-library surface exactly as an external client would:
// JSON in, status codes out, opaque handles, plus the CLI binary end to end
// (exit codes 0/1/2).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "ambit.h"

namespace {

const char* kGood = R"({
  "geometry": {"family": "sphere", "lambda": 1.0, "mu": 2.0},
  "samples": 15,
  "seed": 4,
  "suites": ["star-killing", "momenta"]
})";

}  // namespace

TEST_CASE("version and schema are static strings") {
    CHECK(std::strlen(ambit_version()) > 0);
    CHECK(std::string(ambit_config_schema()).find("family") !=
          std::string::npos);
}

TEST_CASE("create / run / report / destroy") {
    ambit_engine* e = ambit_engine_create(kGood);
    REQUIRE(e != nullptr);
    CHECK(ambit_engine_report(e) == nullptr);  // nothing ran yet
    CHECK(ambit_engine_run(e, nullptr) == AMBIT_OK);
    const char* report = ambit_engine_report(e);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("\"overall_pass\": true") !=
          std::string::npos);
    ambit_engine_destroy(e);
}

TEST_CASE("config errors come back as NULL + message, not crashes") {
    CHECK(ambit_engine_create(nullptr) == nullptr);
    CHECK(ambit_engine_create("{nope") == nullptr);
    CHECK(std::string(ambit_last_error()).find("JSON") != std::string::npos);
    CHECK(ambit_engine_create(R"({"geometry": {"family": "bogus"}})") ==
          nullptr);
    CHECK(std::string(ambit_last_error()).find("family") != std::string::npos);
}

TEST_CASE("status codes mirror the CLI exit codes") {
    // Suite failure -> 1.
    const char* broken = R"({
      "geometry": {"family": "sphere", "lambda": 1.0, "mu": 2.0},
      "samples": 8, "seed": 0, "suites": ["star-killing"],
      "perturbation": {"metric_epsilon": 0.01}
    })";
    ambit_engine* e = ambit_engine_create(broken);
    REQUIRE(e != nullptr);
    CHECK(ambit_engine_run(e, nullptr) == AMBIT_SUITE_FAILURE);
    ambit_engine_destroy(e);

    // Bad suite selection -> config error.
    ambit_engine* e2 = ambit_engine_create(kGood);
    REQUIRE(e2 != nullptr);
    CHECK(ambit_engine_run(e2, "definitely-not-a-suite") ==
          AMBIT_CONFIG_ERROR);
    ambit_engine_destroy(e2);
}

TEST_CASE("byte-stable reports across two engines with the same config") {
    ambit_engine* a = ambit_engine_create(kGood);
    ambit_engine* b = ambit_engine_create(kGood);
    REQUIRE(a);
    REQUIRE(b);
    ambit_engine_run(a, nullptr);
    ambit_engine_run(b, nullptr);
    CHECK(std::string(ambit_engine_report(a)) ==
          std::string(ambit_engine_report(b)));
    ambit_engine_destroy(a);
    ambit_engine_destroy(b);
}

TEST_CASE("dump: CSV buffer ownership and error codes") {
    ambit_engine* e = ambit_engine_create(kGood);
    REQUIRE(e);
    char* csv = nullptr;
    CHECK(ambit_engine_dump(e, "f_plus,scal", 4, 4, &csv) == AMBIT_OK);
    REQUIRE(csv != nullptr);
    CHECK(std::string(csv).find("c0,c1,c2,c3,f_plus,scal") == 0);
    ambit_free(csv);
    csv = nullptr;
    CHECK(ambit_engine_dump(e, "nope", 4, 4, &csv) == AMBIT_CONFIG_ERROR);
    CHECK(csv == nullptr);
    ambit_engine_destroy(e);
}

#ifdef AMBIT_CLI_PATH
#include <sys/wait.h>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AMBIT_CLI_PATH) + " " + args +
                            " > /dev/null 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string write_temp(const char* name, const std::string& content) {
    std::string path = std::string("/tmp/ambit_capi_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("CLI exit codes: 0 pass, 1 suite failure, 2 config error") {
    const std::string good = write_temp("good.json", kGood);
    CHECK(run_cli("verify --config " + good) == 0);
    CHECK(run_cli("verify --config " + good + " --suite star-killing") == 0);
    CHECK(run_cli("verify --config " + good + " --suite sphere-formulas "
                  "--suite momenta") == 0);
    CHECK(run_cli("dump --config " + good + " --fields f_plus --grid 3,3") ==
          0);
    CHECK(run_cli("schema") == 0);

    const std::string broken = write_temp("broken.json", R"({
      "geometry": {"family": "sphere", "lambda": 1.0, "mu": 2.0},
      "samples": 8, "seed": 0, "suites": ["star-killing"],
      "perturbation": {"metric_epsilon": 0.01}
    })");
    CHECK(run_cli("verify --config " + broken) == 1);

    const std::string bad = write_temp("bad.json", "{not json");
    CHECK(run_cli("verify --config " + bad) == 2);
    CHECK(run_cli("verify --config /nonexistent/x.json") == 2);
    CHECK(run_cli("dump --config " + good + " --fields nope --grid 3,3") == 2);
    CHECK(run_cli("dump --config " + good + " --fields f_plus --grid bad") ==
          2);
}
#endif
