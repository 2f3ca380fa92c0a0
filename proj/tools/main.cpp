// ambit command-line front end. Talks to the engine exclusively through the
// C API in ambit.h, the same surface other language bindings would use.
//
//   ambit verify --config run.json [--suite name]...
//   ambit dump   --config run.json --fields f_plus,scal --grid 20,20 [--out f.csv]
//   ambit schema
//
// Exit codes: 0 full pass, 1 suite failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ambit.h"

namespace {

int fail_config(const std::string& msg) {
    std::cerr << "ambit: config error: " << msg << "\n";
    return 2;
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    ok = true;
    return ss.str();
}

// The report knows where it wants to be written; peek without a JSON
// dependency in the CLI.
std::string report_path_from_config(const std::string& config) {
    const auto pos = config.find("\"report\"");
    if (pos == std::string::npos) return {};
    const auto colon = config.find(':', pos);
    const auto q1 = config.find('"', colon + 1);
    const auto q2 = config.find('"', q1 + 1);
    if (colon == std::string::npos || q1 == std::string::npos ||
        q2 == std::string::npos)
        return {};
    return config.substr(q1 + 1, q2 - q1 - 1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ambit -- numerical verification of 4-dimensional "
                 "ambikähler geometries with *-Killing 2-forms"};
    app.require_subcommand(1);

    std::string config_path, fields, grid = "20,20", out_path;
    std::vector<std::string> suites;

    CLI::App* verify = app.add_subcommand(
        "verify", "build the configured geometry and run verification suites");
    verify->add_option("--config", config_path, "JSON run configuration")
        ->required();
    verify->add_option("--suite", suites,
                       "run only this suite (repeatable)");

    CLI::App* dump = app.add_subcommand(
        "dump", "write scalar fields over a coordinate grid as CSV");
    dump->add_option("--config", config_path, "JSON run configuration")
        ->required();
    dump->add_option("--fields", fields,
                     "comma-separated field names (empty = header only)");
    dump->add_option("--grid", grid, "grid size as nx,ny (default 20,20)");
    dump->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* schema =
        app.add_subcommand("schema", "print the configuration schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (schema->parsed()) {
        std::cout << ambit_config_schema() << "\n";
        return 0;
    }

    bool ok = false;
    const std::string config = read_file(config_path, ok);
    if (!ok) return fail_config("cannot read " + config_path);

    ambit_engine* engine = ambit_engine_create(config.c_str());
    if (!engine) return fail_config(ambit_last_error());

    int rc = 0;
    if (verify->parsed()) {
        std::string suites_csv;
        for (const std::string& s : suites) {
            if (!suites_csv.empty()) suites_csv += ",";
            suites_csv += s;
        }
        const ambit_status st = ambit_engine_run(
            engine, suites_csv.empty() ? nullptr : suites_csv.c_str());
        if (st == AMBIT_OK || st == AMBIT_SUITE_FAILURE) {
            const char* report = ambit_engine_report(engine);
            const std::string to = report_path_from_config(config);
            if (!to.empty()) {
                std::ofstream outf(to, std::ios::binary);
                if (!outf) {
                    ambit_engine_destroy(engine);
                    return fail_config("cannot write report to " + to);
                }
                outf << report;
                std::cerr << "ambit: report written to " << to << "\n";
            } else {
                std::cout << report;
            }
            if (st == AMBIT_SUITE_FAILURE) {
                // Name the failing suites on stderr for quick triage.
                try {
                    const auto j = nlohmann::json::parse(report);
                    for (const auto& s : j.at("suites"))
                        if (!s.at("pass").get<bool>())
                            std::cerr << "ambit: suite FAILED: "
                                      << s.at("suite").get<std::string>()
                                      << "\n";
                } catch (...) {
                }
                std::cerr << "ambit: verification FAILED\n";
                rc = 1;
            }
        } else {
            ambit_engine_destroy(engine);
            return fail_config(ambit_last_error());
        }
    } else if (dump->parsed()) {
        int nx = 0, ny = 0;
        if (std::sscanf(grid.c_str(), "%d,%d", &nx, &ny) != 2 || nx < 1 ||
            ny < 1) {
            ambit_engine_destroy(engine);
            return fail_config("bad --grid, expected nx,ny");
        }
        char* csv = nullptr;
        const ambit_status st =
            ambit_engine_dump(engine, fields.empty() ? nullptr : fields.c_str(),
                              nx, ny, &csv);
        if (st != AMBIT_OK) {
            ambit_engine_destroy(engine);
            return fail_config(ambit_last_error());
        }
        if (!out_path.empty()) {
            std::ofstream outf(out_path, std::ios::binary);
            if (!outf) {
                ambit_free(csv);
                ambit_engine_destroy(engine);
                return fail_config("cannot write " + out_path);
            }
            outf << csv;
        } else {
            std::cout << csv;
        }
        ambit_free(csv);
    }
    ambit_engine_destroy(engine);
    return rc;
}
