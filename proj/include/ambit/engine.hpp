#pragma once

// The run engine behind the C API and the CLI: owns the configured fixture,
// executes suites, renders the JSON report (stable key order, byte-stable
// for a fixed config) and produces CSV field dumps.

#include <memory>

#include "ambit/config.hpp"

namespace ambit {

inline constexpr const char* kVersion = "0.1.0";

class Engine {
  public:
    explicit Engine(const std::string& config_json);
    explicit Engine(RunConfig cfg);

    // Runs the requested suites (empty = the config's list, or every
    // applicable suite). Returns true when all suites passed.
    bool run(const std::vector<std::string>& suites = {});

    const VerificationReport& report() const { return report_; }
    std::string report_json() const;

    // CSV over an nx-by-ny grid in the first two chart coordinates (the
    // remaining two sit at the domain box midpoints). Grid points that fall
    // outside a predicate domain are omitted.
    std::string dump_csv(const std::vector<std::string>& fields, int nx,
                         int ny);

    static const std::vector<std::string>& known_dump_fields();

    const RunConfig& config() const { return cfg_; }

  private:
    RunConfig cfg_;
    Fixture fix_;
    std::vector<Coord4> samples_;
    VerificationReport report_;
};

}  // namespace ambit
