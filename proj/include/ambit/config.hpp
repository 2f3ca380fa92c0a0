#pragma once

// JSON run configuration: which geometry family to build, its parameters,
// the sample budget, the suites to run and per-suite tolerance overrides.
// Numbers are 64-bit floats; polynomial profiles are coefficient arrays,
// lowest degree first.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambit/verify.hpp"

namespace ambit {

struct RunConfig {
    std::string family;  // ambitoric | sphere | deformed-sphere | calabi | product

    // ambitoric: polynomial profiles or the builtin sphere pair
    std::vector<double> A_poly, B_poly;
    bool builtin_sphere_profiles = false;
    std::array<double, 2> x_range{{0.0, 0.0}};  // unset = derive from builtin
    std::array<double, 2> y_range{{0.0, 0.0}};

    // sphere / deformed-sphere
    double lambda = 1.0, mu = 2.0;
    std::optional<std::array<std::array<double, 2>, 4>> chart_box;
    double epsilon = 0.01;  // deformation bump amplitude

    // calabi
    double k = 2.0;
    std::vector<double> phi_poly;  // empty with phi_tanh -> 2 + tanh(t)
    bool phi_tanh = true;
    std::array<double, 2> t_range{{0.3, 1.5}};

    // product: phi = polynomial in u
    std::vector<double> product_phi_poly{{2.0, 1.0}};

    double margin = 1e-2;
    int samples = 100;
    std::uint64_t seed = 0;
    std::vector<std::string> suites;  // empty = all applicable
    std::map<std::string, double> tolerance_override;
    double metric_epsilon = 0.0;  // negative-control metric perturbation
    std::string report_path;      // empty = stdout
};

// Throws config_error with a field-path diagnostic on anything malformed.
RunConfig parse_config(const std::string& json_text);

// The published configuration schema (JSON text).
const std::string& config_schema();

// Build the geometry family the config names; validates parameters against
// the constructor preconditions.
Fixture build_fixture(const RunConfig& cfg);

}  // namespace ambit
