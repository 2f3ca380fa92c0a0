#pragma once

// Named verification suites over a constructed geometry family, and the
// machine-readable report they produce. Each check row records the identity
// verified (as a formula, so reports are traceable to the equation), the
// residual statistics over the sample set, the tolerance and the verdict.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambit/ansatz.hpp"

namespace ambit {

struct CheckRow {
    std::string identity;  // short name
    std::string anchor;    // the equation being verified, human-readable
    int n_points = 0;
    double max_residual = 0.0;
    double rms_residual = 0.0;
    double tolerance = 0.0;
    // Most rows require max <= tolerance; genericity controls require
    // max >= tolerance (the quantity must NOT vanish).
    bool lower_bound = false;
    bool pass = false;
    bool skipped = false;  // degenerate at this fixture; excluded from verdict
    std::string note;
};

struct SuiteResult {
    std::string name;
    std::vector<CheckRow> rows;
    bool pass = true;
};

struct VerificationReport {
    std::string version;
    std::uint64_t seed = 0;
    std::string geometry;
    std::vector<SuiteResult> suites;
    bool overall_pass = true;
};

// A constructed geometry family plus whatever closed-form companions it has.
struct Fixture {
    enum class Family { Ambitoric, Sphere, DeformedSphere, Calabi, Product };
    Family family;
    Geometry geo;
    TwoFormField psi;
    std::optional<AnsatzFields> ansatz;   // ambitoric / deformed-sphere
    std::optional<SphereFields> sphere;
    std::optional<CalabiFields> calabi;
    std::optional<ProductFields> product;
    std::optional<ProfilePair> profiles;  // closed-form A, B when known
    double lambda = 1.0, mu = 2.0;        // sphere parameters when relevant
    CaseLabel::Kind expected_case = CaseLabel::Kind::Ambitoric;
    double expected_c = 0.0;  // for the Calabi classifier check
    bool has_expected_c = false;
};

const char* family_name(Fixture::Family f);

// Suites in canonical execution order (classifier last, it reuses cached
// fields). All take the shared sample set.
std::vector<std::string> applicable_suites(Fixture::Family f);
bool suite_applicable(Fixture::Family f, const std::string& suite);

struct SuiteContext {
    const Fixture& fix;
    const std::vector<Coord4>& samples;
    // Per-suite tolerance override (replaces each upper-bound row's default).
    std::optional<double> tol_override;
    // Lazily built shared state.
    AmbiKahlerBundle& bundle();
    KillingData& killing();

    SuiteContext(const Fixture& f, const std::vector<Coord4>& s)
        : fix(f), samples(s) {}

  private:
    std::optional<AmbiKahlerBundle> bundle_;
    std::optional<KillingData> killing_;
};

SuiteResult run_suite(const std::string& name, SuiteContext& ctx);

// Map sample-point evaluation over a worker pool (size from the
// AMBIT_WORKERS environment variable, default hardware concurrency).
// Results are written into an index-addressed vector, so aggregation is
// deterministic regardless of the pool size.
void parallel_for_samples(std::size_t n,
                          const std::function<void(std::size_t)>& body);

}  // namespace ambit
