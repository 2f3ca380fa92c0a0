#pragma once

// The dictionary between a pair (g, psi) and its ambikähler structure:
// f_pm = |Psi_pm|/sqrt(2), J_pm = Psi_pm / f_pm, tau = -J_+ J_-,
// g_pm = f_pm^{-2} g, omega_pm = g_pm(J_pm ., .), x = (f_+ + f_-)/2,
// y = (f_+ - f_-)/2 -- plus the residual operators built on it and the
// trichotomy classifier (ambitoric / Calabi / decomposable).

#include <map>
#include <optional>
#include <string>

#include "ambit/killing.hpp"
#include "ambit/riemann.hpp"

namespace ambit {

// Everything the dictionary produces at one point, as jets.
struct BundleEval {
    MetricData md;
    Mat4j psi;
    Mat4j psi_p, psi_m;  // self-dual / anti-self-dual parts (forms)
    Mat4j Psi_p, Psi_m;  // associated endomorphisms
    Jet f_p, f_m;        // positive norms
    Jet f;               // f_+ / f_-
    Jet x, y;            // half sum / half difference
    Mat4j Jp, Jm, tau;
    Mat4j gp, gm;          // conformal metrics f_pm^{-2} g
    Mat4j omega_p, omega_m;  // Kähler forms (covariant)
};

struct AmbiKahlerBundle {
    Geometry base;
    TwoFormField psi;
    ScalarField f_plus, f_minus, f, x, y;
    EndoField J_plus, J_minus, tau;
    MetricField g_plus, g_minus;
    TwoFormField omega_plus, omega_minus;

    BundleEval eval(const Coord4& p) const;
};

// Floor below which f_pm counts as hitting the excluded locus M \ M_0.
inline constexpr double kFloorFPM = 1e-8;

BundleEval bundle_eval(const Geometry& geo, const TwoFormField& psi,
                       const Coord4& p);

AmbiKahlerBundle build_bundle(const Geometry& geo, const TwoFormField& psi);

// || psi - (f_+^3 omega_+ + f_-^3 omega_-) || at p.
double reconstruction_residual(const AmbiKahlerBundle& b, const Coord4& p);

// || nabla^{g_pm} J_pm || at p (side = +1 or -1).
double kahler_residual(const AmbiKahlerBundle& b, int side, const Coord4& p);

// || tau(df_+) - df_- ||_g at p.
double tau_df_residual(const AmbiKahlerBundle& b, const Coord4& p);

// kappa = tau(df) / (1 - f^2); value and first-order jets.
// Throws domain_error when |f - 1| < floor.
Vec4j kappa_form(const AmbiKahlerBundle& b, const Coord4& p,
                 double floor = 1e-6);

// sup over the samples of || d kappa ||; on a simply-connected chart this is
// the exactness test.
double kappa_closedness(const AmbiKahlerBundle& b,
                        const std::vector<Coord4>& samples,
                        double floor = 1e-6);

// Involutivity of the +-1 eigendistribution of tau, measured as the relative
// size of the opposite-eigenspace component of the Lie bracket of a
// projector-built frame. which = +1 for T^+, -1 for T^-.
// Throws numeric_error when tau^2 deviates from I (eigenvalue clustering).
double involutivity_residual(const AmbiKahlerBundle& b, int which,
                             const Coord4& p);

struct SeparationResiduals {
    // d((x^2-y^2)|dx|^2) ^ dx and the y-analogue; nullopt when the
    // differential is degenerate at the point (e.g. dy = 0 on the
    // decomposable case, reported as skipped).
    std::optional<double> function_of_x_only;
    std::optional<double> function_of_y_only;
    // Deviations from closed-form profiles, when supplied.
    std::optional<double> dx2_vs_A, dy2_vs_B;
    std::optional<double> laplace_x_vs_A, laplace_y_vs_B;
};

// profile_A/B: one-variable closures with two derivatives (value, d1, d2).
struct Profile1D {
    std::function<void(double, double&, double&, double&)> eval3;
    double value(double z) const {
        double v, d1, d2;
        eval3(z, v, d1, d2);
        return v;
    }
    double d1(double z) const {
        double v, a, b;
        eval3(z, v, a, b);
        return a;
    }
};

SeparationResiduals separation_residuals(
    const AmbiKahlerBundle& b, const Coord4& p,
    const Profile1D* profile_A = nullptr, const Profile1D* profile_B = nullptr);

// max over the four (K, omega, mu) pairs of || K . omega + d mu ||; the sign
// convention K . omega = -d mu is the one the chart verification pins down
// (d/ds . omega_+ = d(1/(x+y)) with mu_1^+ = -1/(x+y)).
double momentum_residual(const AmbiKahlerBundle& b, const KillingData& data,
                         const Coord4& p);

struct CaseLabel {
    enum class Kind { Ambitoric, Calabi, Decomposable };
    Kind kind;
    double c = 0.0;       // K2 = c K1 for the Calabi case
    std::string subcase;  // which constant combination was detected
    std::map<std::string, double> diagnostics;
};

// Trichotomy classifier over a sample set. Relative tolerance is applied
// against RMS scales of the measured quantities.
CaseLabel classify_case(const Geometry& geo, const TwoFormField& psi,
                        const std::vector<Coord4>& samples,
                        double rel_tol = 1e-6);

// Binned (abscissa -> value) tables of the measured profile functions
// (x^2 - y^2)|dx|^2 against x and (x^2 - y^2)|dy|^2 against y.
struct ProfileTables {
    std::vector<std::pair<double, double>> A_fit, B_fit;
};
ProfileTables build_xy_tables(const AmbiKahlerBundle& b,
                              const std::vector<Coord4>& samples, int bins = 16);

}  // namespace ambit
