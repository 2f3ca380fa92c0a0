#pragma once

// Analytic constructors for the four geometry families, all with exact jets:
//
//   * the hyperbolic ambitoric chart (x, y, s, t), x > |y| > 0, driven by two
//     positive one-variable profiles A(x), B(y),
//   * the round 4-sphere in a stereographic chart, carrying the restriction
//     of a constant ambient 2-form lambda e1^e2 + mu e3^e4,
//   * its profile-deformed variants (same 2-form, new metric),
//   * the Calabi-type local model on (u, v, t, s) driven by phi(t) and a
//     family parameter k,
//   * the decomposable product of two conformal surface charts.
//
// Closed-form curvature and auxiliary functions of the ambitoric chart
// (Scal, b, h_pm and their differentials) live here too, next to the
// constructors they specialize.

#include <functional>
#include <vector>

#include "ambit/ambikahler.hpp"
#include "ambit/riemann.hpp"

namespace ambit {

// One-variable profile with exact derivatives to order 2 (order 3 optional;
// needed only where the derivative itself enters a metric, as phi'(t) does
// in the Calabi model).
struct Curve {
    std::function<void(double, double&, double&, double&)> eval3;
    std::function<double(double)> d3fn;  // optional third derivative

    double value(double z) const {
        double v, a, b;
        eval3(z, v, a, b);
        return v;
    }
    double d1(double z) const {
        double v, a, b;
        eval3(z, v, a, b);
        return a;
    }
    double d2(double z) const {
        double v, a, b;
        eval3(z, v, a, b);
        return b;
    }
    Jet at(const Jet& z) const {
        double v, a, b;
        eval3(z.v, v, a, b);
        return chain(z, v, a, b);
    }
    // Jet of the derivative function f' at z; requires d3fn.
    Jet deriv_at(const Jet& z) const {
        if (!d3fn)
            throw input_error("curve lacks the third derivative required here");
        double v, a, b;
        eval3(z.v, v, a, b);
        return chain(z, a, b, d3fn(z.v));
    }
    Profile1D as_profile() const { return Profile1D{eval3}; }

    // Polynomial with coefficients lowest-degree-first.
    static Curve poly(std::vector<double> coeffs);
    static Curve constant(double c);
    // A(z) = -(z^2 - lambda^2/4)(z^2 - mu^2/4); B = -A.
    static Curve sphere_A(double lambda, double mu);
    static Curve sphere_B(double lambda, double mu);
    // Smooth bump supported on the collar-inset middle of [a, b]; identically
    // zero on the outer collar_fraction of the interval at each end, max 1.
    static Curve bump(double a, double b, double collar_fraction = 0.2);
    static Curve sum(Curve f, Curve g, double scale_g = 1.0);
    static Curve two_plus_tanh();
};

struct ProfilePair {
    Curve A, B;
    std::array<double, 2> x_range{}, y_range{};
    double margin = 1e-2;
};

// Constructor output: the geometry, the *-Killing candidate and the explicit
// chart fields the identities are checked against.
struct AnsatzFields {
    Geometry geo;
    TwoFormField psi;
    EndoField J_plus, J_minus, tau;
    TwoFormField omega_plus, omega_minus;
    MetricField g_plus, g_minus;
    ScalarField x, y, f_plus, f_minus;
    ProfilePair profiles;
};

AnsatzFields build_hyperbolic_ambitoric(const ProfilePair& spec);

// Closed forms on the ambitoric chart.
double scal_closed_form(const ProfilePair& spec, double x, double y);
double b_closed_form(const ProfilePair& spec, double x, double y);
std::pair<double, double> h_closed_form(const ProfilePair& spec, double x,
                                        double y);
std::pair<Jet, Jet> h_closed_form_jets(const ProfilePair& spec, const Jet& x,
                                       const Jet& y);
// dh_pm as 1-forms in (dx, dy) components.
std::pair<std::array<double, 2>, std::array<double, 2>> dh_closed_form(
    const ProfilePair& spec, double x, double y);

// phi_+ = int^x dt/A - int^y dt/B (J_+-pluriharmonic) and
// phi_- = int^x dt/A + int^y dt/B (J_--pluriharmonic); values by adaptive
// quadrature, derivatives from the exact integrand jets.
std::pair<ScalarField, ScalarField> pluriharmonic_pm(const AnsatzFields& f);

struct EtaForms {
    OneFormField eta;      // 1/2 (J_+ dx / A + J_+ dy / B)
    OneFormField ds_form;  // x^2 J_+ dx / A - y^2 J_+ dy / B
    OneFormField dt_form;  // coordinate dt
};
EtaForms eta_and_s(const AnsatzFields& f);

// Adaptive Gauss-Kronrod quadrature used by pluriharmonic_pm; exposed for
// tests. Throws numeric_error when refinement stalls.
double quad_gk(const std::function<double(double)>& f, double a, double b,
               double abs_tol = 1e-12);

// ---------------------------------------------------------------------------

struct SphereSpec {
    double lambda = 1.0, mu = 2.0;  // 0 <= lambda <= mu, mu > 0
    // Chart box for the stereographic coordinates (projection from -e0;
    // w = 0 maps to e0).
    std::array<std::array<double, 2>, 4> chart_box{
        {{0.10, 0.45}, {0.10, 0.45}, {0.10, 0.45}, {0.10, 0.45}}};
    double margin = 1e-2;
};

struct SphereFields {
    Geometry geo;
    TwoFormField psi;
    // Ambient position and closed-form norms as chart fields.
    std::array<ScalarField, 5> u;
    ScalarField f_plus_closed, f_minus_closed;
    double lambda, mu;
};

SphereFields build_round_sphere(const SphereSpec& spec);

struct SphereXYResiduals {
    double u0, u12, u34;  // the three chart/embedding identities
    double sup() const { return std::max(u0, std::max(u12, u34)); }
};
// Throws input_error when lambda = mu or lambda = 0 (the identities assume
// the ambitoric case).
SphereXYResiduals sphere_xy_consistency(const SphereFields& f, const Coord4& p);

// The (x, y) rectangle and profile pair of the lambda < mu sphere, inset from
// the closed rectangle so A, B stay positive with margin.
ProfilePair sphere_profiles(double lambda, double mu, double inset_fraction = 0.1);

// Deformed sphere: profiles A + eps * bump (bump vanishing on a boundary
// collar), same psi. Construction fails when positivity is lost.
AnsatzFields build_deformed_sphere(double lambda, double mu, double eps,
                                   double collar_fraction = 0.2);

// ---------------------------------------------------------------------------

struct CalabiSpec {
    Curve phi;  // positive, increasing on t_range; needs d3fn
    double k = 0.0;
    std::array<double, 2> t_range{{-1.0, 1.0}};
    // Conformal factor rho(u, v) of g_Sigma = rho^2 (du^2 + dv^2); null = flat.
    std::function<Jet(const Jet&, const Jet&)> rho;
    // theta with d theta = omega_Sigma; components (theta_u, theta_v) as
    // closures of (u, v). Defaults to theta = u dv for the flat case.
    std::function<std::pair<Jet, Jet>(const Jet&, const Jet&)> theta;
    std::array<double, 2> uv_range{{-1.0, 1.0}};
    double margin = 1e-2;
};

struct CalabiFields {
    Geometry geo;        // g^(k) = g_phi / (1 + k phi)^2
    TwoFormField psi;    // psi^(k)
    MetricField g_phi;   // the k = 0 Kähler metric
    TwoFormField omega_phi;
    EndoField J_plus_model, J_minus_model, tau_model;
    VectorField K;       // d/ds
    ScalarField phi_field;
    ScalarField f_model;  // 1/phi, the conformal ratio of the model
    double k;
};

CalabiFields build_calabi(const CalabiSpec& spec);

// ---------------------------------------------------------------------------

struct ProductSpec {
    // phi(u, v) > 0 on the first factor.
    std::function<Jet(const Jet&, const Jet&)> phi;
    // Conformal factors of the two curve metrics; null = flat.
    std::function<Jet(const Jet&, const Jet&)> rho;
    std::function<Jet(const Jet&, const Jet&)> rho_tilde;
    std::array<double, 2> uv_range{{-0.5, 0.5}};
    std::array<double, 2> pq_range{{-0.5, 0.5}};
    double margin = 1e-2;
};

struct ProductFields {
    Geometry geo;       // g = phi^2 (g_Sigma + g_Sigma~)
    TwoFormField psi;   // phi^3 omega_Sigma
    ScalarField phi_field;
    // Closed form of delta psi / 3 for psi = phi^3 omega_Sigma: the measured
    // f_pm equal phi/2, so alpha = -2 J_+ d(phi/2) = -*_Sigma d phi.
    OneFormField alpha_closed;
    // phi^{-2} *_Sigma d phi, kept as a cross-check target; it is NOT the
    // codifferential of phi^3 omega_Sigma (see the acceptance suite).
    OneFormField alpha_inverse_square;
    TwoFormField omega_sigma, omega_sigma_tilde;
};

ProductFields build_product(const ProductSpec& spec);

}  // namespace ambit
