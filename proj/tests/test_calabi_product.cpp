#include <doctest.h>

#include "ambit/ansatz.hpp"
#include "ambit/killing.hpp"

using namespace ambit;

namespace {

CalabiSpec tanh_spec(double k) {
    CalabiSpec cs;
    cs.phi = Curve::two_plus_tanh();
    cs.k = k;
    cs.t_range = {0.3, 1.5};
    return cs;
}

ProductSpec shifted_product() {
    ProductSpec ps;
    ps.phi = [](const Jet& u, const Jet&) { return 2.0 + u; };
    return ps;
}

}  // namespace

TEST_CASE("Calabi model: psi^(k) is *-Killing for k in {-0.5, 0.5, 2}") {
    for (double k : {-0.5, 0.5, 2.0}) {
        const CalabiFields cf = build_calabi(tanh_spec(k));
        for (const Coord4& p : sample_points(cf.geo.domain, 15, 1))
            CHECK(star_killing_residual(cf.geo, cf.psi, p).value <= 1e-8);
    }
}

TEST_CASE("k = 0 is the Kähler pair: nabla omega_phi = 0") {
    const CalabiFields cf = build_calabi(tanh_spec(0.0));
    for (const Coord4& p : sample_points(cf.geo.domain, 15, 2)) {
        const MetricData md = metric_data(cf.geo, p);
        const Christoffel ch = christoffel(md);
        CHECK(norm_cov3(md, cov_d_twoform(ch, cf.psi.eval(p))) <= 1e-8);
    }
}

TEST_CASE("model involution: tau(K) = -K to machine precision") {
    for (double k : {-0.5, 0.0, 2.0}) {
        const CalabiFields cf = build_calabi(tanh_spec(k));
        for (const Coord4& p : sample_points(cf.geo.domain, 10, 3)) {
            const MetricData md = metric_data_from(cf.g_phi.eval(p));
            const Mat4d tau = values(cf.tau_model.eval(p));
            const Vec4d K = values(cf.K.eval(p));
            Vec4d defect;
            for (int i = 0; i < 4; ++i) {
                double s = K[i];
                for (int j = 0; j < 4; ++j) s += tau(i, j) * K[j];
                defect[i] = s;
            }
            CHECK(norm_vector(md, defect) <= 1e-10);
        }
    }
}

TEST_CASE("family rescaling: f_+^(k) = f/|k + f| and the shared structure") {
    for (double k : {-0.5, 0.5, 2.0}) {
        const CalabiFields cf = build_calabi(tanh_spec(k));
        const CalabiFields cf2 = build_calabi(tanh_spec(k + 1.0));
        for (const Coord4& p : sample_points(cf.geo.domain, 10, 4)) {
            const BundleEval be = bundle_eval(cf.geo, cf.psi, p);
            const double f = cf.f_model.eval(p).v;
            CHECK(std::abs(be.f_p.v * std::abs(k + f) / f - 1.0) <= 1e-9);
            // g_+ measured from psi^(k) is g_phi for every k.
            const Mat4j gphi = cf.g_phi.eval(p);
            const MetricData md = metric_data_from(gphi);
            CHECK(norm_cov2(md, values(be.gp - gphi)) <= 1e-9);
            const BundleEval be2 = bundle_eval(cf2.geo, cf2.psi, p);
            CHECK(norm_cov2(md, values(be2.gp - gphi)) <= 1e-9);
        }
    }
}

TEST_CASE("trichotomy constant of the family is 2 sqrt(c) = 1") {
    for (double k : {-0.5, 0.5, 2.0}) {
        const CalabiFields cf = build_calabi(tanh_spec(k));
        for (const Coord4& p : sample_points(cf.geo.domain, 25, 5)) {
            const BundleEval be = bundle_eval(cf.geo, cf.psi, p);
            const double sum = be.f_p.v + be.f_m.v;
            const double diff = std::abs(be.f_p.v - be.f_m.v);
            // k > 0 realizes the constant sum, k < 0 a constant difference.
            if (k > 0) CHECK(std::abs(sum - 1.0) <= 1e-8);
            else CHECK(std::abs(diff - 1.0) <= 1e-8);
        }
        const auto pts = sample_points(cf.geo.domain, 30, 6);
        const CaseLabel label = classify_case(cf.geo, cf.psi, pts);
        CHECK(label.kind == CaseLabel::Kind::Calabi);
        CHECK(label.c == doctest::Approx(0.25).epsilon(1e-6));
    }
}

TEST_CASE("1 + k phi crossing zero inside the interval is rejected") {
    CalabiSpec cs = tanh_spec(-0.5);
    cs.t_range = {-1.5, 1.5};  // phi = 2 + tanh t crosses 2 at t = 0
    CHECK_THROWS_AS(build_calabi(cs), domain_error);
}

TEST_CASE("phi must be positive and increasing; theta must match omega_Sigma") {
    CalabiSpec cs;
    cs.phi = Curve::poly({1.0, -1.0});  // decreasing
    cs.phi.d3fn = [](double) { return 0.0; };
    cs.t_range = {0.0, 0.5};
    CHECK_THROWS_AS(build_calabi(cs), input_error);

    CalabiSpec bad_theta = tanh_spec(1.0);
    bad_theta.theta = [](const Jet& u, const Jet&) {
        return std::pair<Jet, Jet>{Jet(0.0), 2.0 * u};  // d theta = 2 du^dv
    };
    CHECK_THROWS_AS(build_calabi(bad_theta), input_error);
}

TEST_CASE("polynomial phi works through the same pipeline") {
    CalabiSpec cs;
    cs.phi = Curve::poly({2.0, 0.5, 0.1});
    cs.k = 1.0;
    cs.t_range = {0.0, 1.0};
    const CalabiFields cf = build_calabi(cs);
    for (const Coord4& p : sample_points(cf.geo.domain, 10, 7))
        CHECK(star_killing_residual(cf.geo, cf.psi, p).value <= 1e-8);
}

TEST_CASE("product: psi = phi^3 omega_Sigma is *-Killing, alpha closed form") {
    const ProductFields pf = build_product(shifted_product());
    const KillingData kd = build_killing_data(pf.geo, pf.psi);
    for (const Coord4& p : sample_points(pf.geo.domain, 20, 8)) {
        CHECK(star_killing_residual(pf.geo, pf.psi, p).value <= 1e-8);
        const MetricData md = metric_data(pf.geo, p);
        // alpha = delta psi / 3 equals -*_Sigma d phi (f_pm = phi/2 here).
        const Vec4j got = kd.alpha.eval(p);
        const Vec4j want = pf.alpha_closed.eval(p);
        Vec4d defect;
        for (int i = 0; i < 4; ++i) defect[i] = got[i].v - want[i].v;
        CHECK(norm_oneform(md, defect) <= 1e-8);
        // K2 vanishes identically.
        CHECK(norm_vector(md, values(kd.K2.eval(p))) <= 1e-10);
        // The bundle sits on the wall f_+ = f_- = phi/2.
        const BundleEval be = bundle_eval(pf.geo, pf.psi, p);
        const double phi = pf.phi_field.eval(p).v;
        CHECK(std::abs(be.f_p.v - phi / 2.0) <= 1e-12);
        CHECK(std::abs(be.f_m.v - phi / 2.0) <= 1e-12);
    }
}

TEST_CASE("product: *psi = phi^3 omega_Sigma~ and K1 is not Killing") {
    const ProductFields pf = build_product(shifted_product());
    const KillingData kd = build_killing_data(pf.geo, pf.psi);
    double sup = 0.0;
    for (const Coord4& p : sample_points(pf.geo.domain, 25, 9)) {
        const MetricData md = metric_data(pf.geo, p);
        const Mat4j st =
            hodge_star2(md, pf.geo.orientation.sign, pf.psi.eval(p));
        const double ph3 = std::pow(pf.phi_field.eval(p).v, 3);
        const Mat4j wt = pf.omega_sigma_tilde.eval(p);
        CHECK(norm_cov2(md, values(st - wt * ph3)) <= 1e-10);
        sup = std::max(sup, killing_vector_residual(pf.geo, kd.K1, p));
    }
    CHECK(sup >= 1e-3);
}

TEST_CASE("constant phi: parallel psi with alpha = 0") {
    ProductSpec ps;
    ps.phi = [](const Jet&, const Jet&) { return Jet(1.0); };
    const ProductFields pf = build_product(ps);
    const Coord4 p{0.1, -0.2, 0.3, 0.0};
    const Vec4j a = alpha_of(pf.geo, pf.psi).eval(p);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i].v) < 1e-14);
    const MetricData md = metric_data(pf.geo, p);
    const Christoffel ch = christoffel(md);
    CHECK(norm_cov3(md, cov_d_twoform(ch, pf.psi.eval(p))) < 1e-14);
}

TEST_CASE("curved factor: conformal rho on Sigma still satisfies the chain") {
    ProductSpec ps = shifted_product();
    ps.rho = [](const Jet& u, const Jet& v) {
        return 1.0 + 0.1 * u * u + 0.05 * v * v;
    };
    const ProductFields pf = build_product(ps);
    for (const Coord4& p : sample_points(pf.geo.domain, 10, 10))
        CHECK(star_killing_residual(pf.geo, pf.psi, p).value <= 1e-8);
}
