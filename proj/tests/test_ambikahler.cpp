#include <doctest.h>

#include "ambit/ansatz.hpp"

using namespace ambit;

namespace {

AnsatzFields sphere_ansatz() {
    return build_hyperbolic_ambitoric(sphere_profiles(1.0, 2.0));
}

AnsatzFields poly_ansatz() {
    ProfilePair pp;
    pp.A = Curve::poly({1.0, 0.3, 0.2});
    pp.B = Curve::poly({0.8, -0.1, 0.4});
    pp.x_range = {0.6, 1.2};
    pp.y_range = {0.1, 0.5};
    return build_hyperbolic_ambitoric(pp);
}

}  // namespace

TEST_CASE("bundle extraction recovers the chart data") {
    const AnsatzFields f = sphere_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    for (const Coord4& p : sample_points(f.geo.domain, 25, 3)) {
        const BundleEval be = b.eval(p);
        CHECK(std::abs(be.f_p.v - (p[0] + p[1])) < 1e-10);
        CHECK(std::abs(be.f_m.v - (p[0] - p[1])) < 1e-10);
        CHECK(std::abs(be.x.v - p[0]) < 1e-10);
        CHECK(std::abs(be.y.v - p[1]) < 1e-10);
        // Measured structures coincide with the constructed ones.
        const Mat4d dJ = values(be.Jp) - values(f.J_plus.eval(p));
        const Mat4d dT = values(be.tau) - values(f.tau.eval(p));
        for (int i = 0; i < 16; ++i) {
            CHECK(std::abs(dJ.e[i]) < 1e-10);
            CHECK(std::abs(dT.e[i]) < 1e-10);
        }
        CHECK(reconstruction_residual(b, p) <= 1e-10);
        // tau(dx) = dx and tau(dy) = -dy for the measured eigen-coordinates.
        Vec4j dx{}, dy{};
        for (int i = 0; i < 4; ++i) {
            dx[i] = Jet(be.x.d[i]);
            dy[i] = Jet(be.y.d[i]);
        }
        const Vec4j tdx = flat(be.md, mul(be.tau, sharp(be.md, dx)));
        const Vec4j tdy = flat(be.md, mul(be.tau, sharp(be.md, dy)));
        Vec4d ex, ey;
        for (int i = 0; i < 4; ++i) {
            ex[i] = tdx[i].v - dx[i].v;
            ey[i] = tdy[i].v + dy[i].v;
        }
        CHECK(norm_oneform(be.md, ex) <= 1e-9);
        CHECK(norm_oneform(be.md, ey) <= 1e-9);
    }
}

TEST_CASE("bundle invariants: J^2 = -I, tau^2 = I, g_pm conformal") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    for (const Coord4& p : sample_points(f.geo.domain, 20, 9)) {
        const BundleEval be = b.eval(p);
        const Mat4d J2 = mul(values(be.Jp), values(be.Jp));
        const Mat4d T2 = mul(values(be.tau), values(be.tau));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                CHECK(std::abs(J2(i, j) + (i == j ? 1.0 : 0.0)) < 1e-10);
                CHECK(std::abs(T2(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
            }
        // g_pm = f_pm^{-2} g
        for (int i = 0; i < 16; ++i) {
            CHECK(std::abs(be.gp.e[i].v -
                           be.md.g.e[i].v / (be.f_p.v * be.f_p.v)) < 1e-12);
            CHECK(std::abs(be.gm.e[i].v -
                           be.md.g.e[i].v / (be.f_m.v * be.f_m.v)) < 1e-12);
        }
        CHECK(be.f_p.v > 0.0);
        CHECK(be.f_m.v > 0.0);
    }
}

TEST_CASE("both conformal structures are Kähler; the base pair is not") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const Coord4 p = sample_points(f.geo.domain, 1, 1)[0];
    CHECK(kahler_residual(b, +1, p) <= 1e-8);
    CHECK(kahler_residual(b, -1, p) <= 1e-8);
    // Negative control: nabla^g J_+ (the unconformal pair) does not vanish.
    const BundleEval be = b.eval(p);
    const Christoffel ch = christoffel(be.md);
    const auto dJ = cov_d_endo(ch, be.Jp);
    double sup = 0.0;
    for (double v : dJ) sup = std::max(sup, std::abs(v));
    CHECK(sup >= 1e-3);
}

TEST_CASE("coupling tau(df_+) = df_- and its negative control") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    for (const Coord4& p : sample_points(f.geo.domain, 20, 2))
        CHECK(tau_df_residual(b, p) <= 1e-9);
    // Unrelated scalars do not satisfy the coupling.
    const Coord4 p = sample_points(f.geo.domain, 1, 5)[0];
    const BundleEval be = b.eval(p);
    const Jet fake = exp(Jet::var(0, p[0])) * Jet::var(1, p[1]);
    Vec4j dfake{};
    for (int i = 0; i < 4; ++i) dfake[i] = Jet(fake.d[i]);
    const Vec4j lhs = flat(be.md, mul(be.tau, sharp(be.md, dfake)));
    Vec4d defect;
    for (int i = 0; i < 4; ++i) defect[i] = lhs[i].v - be.f_m.d[i];
    CHECK(norm_oneform(be.md, defect) > 1e-3);
}

TEST_CASE("kappa: closed on the chart, zero for constant f, flagged otherwise") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const auto pts = sample_points(f.geo.domain, 25, 7);
    CHECK(kappa_closedness(b, pts) <= 1e-8);

    // A random incompatible f has d[tau(df)/(1-f^2)] != 0.
    const Coord4 p = pts[0];
    const BundleEval be = b.eval(p);
    const auto x = coord_jets(p);
    const Jet fake = 2.0 + 0.5 * sin(x[0] * 2.0) * x[1];
    Vec4j df{};
    for (int i = 0; i < 4; ++i) {
        Jet e;
        e.v = fake.d[i];
        for (int m = 0; m < 4; ++m) e.d[m] = fake.hess(m, i);
        df[i] = e;
    }
    Vec4j kappa = flat(be.md, mul(be.tau, sharp(be.md, df)));
    const Jet denom = 1.0 - square(fake);
    for (int i = 0; i < 4; ++i) kappa[i] = kappa[i] * recip(denom);
    CHECK(norm_cov2(be.md, d_oneform(kappa)) >= 1e-3);
}

TEST_CASE("kappa rejects the locus f = 1") {
    // A parallel flat form with f = 1 exactly.
    Domain dom =
        Domain::box({{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}});
    Geometry geo{
        MetricField{dom, [](const Coord4&) { return Mat4j::identity(); }},
        Orientation{}, dom};
    TwoFormField psi{dom, [](const Coord4&) {
                         Mat4j w{};
                         w(0, 1) = Jet(1.0);
                         w(1, 0) = Jet(-1.0);
                         return w;
                     }};
    const AmbiKahlerBundle b = build_bundle(geo, psi);
    CHECK_THROWS_AS(kappa_form(b, Coord4{0.1, 0.2, 0.3, 0.4}), domain_error);
}

TEST_CASE("constant f != 1 means parallel: alpha vanishes") {
    Domain dom =
        Domain::box({{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}});
    Geometry geo{
        MetricField{dom, [](const Coord4&) { return Mat4j::identity(); }},
        Orientation{}, dom};
    TwoFormField psi{dom, [](const Coord4&) {
                         Mat4j w{};
                         w(0, 1) = Jet(2.0);
                         w(1, 0) = Jet(-2.0);
                         w(2, 3) = Jet(1.0);
                         w(3, 2) = Jet(-1.0);
                         return w;
                     }};
    const AmbiKahlerBundle b = build_bundle(geo, psi);
    const Coord4 p{0.2, -0.1, 0.4, 0.3};
    const BundleEval be = b.eval(p);
    CHECK(be.f.v != doctest::Approx(1.0));
    const Vec4j a = alpha_of(geo, psi).eval(p);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i].v) < 1e-14);
}

TEST_CASE("separation residuals against the closed-form profiles") {
    const AnsatzFields f = sphere_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const Profile1D pa = f.profiles.A.as_profile();
    const Profile1D pb = f.profiles.B.as_profile();
    for (const Coord4& p : sample_points(f.geo.domain, 25, 8)) {
        const auto sep = separation_residuals(b, p, &pa, &pb);
        CHECK(sep.function_of_x_only.value_or(1.0) <= 1e-7);
        CHECK(sep.function_of_y_only.value_or(1.0) <= 1e-7);
        CHECK(sep.dx2_vs_A.value_or(1.0) <= 1e-7);
        CHECK(sep.dy2_vs_B.value_or(1.0) <= 1e-7);
        CHECK(sep.laplace_x_vs_A.value_or(1.0) <= 1e-6);
        CHECK(sep.laplace_y_vs_B.value_or(1.0) <= 1e-6);
    }
}

TEST_CASE("the Laplacian of x matches -A'(x)/(x^2 - y^2) pointwise") {
    // Frozen instance: sphere profiles (lambda, mu) = (1, 2) at
    // (x, y) = (0.7, 0.2): A'(0.7) = -4 (0.7)^3 + 2 (1.25) 0.7 = 0.378,
    // x^2 - y^2 = 0.45, so Delta x = -0.84.
    const AnsatzFields f = sphere_ansatz();
    const Coord4 p{0.7, 0.2, 0.05, -0.03};
    const MetricData md = metric_data(f.geo, p);
    const Christoffel ch = christoffel(md);
    const double lap = laplacian(md, ch, Jet::var(0, p[0]));
    CHECK(lap == doctest::Approx(-0.378 / 0.45).epsilon(1e-9));
}

TEST_CASE("momentum residual and its gauge/sign structure") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const KillingData kd = build_killing_data(f.geo, f.psi);
    for (const Coord4& p : sample_points(f.geo.domain, 20, 4))
        CHECK(momentum_residual(b, kd, p) <= 1e-8);
    // Gauge invariance: the residual only sees d mu, so a constant shift
    // changes nothing.
    {
        const Coord4 p = sample_points(f.geo.domain, 1, 4)[0];
        const BundleEval be = b.eval(p);
        const Jet mu = -recip(be.x + be.y);
        const Jet shifted = mu + 5.0;
        for (int i = 0; i < 4; ++i) CHECK(mu.d[i] == shifted.d[i]);
    }
    // Wrong-sign momenta are flagged.
    const Coord4 p = sample_points(f.geo.domain, 1, 6)[0];
    const BundleEval be = b.eval(p);
    const Vec4d k1 = values(kd.K1.eval(p));
    const Jet mu_wrong = recip(be.x + be.y);  // +1/(x+y) instead of -1/(x+y)
    Vec4d defect;
    for (int j = 0; j < 4; ++j) {
        double s = mu_wrong.d[j];
        for (int i = 0; i < 4; ++i) s += k1[i] * be.omega_p(i, j).v;
        defect[j] = s;
    }
    CHECK(norm_oneform(be.md, defect) >= 1e-3);
}

TEST_CASE("involutivity: product foliation closes, the generic chart does not") {
    const AnsatzFields f = sphere_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const Coord4 p = sample_points(f.geo.domain, 1, 3)[0];
    CHECK(involutivity_residual(b, +1, p) >= 1e-3);
    CHECK(involutivity_residual(b, -1, p) >= 1e-3);

    ProductSpec ps;
    ps.phi = [](const Jet& u, const Jet&) { return 2.0 + u; };
    const ProductFields pf = build_product(ps);
    const AmbiKahlerBundle bp = build_bundle(pf.geo, pf.psi);
    for (const Coord4& q : sample_points(pf.geo.domain, 10, 3)) {
        CHECK(involutivity_residual(bp, +1, q) <= 1e-8);
        CHECK(involutivity_residual(bp, -1, q) <= 1e-8);
    }
}

TEST_CASE("classifier: the three cases and the diagnostics") {
    {
        const AnsatzFields f = poly_ansatz();
        const auto pts = sample_points(f.geo.domain, 40, 7);
        const CaseLabel label = classify_case(f.geo, f.psi, pts);
        CHECK(label.kind == CaseLabel::Kind::Ambitoric);
    }
    {
        SphereSpec ss;
        ss.lambda = 1.0;
        ss.mu = 1.0;
        const SphereFields sf = build_round_sphere(ss);
        const auto pts = sample_points(sf.geo.domain, 40, 7);
        const CaseLabel label = classify_case(sf.geo, sf.psi, pts);
        CHECK(label.kind == CaseLabel::Kind::Calabi);
        CHECK(label.c == doctest::Approx(0.25).epsilon(1e-8));
    }
    {
        ProductSpec ps;
        ps.phi = [](const Jet& u, const Jet&) { return 2.0 + u; };
        const ProductFields pf = build_product(ps);
        const auto pts = sample_points(pf.geo.domain, 40, 7);
        const CaseLabel label = classify_case(pf.geo, pf.psi, pts);
        CHECK(label.kind == CaseLabel::Kind::Decomposable);
    }
}

TEST_CASE("profile tables from samples track the closed forms") {
    const AnsatzFields f = sphere_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    const auto pts = sample_points(f.geo.domain, 200, 5);
    const ProfileTables t = build_xy_tables(b, pts, 8);
    REQUIRE(t.A_fit.size() > 4);
    // Bin means track the profile to the bin curvature, O(width^2) ~ 1e-3.
    for (const auto& [z, val] : t.A_fit)
        CHECK(std::abs(val - f.profiles.A.value(z)) < 2e-3);
    for (const auto& [z, val] : t.B_fit)
        CHECK(std::abs(val - f.profiles.B.value(z)) < 2e-3);
}

TEST_CASE("conformally invariant inner product values on the chart") {
    const AnsatzFields f = sphere_ansatz();
    for (const Coord4& p : sample_points(f.geo.domain, 15, 13)) {
        const BundleEval be = bundle_eval(f.geo, f.psi, p);
        const Mat4d Jp = values(be.Jp), Jm = values(be.Jm);
        // (J_+, J_+) = 2, (J_+, J_-) = 0 for commuting opposite-orientation
        // structures, (Psi, Psi) = 2 (f_+^2 + f_-^2).
        CHECK(endo_inner(Jp, Jp) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(std::abs(endo_inner(Jp, Jm)) < 1e-10);
        const Mat4d Psi = values(be.Psi_p + be.Psi_m);
        CHECK(endo_inner(Psi, Psi) ==
              doctest::Approx(2.0 * (be.f_p.v * be.f_p.v +
                                     be.f_m.v * be.f_m.v)).epsilon(1e-10));
    }
}

TEST_CASE("orthogonality of the chart coframe") {
    const AnsatzFields f = poly_ansatz();
    const AmbiKahlerBundle b = build_bundle(f.geo, f.psi);
    for (const Coord4& p : sample_points(f.geo.domain, 15, 11)) {
        const BundleEval be = b.eval(p);
        Vec4j dx{}, dy{};
        for (int i = 0; i < 4; ++i) {
            dx[i] = Jet(be.x.d[i]);
            dy[i] = Jet(be.y.d[i]);
        }
        const Vec4d jdx = values(flat(be.md, mul(be.Jp, sharp(be.md, dx))));
        const Vec4d jdy = values(flat(be.md, mul(be.Jp, sharp(be.md, dy))));
        const Vec4d forms[4] = {values(dx), jdx, values(dy), jdy};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                double inner = 0.0;
                for (int a = 0; a < 4; ++a)
                    for (int c = 0; c < 4; ++c)
                        inner += be.md.ginvv(a, c) * forms[i][a] * forms[j][c];
                CHECK(std::abs(inner) <= 1e-9);
            }
    }
}
