#include "ambit/ansatz.hpp"

#include <algorithm>
#include <cmath>

namespace ambit {

// ---------------------------------------------------------------------------
// Curves

Curve Curve::poly(std::vector<double> coeffs) {
    Curve c;
    c.eval3 = [coeffs](double z, double& v, double& d1, double& d2) {
        v = d1 = d2 = 0.0;
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
            d2 = d2 * z + 2.0 * d1;
            d1 = d1 * z + v;
            v = v * z + coeffs[i];
        }
    };
    c.d3fn = [coeffs](double z) {
        double s = 0.0;
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 3; --i)
            s = s * z + coeffs[i] * i * (i - 1) * (i - 2);
        return s;
    };
    return c;
}

Curve Curve::constant(double cval) {
    Curve c;
    c.eval3 = [cval](double, double& v, double& d1, double& d2) {
        v = cval;
        d1 = d2 = 0.0;
    };
    c.d3fn = [](double) { return 0.0; };
    return c;
}

Curve Curve::sphere_A(double lambda, double mu) {
    const double a = lambda * lambda / 4.0, b = mu * mu / 4.0;
    // A(z) = -(z^2 - a)(z^2 - b) = -z^4 + (a + b) z^2 - a b
    return poly({-a * b, 0.0, a + b, 0.0, -1.0});
}

Curve Curve::sphere_B(double lambda, double mu) {
    const double a = lambda * lambda / 4.0, b = mu * mu / 4.0;
    return poly({a * b, 0.0, -(a + b), 0.0, 1.0});
}

Curve Curve::bump(double a, double b, double collar_fraction) {
    const double w = (b - a) * collar_fraction;
    const double lo = a + w, hi = b - w;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    Curve c;
    c.eval3 = [mid, half](double z, double& v, double& d1, double& d2) {
        const double zeta = (z - mid) / half;
        if (std::abs(zeta) >= 1.0 - 1e-12) {
            v = d1 = d2 = 0.0;
            return;
        }
        const double q = 1.0 - zeta * zeta;
        const double e = std::exp(1.0 - 1.0 / q);
        // w = 1 - 1/q: w' = -2 zeta / q^2, w'' = -2/q^2 - 8 zeta^2 / q^3
        const double g1 = -2.0 * zeta / (q * q);
        const double g2 = (-2.0 * q - 8.0 * zeta * zeta) / (q * q * q);
        v = e;
        d1 = e * g1 / half;
        d2 = e * (g1 * g1 + g2) / (half * half);
    };
    return c;
}

Curve Curve::sum(Curve f, Curve g, double scale_g) {
    Curve c;
    c.eval3 = [f, g, scale_g](double z, double& v, double& d1, double& d2) {
        double fv, f1, f2, gv, g1, g2;
        f.eval3(z, fv, f1, f2);
        g.eval3(z, gv, g1, g2);
        v = fv + scale_g * gv;
        d1 = f1 + scale_g * g1;
        d2 = f2 + scale_g * g2;
    };
    if (f.d3fn && g.d3fn) {
        auto fa = f.d3fn, ga = g.d3fn;
        c.d3fn = [fa, ga, scale_g](double z) {
            return fa(z) + scale_g * ga(z);
        };
    }
    return c;
}

Curve Curve::two_plus_tanh() {
    Curve c;
    c.eval3 = [](double z, double& v, double& d1, double& d2) {
        const double t = std::tanh(z), s = 1.0 - t * t;
        v = 2.0 + t;
        d1 = s;
        d2 = -2.0 * t * s;
    };
    c.d3fn = [](double z) {
        const double t = std::tanh(z), s = 1.0 - t * t;
        return (6.0 * t * t - 2.0) * s;
    };
    return c;
}

// ---------------------------------------------------------------------------
// Hyperbolic ambitoric chart

namespace {

void check_profile_positive(const Curve& f, const std::array<double, 2>& range,
                            double margin, const char* name) {
    const double lo = range[0] + margin, hi = range[1] - margin;
    if (!(hi > lo))
        throw input_error(std::string("profile rectangle for ") + name +
                          " collapses under margin");
    for (int i = 0; i <= 64; ++i) {
        const double z = lo + (hi - lo) * i / 64.0;
        if (!(f.value(z) > 0.0))
            throw input_error(std::string("profile ") + name +
                              " is not positive at " + std::to_string(z));
    }
}

Domain ambitoric_domain(const ProfilePair& spec) {
    Domain d;
    d.kind = Domain::Kind::Predicate;
    d.bounds = {{{spec.x_range[0], spec.x_range[1]},
                 {spec.y_range[0], spec.y_range[1]},
                 {-1.0, 1.0},
                 {-1.0, 1.0}}};
    d.margin = spec.margin;
    d.predicate = [](const Coord4& p, double m) {
        return p[0] - std::abs(p[1]) >= m && std::abs(p[1]) >= m;
    };
    d.description = "ambitoric chart: x > |y| > 0";
    return d;
}

}  // namespace

AnsatzFields build_hyperbolic_ambitoric(const ProfilePair& spec) {
    if (!(spec.x_range[0] > 0.0))
        throw input_error("ambitoric rectangle needs x > 0");
    check_profile_positive(spec.A, spec.x_range, spec.margin, "A");
    check_profile_positive(spec.B, spec.y_range, spec.margin, "B");

    const Domain dom = ambitoric_domain(spec);
    const Curve A = spec.A, B = spec.B;

    AnsatzFields out;
    out.profiles = spec;

    out.geo.domain = dom;
    // The direct coframe is (dx, J+dx, dy, J+dy), whose wedge is a negative
    // multiple of dx^dy^ds^dt; the coordinate order (x, y, s, t) is therefore
    // anti-direct.
    out.geo.orientation.sign = -1.0;
    out.geo.metric = {dom, [A, B](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet Ax = A.at(x), By = B.at(y);
        const Jet D = square(x) - square(y);
        Mat4j g{};
        g(0, 0) = D / Ax;
        g(1, 1) = D / By;
        g(2, 2) = (Ax + By) / D;
        g(2, 3) = (Ax * square(y) + By * square(x)) / D;
        g(3, 2) = g(2, 3);
        g(3, 3) = (Ax * square(square(y)) + By * square(square(x))) / D;
        return g;
    }};

    out.psi = {dom, [](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        Mat4j psi{};
        auto set = [&psi](int i, int j, const Jet& v) {
            psi(i, j) = v;
            psi(j, i) = -v;
        };
        set(0, 2, 2.0 * x);
        set(0, 3, 2.0 * x * square(y));
        set(1, 2, 2.0 * y);
        set(1, 3, 2.0 * y * square(x));
        return psi;
    }};

    // J acting on coordinate 1-forms has rows M; the matrix on vectors is -M
    // under the musical convention (J beta)(X) = -beta(J X).
    auto jplus = [A, B](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet Ax = A.at(x), By = B.at(y);
        const Jet D = square(x) - square(y);
        Mat4j M{};
        M(0, 2) = Ax / D;
        M(0, 3) = Ax * square(y) / D;
        M(1, 2) = By / D;
        M(1, 3) = By * square(x) / D;
        M(2, 0) = -square(x) / Ax;
        M(2, 1) = square(y) / By;
        M(3, 0) = recip(Ax);
        M(3, 1) = -recip(By);
        return M * (-1.0);
    };
    auto jminus = [A, B](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet Ax = A.at(x), By = B.at(y);
        const Jet D = square(x) - square(y);
        Mat4j M{};
        M(0, 2) = Ax / D;
        M(0, 3) = Ax * square(y) / D;
        M(1, 2) = -By / D;
        M(1, 3) = -By * square(x) / D;
        M(2, 0) = -square(x) / Ax;
        M(2, 1) = -square(y) / By;
        M(3, 0) = recip(Ax);
        M(3, 1) = recip(By);
        return M * (-1.0);
    };
    out.J_plus = {dom, jplus};
    out.J_minus = {dom, jminus};

    out.tau = {dom, [](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet D = square(x) - square(y);
        Mat4j t{};
        t(0, 0) = Jet(1.0);
        t(1, 1) = Jet(-1.0);
        t(2, 2) = (square(x) + square(y)) / D;
        t(2, 3) = 2.0 * square(x) * square(y) / D;
        t(3, 2) = -2.0 * recip(D);
        t(3, 3) = -(square(x) + square(y)) / D;
        return t;
    }};

    out.omega_plus = {dom, [](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet c = recip(square(x + y));
        Mat4j w{};
        auto set = [&w](int i, int j, const Jet& v) {
            w(i, j) = v;
            w(j, i) = -v;
        };
        set(0, 2, c);
        set(0, 3, c * square(y));
        set(1, 2, c);
        set(1, 3, c * square(x));
        return w;
    }};
    out.omega_minus = {dom, [](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet c = recip(square(x - y));
        Mat4j w{};
        auto set = [&w](int i, int j, const Jet& v) {
            w(i, j) = v;
            w(j, i) = -v;
        };
        set(0, 2, c);
        set(0, 3, c * square(y));
        set(1, 2, -c);
        set(1, 3, -c * square(x));
        return w;
    }};

    const MetricField base = out.geo.metric;
    out.g_plus = {dom, [base](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        return base.f(p) * recip(square(x + y));
    }};
    out.g_minus = {dom, [base](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        return base.f(p) * recip(square(x - y));
    }};

    out.x = coordinate_field(dom, 0);
    out.y = coordinate_field(dom, 1);
    out.f_plus = {dom, [](const Coord4& p) {
        return Jet::var(0, p[0]) + Jet::var(1, p[1]);
    }};
    out.f_minus = {dom, [](const Coord4& p) {
        return Jet::var(0, p[0]) - Jet::var(1, p[1]);
    }};
    return out;
}

double scal_closed_form(const ProfilePair& spec, double x, double y) {
    const double D = x * x - y * y;
    if (D == 0.0) throw domain_error("closed forms need x^2 != y^2");
    return -(spec.A.d2(x) + spec.B.d2(y)) / D;
}

double b_closed_form(const ProfilePair& spec, double x, double y) {
    const double D = x * x - y * y;
    if (D == 0.0) throw domain_error("closed forms need x^2 != y^2");
    const double AB = spec.A.value(x) + spec.B.value(y);
    return -(spec.A.d2(x) - spec.B.d2(y)) / (4.0 * D) +
           (x * spec.A.d1(x) + y * spec.B.d1(y)) / (D * D) - AB / (D * D);
}

std::pair<double, double> h_closed_form(const ProfilePair& spec, double x,
                                        double y) {
    const double D = x * x - y * y;
    if (D == 0.0) throw domain_error("closed forms need x^2 != y^2");
    const double AB = spec.A.value(x) + spec.B.value(y);
    const double hp = -(spec.A.d1(x) + spec.B.d1(y)) / (2.0 * D) +
                      (x - y) * AB / (D * D);
    const double hm = -(spec.A.d1(x) - spec.B.d1(y)) / (2.0 * D) +
                      (x + y) * AB / (D * D);
    return {hp, hm};
}

std::pair<Jet, Jet> h_closed_form_jets(const ProfilePair& spec, const Jet& x,
                                       const Jet& y) {
    const Jet D = square(x) - square(y);
    const Jet Ax = spec.A.at(x), By = spec.B.at(y);
    const Jet A1 = spec.A.deriv_at(x), B1 = spec.B.deriv_at(y);
    const Jet AB = Ax + By;
    const Jet hp = -(A1 + B1) / (2.0 * D) + (x - y) * AB / square(D);
    const Jet hm = -(A1 - B1) / (2.0 * D) + (x + y) * AB / square(D);
    return {hp, hm};
}

std::pair<std::array<double, 2>, std::array<double, 2>> dh_closed_form(
    const ProfilePair& spec, double x, double y) {
    const double D = x * x - y * y, D2 = D * D, D3 = D2 * D;
    const double A = spec.A.value(x), B = spec.B.value(y);
    const double A1 = spec.A.d1(x), B1 = spec.B.d1(y);
    const double A2 = spec.A.d2(x), B2 = spec.B.d2(y);
    const double AB = A + B;
    std::array<double, 2> dhp{
        -A2 / (2.0 * D) + (A1 * (2.0 * x - y) + B1 * x) / D2 -
            AB * (x - y) * (3.0 * x - y) / D3,
        -B2 / (2.0 * D) + (-A1 * y + B1 * (x - 2.0 * y)) / D2 -
            AB * (x - y) * (x - 3.0 * y) / D3};
    std::array<double, 2> dhm{
        -A2 / (2.0 * D) + (A1 * (2.0 * x + y) - B1 * x) / D2 -
            AB * (x + y) * (3.0 * x + y) / D3,
        B2 / (2.0 * D) + (-A1 * y + B1 * (x + 2.0 * y)) / D2 +
            AB * (x + y) * (x + 3.0 * y) / D3};
    return {dhp, dhm};
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

struct GK {
    // Gauss-Kronrod 7-15 nodes on [0, 1] of |x| and weights.
    static constexpr double xk[8] = {
        0.0,
        0.2077849550078985,
        0.4058451513773972,
        0.5860872354676911,
        0.7415311855993945,
        0.8648644233597691,
        0.9491079123427585,
        0.9914553711208126};
    static constexpr double wk[8] = {
        0.2094821410847278,
        0.2044329400752989,
        0.1903505780647854,
        0.1690047266392679,
        0.1406532597155259,
        0.1047900103222502,
        0.0630920926299786,
        0.0229353220105292};
    // Gauss weights attach to the even-index Kronrod nodes.
    static constexpr double wg[4] = {
        0.4179591836734694,
        0.3818300505051189,
        0.2797053914892767,
        0.1294849661688697};
};

std::pair<double, double> gk15(const std::function<double(double)>& f,
                               double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double fx = (i == 0)
                              ? f(c)
                              : f(c - h * GK::xk[i]) + f(c + h * GK::xk[i]);
        kron += GK::wk[i] * fx;
        if (i % 2 == 0) gauss += GK::wg[i / 2] * fx;
    }
    return {kron * h, std::abs(kron - gauss) * h};
}

double quad_adaptive(const std::function<double(double)>& f, double a,
                     double b, double tol, int depth) {
    auto [val, err] = gk15(f, a, b);
    if (err <= tol || std::abs(b - a) < 1e-14) return val;
    if (depth > 48) throw numeric_error("quadrature failed to converge");
    const double c = 0.5 * (a + b);
    return quad_adaptive(f, a, c, tol * 0.5, depth + 1) +
           quad_adaptive(f, c, b, tol * 0.5, depth + 1);
}

}  // namespace

double quad_gk(const std::function<double(double)>& f, double a, double b,
               double abs_tol) {
    if (a == b) return 0.0;
    const double sign = a < b ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);
    return sign * quad_adaptive(f, lo, hi, abs_tol, 0);
}

std::pair<ScalarField, ScalarField> pluriharmonic_pm(const AnsatzFields& f) {
    const Curve A = f.profiles.A, B = f.profiles.B;
    const double x0 =
        0.5 * (f.profiles.x_range[0] + f.profiles.x_range[1]);
    const double y0 =
        0.5 * (f.profiles.y_range[0] + f.profiles.y_range[1]);
    auto Q = [](const Curve& c, double z0, const Jet& z) {
        const double val =
            quad_gk([&c](double t) { return 1.0 / c.value(t); }, z0, z.v);
        const double f1 = 1.0 / c.value(z.v);
        const double f2 = -c.d1(z.v) * f1 * f1;
        return chain(z, val, f1, f2);
    };
    ScalarField plus{f.geo.domain, [A, B, x0, y0, Q](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        return Q(A, x0, x) - Q(B, y0, y);
    }};
    ScalarField minus{f.geo.domain, [A, B, x0, y0, Q](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        return Q(A, x0, x) + Q(B, y0, y);
    }};
    return {plus, minus};
}

EtaForms eta_and_s(const AnsatzFields& f) {
    const Curve A = f.profiles.A, B = f.profiles.B;
    const Domain dom = f.geo.domain;
    EtaForms forms;
    forms.eta = {dom, [](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet D = square(x) - square(y);
        // 1/2 (J+dx/A + J+dy/B) = (ds + (x^2+y^2)/2 dt)/D
        Vec4j eta{};
        eta[2] = recip(D);
        eta[3] = (square(x) + square(y)) / (2.0 * D);
        return eta;
    }};
    forms.ds_form = {dom, [A, B](const Coord4& p) {
        const Jet x = Jet::var(0, p[0]), y = Jet::var(1, p[1]);
        const Jet Ax = A.at(x), By = B.at(y);
        const Jet D = square(x) - square(y);
        // x^2 J+dx/A - y^2 J+dy/B, assembled from the chart expressions
        const Jet cx = square(x) / Ax, cy = square(y) / By;
        Vec4j ds{};
        ds[2] = cx * (Ax / D) - cy * (By / D);
        ds[3] = cx * (Ax * square(y) / D) - cy * (By * square(x) / D);
        return ds;
    }};
    forms.dt_form = {dom, [](const Coord4&) {
        Vec4j dt{};
        dt[3] = Jet(1.0);
        return dt;
    }};
    return forms;
}

// ---------------------------------------------------------------------------
// Round sphere

namespace {

struct EmbeddingJets {
    Jet u[5];
    Jet du[5][4];  // du[a][i] = d u_a / d w_i as a jet of w
};

EmbeddingJets embed(const Coord4& p) {
    EmbeddingJets e;
    const Jet w0 = Jet::var(0, p[0]), w1 = Jet::var(1, p[1]),
              w2 = Jet::var(2, p[2]), w3 = Jet::var(3, p[3]);
    const Jet w[4] = {w0, w1, w2, w3};
    Jet q = 1.0 + square(w0) + square(w1) + square(w2) + square(w3);
    const Jet iq = recip(q), iq2 = iq * iq;
    e.u[0] = 2.0 * iq - 1.0;
    for (int k = 0; k < 4; ++k) e.u[k + 1] = 2.0 * w[k] * iq;
    for (int i = 0; i < 4; ++i) e.du[0][i] = -4.0 * w[i] * iq2;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i) {
            Jet t = -4.0 * w[k] * w[i] * iq2;
            if (k == i) t += 2.0 * iq;
            e.du[k + 1][i] = t;
        }
    return e;
}

}  // namespace

SphereFields build_round_sphere(const SphereSpec& spec) {
    if (!(spec.mu > 0.0) || spec.lambda < 0.0 || spec.lambda > spec.mu)
        throw input_error("sphere spec needs 0 <= lambda <= mu, mu > 0");
    Domain dom = Domain::box(spec.chart_box, spec.margin,
                             "stereographic chart of S^4");
    SphereFields out;
    out.lambda = spec.lambda;
    out.mu = spec.mu;
    out.geo.domain = dom;
    out.geo.orientation.sign = +1.0;
    out.geo.metric = {dom, [](const Coord4& p) {
        const auto x = coord_jets(p);
        const Jet q =
            1.0 + square(x[0]) + square(x[1]) + square(x[2]) + square(x[3]);
        const Jet f = 4.0 * recip(square(q));
        Mat4j g{};
        for (int i = 0; i < 4; ++i) g(i, i) = f;
        return g;
    }};
    const double lambda = spec.lambda, mu = spec.mu;
    out.psi = {dom, [lambda, mu](const Coord4& p) {
        const EmbeddingJets e = embed(p);
        Mat4j psi{};
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const Jet v =
                    lambda * (e.du[1][i] * e.du[2][j] - e.du[2][i] * e.du[1][j]) +
                    mu * (e.du[3][i] * e.du[4][j] - e.du[4][i] * e.du[3][j]);
                psi(i, j) = v;
                psi(j, i) = -v;
            }
        return psi;
    }};
    for (int a = 0; a < 5; ++a)
        out.u[a] = {dom, [a](const Coord4& p) { return embed(p).u[a]; }};
    out.f_plus_closed = {dom, [lambda, mu](const Coord4& p) {
        const EmbeddingJets e = embed(p);
        const Jet r12 = square(e.u[1]) + square(e.u[2]);
        return 0.5 * sqrt(square(lambda + mu * e.u[0]) +
                          (mu * mu - lambda * lambda) * r12);
    }};
    out.f_minus_closed = {dom, [lambda, mu](const Coord4& p) {
        const EmbeddingJets e = embed(p);
        const Jet r12 = square(e.u[1]) + square(e.u[2]);
        return 0.5 * sqrt(square(lambda - mu * e.u[0]) +
                          (mu * mu - lambda * lambda) * r12);
    }};
    return out;
}

SphereXYResiduals sphere_xy_consistency(const SphereFields& f,
                                        const Coord4& p) {
    const double l = f.lambda, m = f.mu;
    if (!(l > 0.0) || !(m > l))
        throw input_error(
            "the chart/embedding identities need 0 < lambda < mu");
    const BundleEval be = bundle_eval(f.geo, f.psi, p);
    const double x = be.x.v, y = be.y.v;
    double u[5];
    for (int a = 0; a < 5; ++a) u[a] = f.u[a].eval(p).v;
    SphereXYResiduals r;
    r.u0 = std::abs(u[0] - 4.0 * x * y / (l * m));
    r.u12 = std::abs(u[1] * u[1] + u[2] * u[2] -
                     (l * l - 4.0 * x * x) * (l * l - 4.0 * y * y) /
                         (l * l * (l * l - m * m)));
    r.u34 = std::abs(u[3] * u[3] + u[4] * u[4] -
                     (m * m - 4.0 * x * x) * (m * m - 4.0 * y * y) /
                         (m * m * (m * m - l * l)));
    return r;
}

ProfilePair sphere_profiles(double lambda, double mu, double inset_fraction) {
    if (!(lambda > 0.0) || !(mu > lambda))
        throw input_error("sphere profiles need 0 < lambda < mu");
    ProfilePair pp;
    pp.A = Curve::sphere_A(lambda, mu);
    pp.B = Curve::sphere_B(lambda, mu);
    const double dx = inset_fraction * (mu - lambda) / 2.0;
    const double dy = inset_fraction * lambda;
    pp.x_range = {lambda / 2.0 + dx, mu / 2.0 - dx};
    pp.y_range = {-lambda / 2.0 + dy, lambda / 2.0 - dy};
    return pp;
}

AnsatzFields build_deformed_sphere(double lambda, double mu, double eps,
                                   double collar_fraction) {
    ProfilePair pp = sphere_profiles(lambda, mu);
    const Curve bump =
        Curve::bump(pp.x_range[0], pp.x_range[1], collar_fraction);
    pp.A = Curve::sum(pp.A, bump, eps);
    return build_hyperbolic_ambitoric(pp);
}

// ---------------------------------------------------------------------------
// Calabi local model; chart (u, v, t, s), d^c t = ds + theta

CalabiFields build_calabi(const CalabiSpec& spec) {
    if (!spec.phi.d3fn)
        throw input_error("Calabi phi needs a third derivative (it enters the "
                          "metric through phi')");
    auto theta = spec.theta;
    if (!theta)
        theta = [](const Jet& u, const Jet& v) {
            (void)v;
            return std::pair<Jet, Jet>{Jet(0.0), u};
        };
    auto rho = spec.rho;
    if (!rho) rho = [](const Jet&, const Jet&) { return Jet(1.0); };

    // Probe the t-interval: phi > 0, phi' > 0, 1 + k phi bounded away from 0
    // and of one sign throughout.
    double denom_sign = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double t =
            spec.t_range[0] + (spec.t_range[1] - spec.t_range[0]) * i / 64.0;
        const double ph = spec.phi.value(t), ph1 = spec.phi.d1(t);
        if (!(ph > 0.0) || !(ph1 > 0.0))
            throw input_error("phi must be positive and increasing on the "
                              "t-interval");
        const double denom = 1.0 + spec.k * ph;
        if (std::abs(denom) < 1e-3 ||
            (denom_sign != 0.0 && denom * denom_sign < 0.0))
            throw domain_error("1 + k phi crosses zero inside the t-interval "
                               "(t = " + std::to_string(t) + ")");
        denom_sign = denom > 0.0 ? 1.0 : -1.0;
    }
    // theta must satisfy d theta = omega_Sigma = rho^2 du^dv.
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const double u = spec.uv_range[0] +
                             (spec.uv_range[1] - spec.uv_range[0]) * i / 8.0;
            const double v = spec.uv_range[0] +
                             (spec.uv_range[1] - spec.uv_range[0]) * j / 8.0;
            const auto [tu, tv] = theta(Jet::var(0, u), Jet::var(1, v));
            const Jet r = rho(Jet::var(0, u), Jet::var(1, v));
            const double dtheta = tv.d[0] - tu.d[1];
            if (std::abs(dtheta - r.v * r.v) > 1e-9)
                throw input_error("theta does not satisfy d theta = "
                                  "omega_Sigma");
        }

    Domain dom = Domain::box({{{spec.uv_range[0], spec.uv_range[1]},
                               {spec.uv_range[0], spec.uv_range[1]},
                               {spec.t_range[0], spec.t_range[1]},
                               {-1.0, 1.0}}},
                             spec.margin, "Calabi chart (u, v, t, s)");
    const Curve phi = spec.phi;
    const double k = spec.k;

    struct Pieces {
        Jet ph, ph1, rho2, tu, tv;
    };
    auto pieces = [phi, rho, theta](const Coord4& p) {
        const Jet u = Jet::var(0, p[0]), v = Jet::var(1, p[1]),
                  t = Jet::var(2, p[2]);
        Pieces z;
        z.ph = phi.at(t);
        z.ph1 = phi.deriv_at(t);
        const Jet r = rho(u, v);
        z.rho2 = square(r);
        auto th = theta(u, v);
        z.tu = th.first;
        z.tv = th.second;
        return z;
    };

    auto gphi_at = [pieces](const Coord4& p) {
        const Pieces z = pieces(p);
        Mat4j g{};
        g(0, 0) = z.ph * z.rho2 + z.ph1 * square(z.tu);
        g(1, 1) = z.ph * z.rho2 + z.ph1 * square(z.tv);
        g(0, 1) = z.ph1 * z.tu * z.tv;
        g(1, 0) = g(0, 1);
        g(2, 2) = z.ph1;
        g(3, 3) = z.ph1;
        g(0, 3) = z.ph1 * z.tu;
        g(3, 0) = g(0, 3);
        g(1, 3) = z.ph1 * z.tv;
        g(3, 1) = g(1, 3);
        return g;
    };

    auto omega_phi_at = [pieces](const Coord4& p) {
        const Pieces z = pieces(p);
        Mat4j w{};
        auto set = [&w](int i, int j, const Jet& val) {
            w(i, j) = val;
            w(j, i) = -val;
        };
        set(0, 1, z.ph * z.rho2);
        set(2, 0, z.ph1 * z.tu);
        set(2, 1, z.ph1 * z.tv);
        set(2, 3, z.ph1);
        return w;
    };

    CalabiFields out;
    out.k = k;
    out.geo.domain = dom;
    out.geo.orientation.sign = +1.0;  // (u, v, t, s) is direct for J_+
    out.geo.metric = {dom, [gphi_at, pieces, k](const Coord4& p) {
        const Pieces z = pieces(p);
        return gphi_at(p) * recip(square(1.0 + k * z.ph));
    }};
    out.g_phi = {dom, gphi_at};
    out.omega_phi = {dom, omega_phi_at};
    out.psi = {dom, [pieces, k](const Coord4& p) {
        const Pieces z = pieces(p);
        const Jet denom = 1.0 + k * z.ph;
        const Jet c1 = z.ph * recip(square(denom));
        const Jet c2 = (1.0 - k * z.ph) * z.ph1 * recip(pow(denom, 3));
        Mat4j w{};
        auto set = [&w](int i, int j, const Jet& val) {
            w(i, j) = val;
            w(j, i) = -val;
        };
        set(0, 1, c1 * z.rho2);
        set(2, 0, c2 * z.tu);
        set(2, 1, c2 * z.tv);
        set(2, 3, c2);
        return w;
    }};
    out.J_plus_model = {dom, [gphi_at, omega_phi_at](const Coord4& p) {
        const MetricData md = metric_data_from(gphi_at(p));
        return endo_of_2form(md, omega_phi_at(p));
    }};
    out.J_minus_model = {dom, [gphi_at, pieces](const Coord4& p) {
        const Pieces z = pieces(p);
        const Mat4j gt = gphi_at(p) * recip(square(z.ph));
        const MetricData md = metric_data_from(gt);
        Mat4j w{};
        auto set = [&w](int i, int j, const Jet& val) {
            w(i, j) = val;
            w(j, i) = -val;
        };
        const Jet iph = recip(z.ph), iph2 = recip(square(z.ph));
        set(0, 1, z.rho2 * iph);
        set(2, 0, -z.ph1 * z.tu * iph2);
        set(2, 1, -z.ph1 * z.tv * iph2);
        set(2, 3, -z.ph1 * iph2);
        return endo_of_2form(md, w);
    }};
    const EndoField jp = out.J_plus_model, jm = out.J_minus_model;
    out.tau_model = {dom, [jp, jm](const Coord4& p) {
        return mul(jp.f(p), jm.f(p)) * (-1.0);
    }};
    out.K = {dom, [](const Coord4&) {
        Vec4j k{};
        k[3] = Jet(1.0);
        return k;
    }};
    out.phi_field = {dom, [phi](const Coord4& p) {
        return phi.at(Jet::var(2, p[2]));
    }};
    out.f_model = {dom, [phi](const Coord4& p) {
        return recip(phi.at(Jet::var(2, p[2])));
    }};
    return out;
}

// ---------------------------------------------------------------------------
// Decomposable product; chart (u, v, p, q)

ProductFields build_product(const ProductSpec& spec) {
    if (!spec.phi) throw input_error("product spec needs phi(u, v)");
    auto rho = spec.rho;
    if (!rho) rho = [](const Jet&, const Jet&) { return Jet(1.0); };
    auto rho_t = spec.rho_tilde;
    if (!rho_t) rho_t = [](const Jet&, const Jet&) { return Jet(1.0); };
    const auto phi = spec.phi;

    Domain dom = Domain::box({{{spec.uv_range[0], spec.uv_range[1]},
                               {spec.uv_range[0], spec.uv_range[1]},
                               {spec.pq_range[0], spec.pq_range[1]},
                               {spec.pq_range[0], spec.pq_range[1]}}},
                             spec.margin, "product chart (u, v, p, q)");
    // phi positivity probe
    for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
            const double u = spec.uv_range[0] +
                             (spec.uv_range[1] - spec.uv_range[0]) * i / 16.0;
            const double v = spec.uv_range[0] +
                             (spec.uv_range[1] - spec.uv_range[0]) * j / 16.0;
            if (!(phi(Jet(u), Jet(v)).v > 0.0))
                throw input_error("phi must be positive on the first factor");
        }

    ProductFields out;
    out.geo.domain = dom;
    out.geo.orientation.sign = +1.0;
    out.geo.metric = {dom, [phi, rho, rho_t](const Coord4& p) {
        const Jet u = Jet::var(0, p[0]), v = Jet::var(1, p[1]),
                  a = Jet::var(2, p[2]), b = Jet::var(3, p[3]);
        const Jet ph2 = square(phi(u, v));
        const Jet r2 = square(rho(u, v));
        const Jet rt2 = square(rho_t(a, b));
        Mat4j g{};
        g(0, 0) = ph2 * r2;
        g(1, 1) = ph2 * r2;
        g(2, 2) = ph2 * rt2;
        g(3, 3) = ph2 * rt2;
        return g;
    }};
    out.psi = {dom, [phi, rho](const Coord4& p) {
        const Jet u = Jet::var(0, p[0]), v = Jet::var(1, p[1]);
        const Jet c = pow(phi(u, v), 3) * square(rho(u, v));
        Mat4j w{};
        w(0, 1) = c;
        w(1, 0) = -c;
        return w;
    }};
    out.phi_field = {dom, [phi](const Coord4& p) {
        return phi(Jet::var(0, p[0]), Jet::var(1, p[1]));
    }};
    // *_Sigma d phi = phi_u dv - phi_v du (conformally invariant in 2d).
    auto star_dphi = [phi](const Coord4& p) {
        const Jet u = Jet::var(0, p[0]), v = Jet::var(1, p[1]);
        const Jet ph = phi(u, v);
        Jet phu, phv;
        phu.v = ph.d[0];
        phv.v = ph.d[1];
        for (int m = 0; m < 4; ++m) {
            phu.d[m] = ph.hess(m, 0);
            phv.d[m] = ph.hess(m, 1);
        }
        phu.poison_hessian();
        phv.poison_hessian();
        Vec4j s{};
        s[0] = -phv;
        s[1] = phu;
        return std::pair<Vec4j, Jet>{s, ph};
    };
    out.alpha_closed = {dom, [star_dphi](const Coord4& p) {
        Vec4j s = star_dphi(p).first;
        for (int i = 0; i < 2; ++i) s[i] = -s[i];
        return s;
    }};
    out.alpha_inverse_square = {dom, [star_dphi](const Coord4& p) {
        auto [s, ph] = star_dphi(p);
        const Jet iph2 = recip(square(ph));
        for (int i = 0; i < 2; ++i) s[i] = s[i] * iph2;
        return s;
    }};
    out.omega_sigma = {dom, [rho](const Coord4& p) {
        const Jet u = Jet::var(0, p[0]), v = Jet::var(1, p[1]);
        const Jet c = square(rho(u, v));
        Mat4j w{};
        w(0, 1) = c;
        w(1, 0) = -c;
        return w;
    }};
    out.omega_sigma_tilde = {dom, [rho_t](const Coord4& p) {
        const Jet a = Jet::var(2, p[2]), b = Jet::var(3, p[3]);
        const Jet c = square(rho_t(a, b));
        Mat4j w{};
        w(2, 3) = c;
        w(3, 2) = -c;
        return w;
    }};
    return out;
}

}  // namespace ambit
