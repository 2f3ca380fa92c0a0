#include "ambit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

namespace ambit {

const char* family_name(Fixture::Family f) {
    switch (f) {
        case Fixture::Family::Ambitoric: return "ambitoric";
        case Fixture::Family::Sphere: return "sphere";
        case Fixture::Family::DeformedSphere: return "deformed-sphere";
        case Fixture::Family::Calabi: return "calabi";
        case Fixture::Family::Product: return "product";
    }
    return "?";
}

std::vector<std::string> applicable_suites(Fixture::Family f) {
    std::vector<std::string> s{"star-killing", "kahler",
                               "curvature-closed-forms", "killing-fields",
                               "momenta", "killing-tensor"};
    switch (f) {
        case Fixture::Family::Ambitoric:
        case Fixture::Family::DeformedSphere:
            s.push_back("separation");
            break;
        case Fixture::Family::Sphere:
            s.push_back("separation");
            s.push_back("sphere-formulas");
            break;
        case Fixture::Family::Calabi:
            s.push_back("calabi-family");
            break;
        case Fixture::Family::Product:
            s.push_back("product");
            break;
    }
    if (f == Fixture::Family::DeformedSphere) s.push_back("deformation");
    s.push_back("classifier");  // consumes the others' cached fields
    return s;
}

bool suite_applicable(Fixture::Family f, const std::string& suite) {
    const auto all = applicable_suites(f);
    return std::find(all.begin(), all.end(), suite) != all.end();
}

AmbiKahlerBundle& SuiteContext::bundle() {
    if (!bundle_) bundle_ = build_bundle(fix.geo, fix.psi);
    return *bundle_;
}

KillingData& SuiteContext::killing() {
    if (!killing_) killing_ = build_killing_data(fix.geo, fix.psi);
    return *killing_;
}

void parallel_for_samples(std::size_t n,
                          const std::function<void(std::size_t)>& body) {
    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("AMBIT_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) workers = static_cast<unsigned>(v);
    }
    if (workers <= 1 || n < 8) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

namespace {

// Accumulates one residual per sample point into a check row.
class RowBuilder {
  public:
    RowBuilder(std::string identity, std::string anchor, double tol)
        : identity_(std::move(identity)), anchor_(std::move(anchor)),
          tol_(tol) {}

    RowBuilder& lower_bound() {
        lower_ = true;
        return *this;
    }
    RowBuilder& note(std::string n) {
        note_ = std::move(n);
        return *this;
    }

    CheckRow over(const std::vector<Coord4>& samples,
                  const std::function<double(const Coord4&)>& residual,
                  std::optional<double> tol_override = std::nullopt) const {
        CheckRow row;
        row.identity = identity_;
        row.anchor = anchor_;
        row.tolerance =
            (tol_override && !lower_) ? *tol_override : tol_;
        row.lower_bound = lower_;
        row.note = note_;
        std::vector<double> vals(samples.size());
        parallel_for_samples(samples.size(), [&](std::size_t i) {
            vals[i] = residual(samples[i]);
        });
        double sq = 0.0;
        for (double v : vals) {
            // A NaN residual must fail loudly, not lose the max comparison.
            if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
            row.max_residual = std::max(row.max_residual, v);
            sq += v * v;
        }
        row.n_points = static_cast<int>(samples.size());
        row.rms_residual =
            samples.empty() ? 0.0 : std::sqrt(sq / samples.size());
        row.pass = lower_ ? (row.max_residual >= row.tolerance)
                          : (row.max_residual <= row.tolerance);
        return row;
    }

    CheckRow single(double value) const {
        CheckRow row;
        row.identity = identity_;
        row.anchor = anchor_;
        row.tolerance = tol_;
        row.lower_bound = lower_;
        row.note = note_;
        row.n_points = 1;
        row.max_residual = row.rms_residual = value;
        row.pass = lower_ ? (value >= tol_) : (value <= tol_);
        return row;
    }

    CheckRow skipped(std::string why) const {
        CheckRow row;
        row.identity = identity_;
        row.anchor = anchor_;
        row.tolerance = tol_;
        row.skipped = true;
        row.pass = true;
        row.note = std::move(why);
        return row;
    }

  private:
    std::string identity_, anchor_, note_;
    double tol_;
    bool lower_ = false;
};

double max_abs_diff(const Mat4d& a, const Mat4d& b) {
    double m = 0.0;
    for (int i = 0; i < 16; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
    return m;
}

// || J^2 + I ||_max
double complex_structure_defect(const Mat4j& J) {
    const Mat4d Jv = values(J);
    Mat4d J2 = mul(Jv, Jv);
    for (int i = 0; i < 4; ++i) J2(i, i) += 1.0;
    return max_abs_diff(J2, Mat4d{});
}

double nijenhuis_norm(const Geometry& geo, const Mat4j& J, const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    const auto N = nijenhuis(J);
    // Lower the vector index and take the frame norm.
    std::array<double, 64> low{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m)
                    s += md.gv(m, i) * N[16 * m + 4 * j + k];
                low[16 * i + 4 * j + k] = s;
            }
    return norm_cov3(md, low);
}

SuiteResult suite_star_killing(SuiteContext& ctx) {
    SuiteResult res{"star-killing", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;

    res.rows.push_back(
        RowBuilder("star_killing(psi)", "nabla_X psi = alpha ^ X_flat", 1e-8)
            .over(S, [&](const Coord4& p) {
                return star_killing_residual(fix.geo, fix.psi, p).value;
            }, tol));
    res.rows.push_back(
        RowBuilder("closed(psi)", "d psi = 0", 1e-9).over(S, [&](const Coord4& p) {
            const MetricData md = metric_data(fix.geo, p);
            return norm_threeform(md, d_twoform(fix.psi.eval(p)));
        }, tol));
    const double sign = fix.geo.orientation.sign;
    TwoFormField star_psi{fix.geo.domain, [geo = fix.geo, psi = fix.psi,
                                           sign](const Coord4& q) {
                              const MetricData md = metric_data(geo, q);
                              return hodge_star2(md, sign, psi.eval(q));
                          }};
    res.rows.push_back(
        RowBuilder("killing(*psi)", "*psi is a Killing 2-form", 1e-8)
            .over(S, [&](const Coord4& p) {
                return killing_2form_residual(fix.geo, star_psi, p).value;
            }, tol));
    for (int side = 0; side < 2; ++side) {
        TwoFormField part{fix.geo.domain,
                          [geo = fix.geo, psi = fix.psi, sign,
                           side](const Coord4& q) {
                              const MetricData md = metric_data(geo, q);
                              auto sp = sd_asd_split(md, sign, psi.eval(q));
                              return side == 0 ? sp.first : sp.second;
                          }};
        res.rows.push_back(
            RowBuilder(side == 0 ? "conformal_killing(psi_plus)"
                                 : "conformal_killing(psi_minus)",
                       "nabla_X psi_pm = alpha ^ X_flat + X . beta", 1e-8)
                .over(S, [&](const Coord4& p) {
                    return conformal_killing_residual(fix.geo, part, p).value;
                }, tol));
    }
    return res;
}

SuiteResult suite_kahler(SuiteContext& ctx) {
    SuiteResult res{"kahler", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    AmbiKahlerBundle& b = ctx.bundle();

    res.rows.push_back(RowBuilder("complex_structures", "J_pm^2 = -I", 1e-10)
                           .over(S, [&](const Coord4& p) {
                               const BundleEval be = b.eval(p);
                               return std::max(complex_structure_defect(be.Jp),
                                               complex_structure_defect(be.Jm));
                           }, tol));
    res.rows.push_back(RowBuilder("involution", "tau^2 = I, tau = -J_+ J_-",
                                  1e-10)
                           .over(S, [&](const Coord4& p) {
                               const BundleEval be = b.eval(p);
                               const Mat4d tv = values(be.tau);
                               Mat4d t2 = mul(tv, tv);
                               for (int i = 0; i < 4; ++i) t2(i, i) -= 1.0;
                               return max_abs_diff(t2, Mat4d{});
                           }, tol));
    res.rows.push_back(
        RowBuilder("kahler(g_plus, J_plus)", "nabla^{g_+} J_+ = 0", 1e-8)
            .over(S, [&](const Coord4& p) { return kahler_residual(b, +1, p); },
                  tol));
    res.rows.push_back(
        RowBuilder("kahler(g_minus, J_minus)", "nabla^{g_-} J_- = 0", 1e-8)
            .over(S, [&](const Coord4& p) { return kahler_residual(b, -1, p); },
                  tol));
    res.rows.push_back(RowBuilder("closed(omega_pm)", "d omega_pm = 0", 1e-9)
                           .over(S, [&](const Coord4& p) {
                               const BundleEval be = b.eval(p);
                               const double dp = norm_threeform(
                                   be.md, d_twoform(be.omega_p));
                               const double dm = norm_threeform(
                                   be.md, d_twoform(be.omega_m));
                               return std::max(dp, dm);
                           }, tol));
    res.rows.push_back(RowBuilder("integrable(J_pm)", "Nijenhuis(J_pm) = 0",
                                  1e-8)
                           .over(S, [&](const Coord4& p) {
                               const BundleEval be = b.eval(p);
                               return std::max(
                                   nijenhuis_norm(fix.geo, be.Jp, p),
                                   nijenhuis_norm(fix.geo, be.Jm, p));
                           }, tol));
    res.rows.push_back(RowBuilder("coupling", "tau(d f_+) = d f_-", 1e-9)
                           .over(S, [&](const Coord4& p) {
                               return tau_df_residual(b, p);
                           }, tol));
    res.rows.push_back(
        RowBuilder("reconstruction", "psi = f_+^3 omega_+ + f_-^3 omega_-",
                   1e-10)
            .over(S, [&](const Coord4& p) {
                return reconstruction_residual(b, p);
            }, tol));
    res.rows.push_back(
        RowBuilder("orthogonality", "dx, J_+dx, dy, J_+dy pairwise orthogonal",
                   1e-9)
            .over(S, [&](const Coord4& p) {
                const BundleEval be = b.eval(p);
                Vec4j dx{}, dy{};
                for (int i = 0; i < 4; ++i) {
                    dx[i] = Jet(be.x.d[i]);
                    dy[i] = Jet(be.y.d[i]);
                }
                const Vec4j jdx = flat(be.md, mul(be.Jp, sharp(be.md, dx)));
                const Vec4j jdy = flat(be.md, mul(be.Jp, sharp(be.md, dy)));
                const Vec4d forms[4] = {values(dx), values(jdx), values(dy),
                                        values(jdy)};
                double norms[4], worst = 0.0;
                for (int i = 0; i < 4; ++i)
                    norms[i] = norm_oneform(be.md, forms[i]);
                for (int i = 0; i < 4; ++i)
                    for (int j = i + 1; j < 4; ++j) {
                        if (norms[i] < 1e-12 || norms[j] < 1e-12) continue;
                        double inner = 0.0;
                        for (int a = 0; a < 4; ++a)
                            for (int c = 0; c < 4; ++c)
                                inner += be.md.ginvv(a, c) * forms[i][a] *
                                         forms[j][c];
                        worst = std::max(worst,
                                         std::abs(inner) / (norms[i] * norms[j]));
                    }
                return worst;
            }, tol));

    // kappa and the log-derivative identity live off the locus f = 1.
    bool f_near_one = false;
    for (const Coord4& p : S) {
        const BundleEval be = b.eval(p);
        if (std::abs(be.f.v - 1.0) < 1e-6) {
            f_near_one = true;
            break;
        }
    }
    RowBuilder kappa_row("exact(kappa)", "d kappa = 0, kappa = tau(df)/(1-f^2)",
                         1e-8);
    RowBuilder logd_row("log_derivative",
                        "d f_+/f_+ = df/(f(1-f^2)) + tau(df)/(1-f^2)", 1e-8);
    if (f_near_one) {
        res.rows.push_back(kappa_row.skipped("f = 1 on the fixture"));
        res.rows.push_back(logd_row.skipped("f = 1 on the fixture"));
    } else {
        res.rows.push_back(kappa_row.over(S, [&](const Coord4& p) {
            const Vec4j k = kappa_form(b, p);
            const MetricData md = metric_data(fix.geo, p);
            return norm_cov2(md, d_oneform(k));
        }, tol));
        res.rows.push_back(logd_row.over(S, [&](const Coord4& p) {
            const BundleEval be = b.eval(p);
            Vec4j df{};
            for (int i = 0; i < 4; ++i) {
                Jet e;
                e.v = be.f.d[i];
                for (int m = 0; m < 4; ++m) e.d[m] = be.f.hess(m, i);
                df[i] = e;
            }
            const Vec4j tdf = flat(be.md, mul(be.tau, sharp(be.md, df)));
            const double fv = be.f.v, om = 1.0 - fv * fv;
            Vec4d defect;
            for (int i = 0; i < 4; ++i)
                defect[i] = be.f_p.d[i] / be.f_p.v -
                            be.f.d[i] / (fv * om) - tdf[i].v / om;
            return norm_oneform(be.md, defect);
        }, tol));
    }
    return res;
}

SuiteResult suite_curvature(SuiteContext& ctx) {
    SuiteResult res{"curvature-closed-forms", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;

    res.rows.push_back(
        RowBuilder("bianchi", "R(X,Y)Z + R(Y,Z)X + R(Z,X)Y = 0", 1e-9)
            .over(S, [&](const Coord4& p) {
                const CurvaturePack cp = curvature(fix.geo, p);
                double worst = 0.0;
                for (int l = 0; l < 4; ++l)
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            for (int k = 0; k < 4; ++k)
                                worst = std::max(
                                    worst, std::abs(cp.r(l, k, i, j) +
                                                    cp.r(l, i, j, k) +
                                                    cp.r(l, j, k, i)));
                return worst;
            }, tol));

    const bool have_profiles = fix.profiles.has_value();
    if (have_profiles) {
        const ProfilePair& pp = *fix.profiles;
        res.rows.push_back(
            RowBuilder("scal_closed_form",
                       "Scal = -(A''(x) + B''(y))/(x^2 - y^2)", 1e-6)
                .over(S, [&](const Coord4& p) {
                    const CurvaturePack cp = curvature(fix.geo, p);
                    return std::abs(cp.scal -
                                    scal_closed_form(pp, p[0], p[1]));
                }, tol));
        res.rows.push_back(
            RowBuilder("ricci_structure", "Ric = (Scal/4) I + b tau", 1e-6)
                .over(S, [&](const Coord4& p) {
                    const MetricData md = metric_data(fix.geo, p);
                    const CurvaturePack cp = curvature(md, christoffel(md));
                    const Mat4d tau = values(fix.ansatz->tau.eval(p));
                    const double bval = b_closed_form(pp, p[0], p[1]);
                    Mat4d want = tau * bval;
                    for (int i = 0; i < 4; ++i) want(i, i) += cp.scal / 4.0;
                    Mat4d defect = cp.ricci - want;
                    return norm_endo(md, defect);
                }, tol));
    }
    if (fix.family == Fixture::Family::Sphere) {
        res.rows.push_back(RowBuilder("constant_curvature", "Scal = 12", 1e-6)
                               .over(S, [&](const Coord4& p) {
                                   return std::abs(
                                       curvature(fix.geo, p).scal - 12.0);
                               }, tol));
        res.rows.push_back(RowBuilder("einstein", "Ric = 3 g", 1e-6)
                               .over(S, [&](const Coord4& p) {
                                   const MetricData md =
                                       metric_data(fix.geo, p);
                                   const CurvaturePack cp =
                                       curvature(md, christoffel(md));
                                   Mat4d defect = cp.ricci;
                                   for (int i = 0; i < 4; ++i)
                                       defect(i, i) -= 3.0;
                                   return norm_endo(md, defect);
                               }, tol));
    }
    // Ric commutes with both complex structures on M_1.
    if (fix.family != Fixture::Family::Product) {
        AmbiKahlerBundle& b = ctx.bundle();
        res.rows.push_back(
            RowBuilder("ricci_invariance", "[Ric, J_pm] = 0", 1e-6)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = b.eval(p);
                    const CurvaturePack cp =
                        curvature(be.md, christoffel(be.md));
                    const double c1 = norm_endo(
                        be.md, commutator(cp.ricci, values(be.Jp)));
                    const double c2 = norm_endo(
                        be.md, commutator(cp.ricci, values(be.Jm)));
                    return std::max(c1, c2);
                }, tol));
        res.rows.push_back(
            RowBuilder("ricci_span", "Ric lies in span{I, tau}", 1e-6)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = b.eval(p);
                    const CurvaturePack cp =
                        curvature(be.md, christoffel(be.md));
                    const Mat4d tau = values(be.tau);
                    const double a = cp.scal / 4.0;
                    // tau is trace-free with tr(tau^2) = 4.
                    Mat4d dev = cp.ricci;
                    for (int i = 0; i < 4; ++i) dev(i, i) -= a;
                    const double bfit = trace(mul(dev, tau)) / 4.0;
                    Mat4d defect = dev - tau * bfit;
                    return norm_endo(be.md, defect);
                }, tol));
    }
    return res;
}

SuiteResult suite_separation(SuiteContext& ctx) {
    SuiteResult res{"separation", {}, true};
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    AmbiKahlerBundle& b = ctx.bundle();

    std::optional<Profile1D> pa, pb;
    if (ctx.fix.profiles) {
        pa = ctx.fix.profiles->A.as_profile();
        pb = ctx.fix.profiles->B.as_profile();
    } else if (ctx.fix.family == Fixture::Family::Sphere) {
        const auto pp =
            sphere_profiles(ctx.fix.sphere->lambda, ctx.fix.sphere->mu);
        pa = pp.A.as_profile();
        pb = pp.B.as_profile();
    }

    res.rows.push_back(
        RowBuilder("separable_x", "(x^2-y^2)|dx|^2 is a function of x alone",
                   1e-7)
            .over(S, [&](const Coord4& p) {
                const auto sep = separation_residuals(b, p);
                return sep.function_of_x_only.value_or(0.0);
            }, tol));
    res.rows.push_back(
        RowBuilder("separable_y", "(x^2-y^2)|dy|^2 is a function of y alone",
                   1e-7)
            .over(S, [&](const Coord4& p) {
                const auto sep = separation_residuals(b, p);
                return sep.function_of_y_only.value_or(0.0);
            }, tol));
    if (pa && pb) {
        res.rows.push_back(
            RowBuilder("profile_A", "(x^2-y^2)|dx|^2 = A(x)", 1e-7)
                .over(S, [&](const Coord4& p) {
                    const auto sep =
                        separation_residuals(b, p, &*pa, &*pb);
                    return sep.dx2_vs_A.value_or(0.0);
                }, tol));
        res.rows.push_back(
            RowBuilder("profile_B", "(x^2-y^2)|dy|^2 = B(y)", 1e-7)
                .over(S, [&](const Coord4& p) {
                    const auto sep =
                        separation_residuals(b, p, &*pa, &*pb);
                    return sep.dy2_vs_B.value_or(0.0);
                }, tol));
        res.rows.push_back(
            RowBuilder("laplacians",
                       "Delta x = -A'(x)/(x^2-y^2), Delta y = -B'(y)/(x^2-y^2)",
                       1e-6)
                .over(S, [&](const Coord4& p) {
                    const auto sep =
                        separation_residuals(b, p, &*pa, &*pb);
                    return std::max(sep.laplace_x_vs_A.value_or(0.0),
                                    sep.laplace_y_vs_B.value_or(0.0));
                }, tol));
    }
    return res;
}

SuiteResult suite_killing_fields(SuiteContext& ctx) {
    SuiteResult res{"killing-fields", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    KillingData& kd = ctx.killing();
    AmbiKahlerBundle& b = ctx.bundle();
    const bool decomposable = fix.family == Fixture::Family::Product;

    if (decomposable) {
        res.rows.push_back(
            RowBuilder("K1_not_killing", "L_{K_1} g != 0 on the decomposable "
                                         "case", 1e-3)
                .lower_bound()
                .over(S, [&](const Coord4& p) {
                    return killing_vector_residual(fix.geo, kd.K1, p);
                }));
        res.rows.push_back(RowBuilder("K2_vanishes", "K_2 = 0", 1e-10)
                               .over(S, [&](const Coord4& p) {
                                   const MetricData md =
                                       metric_data(fix.geo, p);
                                   return norm_vector(
                                       md, values(kd.K2.eval(p)));
                               }, tol));
    } else {
        res.rows.push_back(RowBuilder("killing(K1)", "L_{K_1} g = 0", 1e-8)
                               .over(S, [&](const Coord4& p) {
                                   return killing_vector_residual(fix.geo,
                                                                  kd.K1, p);
                               }, tol));
        res.rows.push_back(RowBuilder("killing(K2)", "L_{K_2} g = 0", 1e-8)
                               .over(S, [&](const Coord4& p) {
                                   return killing_vector_residual(fix.geo,
                                                                  kd.K2, p);
                               }, tol));
        res.rows.push_back(
            RowBuilder("K1_flat", "K_1^flat = J_+ dx + J_+ dy", 1e-8)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = b.eval(p);
                    Vec4j dx{}, dy{};
                    for (int i = 0; i < 4; ++i) {
                        dx[i] = Jet(be.x.d[i]);
                        dy[i] = Jet(be.y.d[i]);
                    }
                    const Vec4j want =
                        flat(be.md, mul(be.Jp, sharp(be.md, dx + dy)));
                    const Vec4j got = flat(be.md, kd.K1.eval(p));
                    Vec4d defect;
                    for (int i = 0; i < 4; ++i)
                        defect[i] = got[i].v - want[i].v;
                    return norm_oneform(be.md, defect);
                }, tol));
        res.rows.push_back(
            RowBuilder("K2_flat", "K_2^flat = y^2 J_+ dx + x^2 J_+ dy", 1e-8)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = b.eval(p);
                    Vec4j dx{}, dy{};
                    for (int i = 0; i < 4; ++i) {
                        dx[i] = Jet(be.x.d[i] * be.y.v * be.y.v);
                        dy[i] = Jet(be.y.d[i] * be.x.v * be.x.v);
                    }
                    const Vec4j want =
                        flat(be.md, mul(be.Jp, sharp(be.md, dx + dy)));
                    const Vec4j got = flat(be.md, kd.K2.eval(p));
                    Vec4d defect;
                    for (int i = 0; i < 4; ++i)
                        defect[i] = got[i].v - want[i].v;
                    return norm_oneform(be.md, defect);
                }, tol));
    }
    res.rows.push_back(RowBuilder("commuting", "[K_1, K_2] = 0", 1e-8)
                           .over(S, [&](const Coord4& p) {
                               const MetricData md = metric_data(fix.geo, p);
                               return norm_vector(
                                   md, lie_bracket(kd.K1.eval(p),
                                                   kd.K2.eval(p)));
                           }, tol));
    res.rows.push_back(
        RowBuilder("poisson_commuting", "omega_pm(K_1, K_2) = 0", 1e-9)
            .over(S, [&](const Coord4& p) {
                const BundleEval be = b.eval(p);
                const Vec4d k1 = values(kd.K1.eval(p));
                const Vec4d k2 = values(kd.K2.eval(p));
                double wp = 0.0, wm = 0.0;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) {
                        wp += be.omega_p(i, j).v * k1[i] * k2[j];
                        wm += be.omega_m(i, j).v * k1[i] * k2[j];
                    }
                return std::max(std::abs(wp), std::abs(wm));
            }, tol));
    if (fix.profiles) {
        const ProfilePair pp = *fix.profiles;
        res.rows.push_back(
            RowBuilder("gradient_endomorphism",
                       "nabla alpha_sharp = h_+ J_+ + h_- J_-", 1e-7)
                .over(S, [&](const Coord4& p) {
                    const MetricData md = metric_data(fix.geo, p);
                    const Christoffel ch = christoffel(md);
                    const Vec4j ash = sharp(md, kd.alpha.eval(p));
                    const Mat4d D = cov_d_vector(ch, ash);
                    const auto [hp, hm] = h_closed_form(pp, p[0], p[1]);
                    const Mat4d Jp = values(fix.ansatz->J_plus.eval(p));
                    const Mat4d Jm = values(fix.ansatz->J_minus.eval(p));
                    Mat4d defect;
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j)
                            defect(i, j) = D(j, i) - hp * Jp(i, j) -
                                           hm * Jm(i, j);
                    return norm_endo(md, defect);
                }, tol));
    }
    return res;
}

SuiteResult suite_momenta(SuiteContext& ctx) {
    SuiteResult res{"momenta", {}, true};
    const auto tol = ctx.tol_override;
    AmbiKahlerBundle& b = ctx.bundle();
    KillingData& kd = ctx.killing();
    res.rows.push_back(
        RowBuilder("hamiltonian",
                   "K . omega = -d mu for all four (K, omega, mu) pairs",
                   1e-8)
            .over(ctx.samples, [&](const Coord4& p) {
                return momentum_residual(b, kd, p);
            }, tol));
    return res;
}

SuiteResult suite_killing_tensor(SuiteContext& ctx) {
    SuiteResult res{"killing-tensor", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    KillingData& kd = ctx.killing();
    AmbiKahlerBundle& b = ctx.bundle();

    res.rows.push_back(
        RowBuilder("killing_tensor(S)", "g((nabla_X S) X, X) = 0", 1e-8)
            .over(S, [&](const Coord4& p) {
                return killing_tensor_residual(fix.geo, kd.S, p);
            }, tol));
    res.rows.push_back(
        RowBuilder("eigenvalues(S)", "spec(S) = {2x^2, 2x^2, 2y^2, 2y^2}",
                   1e-8)
            .over(S, [&](const Coord4& p) {
                const BundleEval be = b.eval(p);
                const Mat4d Sv = values(kd.S.eval(p));
                Mat4d Ssym{};
                for (int a = 0; a < 4; ++a)
                    for (int c = 0; c < 4; ++c) {
                        double s = 0.0;
                        for (int i = 0; i < 4; ++i)
                            for (int j = 0; j < 4; ++j)
                                for (int k = 0; k < 4; ++k)
                                    s += be.md.gv(i, j) * Sv(i, k) *
                                         be.md.frame(k, a) * be.md.frame(j, c);
                        Ssym(a, c) = s;
                    }
                const SymEigen eig = sym_eigen(Ssym);
                const double want[4] = {
                    2.0 * be.y.v * be.y.v, 2.0 * be.y.v * be.y.v,
                    2.0 * be.x.v * be.x.v, 2.0 * be.x.v * be.x.v};
                double worst = 0.0;
                for (int i = 0; i < 4; ++i)
                    worst = std::max(worst,
                                     std::abs(eig.values[i] - want[i]));
                return worst;
            }, tol));
    res.rows.push_back(RowBuilder("jelonek", "K_2 = 1/2 S(K_1)", 1e-9)
                           .over(S, [&](const Coord4& p) {
                               return k2_relation_residual(fix.geo, kd, p);
                           }, tol));
    return res;
}

SuiteResult suite_classifier(SuiteContext& ctx) {
    SuiteResult res{"classifier", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    AmbiKahlerBundle& b = ctx.bundle();

    CheckRow row;
    row.identity = "trichotomy";
    row.anchor = "ambitoric / Calabi (K_2 = c K_1) / decomposable";
    row.n_points = static_cast<int>(S.size());
    row.tolerance = 0.0;
    // The trichotomy assumes a non-parallel form; detect the parallel case
    // (alpha = 0) and report the row as skipped.
    {
        KillingData& kd = ctx.killing();
        double alpha_scale = 0.0, f_scale = 0.0;
        for (const Coord4& p : S) {
            const BundleEval be = b.eval(p);
            alpha_scale = std::max(
                alpha_scale, norm_oneform(be.md, values(kd.alpha.eval(p))));
            f_scale = std::max(f_scale, std::abs(be.f_p.v));
        }
        if (alpha_scale <= 1e-10 * std::max(1.0, f_scale)) {
            row.skipped = true;
            row.pass = true;
            row.note = "psi is parallel (alpha = 0); the trichotomy assumes "
                       "a non-parallel form";
            res.rows.push_back(row);
            return res;
        }
    }
    try {
        const CaseLabel label = classify_case(fix.geo, fix.psi, S);
        const bool kind_ok = label.kind == fix.expected_case;
        bool c_ok = true;
        if (fix.has_expected_c && label.kind == CaseLabel::Kind::Calabi) {
            c_ok = std::abs(label.c - fix.expected_c) <= 1e-6;
            row.max_residual = std::abs(label.c - fix.expected_c);
        }
        row.pass = kind_ok && c_ok;
        row.note = std::string("classified as ") +
                   (label.kind == CaseLabel::Kind::Ambitoric ? "ambitoric"
                    : label.kind == CaseLabel::Kind::Calabi  ? "calabi"
                                                             : "decomposable");
        if (label.kind == CaseLabel::Kind::Calabi)
            row.note += " (c = " + std::to_string(label.c) + ", " +
                        label.subcase + ")";
    } catch (const classification_error& e) {
        row.pass = false;
        row.note = e.what();
    }
    res.rows.push_back(row);

    // Involutivity of the tau eigendistributions, per case.
    auto sigma_of_tau_df = [&](const Coord4& p) {
        const BundleEval be = b.eval(p);
        Vec4j df{};
        for (int i = 0; i < 4; ++i) df[i] = Jet(be.f.d[i]);
        const Vec4j tdf = flat(be.md, mul(be.tau, sharp(be.md, df)));
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                num += be.md.ginvv(i, j) * tdf[i].v * be.f.d[j];
                den += be.md.ginvv(i, j) * be.f.d[i] * be.f.d[j];
            }
        return den > 1e-20 ? num / den : 0.0;
    };
    if (fix.family == Fixture::Family::Product) {
        res.rows.push_back(
            RowBuilder("involutive(T_pm)",
                       "both tau eigendistributions are involutive", 1e-8)
                .over(S, [&](const Coord4& p) {
                    return std::max(involutivity_residual(b, +1, p),
                                    involutivity_residual(b, -1, p));
                }, ctx.tol_override));
    } else if (fix.family == Fixture::Family::Calabi) {
        const double sigma = sigma_of_tau_df(S.front());
        const int side = sigma >= 0 ? +1 : -1;
        res.rows.push_back(
            RowBuilder(side > 0 ? "involutive(T_plus)" : "involutive(T_minus)",
                       "tau(df) = sign df makes T^sign involutive", 1e-8)
                .note("measured tau(df)/df sign: " + std::to_string(sigma))
                .over(S, [&](const Coord4& p) {
                    return involutivity_residual(b, side, p);
                }, ctx.tol_override));
    } else if (fix.profiles) {
        // Generic ambitoric chart: tau(df) != +-df, neither distribution
        // closes. The threshold is derived from direct evaluation on the
        // lambda = 1, mu = 2 sphere profiles (residuals sit above 1e-1).
        res.rows.push_back(
            RowBuilder("non_involutive(T_pm)",
                       "neither tau eigendistribution closes", 1e-3)
                .lower_bound()
                .over(S, [&](const Coord4& p) {
                    return std::min(involutivity_residual(b, +1, p),
                                    involutivity_residual(b, -1, p));
                }));
    }
    return res;
}

SuiteResult suite_sphere_formulas(SuiteContext& ctx) {
    SuiteResult res{"sphere-formulas", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    const SphereFields& sf = *fix.sphere;

    res.rows.push_back(
        RowBuilder("norms", "f_pm match the ambient closed forms", 1e-9)
            .over(S, [&](const Coord4& p) {
                const BundleEval be = bundle_eval(fix.geo, fix.psi, p);
                return std::max(
                    std::abs(be.f_p.v - sf.f_plus_closed.eval(p).v),
                    std::abs(be.f_m.v - sf.f_minus_closed.eval(p).v));
            }, tol));
    res.rows.push_back(
        RowBuilder("pfaffian", "f_+^2 - f_-^2 = lambda mu u_0", 1e-9)
            .over(S, [&](const Coord4& p) {
                const BundleEval be = bundle_eval(fix.geo, fix.psi, p);
                const double u0 = sf.u[0].eval(p).v;
                return std::abs(be.f_p.v * be.f_p.v - be.f_m.v * be.f_m.v -
                                sf.lambda * sf.mu * u0);
            }, tol));
    RowBuilder xyrow("chart_identities",
                     "u_0 = 4xy/(lambda mu) and the |u|^2 pair identities",
                     1e-9);
    if (sf.lambda <= 0.0 || sf.lambda >= sf.mu) {
        res.rows.push_back(
            xyrow.skipped("identities need 0 < lambda < mu"));
    } else {
        res.rows.push_back(xyrow.over(S, [&](const Coord4& p) {
            return sphere_xy_consistency(sf, p).sup();
        }, tol));
    }
    return res;
}

SuiteResult suite_deformation(SuiteContext& ctx) {
    SuiteResult res{"deformation", {}, true};
    const auto& fix = ctx.fix;
    const auto tol = ctx.tol_override;
    const ProfilePair& pp = *fix.profiles;
    const ProfilePair base = sphere_profiles(fix.lambda, fix.mu);

    // The deformed profiles agree with the round ones on the boundary collar.
    RowBuilder collar("collar_agreement",
                      "deformed A equals round A near the rectangle boundary",
                      1e-12);
    double worst = 0.0;
    const double w = 0.18 * (pp.x_range[1] - pp.x_range[0]);
    for (int i = 0; i <= 16; ++i) {
        const double t = i / 16.0;
        const double zl = pp.x_range[0] + t * w;
        const double zr = pp.x_range[1] - t * w;
        worst = std::max(worst, std::abs(pp.A.value(zl) - base.A.value(zl)));
        worst = std::max(worst, std::abs(pp.A.value(zr) - base.A.value(zr)));
    }
    res.rows.push_back(collar.single(worst));

    res.rows.push_back(
        RowBuilder("star_killing_deformed",
                   "psi stays *-Killing under the deformed metric", 1e-8)
            .over(ctx.samples, [&](const Coord4& p) {
                return star_killing_residual(fix.geo, fix.psi, p).value;
            }, tol));
    return res;
}

SuiteResult suite_calabi_family(SuiteContext& ctx) {
    SuiteResult res{"calabi-family", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    const CalabiFields& cf = *fix.calabi;

    res.rows.push_back(
        RowBuilder("model_tau", "tau(K) = -K for the underlying Calabi pair",
                   1e-10)
            .over(S, [&](const Coord4& p) {
                const MetricData md = metric_data_from(cf.g_phi.eval(p));
                const Mat4d tau = values(cf.tau_model.eval(p));
                const Vec4d K = values(cf.K.eval(p));
                Vec4d defect;
                for (int i = 0; i < 4; ++i) {
                    double s = K[i];
                    for (int j = 0; j < 4; ++j) s += tau(i, j) * K[j];
                    defect[i] = s;
                }
                return norm_vector(md, defect);
            }, tol));
    res.rows.push_back(
        RowBuilder("kahler_pair", "nabla^{g_phi} omega_phi = 0", 1e-8)
            .over(S, [&](const Coord4& p) {
                const MetricData md = metric_data_from(cf.g_phi.eval(p));
                const Christoffel ch = christoffel(md);
                return norm_cov3(md,
                                 cov_d_twoform(ch, cf.omega_phi.eval(p)));
            }, tol));
    if (std::abs(cf.k) > 0.0) {
        res.rows.push_back(
            RowBuilder("family_rescaling", "f_+^(k) |k + f| / f = 1", 1e-9)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = bundle_eval(fix.geo, fix.psi, p);
                    const double f = cf.f_model.eval(p).v;
                    return std::abs(
                        be.f_p.v * std::abs(cf.k + f) / f - 1.0);
                }, tol));
        // The k-family shares the plus Kähler structure: the measured g_+
        // equals g_phi for every k.
        res.rows.push_back(
            RowBuilder("shared_plus_structure", "g_+^(k) = g_phi for all k",
                       1e-9)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = bundle_eval(fix.geo, fix.psi, p);
                    const Mat4j gphi = cf.g_phi.eval(p);
                    const MetricData md = metric_data_from(gphi);
                    return norm_cov2(md, values(be.gp - gphi));
                }, tol));
        res.rows.push_back(
            RowBuilder("trichotomy_constant",
                       "one of f_+ +- f_- is the constant 2 sqrt(c)", 1e-8)
                .over(S, [&](const Coord4& p) {
                    const BundleEval be = bundle_eval(fix.geo, fix.psi, p);
                    // Constant 1 for this family (c = 1/4), sign per k.
                    const double dev0 =
                        std::abs(be.f_p.v + be.f_m.v - 1.0);
                    const double dev1 =
                        std::abs(be.f_p.v - be.f_m.v - 1.0);
                    const double dev2 =
                        std::abs(be.f_m.v - be.f_p.v - 1.0);
                    return std::min(dev0, std::min(dev1, dev2));
                }, tol));
    }
    res.rows.push_back(
        RowBuilder("chart_structure", "d(d^c t) = omega_Sigma and d^c t(K) = 1",
                   1e-9)
            .note("flat Sigma data: theta = u dv")
            .over(S, [&](const Coord4& p) {
                // d^c t = ds + theta; with the default flat data,
                // theta = u dv, omega_Sigma = du^dv.
                const Jet u = Jet::var(0, p[0]);
                Vec4j dct{};
                dct[1] = u;       // theta_v = u
                dct[3] = Jet(1.0);
                const Mat4d d = d_oneform(dct);
                const double dk = dct[3].v;  // d^c t(d/ds)
                double worst = std::abs(dk - 1.0);
                for (int i = 0; i < 4; ++i)
                    for (int j = i + 1; j < 4; ++j) {
                        const double want =
                            (i == 0 && j == 1) ? 1.0 : 0.0;
                        worst = std::max(worst, std::abs(d(i, j) - want));
                    }
                return worst;
            }, tol));
    return res;
}

SuiteResult suite_product(SuiteContext& ctx) {
    SuiteResult res{"product", {}, true};
    const auto& fix = ctx.fix;
    const auto& S = ctx.samples;
    const auto tol = ctx.tol_override;
    const ProductFields& pf = *fix.product;
    KillingData& kd = ctx.killing();

    res.rows.push_back(
        RowBuilder("hodge_dual", "*psi = phi^3 omega_Sigma~", 1e-10)
            .over(S, [&](const Coord4& p) {
                const MetricData md = metric_data(fix.geo, p);
                const Mat4j st =
                    hodge_star2(md, fix.geo.orientation.sign, fix.psi.eval(p));
                const double ph3 = std::pow(pf.phi_field.eval(p).v, 3);
                const Mat4j wt = pf.omega_sigma_tilde.eval(p);
                return norm_cov2(md, values(st - wt * ph3));
            }, tol));
    res.rows.push_back(
        RowBuilder("alpha_closed_form",
                   "alpha = delta psi / 3 = -*_Sigma d phi", 1e-8)
            .over(S, [&](const Coord4& p) {
                const MetricData md = metric_data(fix.geo, p);
                const Vec4j got = kd.alpha.eval(p);
                const Vec4j want = pf.alpha_closed.eval(p);
                Vec4d defect;
                for (int i = 0; i < 4; ++i) defect[i] = got[i].v - want[i].v;
                return norm_oneform(md, defect);
            }, tol));
    return res;
}

}  // namespace

SuiteResult run_suite(const std::string& name, SuiteContext& ctx) {
    SuiteResult res;
    if (name == "star-killing") res = suite_star_killing(ctx);
    else if (name == "kahler") res = suite_kahler(ctx);
    else if (name == "curvature-closed-forms") res = suite_curvature(ctx);
    else if (name == "separation") res = suite_separation(ctx);
    else if (name == "killing-fields") res = suite_killing_fields(ctx);
    else if (name == "momenta") res = suite_momenta(ctx);
    else if (name == "killing-tensor") res = suite_killing_tensor(ctx);
    else if (name == "classifier") res = suite_classifier(ctx);
    else if (name == "sphere-formulas") res = suite_sphere_formulas(ctx);
    else if (name == "deformation") res = suite_deformation(ctx);
    else if (name == "calabi-family") res = suite_calabi_family(ctx);
    else if (name == "product") res = suite_product(ctx);
    else throw config_error("unknown suite: " + name);
    res.pass = true;
    for (const CheckRow& row : res.rows)
        if (!row.skipped && !row.pass) res.pass = false;
    return res;
}

}  // namespace ambit
