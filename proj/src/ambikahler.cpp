#include "ambit/ambikahler.hpp"

#include <algorithm>
#include <cmath>

namespace ambit {

namespace {

// 1-form image under an endomorphism through the musicals:
// (A beta) := flat(A(sharp(beta))). For g-antisymmetric A this is the
// J beta = (J grad)^flat convention used throughout.
Vec4j endo_on_oneform(const MetricData& md, const Mat4j& A, const Vec4j& beta) {
    return flat(md, mul(A, sharp(md, beta)));
}

Vec4j gradient_jet1(const Jet& s) {
    Vec4j d;
    for (int j = 0; j < 4; ++j) {
        Jet e;
        e.v = s.d[j];
        for (int m = 0; m < 4; ++m) e.d[m] = s.hess(m, j);
        e.poison_hessian();
        d[j] = e;
    }
    return d;
}

}  // namespace

BundleEval bundle_eval(const Geometry& geo, const TwoFormField& psi,
                       const Coord4& p) {
    BundleEval be;
    be.md = metric_data(geo, p);
    be.psi = psi.eval(p);
    auto split = sd_asd_split(be.md, geo.orientation.sign, be.psi);
    be.psi_p = split.first;
    be.psi_m = split.second;
    be.Psi_p = endo_of_2form(be.md, be.psi_p);
    be.Psi_m = endo_of_2form(be.md, be.psi_m);
    const Jet fp2 = trace(mul(be.Psi_p, be.Psi_p)) * (-0.25);
    const Jet fm2 = trace(mul(be.Psi_m, be.Psi_m)) * (-0.25);
    if (!(fp2.v > kFloorFPM * kFloorFPM) || !(fm2.v > kFloorFPM * kFloorFPM))
        throw domain_error(
            "psi_+ or psi_- vanishes at the point (outside M_0): |psi_+|^2 = " +
            std::to_string(fp2.v) + ", |psi_-|^2 = " + std::to_string(fm2.v));
    be.f_p = sqrt(fp2);
    be.f_m = sqrt(fm2);
    be.f = be.f_p / be.f_m;
    be.x = (be.f_p + be.f_m) * 0.5;
    be.y = (be.f_p - be.f_m) * 0.5;
    be.Jp = be.Psi_p * recip(be.f_p);
    be.Jm = be.Psi_m * recip(be.f_m);
    be.tau = mul(be.Jp, be.Jm) * (-1.0);
    const Jet cp = recip(square(be.f_p));
    const Jet cm = recip(square(be.f_m));
    be.gp = be.md.g * cp;
    be.gm = be.md.g * cm;
    // omega_{ij} = g_pm(J_pm d_i, d_j)
    be.omega_p = transpose(mul(be.gp, be.Jp));
    be.omega_m = transpose(mul(be.gm, be.Jm));
    return be;
}

BundleEval AmbiKahlerBundle::eval(const Coord4& p) const {
    return bundle_eval(base, psi, p);
}

AmbiKahlerBundle build_bundle(const Geometry& geo, const TwoFormField& psi) {
    AmbiKahlerBundle b;
    b.base = geo;
    b.psi = psi;
    const Domain dom = geo.domain;
    auto be = [geo, psi](const Coord4& p) { return bundle_eval(geo, psi, p); };
    b.f_plus = {dom, [be](const Coord4& p) { return be(p).f_p; }};
    b.f_minus = {dom, [be](const Coord4& p) { return be(p).f_m; }};
    b.f = {dom, [be](const Coord4& p) { return be(p).f; }};
    b.x = {dom, [be](const Coord4& p) { return be(p).x; }};
    b.y = {dom, [be](const Coord4& p) { return be(p).y; }};
    b.J_plus = {dom, [be](const Coord4& p) { return be(p).Jp; }};
    b.J_minus = {dom, [be](const Coord4& p) { return be(p).Jm; }};
    b.tau = {dom, [be](const Coord4& p) { return be(p).tau; }};
    b.g_plus = {dom, [be](const Coord4& p) { return be(p).gp; }};
    b.g_minus = {dom, [be](const Coord4& p) { return be(p).gm; }};
    b.omega_plus = {dom, [be](const Coord4& p) { return be(p).omega_p; }};
    b.omega_minus = {dom, [be](const Coord4& p) { return be(p).omega_m; }};
    return b;
}

double reconstruction_residual(const AmbiKahlerBundle& b, const Coord4& p) {
    const BundleEval be = b.eval(p);
    const Mat4j rebuilt = be.omega_p * pow(be.f_p, 3) + be.omega_m * pow(be.f_m, 3);
    return norm_cov2(be.md, values(be.psi - rebuilt));
}

double kahler_residual(const AmbiKahlerBundle& b, int side, const Coord4& p) {
    const BundleEval be = b.eval(p);
    const Mat4j& gpm = side > 0 ? be.gp : be.gm;
    const Mat4j& J = side > 0 ? be.Jp : be.Jm;
    const MetricData mdc = metric_data_from(gpm);
    const Christoffel ch = christoffel(mdc);
    const auto dJ = cov_d_endo(ch, J);
    // Lower the endomorphism index with g_pm and take the frame norm.
    std::array<double, 64> low{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m)
                    s += mdc.gv(i, m) * dJ[16 * k + 4 * m + j];
                low[16 * k + 4 * i + j] = s;
            }
    return norm_cov3(mdc, low);
}

double tau_df_residual(const AmbiKahlerBundle& b, const Coord4& p) {
    const BundleEval be = b.eval(p);
    const Vec4j dfp = gradient_jet1(be.f_p);
    const Vec4j dfm = gradient_jet1(be.f_m);
    const Vec4j lhs = endo_on_oneform(be.md, be.tau, dfp);
    Vec4d defect;
    for (int i = 0; i < 4; ++i) defect[i] = lhs[i].v - dfm[i].v;
    return norm_oneform(be.md, defect);
}

Vec4j kappa_form(const AmbiKahlerBundle& b, const Coord4& p, double floor) {
    const BundleEval be = b.eval(p);
    if (std::abs(be.f.v - 1.0) < floor)
        throw domain_error("kappa is undefined on the locus f = 1 (f = " +
                           std::to_string(be.f.v) + ")");
    const Vec4j df = gradient_jet1(be.f);
    Vec4j k = endo_on_oneform(be.md, be.tau, df);
    const Jet denom = 1.0 - square(be.f);
    for (int i = 0; i < 4; ++i) k[i] = k[i] * recip(denom);
    return k;
}

double kappa_closedness(const AmbiKahlerBundle& b,
                        const std::vector<Coord4>& samples, double floor) {
    double worst = 0.0;
    for (const Coord4& p : samples) {
        const Vec4j k = kappa_form(b, p, floor);
        const MetricData md = metric_data(b.base, p);
        worst = std::max(worst, norm_cov2(md, d_oneform(k)));
    }
    return worst;
}

double involutivity_residual(const AmbiKahlerBundle& b, int which,
                             const Coord4& p) {
    const BundleEval be = b.eval(p);
    // Eigenvalue clustering: tau^2 = I within tolerance, trace ~ 0.
    const Mat4d tv = values(be.tau);
    const Mat4d t2 = mul(tv, tv);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(t2(i, j) - want) > 1e-8)
                throw numeric_error("tau^2 deviates from I; eigenvalue "
                                    "clustering failed");
        }
    const double half = which > 0 ? 0.5 : -0.5;
    Mat4j P = be.tau * half;  // P = (I +- tau)/2
    for (int i = 0; i < 4; ++i) P(i, i) += Jet(0.5);
    Mat4j Q = Mat4j::identity() - P;  // opposite projector

    // Frame of the eigendistribution: projector columns, pivoted by g-norm.
    std::array<double, 4> colnorm{};
    for (int a = 0; a < 4; ++a) {
        Vec4d col;
        for (int i = 0; i < 4; ++i) col[i] = P(i, a).v;
        colnorm[a] = norm_vector(be.md, col);
    }
    int a1 = 0;
    for (int a = 1; a < 4; ++a)
        if (colnorm[a] > colnorm[a1]) a1 = a;
    // Second pivot: largest component orthogonal to the first column.
    Vec4d e1;
    for (int i = 0; i < 4; ++i) e1[i] = P(i, a1).v / colnorm[a1];
    int a2 = -1;
    double best = -1.0;
    for (int a = 0; a < 4; ++a) {
        if (a == a1) continue;
        Vec4d col;
        for (int i = 0; i < 4; ++i) col[i] = P(i, a).v;
        double proj = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                proj += be.md.gv(i, j) * col[i] * e1[j];
        Vec4d rest;
        for (int i = 0; i < 4; ++i) rest[i] = col[i] - proj * e1[i];
        const double n = norm_vector(be.md, rest);
        if (n > best) {
            best = n;
            a2 = a;
        }
    }
    if (best < 1e-6)
        throw numeric_error("tau eigendistribution is rank-deficient at the "
                            "point");
    Vec4j E1, E2;
    for (int i = 0; i < 4; ++i) {
        E1[i] = P(i, a1);
        E2[i] = P(i, a2);
    }
    const Vec4d br = lie_bracket(E1, E2);
    Vec4d opp{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) opp[i] += Q(i, j).v * br[j];
    const double n1 = norm_vector(be.md, values(E1));
    const double n2 = norm_vector(be.md, values(E2));
    return norm_vector(be.md, opp) / (n1 * n2);
}

namespace {

Jet grad_norm2_jet1(const MetricData& md, const Jet& s) {
    // |ds|^2 = g^{ij} s_i s_j with one derivative order available.
    Jet out;
    out.v = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.v += md.ginvv(i, j) * s.d[i] * s.d[j];
    for (int m = 0; m < 4; ++m) {
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                d += md.ginv(i, j).d[m] * s.d[i] * s.d[j] +
                     2.0 * md.ginvv(i, j) * s.hess(m, i) * s.d[j];
        out.d[m] = d;
    }
    out.poison_hessian();
    return out;
}

}  // namespace

SeparationResiduals separation_residuals(const AmbiKahlerBundle& b,
                                         const Coord4& p,
                                         const Profile1D* profile_A,
                                         const Profile1D* profile_B) {
    SeparationResiduals out;
    const BundleEval be = b.eval(p);
    const MetricData& md = be.md;
    const Christoffel ch = christoffel(md);
    const Jet D = square(be.x) - square(be.y);

    auto one_axis = [&](const Jet& coord) -> std::pair<std::optional<double>, Jet> {
        const Jet n2 = grad_norm2_jet1(md, coord);
        Vec4d dcoord;
        for (int i = 0; i < 4; ++i) dcoord[i] = coord.d[i];
        const double dnorm = norm_oneform(md, dcoord);
        Jet u;  // (x^2 - y^2) |d coord|^2, first-order jet
        u.v = D.v * n2.v;
        for (int m = 0; m < 4; ++m) u.d[m] = D.d[m] * n2.v + D.v * n2.d[m];
        if (dnorm < 1e-10) return {std::nullopt, u};
        // || du ^ d coord || / |d coord|^2, scale-normalized
        Mat4d w{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                w(i, j) = u.d[i] * dcoord[j] - u.d[j] * dcoord[i];
        return {norm_cov2(md, w) / (dnorm * dnorm), u};
    };

    auto [rx, ux] = one_axis(be.x);
    auto [ry, uy] = one_axis(be.y);
    out.function_of_x_only = rx;
    out.function_of_y_only = ry;

    if (profile_A) {
        out.dx2_vs_A = std::abs(ux.v - profile_A->value(be.x.v));
        const double lap = laplacian(md, ch, be.x);
        out.laplace_x_vs_A = std::abs(lap + profile_A->d1(be.x.v) / D.v);
    }
    if (profile_B) {
        out.dy2_vs_B = std::abs(uy.v - profile_B->value(be.y.v));
        const double lap = laplacian(md, ch, be.y);
        out.laplace_y_vs_B = std::abs(lap + profile_B->d1(be.y.v) / D.v);
    }
    return out;
}

double momentum_residual(const AmbiKahlerBundle& b, const KillingData& data,
                         const Coord4& p) {
    const BundleEval be = b.eval(p);
    const Vec4d K1 = values(data.K1.eval(p));
    const Vec4d K2 = values(data.K2.eval(p));
    const Jet mu1p = -recip(be.x + be.y);
    const Jet mu1m = -recip(be.x - be.y);
    const Jet mu2p = be.x * be.y * recip(be.x + be.y);
    const Jet mu2m = -(be.x * be.y) * recip(be.x - be.y);

    auto pair_residual = [&](const Vec4d& K, const Mat4j& omega,
                             const Jet& mu) {
        Vec4d defect;
        for (int j = 0; j < 4; ++j) {
            double s = mu.d[j];  // K . omega = -d mu
            for (int i = 0; i < 4; ++i) s += K[i] * omega(i, j).v;
            defect[j] = s;
        }
        return norm_oneform(be.md, defect);
    };

    double worst = pair_residual(K1, be.omega_p, mu1p);
    worst = std::max(worst, pair_residual(K1, be.omega_m, mu1m));
    worst = std::max(worst, pair_residual(K2, be.omega_p, mu2p));
    worst = std::max(worst, pair_residual(K2, be.omega_m, mu2m));
    return worst;
}

CaseLabel classify_case(const Geometry& geo, const TwoFormField& psi,
                        const std::vector<Coord4>& samples, double rel_tol) {
    if (samples.empty()) throw config_error("classify_case needs samples");
    const KillingData kd = build_killing_data(geo, psi);

    struct Row {
        double fp, fm, k1n, k2n, inner12, inner11, dxdy_rel;
    };
    std::vector<Row> rows;
    rows.reserve(samples.size());
    double rms_f = 0.0, rms_k1 = 0.0, rms_k2 = 0.0;
    for (const Coord4& p : samples) {
        const BundleEval be = bundle_eval(geo, psi, p);
        const Vec4d k1 = values(kd.K1.eval(p));
        const Vec4d k2 = values(kd.K2.eval(p));
        Row r;
        r.fp = be.f_p.v;
        r.fm = be.f_m.v;
        r.k1n = norm_vector(be.md, k1);
        r.k2n = norm_vector(be.md, k2);
        double i12 = 0.0, i11 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                i12 += be.md.gv(i, j) * k1[i] * k2[j];
                i11 += be.md.gv(i, j) * k1[i] * k1[j];
            }
        r.inner12 = i12;
        r.inner11 = i11;
        Vec4d dx, dy;
        for (int i = 0; i < 4; ++i) {
            dx[i] = be.x.d[i];
            dy[i] = be.y.d[i];
        }
        Mat4d w{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                w(i, j) = dx[i] * dy[j] - dx[j] * dy[i];
        const double nx = norm_oneform(be.md, dx), ny = norm_oneform(be.md, dy);
        r.dxdy_rel = (nx * ny > 0.0) ? norm_cov2(be.md, w) / (nx * ny) : 0.0;
        rows.push_back(r);
        rms_f += r.fp * r.fp + r.fm * r.fm;
        rms_k1 += r.k1n * r.k1n;
        rms_k2 += r.k2n * r.k2n;
    }
    const double n = static_cast<double>(rows.size());
    rms_f = std::sqrt(rms_f / (2 * n));
    rms_k1 = std::sqrt(rms_k1 / n);
    rms_k2 = std::sqrt(rms_k2 / n);

    CaseLabel label;
    auto& diag = label.diagnostics;
    double sup_fdiff = 0.0;
    for (const Row& r : rows)
        sup_fdiff = std::max(sup_fdiff, std::abs(r.fp - r.fm));
    diag["sup|f_plus - f_minus|"] = sup_fdiff;
    diag["rms_f"] = rms_f;

    if (sup_fdiff <= rel_tol * rms_f) {
        label.kind = CaseLabel::Kind::Decomposable;
        label.subcase = "f_plus = f_minus";
        return label;
    }

    // Least-squares proportionality constant pooled over samples.
    double num = 0.0, den = 0.0;
    for (const Row& r : rows) {
        num += r.inner12;
        den += r.inner11;
    }
    const double c_fit = den > 0.0 ? num / den : 0.0;
    double sup_prop = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const Coord4& p = samples[i];
        const BundleEval be = bundle_eval(geo, psi, p);
        const Vec4d k1 = values(kd.K1.eval(p));
        const Vec4d k2 = values(kd.K2.eval(p));
        Vec4d defect;
        for (int j = 0; j < 4; ++j) defect[j] = k2[j] - c_fit * k1[j];
        sup_prop = std::max(sup_prop, norm_vector(be.md, defect));
    }
    const double scale_k = std::max(rms_k1, rms_k2);
    diag["c_fit"] = c_fit;
    diag["sup|K2 - c K1|"] = sup_prop;
    diag["scale_K"] = scale_k;

    if (sup_prop <= rel_tol * scale_k && c_fit > 0.0) {
        // Which of the three combinations is the constant 2 sqrt(c)?
        const double target = 2.0 * std::sqrt(c_fit);
        const char* names[3] = {"f_plus + f_minus = 2 sqrt(c)",
                                "f_plus - f_minus = 2 sqrt(c)",
                                "f_minus - f_plus = 2 sqrt(c)"};
        for (int which = 0; which < 3; ++which) {
            double sup_dev = 0.0;
            for (const Row& r : rows) {
                const double combo = which == 0   ? r.fp + r.fm
                                     : which == 1 ? r.fp - r.fm
                                                  : r.fm - r.fp;
                sup_dev = std::max(sup_dev, std::abs(combo - target));
            }
            diag[std::string("dev[") + names[which] + "]"] = sup_dev;
            if (sup_dev <= rel_tol * std::max(rms_f, target)) {
                label.kind = CaseLabel::Kind::Calabi;
                label.c = c_fit;
                label.subcase = names[which];
                return label;
            }
        }
        throw classification_error(
            "K2 is proportional to K1 (c = " + std::to_string(c_fit) +
            ") but no constant sum/difference of f_pm was detected");
    }

    int independent = 0;
    for (const Row& r : rows)
        if (r.dxdy_rel > rel_tol) ++independent;
    diag["fraction dx^dy != 0"] = independent / n;
    if (2 * independent > static_cast<int>(rows.size())) {
        label.kind = CaseLabel::Kind::Ambitoric;
        return label;
    }
    throw classification_error(
        "inconsistent diagnostics: K2 not proportional to K1, but dx ^ dy "
        "vanishes on a majority of samples");
}

ProfileTables build_xy_tables(const AmbiKahlerBundle& b,
                              const std::vector<Coord4>& samples, int bins) {
    ProfileTables t;
    std::vector<std::pair<double, double>> ax, by;
    for (const Coord4& p : samples) {
        const BundleEval be = b.eval(p);
        const Jet D = square(be.x) - square(be.y);
        const MetricData& md = be.md;
        auto n2 = [&](const Jet& s) {
            double v = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    v += md.ginvv(i, j) * s.d[i] * s.d[j];
            return v;
        };
        ax.emplace_back(be.x.v, D.v * n2(be.x));
        by.emplace_back(be.y.v, D.v * n2(be.y));
    }
    auto binned = [bins](std::vector<std::pair<double, double>>& v) {
        std::sort(v.begin(), v.end());
        std::vector<std::pair<double, double>> out;
        if (v.empty()) return out;
        const double lo = v.front().first, hi = v.back().first;
        const double w = (hi - lo) / bins;
        if (!(w > 0)) return out;
        for (int k = 0; k < bins; ++k) {
            double s = 0.0, z = 0.0;
            int cnt = 0;
            for (const auto& [a, b2] : v)
                if (a >= lo + k * w && a < lo + (k + 1) * w + (k + 1 == bins)) {
                    s += b2;
                    z += a;
                    ++cnt;
                }
            if (cnt > 0) out.emplace_back(z / cnt, s / cnt);
        }
        return out;
    };
    t.A_fit = binned(ax);
    t.B_fit = binned(by);
    return t;
}

}  // namespace ambit
