#include "ambit/killing.hpp"

#include <cmath>

namespace ambit {

Vec4j codifferential_2form_jet1(const MetricData& md, const Christoffel& ch,
                                const Mat4j& psi) {
    // T[a][b][j] = (nabla_a psi)_{bj} and its first partials.
    Vec4j out{};
    for (int j = 0; j < 4; ++j) {
        Jet s(0.0);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double tval = psi(b, j).d[a];
                for (int c = 0; c < 4; ++c)
                    tval -= ch.gamma(c, a, b) * psi(c, j).v +
                            ch.gamma(c, a, j) * psi(b, c).v;
                s.v -= md.ginvv(a, b) * tval;
                for (int m = 0; m < 4; ++m) {
                    double dt = psi(b, j).hess(m, a);
                    for (int c = 0; c < 4; ++c)
                        dt -= ch.dgamma(m, c, a, b) * psi(c, j).v +
                              ch.gamma(c, a, b) * psi(c, j).d[m] +
                              ch.dgamma(m, c, a, j) * psi(b, c).v +
                              ch.gamma(c, a, j) * psi(b, c).d[m];
                    s.d[m] -= md.ginv(a, b).d[m] * tval + md.ginvv(a, b) * dt;
                }
            }
        s.poison_hessian();
        out[j] = s;
    }
    return out;
}

OneFormField alpha_of(const Geometry& geo, const TwoFormField& psi) {
    return {geo.domain, [geo, psi](const Coord4& p) {
                const MetricData md = metric_data(geo, p);
                const Christoffel ch = christoffel(md);
                Vec4j a = codifferential_2form_jet1(md, ch, psi.eval(p));
                for (int j = 0; j < 4; ++j) a[j] = a[j] * (1.0 / 3.0);
                return a;
            }};
}

namespace {

Mat4d wedge11(const Vec4d& a, const Vec4d& b) {
    Mat4d w{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w(i, j) = a[i] * b[j] - a[j] * b[i];
    return w;
}

}  // namespace

KillingResidual star_killing_residual(const Geometry& geo,
                                      const TwoFormField& psi,
                                      const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    const Christoffel ch = christoffel(md);
    const Mat4j pj = psi.eval(p);
    const auto dpsi = cov_d_twoform(ch, pj);
    Vec4j alpha = codifferential_2form_jet1(md, ch, pj);
    Vec4d av;
    for (int i = 0; i < 4; ++i) av[i] = alpha[i].v / 3.0;

    KillingResidual res;
    for (int a = 0; a < 4; ++a) {
        Vec4d X, Xflat{};
        for (int i = 0; i < 4; ++i) X[i] = md.frame(i, a);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Xflat[i] += md.gv(i, j) * X[j];
        Mat4d defect = wedge11(av, Xflat) * (-1.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    defect(i, j) += X[k] * dpsi[16 * k + 4 * i + j];
        const double n = norm_cov2(md, defect);
        res.breakdown.emplace_back("frame_e" + std::to_string(a), n);
        res.value = std::max(res.value, n);
    }
    return res;
}

KillingResidual killing_2form_residual(const Geometry& geo,
                                       const TwoFormField& phi2,
                                       const Coord4& p) {
    const double sign = geo.orientation.sign;
    TwoFormField star{geo.domain, [geo, phi2, sign](const Coord4& q) {
                          const MetricData md = metric_data(geo, q);
                          return hodge_star2(md, sign, phi2.eval(q));
                      }};
    return star_killing_residual(geo, star, p);
}

KillingResidual conformal_killing_residual(const Geometry& geo,
                                           const TwoFormField& psi,
                                           const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    const Christoffel ch = christoffel(md);
    const Mat4j pj = psi.eval(p);
    const auto dpsi = cov_d_twoform(ch, pj);
    const Vec4j alpha3 = codifferential_2form_jet1(md, ch, pj);
    Vec4d av;
    for (int i = 0; i < 4; ++i) av[i] = alpha3[i].v / 3.0;
    // Full exterior derivative as a 3-tensor, divided by 3.
    std::array<double, 64> beta{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                beta[16 * k + 4 * i + j] =
                    (pj(i, j).d[k] - pj(k, j).d[i] + pj(k, i).d[j]) / 3.0;

    KillingResidual res;
    for (int a = 0; a < 4; ++a) {
        Vec4d X, Xflat{};
        for (int i = 0; i < 4; ++i) X[i] = md.frame(i, a);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Xflat[i] += md.gv(i, j) * X[j];
        Mat4d defect = wedge11(av, Xflat) * (-1.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k)
                    s += X[k] * (dpsi[16 * k + 4 * i + j] -
                                 beta[16 * k + 4 * i + j]);
                defect(i, j) += s;
            }
        const double n = norm_cov2(md, defect);
        res.breakdown.emplace_back("frame_e" + std::to_string(a), n);
        res.value = std::max(res.value, n);
    }
    return res;
}

double killing_vector_residual(const Geometry& geo, const VectorField& K,
                               const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    return norm_cov2(md, lie_derivative_metric(md.g, K.eval(p)));
}

KillingData build_killing_data(const Geometry& geo, const TwoFormField& psi) {
    KillingData data;
    data.alpha = alpha_of(geo, psi);
    const double sign = geo.orientation.sign;

    const OneFormField alpha = data.alpha;
    data.K1 = {geo.domain, [geo, alpha](const Coord4& p) {
                   const MetricData md = metric_data(geo, p);
                   Vec4j k = sharp(md, alpha.eval(p));
                   for (int i = 0; i < 4; ++i) k[i] = k[i] * (-0.5);
                   return k;
               }};

    auto phi_at = [geo, psi, sign](const Coord4& p) {
        const MetricData md = metric_data(geo, p);
        const Mat4j pj = psi.eval(p);
        // Phi is the endomorphism of the Killing 2-form *psi = psi_+ - psi_-.
        return endo_of_2form(md, hodge_star2(md, sign, pj));
    };
    data.Phi = {geo.domain, phi_at};
    data.S = {geo.domain, [phi_at](const Coord4& p) {
                  const Mat4j phi = phi_at(p);
                  return mul(phi, phi) * (-0.5);
              }};

    data.K2 = {geo.domain, [geo, psi, phi_at, sign](const Coord4& p) {
                   const MetricData md = metric_data(geo, p);
                   const Mat4j pj = psi.eval(p);
                   const auto split = sd_asd_split(md, sign, pj);
                   const Mat4j Pp = endo_of_2form(md, split.first);
                   const Mat4j Pm = endo_of_2form(md, split.second);
                   // f+^2 - f-^2 = -(tr Psi_+^2 - tr Psi_-^2)/4
                   const Jet u =
                       (trace(mul(Pp, Pp)) - trace(mul(Pm, Pm))) * (-0.25);
                   Vec4j du;
                   for (int j = 0; j < 4; ++j) {
                       Jet e;
                       e.v = u.d[j];
                       for (int m = 0; m < 4; ++m) e.d[m] = u.hess(m, j);
                       e.poison_hessian();
                       du[j] = e;
                   }
                   const Vec4j gradu = sharp(md, du);
                   Vec4j k = mul(phi_at(p), gradu);
                   for (int i = 0; i < 4; ++i) k[i] = k[i] * 0.125;
                   return k;
               }};
    return data;
}

const std::array<Vec4d, 32>& direction_set_32() {
    static const std::array<Vec4d, 32> dirs = [] {
        std::array<Vec4d, 32> d{};
        // Deterministic spherical spread: Halton angles mapped to R^4 via
        // two polar pairs.
        for (int n = 0; n < 32; ++n) {
            const double t1 =
                2.0 * M_PI * detail::radical_inverse(n + 1, 2);
            const double t2 =
                2.0 * M_PI * detail::radical_inverse(n + 1, 3);
            const double r = 0.5 + 0.5 * detail::radical_inverse(n + 1, 5);
            const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
            d[n] = Vec4d{{r * std::cos(t1), r * std::sin(t1),
                          s * std::cos(t2), s * std::sin(t2)}};
        }
        return d;
    }();
    return dirs;
}

double killing_tensor_residual(const Geometry& geo, const EndoField& S,
                               const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    const Christoffel ch = christoffel(md);
    const auto dS = cov_d_endo(ch, S.eval(p));
    double worst = 0.0;
    for (const Vec4d& raw : direction_set_32()) {
        // Normalize against g so the cubic scaling is uniform.
        double n2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) n2 += md.gv(i, j) * raw[i] * raw[j];
        const double inv = 1.0 / std::sqrt(n2);
        Vec4d X;
        for (int i = 0; i < 4; ++i) X[i] = raw[i] * inv;
        // g((nabla_X S) X, X)
        double val = 0.0;
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int l = 0; l < 4; ++l)
                        val += md.gv(l, i) * dS[16 * k + 4 * i + j] * X[k] *
                               X[j] * X[l];
        worst = std::max(worst, std::abs(val));
    }
    return worst;
}

double k2_relation_residual(const Geometry& geo, const KillingData& data,
                            const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    const Vec4d k1 = values(data.K1.eval(p));
    const Vec4d k2 = values(data.K2.eval(p));
    const Mat4d S = values(data.S.eval(p));
    Vec4d defect;
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += S(i, j) * k1[j];
        defect[i] = k2[i] - 0.5 * s;
    }
    return norm_vector(md, defect);
}

}  // namespace ambit
