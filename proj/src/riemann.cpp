#include "ambit/riemann.hpp"

#include <cmath>

namespace ambit {

MetricData metric_data_from(const Mat4j& g) {
    MetricData md;
    md.g = g;
    md.gv = values(g);
    const SymEigen eig = sym_eigen(md.gv);
    const double lo = eig.values[0], hi = eig.values[3];
    if (!(lo > 0.0))
        throw numeric_error("metric is not positive-definite (min eigenvalue " +
                            std::to_string(lo) + ")");
    md.cond = hi / lo;
    if (md.cond > kMetricConditionLimit)
        throw numeric_error("metric condition number " +
                            std::to_string(md.cond) + " exceeds limit");
    md.ginv = inverse(g);
    md.ginvv = values(md.ginv);
    md.sqrt_det = sqrt(det(g));

    // Gram-Schmidt on the coordinate frame, deterministic pivot order e0..e3.
    Mat4d E{};
    for (int a = 0; a < 4; ++a) {
        Vec4d v{};
        v[a] = 1.0;
        for (int b = 0; b < a; ++b) {
            double proj = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    proj += md.gv(i, j) * v[i] * E(j, b);
            for (int i = 0; i < 4; ++i) v[i] -= proj * E(i, b);
        }
        double n2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) n2 += md.gv(i, j) * v[i] * v[j];
        const double inv_n = 1.0 / std::sqrt(n2);
        for (int i = 0; i < 4; ++i) E(i, a) = v[i] * inv_n;
    }
    md.frame = E;
    return md;
}

MetricData metric_data(const Geometry& geo, const Coord4& p) {
    return metric_data_from(geo.metric.eval(p));
}

Christoffel christoffel(const MetricData& md) {
    Christoffel ch;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                double s = 0.0;
                for (int l = 0; l < 4; ++l)
                    s += md.ginvv(k, l) * (md.g(j, l).d[i] + md.g(i, l).d[j] -
                                           md.g(i, j).d[l]);
                ch.G[16 * k + 4 * i + j] = 0.5 * s;
                ch.G[16 * k + 4 * j + i] = 0.5 * s;
            }
    for (int m = 0; m < 4; ++m)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = i; j < 4; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 4; ++l) {
                        const double bracket = md.g(j, l).d[i] +
                                               md.g(i, l).d[j] -
                                               md.g(i, j).d[l];
                        const double dbracket = md.g(j, l).hess(m, i) +
                                                md.g(i, l).hess(m, j) -
                                                md.g(i, j).hess(m, l);
                        s += md.ginv(k, l).d[m] * bracket +
                             md.ginvv(k, l) * dbracket;
                    }
                    ch.dG[64 * m + 16 * k + 4 * i + j] = 0.5 * s;
                    ch.dG[64 * m + 16 * k + 4 * j + i] = 0.5 * s;
                }
    return ch;
}

Christoffel christoffel(const Geometry& geo, const Coord4& p) {
    return christoffel(metric_data(geo, p));
}

CurvaturePack curvature(const MetricData& md, const Christoffel& ch) {
    CurvaturePack pack;
    // R_std is the common convention nabla_i nabla_j - nabla_j nabla_i; the
    // stored array is its negative, matching the header's sign statement.
    std::array<double, 256> rstd{};
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double s = ch.dgamma(i, l, j, k) - ch.dgamma(j, l, i, k);
                    for (int m = 0; m < 4; ++m)
                        s += ch.gamma(l, i, m) * ch.gamma(m, j, k) -
                             ch.gamma(l, j, m) * ch.gamma(m, i, k);
                    rstd[64 * l + 16 * k + 4 * i + j] = s;
                    pack.riem[64 * l + 16 * k + 4 * i + j] = -s;
                }
    Mat4d ric{};
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i) s += rstd[64 * i + 16 * k + 4 * i + j];
            ric(j, k) = s;
        }
    pack.ricci_form = ric;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += md.ginvv(i, k) * ric(k, j);
            pack.ricci(i, j) = s;
        }
    pack.scal = trace(pack.ricci);
    return pack;
}

CurvaturePack curvature(const Geometry& geo, const Coord4& p) {
    const MetricData md = metric_data(geo, p);
    return curvature(md, christoffel(md));
}

namespace {

// epsilon_{ijkl} for the six index pairs; zero unless all indices distinct.
int levi_civita(int i, int j, int k, int l) {
    const int perm[4] = {i, j, k, l};
    int sign = 1;
    int a[4] = {perm[0], perm[1], perm[2], perm[3]};
    for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) {
            if (a[x] == a[y]) return 0;
            if (a[x] > a[y]) {
                std::swap(a[x], a[y]);
                sign = -sign;
            }
        }
    return sign;
}

}  // namespace

Mat4j hodge_star2(const MetricData& md, double orient_sign, const Mat4j& psi) {
    // psi^{kl} = g^{ka} g^{lb} psi_{ab}
    Mat4j up = mul(md.ginv, mul(psi, transpose(md.ginv)));
    // (psi up)^{kl} = g^{ka} psi_{ab} (g^T)^{bl} = g^{ka} g^{lb} psi_{ab}  ok
    Mat4j star{};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Jet s(0.0);
            for (int k = 0; k < 4; ++k)
                for (int l = k + 1; l < 4; ++l) {
                    const int eps = levi_civita(i, j, k, l);
                    if (eps != 0) s += up(k, l) * static_cast<double>(eps);
                }
            s = s * md.sqrt_det * orient_sign;
            star(i, j) = s;
            star(j, i) = -s;
        }
    return star;
}

std::pair<Mat4j, Mat4j> sd_asd_split(const MetricData& md, double orient_sign,
                                     const Mat4j& psi) {
    const Mat4j sp = hodge_star2(md, orient_sign, psi);
    return {(psi + sp) * 0.5, (psi - sp) * 0.5};
}

Vec4j sharp(const MetricData& md, const Vec4j& beta) {
    return mul(md.ginv, beta);
}

Vec4j flat(const MetricData& md, const Vec4j& vec) { return mul(md.g, vec); }

// With psi_{ij} = psi(d_i, d_j) and column-acting endomorphisms, the map
// satisfying g(Psi(X), Y) = psi(X, Y) is Psi = g^{-1} psi^T.
Mat4j endo_of_2form(const MetricData& md, const Mat4j& psi) {
    return mul(md.ginv, transpose(psi));
}

Mat4j twoform_of_endo(const MetricData& md, const Mat4j& endo) {
    return transpose(mul(md.g, endo));
}

double endo_inner(const Mat4d& a, const Mat4d& b) {
    return -0.5 * trace(mul(a, b));
}

Jet endo_inner(const Mat4j& a, const Mat4j& b) {
    return trace(mul(a, b)) * (-0.5);
}

Mat4d cov_d_oneform(const Christoffel& ch, const Vec4j& beta) {
    Mat4d out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = beta[j].d[i];
            for (int k = 0; k < 4; ++k) s -= ch.gamma(k, i, j) * beta[k].v;
            out(i, j) = s;
        }
    return out;
}

Mat4d cov_d_vector(const Christoffel& ch, const Vec4j& vec) {
    Mat4d out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = vec[j].d[i];
            for (int k = 0; k < 4; ++k) s += ch.gamma(j, i, k) * vec[k].v;
            out(i, j) = s;
        }
    return out;
}

std::array<double, 64> cov_d_twoform(const Christoffel& ch, const Mat4j& psi) {
    std::array<double, 64> out{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = psi(i, j).d[k];
                for (int m = 0; m < 4; ++m)
                    s -= ch.gamma(m, k, i) * psi(m, j).v +
                         ch.gamma(m, k, j) * psi(i, m).v;
                out[16 * k + 4 * i + j] = s;
            }
    return out;
}

std::array<double, 64> cov_d_endo(const Christoffel& ch, const Mat4j& endo) {
    std::array<double, 64> out{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = endo(i, j).d[k];
                for (int m = 0; m < 4; ++m)
                    s += ch.gamma(i, k, m) * endo(m, j).v -
                         ch.gamma(m, k, j) * endo(i, m).v;
                out[16 * k + 4 * i + j] = s;
            }
    return out;
}

std::array<double, 64> cov_d_metric(const Christoffel& ch, const Mat4j& g) {
    std::array<double, 64> out{};
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = g(i, j).d[k];
                for (int m = 0; m < 4; ++m)
                    s -= ch.gamma(m, k, i) * g(m, j).v +
                         ch.gamma(m, k, j) * g(i, m).v;
                out[16 * k + 4 * i + j] = s;
            }
    return out;
}

Vec4d codifferential_2form(const MetricData& md, const Christoffel& ch,
                           const Mat4j& psi) {
    const auto dpsi = cov_d_twoform(ch, psi);
    Vec4d out{};
    for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                s -= md.ginvv(a, b) * dpsi[16 * a + 4 * b + j];
        out[j] = s;
    }
    return out;
}

double codifferential_1form(const MetricData& md, const Christoffel& ch,
                            const Vec4j& beta) {
    const Mat4d db = cov_d_oneform(ch, beta);
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s -= md.ginvv(a, b) * db(a, b);
    return s;
}

double laplacian(const MetricData& md, const Christoffel& ch, const Jet& f) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double hess = f.hess(i, j);
            for (int k = 0; k < 4; ++k) hess -= ch.gamma(k, i, j) * f.d[k];
            s -= md.ginvv(i, j) * hess;
        }
    return s;
}

Mat4d lie_derivative_metric(const Mat4j& g, const Vec4j& K) {
    Mat4d out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k)
                s += K[k].v * g(i, j).d[k] + g(k, j).v * K[k].d[i] +
                     g(i, k).v * K[k].d[j];
            out(i, j) = s;
        }
    return out;
}

Vec4d lie_bracket(const Vec4j& X, const Vec4j& Y) {
    Vec4d out{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
            s += X[k].v * Y[i].d[k] - Y[k].v * X[i].d[k];
        out[i] = s;
    }
    return out;
}

std::array<double, 64> nijenhuis(const Mat4j& J, double tol) {
    const Mat4d Jv = values(J);
    const Mat4d J2 = mul(Jv, Jv);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double want = (i == j) ? -1.0 : 0.0;
            if (std::abs(J2(i, j) - want) > tol)
                throw input_error("nijenhuis: J^2 deviates from -I");
        }
    std::array<double, 64> N{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m)
                    s += Jv(m, j) * J(i, k).d[m] - Jv(m, k) * J(i, j).d[m] +
                         Jv(i, m) * (J(m, j).d[k] - J(m, k).d[j]);
                N[16 * i + 4 * j + k] = s;
            }
    return N;
}

Mat4d d_oneform(const Vec4j& beta) {
    Mat4d out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = beta[j].d[i] - beta[i].d[j];
    return out;
}

Vec4d d_twoform(const Mat4j& psi) {
    auto comp = [&](int i, int j, int k) {
        return psi(j, k).d[i] - psi(i, k).d[j] + psi(i, j).d[k];
    };
    Vec4d out;
    out[0] = comp(1, 2, 3);
    out[1] = comp(0, 2, 3);
    out[2] = comp(0, 1, 3);
    out[3] = comp(0, 1, 2);
    return out;
}

Vec4d dd_oneform(const Vec4j& beta) {
    // Compose through a derived 2-form whose entries only carry first-order
    // data, exactly the way a chained field evaluation would see d(beta).
    Mat4j db{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Jet e;
            e.v = beta[j].d[i] - beta[i].d[j];
            for (int m = 0; m < 4; ++m)
                e.d[m] = beta[j].hess(m, i) - beta[i].hess(m, j);
            e.poison_hessian();
            db(i, j) = e;
        }
    return d_twoform(db);
}

double norm_vector(const MetricData& md, const Vec4d& v) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += md.gv(i, j) * v[i] * v[j];
    return std::sqrt(std::max(0.0, s));
}

double norm_oneform(const MetricData& md, const Vec4d& beta) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += md.ginvv(i, j) * beta[i] * beta[j];
    return std::sqrt(std::max(0.0, s));
}

double norm_cov2(const MetricData& md, const Mat4d& T) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double m = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    m += T(i, j) * md.frame(i, a) * md.frame(j, b);
            s += m * m;
        }
    return std::sqrt(s);
}

double norm_endo(const MetricData& md, const Mat4d& N) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double m = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    for (int k = 0; k < 4; ++k)
                        m += md.gv(i, j) * N(i, k) * md.frame(k, b) *
                             md.frame(j, a);
            s += m * m;
        }
    return std::sqrt(s);
}

double norm_threeform(const MetricData& md, const Vec4d& c) {
    // Rebuild the full antisymmetric array from the omitted-index storage.
    std::array<double, 64> T{};
    const int triple[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (int l = 0; l < 4; ++l) {
        const int i = triple[l][0], j = triple[l][1], k = triple[l][2];
        const int perms[6][4] = {{i, j, k, 1},  {j, k, i, 1},  {k, i, j, 1},
                                 {j, i, k, -1}, {i, k, j, -1}, {k, j, i, -1}};
        for (const auto& p : perms)
            T[16 * p[0] + 4 * p[1] + p[2]] = p[3] * c[l];
    }
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int e = b + 1; e < 4; ++e) {
                double m = 0.0;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        for (int k = 0; k < 4; ++k)
                            m += T[16 * i + 4 * j + k] * md.frame(i, a) *
                                 md.frame(j, b) * md.frame(k, e);
                s += m * m;
            }
    return std::sqrt(s);
}

double norm_cov3(const MetricData& md, const std::array<double, 64>& T) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int e = 0; e < 4; ++e) {
                double m = 0.0;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        for (int k = 0; k < 4; ++k)
                            m += T[16 * i + 4 * j + k] * md.frame(i, a) *
                                 md.frame(j, b) * md.frame(k, e);
                s += m * m;
            }
    return std::sqrt(s);
}

}  // namespace ambit
