#pragma once

// Metric-derived operators on a chart: Christoffel symbols, curvature,
// Hodge star on 2-forms, musical isomorphisms, exterior derivative,
// codifferential, Laplacian, Lie derivative of the metric, Nijenhuis tensor.
//
// Conventions (normative for everything downstream):
//   * curvature sign      R_{X,Y}Z = nabla_{[X,Y]}Z - [nabla_X, nabla_Y]Z
//                         (the negative of the other common convention;
//                         Ricci and Scal are arranged to be positive on the
//                         round sphere either way),
//   * Laplacian           Delta f = -tr_g(nabla df),
//   * codifferential      delta psi = -sum_i e_i . nabla_{e_i} psi over a
//                         g-orthonormal frame,
// so that delta(df) = Delta f, a *-Killing form satisfies delta psi = 3 alpha,
// and the ambitoric chart gives Delta x = -A'(x)/(x^2 - y^2) verbatim.

#include <array>
#include <utility>

#include "ambit/fields.hpp"

namespace ambit {

struct Geometry {
    MetricField metric;
    Orientation orientation;
    Domain domain;
};

// Per-point cache of metric jets and quantities derived from them.
struct MetricData {
    Mat4j g;        // metric component jets
    Mat4j ginv;     // inverse metric jets
    Jet sqrt_det;   // sqrt(det g) as a jet
    Mat4d gv;       // values
    Mat4d ginvv;    // values
    Mat4d frame;    // columns = g-orthonormal frame (Gram-Schmidt, e0..e3)
    double cond;    // spectral condition number of gv
};

// Throws numeric_error if g is not positive-definite or its condition
// number exceeds kMetricConditionLimit.
inline constexpr double kMetricConditionLimit = 1e8;
MetricData metric_data(const Geometry& geo, const Coord4& p);
MetricData metric_data_from(const Mat4j& g);

struct Christoffel {
    // G[k][i][j] = Gamma^k_ij (symmetric in i, j); dG[m][k][i][j] = d_m of it.
    std::array<double, 64> G{};
    std::array<double, 256> dG{};
    double gamma(int k, int i, int j) const { return G[16 * k + 4 * i + j]; }
    double dgamma(int m, int k, int i, int j) const {
        return dG[64 * m + 16 * k + 4 * i + j];
    }
};

Christoffel christoffel(const MetricData& md);
Christoffel christoffel(const Geometry& geo, const Coord4& p);

struct CurvaturePack {
    // riem[l][k][i][j]: R(d_i, d_j) d_k = riem^l d_l in the sign convention
    // stated at the top of this header.
    std::array<double, 256> riem{};
    Mat4d ricci;       // Ricci endomorphism Ric^i_j (sphere-positive)
    Mat4d ricci_form;  // Ric_ij = g_ik Ric^k_j
    double scal = 0.0;
    double r(int l, int k, int i, int j) const {
        return riem[64 * l + 16 * k + 4 * i + j];
    }
};

CurvaturePack curvature(const Geometry& geo, const Coord4& p);
CurvaturePack curvature(const MetricData& md, const Christoffel& ch);

// Hodge star on 2-forms; jets in, jets out. orient_sign is +1 when the chart
// coframe in coordinate order is direct.
Mat4j hodge_star2(const MetricData& md, double orient_sign, const Mat4j& psi);

// psi -> (psi_plus, psi_minus) with *psi_pm = +-psi_pm.
std::pair<Mat4j, Mat4j> sd_asd_split(const MetricData& md, double orient_sign,
                                     const Mat4j& psi);

// Musical isomorphisms and the endomorphism of a 2-form: g(Psi(X), Y) = psi(X, Y).
Vec4j sharp(const MetricData& md, const Vec4j& beta);
Vec4j flat(const MetricData& md, const Vec4j& vec);
Mat4j endo_of_2form(const MetricData& md, const Mat4j& psi);
Mat4j twoform_of_endo(const MetricData& md, const Mat4j& endo);

// Conformally invariant inner product (A, B) = -1/2 tr(A o B) on
// antisymmetric endomorphisms; (J, J) = 2 for an orthogonal complex structure.
double endo_inner(const Mat4d& a, const Mat4d& b);
Jet endo_inner(const Mat4j& a, const Mat4j& b);

// Covariant derivatives at value level (the jet supplies the partials).
// Index layout is stated per function.
Mat4d cov_d_oneform(const Christoffel& ch, const Vec4j& beta);  // D(i,j) = (nabla_i beta)_j
Mat4d cov_d_vector(const Christoffel& ch, const Vec4j& vec);    // D(i,j) = (nabla_i vec)^j
std::array<double, 64> cov_d_twoform(const Christoffel& ch, const Mat4j& psi);
// T[16k+4i+j] = (nabla_k psi)_{ij}
std::array<double, 64> cov_d_endo(const Christoffel& ch, const Mat4j& endo);
// T[16k+4i+j] = (nabla_k J)^i_j
std::array<double, 64> cov_d_metric(const Christoffel& ch, const Mat4j& g);
// T[16k+4i+j] = (nabla_k g)_{ij}; zero for the Levi-Civita connection

// delta psi as a 1-form value: (delta psi)_j = -g^{ab} (nabla_a psi)_{bj}.
Vec4d codifferential_2form(const MetricData& md, const Christoffel& ch,
                           const Mat4j& psi);
// delta beta as a scalar: -g^{ab} (nabla_a beta)_b.
double codifferential_1form(const MetricData& md, const Christoffel& ch,
                            const Vec4j& beta);

// Delta f = -g^{ij} (hess_ij f - Gamma^k_ij d_k f).
double laplacian(const MetricData& md, const Christoffel& ch, const Jet& f);

// (L_K g)_{ij} = K^k d_k g_ij + g_kj d_i K^k + g_ik d_j K^k.
Mat4d lie_derivative_metric(const Mat4j& g, const Vec4j& K);

// Lie bracket [X, Y]^i = X^k d_k Y^i - Y^k d_k X^i.
Vec4d lie_bracket(const Vec4j& X, const Vec4j& Y);

// Nijenhuis tensor from jets: N[16i+4j+4... N(d_j, d_k)^i.
// Throws input_error when J^2 deviates from -I beyond tolerance.
std::array<double, 64> nijenhuis(const Mat4j& J, double tol = 1e-8);

// Exterior derivative values.
Mat4d d_oneform(const Vec4j& beta);  // (d beta)_{ij}
// 3-form stored by omitted index: c[l] = (d psi)(e_a, e_b, e_c) with
// (a, b, c) the ascending triple skipping l.
Vec4d d_twoform(const Mat4j& psi);
// d(d beta) from the Hessian data of beta; identically zero for C^2 fields.
Vec4d dd_oneform(const Vec4j& beta);

// Frame-based tensor norms (Frobenius in the g-orthonormal frame, so the
// numbers are frame- and coordinate-independent).
double norm_vector(const MetricData& md, const Vec4d& v);
double norm_oneform(const MetricData& md, const Vec4d& beta);
double norm_cov2(const MetricData& md, const Mat4d& T);     // T_{ij} dx^i dx^j
double norm_endo(const MetricData& md, const Mat4d& N);     // N^i_j
double norm_threeform(const MetricData& md, const Vec4d& c);
double norm_cov3(const MetricData& md, const std::array<double, 64>& T);
// T[16k+4i+j], all slots covariant

}  // namespace ambit
