#pragma once

// Residual operators for the Killing / *-Killing / conformal-Killing
// equations, extraction of the 1-form alpha = (delta psi)/3, and the derived
// objects K1 = -1/2 alpha#, K2, Phi = Psi_+ - Psi_- and the Killing symmetric
// endomorphism S = -1/2 Phi o Phi.
//
// Every residual is the Frobenius norm of the pointwise defect in a
// g-orthonormal frame, so tolerances are frame-independent.

#include <string>
#include <vector>

#include "ambit/riemann.hpp"

namespace ambit {

struct KillingResidual {
    double value = 0.0;  // sup over the orthonormal frame of the defect norm
    std::vector<std::pair<std::string, double>> breakdown;
};

struct KillingData {
    OneFormField alpha;
    VectorField K1;
    VectorField K2;
    EndoField S;    // symmetric w.r.t. g
    EndoField Phi;  // antisymmetric, Psi_+ - Psi_-
};

// delta psi / 3 with first-order jets (the value consumes one derivative of
// psi, the gradient a second; the Hessian slots are poisoned).
OneFormField alpha_of(const Geometry& geo, const TwoFormField& psi);

// Jet1 codifferential used by alpha_of; exposed for tests.
Vec4j codifferential_2form_jet1(const MetricData& md, const Christoffel& ch,
                                const Mat4j& psi);

// sup_X || nabla_X psi - alpha ^ X_flat || over the orthonormal frame.
KillingResidual star_killing_residual(const Geometry& geo,
                                      const TwoFormField& psi,
                                      const Coord4& p);

// phi2 is Killing iff *phi2 is *-Killing.
KillingResidual killing_2form_residual(const Geometry& geo,
                                       const TwoFormField& phi2,
                                       const Coord4& p);

// Residual of nabla_X psi = alpha ^ X_flat + X . beta with alpha = delta psi/3
// and beta = d psi / 3 (p = 2, n = 4).
KillingResidual conformal_killing_residual(const Geometry& geo,
                                           const TwoFormField& psi,
                                           const Coord4& p);

// || L_K g || at p.
double killing_vector_residual(const Geometry& geo, const VectorField& K,
                               const Coord4& p);

KillingData build_killing_data(const Geometry& geo, const TwoFormField& psi);

// max over a deterministic set of 32 g-unit vectors X of |g((nabla_X S)X, X)|.
double killing_tensor_residual(const Geometry& geo, const EndoField& S,
                               const Coord4& p);

// || K2 - 1/2 S(K1) ||_g at p.
double k2_relation_residual(const Geometry& geo, const KillingData& data,
                            const Coord4& p);

// The 32 deterministic Euclidean directions behind killing_tensor_residual
// (normalized against g per point by the caller).
const std::array<Vec4d, 32>& direction_set_32();

}  // namespace ambit
