#pragma once

// Tensor fields on a chart, evaluated as jets. A field is a pure closure
// from points to jet-valued components plus the domain it lives on; the
// evaluators below are the only way code reads field data, so the domain
// check is uniform. Composition happens at the closure level -- there is no
// symbolic layer.

#include <functional>
#include <utility>

#include "ambit/chart.hpp"
#include "ambit/linalg.hpp"

namespace ambit {

struct ScalarField {
    Domain domain;
    std::function<Jet(const Coord4&)> f;
    Jet eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

struct OneFormField {
    Domain domain;
    std::function<Vec4j(const Coord4&)> f;
    Vec4j eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

struct VectorField {
    Domain domain;
    std::function<Vec4j(const Coord4&)> f;
    Vec4j eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

// Stored as a full antisymmetric matrix of jets for easy contraction.
struct TwoFormField {
    Domain domain;
    std::function<Mat4j(const Coord4&)> f;
    Mat4j eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

struct EndoField {
    Domain domain;
    std::function<Mat4j(const Coord4&)> f;
    Mat4j eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

// Symmetric, positive-definite on its domain.
struct MetricField {
    Domain domain;
    std::function<Mat4j(const Coord4&)> f;
    Mat4j eval(const Coord4& p) const {
        domain.require(p, 0.0);
        return f(p);
    }
};

// The chart coordinate coframe, in its listed order, is direct when
// sign = +1.
struct Orientation {
    double sign = +1.0;
};

inline ScalarField coordinate_field(const Domain& dom, int i) {
    return {dom, [i](const Coord4& p) { return Jet::var(i, p[i]); }};
}

inline ScalarField constant_field(const Domain& dom, double c) {
    return {dom, [c](const Coord4&) { return Jet(c); }};
}

// ---------------------------------------------------------------------------
// Finite-difference oracle.
//
// Central differences with one Richardson extrapolation step: the h and h/2
// stencils are combined as (4 D(h/2) - D(h)) / 3, cancelling the O(h^2)
// term, so the truncation error is O(h^4) for first-order partials (and the
// same order for second-order stencils). The step is scaled per coordinate
// by its magnitude. This oracle is deliberately independent of the jet
// arithmetic it cross-checks.

struct FdOptions {
    double h0 = 1e-3;
};

namespace detail {

inline double fd_step(const Coord4& p, int i, double h0) {
    return h0 * std::max(1.0, std::abs(p[i]));
}

}  // namespace detail

// First-order partials d/dc_i.
inline Vec4d fd_gradient(const ScalarField& field, const Coord4& p,
                         FdOptions opt = {}) {
    double hmax = 0.0;
    for (int i = 0; i < 4; ++i)
        hmax = std::max(hmax, detail::fd_step(p, i, opt.h0));
    if (!field.domain.contains(p, 2.0 * hmax))
        throw domain_error("fd oracle needs margin >= 2h around the point");
    auto f = [&](const Coord4& q) { return field.eval(q).v; };
    Vec4d g;
    for (int i = 0; i < 4; ++i) {
        const double h = detail::fd_step(p, i, opt.h0);
        auto central = [&](double step) {
            Coord4 a = p, b = p;
            a[i] += step;
            b[i] -= step;
            return (f(a) - f(b)) / (2.0 * step);
        };
        g[i] = (4.0 * central(h / 2) - central(h)) / 3.0;
    }
    return g;
}

// Second-order partials d^2/dc_i dc_j, full symmetric matrix.
inline Mat4d fd_hessian(const ScalarField& field, const Coord4& p,
                        FdOptions opt = {}) {
    double hmax = 0.0;
    for (int i = 0; i < 4; ++i)
        hmax = std::max(hmax, detail::fd_step(p, i, opt.h0));
    if (!field.domain.contains(p, 2.0 * hmax))
        throw domain_error("fd oracle needs margin >= 2h around the point");
    auto f = [&](const Coord4& q) { return field.eval(q).v; };
    const double f0 = f(p);
    Mat4d hess;
    for (int i = 0; i < 4; ++i) {
        const double hi = detail::fd_step(p, i, opt.h0);
        auto diag = [&](double step) {
            Coord4 a = p, b = p;
            a[i] += step;
            b[i] -= step;
            return (f(a) - 2.0 * f0 + f(b)) / (step * step);
        };
        hess(i, i) = (4.0 * diag(hi / 2) - diag(hi)) / 3.0;
        for (int j = i + 1; j < 4; ++j) {
            const double hj = detail::fd_step(p, j, opt.h0);
            auto cross = [&](double si, double sj) {
                Coord4 pp = p, pm = p, mp = p, mm = p;
                pp[i] += si; pp[j] += sj;
                pm[i] += si; pm[j] -= sj;
                mp[i] -= si; mp[j] += sj;
                mm[i] -= si; mm[j] -= sj;
                return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * si * sj);
            };
            const double d = (4.0 * cross(hi / 2, hj / 2) - cross(hi, hj)) / 3.0;
            hess(i, j) = d;
            hess(j, i) = d;
        }
    }
    return hess;
}

}  // namespace ambit
