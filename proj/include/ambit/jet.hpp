#pragma once

// Second-order forward-mode jets over four chart coordinates.
//
// A Jet carries the value, the four first partials and the ten independent
// second partials of a scalar expression at a point. Arithmetic propagates
// all of them through the truncated product/chain rules, so any expression
// built from coordinate jets has bit-stable, exact derivatives to order 2.
// The Hessian is stored as an upper triangle, which makes its symmetry a
// structural fact rather than a numerical one.

#include <array>
#include <cmath>
#include <limits>

namespace ambit {

inline constexpr int kDim = 4;

// Upper-triangle index for the Hessian: (i, j) with i <= j.
constexpr int hidx(int i, int j) {
    return (i <= j) ? (i * kDim + j - i * (i + 1) / 2)
                    : (j * kDim + i - j * (j + 1) / 2);
}

struct Jet {
    double v = 0.0;
    std::array<double, 4> d{{0, 0, 0, 0}};
    std::array<double, 10> h{{0, 0, 0, 0, 0, 0, 0, 0, 0, 0}};

    Jet() = default;
    Jet(double value) : v(value) {}

    static Jet var(int i, double value) {
        Jet j(value);
        j.d[i] = 1.0;
        return j;
    }

    // Marks a jet whose second-order data is not available (derived fields
    // that already consumed one derivative order). Any use of the Hessian
    // then surfaces as NaN instead of a silently wrong number.
    Jet& poison_hessian() {
        h.fill(std::numeric_limits<double>::quiet_NaN());
        return *this;
    }

    double hess(int i, int j) const { return h[hidx(i, j)]; }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        for (int i = 0; i < 4; ++i) d[i] += o.d[i];
        for (int i = 0; i < 10; ++i) h[i] += o.h[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        for (int i = 0; i < 4; ++i) d[i] -= o.d[i];
        for (int i = 0; i < 10; ++i) h[i] -= o.h[i];
        return *this;
    }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }

inline Jet operator-(const Jet& a) {
    Jet r;
    r.v = -a.v;
    for (int i = 0; i < 4; ++i) r.d[i] = -a.d[i];
    for (int i = 0; i < 10; ++i) r.h[i] = -a.h[i];
    return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            r.h[hidx(i, j)] = a.h[hidx(i, j)] * b.v + a.v * b.h[hidx(i, j)] +
                              a.d[i] * b.d[j] + a.d[j] * b.d[i];
    return r;
}

inline Jet operator*(const Jet& a, double s) {
    Jet r;
    r.v = a.v * s;
    for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] * s;
    for (int i = 0; i < 10; ++i) r.h[i] = a.h[i] * s;
    return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }
inline Jet operator+(const Jet& a, double s) { Jet r = a; r.v += s; return r; }
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { Jet r = a; r.v -= s; return r; }
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }

// Unary composition: g(a) with g', g'' supplied at a.v.
inline Jet chain(const Jet& a, double g0, double g1, double g2) {
    Jet r;
    r.v = g0;
    for (int i = 0; i < 4; ++i) r.d[i] = g1 * a.d[i];
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            r.h[hidx(i, j)] = g2 * a.d[i] * a.d[j] + g1 * a.h[hidx(i, j)];
    return r;
}

inline Jet recip(const Jet& a) {
    const double iv = 1.0 / a.v;
    return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& a) { return recip(a) * s; }

inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, c, -s, -c);
}
inline Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet log(const Jet& a) {
    const double iv = 1.0 / a.v;
    return chain(a, std::log(a.v), iv, -iv * iv);
}
inline Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet tanh(const Jet& a) {
    const double t = std::tanh(a.v), s = 1.0 - t * t;
    return chain(a, t, s, -2.0 * t * s);
}
inline Jet atan(const Jet& a) {
    const double q = 1.0 / (1.0 + a.v * a.v);
    return chain(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}

inline Jet pow(const Jet& a, int n) {
    if (n == 0) return Jet(1.0);
    if (n < 0) return recip(pow(a, -n));
    Jet r = a;
    for (int k = 1; k < n; ++k) r = r * a;
    return r;
}

// |a| away from zero; the derivative is sign(a) there.
inline Jet abs(const Jet& a) {
    return a.v >= 0.0 ? a : -a;
}

inline Jet square(const Jet& a) { return a * a; }

}  // namespace ambit
