#pragma once

// Dense 4x4 linear algebra over double or Jet entries. Jets form a
// commutative ring with division by units, so Gaussian elimination with
// value-magnitude pivoting works verbatim and yields exact derivative
// propagation through inverses and determinants.

#include <array>
#include <cmath>

#include "ambit/errors.hpp"
#include "ambit/jet.hpp"

namespace ambit {

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

template <class T>
struct Vec4T {
    std::array<T, 4> e{};
    T& operator[](int i) { return e[i]; }
    const T& operator[](int i) const { return e[i]; }
};

template <class T>
struct Mat4T {
    std::array<T, 16> e{};
    T& operator()(int i, int j) { return e[4 * i + j]; }
    const T& operator()(int i, int j) const { return e[4 * i + j]; }

    static Mat4T identity() {
        Mat4T m;
        for (int i = 0; i < 4; ++i) m(i, i) = T(1.0);
        return m;
    }
};

using Vec4d = Vec4T<double>;
using Mat4d = Mat4T<double>;
using Vec4j = Vec4T<Jet>;
using Mat4j = Mat4T<Jet>;

template <class T>
Vec4T<T> operator+(const Vec4T<T>& a, const Vec4T<T>& b) {
    Vec4T<T> r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + b[i];
    return r;
}
template <class T>
Vec4T<T> operator-(const Vec4T<T>& a, const Vec4T<T>& b) {
    Vec4T<T> r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] - b[i];
    return r;
}
template <class T, class S>
Vec4T<T> operator*(const Vec4T<T>& a, const S& s) {
    Vec4T<T> r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] * s;
    return r;
}

template <class T>
Mat4T<T> operator+(const Mat4T<T>& a, const Mat4T<T>& b) {
    Mat4T<T> r;
    for (int i = 0; i < 16; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}
template <class T>
Mat4T<T> operator-(const Mat4T<T>& a, const Mat4T<T>& b) {
    Mat4T<T> r;
    for (int i = 0; i < 16; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}
template <class T, class S>
Mat4T<T> operator*(const Mat4T<T>& a, const S& s) {
    Mat4T<T> r;
    for (int i = 0; i < 16; ++i) r.e[i] = a.e[i] * s;
    return r;
}

template <class T>
Mat4T<T> mul(const Mat4T<T>& a, const Mat4T<T>& b) {
    Mat4T<T> r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            T s = a(i, 0) * b(0, j);
            for (int k = 1; k < 4; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <class T>
Vec4T<T> mul(const Mat4T<T>& a, const Vec4T<T>& x) {
    Vec4T<T> r;
    for (int i = 0; i < 4; ++i) {
        T s = a(i, 0) * x[0];
        for (int k = 1; k < 4; ++k) s += a(i, k) * x[k];
        r[i] = s;
    }
    return r;
}

template <class T>
Mat4T<T> transpose(const Mat4T<T>& a) {
    Mat4T<T> r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = a(j, i);
    return r;
}

template <class T>
T trace(const Mat4T<T>& a) {
    return a(0, 0) + a(1, 1) + a(2, 2) + a(3, 3);
}

template <class T>
Mat4T<T> commutator(const Mat4T<T>& a, const Mat4T<T>& b) {
    return mul(a, b) - mul(b, a);
}

inline double recip_entry(double x) { return 1.0 / x; }
inline Jet recip_entry(const Jet& x) { return recip(x); }

// Gauss-Jordan inverse with partial pivoting on value magnitude.
template <class T>
Mat4T<T> inverse(const Mat4T<T>& a) {
    Mat4T<T> m = a;
    Mat4T<T> inv = Mat4T<T>::identity();
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        double best = std::abs(value_of(m(col, col)));
        for (int r = col + 1; r < 4; ++r) {
            const double cand = std::abs(value_of(m(r, col)));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (!(best > 0.0)) throw numeric_error("singular 4x4 matrix");
        if (piv != col)
            for (int j = 0; j < 4; ++j) {
                std::swap(m(piv, j), m(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const T ip = recip_entry(m(col, col));
        for (int j = 0; j < 4; ++j) {
            m(col, j) = m(col, j) * ip;
            inv(col, j) = inv(col, j) * ip;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const T f = m(r, col);
            for (int j = 0; j < 4; ++j) {
                m(r, j) = m(r, j) - f * m(col, j);
                inv(r, j) = inv(r, j) - f * inv(col, j);
            }
        }
    }
    return inv;
}

template <class T>
T det(const Mat4T<T>& a) {
    // Cofactor expansion via 2x2 minors (Laplace on the first two rows).
    auto m2 = [&](int i0, int i1, int j0, int j1) {
        return a(i0, j0) * a(i1, j1) - a(i0, j1) * a(i1, j0);
    };
    const T s01 = m2(0, 1, 0, 1), s02 = m2(0, 1, 0, 2), s03 = m2(0, 1, 0, 3);
    const T s12 = m2(0, 1, 1, 2), s13 = m2(0, 1, 1, 3), s23 = m2(0, 1, 2, 3);
    const T c01 = m2(2, 3, 0, 1), c02 = m2(2, 3, 0, 2), c03 = m2(2, 3, 0, 3);
    const T c12 = m2(2, 3, 1, 2), c13 = m2(2, 3, 1, 3), c23 = m2(2, 3, 2, 3);
    return s01 * c23 - s02 * c13 + s03 * c12 + s12 * c03 - s13 * c02 +
           s23 * c01;
}

// Values-only views of jet-valued containers.
inline Vec4d values(const Vec4j& a) {
    Vec4d r;
    for (int i = 0; i < 4; ++i) r[i] = a[i].v;
    return r;
}
inline Mat4d values(const Mat4j& a) {
    Mat4d r;
    for (int i = 0; i < 16; ++i) r.e[i] = a.e[i].v;
    return r;
}

inline double dot(const Vec4d& a, const Vec4d& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Jacobi eigensolver for a symmetric matrix with double entries.
// Returns eigenvalues in ascending order; eigenvectors as columns.
struct SymEigen {
    std::array<double, 4> values;
    Mat4d vectors;
};

inline SymEigen sym_eigen(const Mat4d& sym) {
    Mat4d a = sym;
    Mat4d v = Mat4d::identity();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < 4; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    SymEigen out;
    std::array<int, 4> order{{0, 1, 2, 3}};
    std::array<double, 4> ev{{a(0, 0), a(1, 1), a(2, 2), a(3, 3)}};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (ev[order[j]] < ev[order[i]]) std::swap(order[i], order[j]);
    for (int i = 0; i < 4; ++i) {
        out.values[i] = ev[order[i]];
        for (int k = 0; k < 4; ++k) out.vectors(k, i) = v(k, order[i]);
    }
    return out;
}

}  // namespace ambit
