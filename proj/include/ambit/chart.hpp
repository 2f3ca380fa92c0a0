#pragma once

// Chart points, sampling domains and the deterministic low-discrepancy
// sampler. A Domain is either an open coordinate box or a box with an extra
// predicate (e.g. x > |y| > 0); every point it hands out respects an explicit
// margin so downstream evaluations stay clear of singular loci.

#include <array>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ambit/errors.hpp"
#include "ambit/jet.hpp"

namespace ambit {

struct Coord4 {
    std::array<double, 4> c{{0, 0, 0, 0}};

    Coord4() = default;
    Coord4(double a, double b, double cc, double d) : c{{a, b, cc, d}} {}
    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }
};

// Coordinate jets at a point: the canonical seed of every field evaluation.
inline std::array<Jet, 4> coord_jets(const Coord4& p) {
    return {Jet::var(0, p[0]), Jet::var(1, p[1]), Jet::var(2, p[2]),
            Jet::var(3, p[3])};
}

struct Domain {
    enum class Kind { Rectangle, Predicate };

    Kind kind = Kind::Rectangle;
    std::array<std::array<double, 2>, 4> bounds{};  // open intervals; also the
                                                    // bounding box of predicates
    double margin = 1e-2;
    // predicate(p, m): p satisfies the domain condition with slack m.
    std::function<bool(const Coord4&, double)> predicate;
    std::string description;

    static Domain box(std::array<std::array<double, 2>, 4> b, double m = 1e-2,
                      std::string desc = "") {
        Domain d;
        d.kind = Kind::Rectangle;
        d.bounds = b;
        d.margin = m;
        d.description = std::move(desc);
        return d;
    }

    bool contains(const Coord4& p, double m) const {
        for (int i = 0; i < 4; ++i)
            if (!(p[i] >= bounds[i][0] + m && p[i] <= bounds[i][1] - m))
                return false;
        if (kind == Kind::Predicate && predicate && !predicate(p, m))
            return false;
        return true;
    }

    bool contains(const Coord4& p) const { return contains(p, margin); }

    // Throws a domain_error naming the violated bound.
    void require(const Coord4& p, double m) const {
        for (int i = 0; i < 4; ++i) {
            if (!(p[i] >= bounds[i][0] + m && p[i] <= bounds[i][1] - m)) {
                std::ostringstream os;
                os << "coordinate c" << i << " = " << p[i]
                   << " outside (" << bounds[i][0] << ", " << bounds[i][1]
                   << ") with margin " << m;
                if (!description.empty()) os << " [" << description << "]";
                throw domain_error(os.str());
            }
        }
        if (kind == Kind::Predicate && predicate && !predicate(p, m)) {
            std::ostringstream os;
            os << "point (" << p[0] << ", " << p[1] << ", " << p[2] << ", "
               << p[3] << ") fails domain condition";
            if (!description.empty()) os << ": " << description;
            throw domain_error(os.str());
        }
    }

    void require(const Coord4& p) const { require(p, margin); }
};

namespace detail {

// Radical-inverse (van der Corput) in the given base.
inline double radical_inverse(std::uint64_t n, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double r = 0.0, f = inv;
    while (n > 0) {
        r += f * static_cast<double>(n % base);
        n /= base;
        f *= inv;
    }
    return r;
}

}  // namespace detail

// Deterministic Halton sequence over the domain box, rejection-filtered by
// the predicate. The seed offsets the sequence index, so distinct seeds give
// distinct (but reproducible) point sets.
inline std::vector<Coord4> sample_points(const Domain& dom, int n,
                                         std::uint64_t seed) {
    if (n < 1) throw config_error("sample count must be >= 1");
    static constexpr std::uint64_t bases[4] = {2, 3, 5, 7};
    std::vector<Coord4> out;
    out.reserve(static_cast<std::size_t>(n));
    const std::uint64_t start = 1 + seed * 7919;
    const std::uint64_t max_attempts =
        static_cast<std::uint64_t>(n) * 10000 + 10000;
    for (std::uint64_t k = 0; out.size() < static_cast<std::size_t>(n); ++k) {
        if (k >= max_attempts)
            throw config_error(
                "domain appears empty at the requested margin: " +
                dom.description);
        Coord4 p;
        for (int i = 0; i < 4; ++i) {
            const double u = detail::radical_inverse(start + k, bases[i]);
            const double lo = dom.bounds[i][0] + dom.margin;
            const double hi = dom.bounds[i][1] - dom.margin;
            if (!(hi > lo))
                throw config_error("domain interval " + std::to_string(i) +
                                   " collapses under margin");
            p[i] = lo + u * (hi - lo);
        }
        const bool ok = dom.kind == Domain::Kind::Rectangle ||
                        !dom.predicate || dom.predicate(p, dom.margin);
        if (ok) out.push_back(p);
    }
    return out;
}

}  // namespace ambit
