// surface.hpp
//
// The quartic del Pezzo surface X in P^4 cut out by
//   x0*x1 - x2*x3 = 0,   x0^2 + x1^2 + x2^2 - x3^2 - 2*x4^2 = 0,
// its anticanonical height, the open set U (complement of the lines)
// and the brute-force point counters used as oracles.
#ifndef CONICBUNDLE_SURFACE_HPP
#define CONICBUNDLE_SURFACE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "conicbundle/rational.hpp"

namespace conicbundle::surface {

using Point = std::array<int64_t, 5>;

i128 phi1(const Point& x);
i128 phi2(const Point& x);
bool on_surface(const Point& x);
bool is_primitive(const Point& x);

// H(x) = max(|x0|,|x1|,|x2|,|x3|, sqrt(2/3)|x4|). The square is rational,
// so it is kept exactly. Throws std::domain_error for a non-primitive point.
struct Height {
    Rational squared;
    double value() const;
};
Height height(const Point& x);
bool height_at_most(const Point& x, int64_t B);

// The eight lines of X defined over Q. family 1: x0 = e1*x2 = e2*x4, x1 = e1*x3.
// family 2: x1 = e1*x2 = e2*x4, x0 = e1*x3. The remaining eight lines need i
// and carry no nonzero rational point.
struct RationalLine {
    int family;  // 1 or 2
    int e1;      // +-1
    int e2;      // +-1
    bool operator==(const RationalLine&) const = default;
    std::string name() const;
};
std::vector<RationalLine> all_rational_lines();
bool lies_on(const Point& x, const RationalLine& L);
std::vector<RationalLine> lines_through(const Point& x);

// Throws std::domain_error off X. True iff {|x0|,|x1|} != {|x2|,|x3|} as multisets.
bool in_U(const Point& x);

// Canonical representative of +-x: first nonzero coordinate positive.
Point canonical(const Point& x);

struct CountReport {
    int64_t B = 0;
    int64_t n_U = 0;           // points of U(Q) with H <= B
    int64_t n1 = 0;            // points with all five coordinates positive
    int64_t stratum_zero = 0;  // points of U(Q) with some of x0..x3 zero
    int64_t stratum_x4 = 0;    // points of U(Q) with x4 = 0, x0..x3 nonzero
    std::string engine;
};

// Exhaustive enumeration. Pre: 1 <= B <= 2000.
CountReport count_naive(int64_t B);

// Direct enumeration of the y-parametrization (a, b, x, y, z). Pre: B <= 1e4.
int64_t count_N1_naive(int64_t B);

// Positive primitive solutions of u^2 = v^2 + 2w^2 with u <= B, and of
// u^2 + v^2 = 2w^2 with u != v, max(u, v) <= B. Parametric, O(B).
int64_t count_conic_minus(int64_t B);
int64_t count_conic_plus(int64_t B);
// Same quantities by brute force, used as oracles.
int64_t count_conic_minus_naive(int64_t B);
int64_t count_conic_plus_naive(int64_t B);

// Exact stratum counts without full enumeration.
int64_t stratum_zero_fast(int64_t B);
int64_t stratum_x4_fast(int64_t B);

}  // namespace conicbundle::surface

#endif  // CONICBUNDLE_SURFACE_HPP
