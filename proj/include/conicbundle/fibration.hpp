// fibration.hpp
//
// Conic bundle structure of X over P^1. For coprime (a, b) with ab != 1 the
// fiber is the conic
//   C_{a,b}: (a^2 - b^2) x^2 + (a^2 + b^2) y^2 = 2 z^2,
// which always contains xi = [1 : -1 : a]. Lines through xi parametrize
// C_{a,b}(Q) by (s : t), giving the quadratic forms Q1, Q2, Q3 below.
#ifndef CONICBUNDLE_FIBRATION_HPP
#define CONICBUNDLE_FIBRATION_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conicbundle/rational.hpp"
#include "conicbundle/surface.hpp"

namespace conicbundle::fibration {

struct Fiber {
    int64_t a;
    int64_t b;
    i128 D() const { return static_cast<i128>(a) * a - static_cast<i128>(b) * b; }  // a^2 - b^2
    i128 S() const { return static_cast<i128>(a) * a + static_cast<i128>(b) * b; }  // a^2 + b^2
    int64_t max_ab() const { return a > b ? a : b; }
};

// Pre: a, b >= 1, gcd(a, b) = 1, ab != 1.
void check_fiber(const Fiber& f);

struct ConicPoint {
    i128 x, y, z;
    auto operator<=>(const ConicPoint&) const = default;
};

bool on_conic(const Fiber& f, const ConicPoint& p);

// (Q1, Q2, Q3)(s, t). Identity: t*Q3 = s*Q1 + (s - a t)*Q2.
std::array<i128, 3> Q(const Fiber& f, i128 s, i128 t);

// gcd(Q1, Q2) = 2^nu * lambda1 * lambda2 with lambda1 = odd_gcd(s, a^2-b^2),
// lambda2 = odd_gcd(s - a t, a^2 + b^2) and nu from the 2-adic table.
struct LambdaProfile {
    int nu;
    i128 lambda1;
    i128 lambda2;
    i128 lambda() const { return (static_cast<i128>(1) << nu) * lambda1 * lambda2; }
    bool operator==(const LambdaProfile&) const = default;
};

// Pre: gcd(s, t) = 1, t > 0, s(s - a t) != 0, 2as != (a^2 - b^2) t.
bool admissible(const Fiber& f, i128 s, i128 t);
// Throws std::domain_error when gcd(s, t) != 1.
LambdaProfile lambda_profile(const Fiber& f, i128 s, i128 t);
i128 lambda_direct(const Fiber& f, i128 s, i128 t);  // gcd(Q1, Q2), oracle

// Membership in R(X): Q3 < 0 and 0 > Q1, Q2 >= -X.
bool in_region(const Fiber& f, i128 s, i128 t, i128 X);
// Same for rational X > 0, with t > 0 and the excluded (s : t) removed.
bool region_contains(const Fiber& f, const Rational& X, i128 s, i128 t);

// The point (-Q1, -Q2, -Q3) / lambda of C_{a,b} attached to (s, t).
enum class ParamError { not_coprime, excluded_line, tangent_line, wrong_chamber };
class ParamDomainError : public std::domain_error {
public:
    ParamDomainError(ParamError kind, const std::string& what) : std::domain_error(what), kind_(kind) {}
    ParamError kind() const { return kind_; }

private:
    ParamError kind_;
};

struct FiberPoint {
    i128 x, y, z;
    i128 s, t;  // origin; (0, 0) for the boundary point (1, 1, a)
    LambdaProfile profile;
};

// Throws ParamDomainError: not_coprime for gcd(s, t) != 1, excluded_line for
// s (s - a t) = 0, tangent_line for t = 0 or 2 a s = (a^2 - b^2) t,
// wrong_chamber for t < 0 or when -Q1, -Q2, -Q3 are not all positive.
FiberPoint param_to_point(const Fiber& f, i128 s, i128 t);

// L(k, lambda, l) = {(s, t) : [k1 lambda1, l] | s, k2 lambda2 | s - a t, l | t}.
struct LatticeSpec {
    i128 k1 = 1, k2 = 1, lambda1 = 1, lambda2 = 1, l = 1;
};

// k1 k2 lambda1 lambda2 l^2 / gcd(k1 k2 lambda1 lambda2, l). Throws
// std::domain_error unless every parameter is odd and positive,
// gcd(k1 lambda1, k2 lambda2) = 1 and gcd(k2 lambda2, a) = 1.
i128 lattice_det(const LatticeSpec& L, int64_t a);
// Index of L in Z^2 by counting residues mod k1 lambda1 k2 lambda2 l. Oracle.
i128 lattice_index_direct(const LatticeSpec& L, int64_t a);

// Coordinate box containing R(X), derived from -Q1, -Q2 in (0, X]:
//   a > b: 0 < s <= sqrt(X),       (a^2 - b^2) t^2 <= 2X
//   a < b: 2 s^2 <= X,             (b^2 - a^2) t^2 <= X
struct Box {
    i128 s_lo, s_hi, t_lo, t_hi;
};
Box region_box(const Fiber& f, i128 X);

// Admissible lambda cells (nu, lambda1, lambda2) for the fiber.
std::vector<LambdaProfile> lambda_cells(const Fiber& f);

// Positive (x, y, z) on C_{a,b} with gcd(x, y) = 1 and max(x, y) <= H, and
// further restricted: M keeps all of them, M_hat drops xy = 1, M_tilde keeps
// max(a, b) < max(x, y). The brute-force version scans (x, y).
enum class PointFilter { M, M_hat, M_tilde };
std::vector<ConicPoint> fiber_points_naive(const Fiber& f, int64_t H, PointFilter filter = PointFilter::M);

// Same multiset from the (s, t) sweep over lambda cells. Every emitted point
// comes from exactly one admissible (s, t), plus the boundary point (1, 1, a).
std::vector<ConicPoint> fiber_points_param(const Fiber& f, int64_t H);

// Count of fiber_points_param restricted to max(x, y) > lower.
int64_t fiber_count_param(const Fiber& f, int64_t H, int64_t lower = 0);

// Diagonal contribution: (a, b, x, y) with max(a, b) = max(x, y) = m, m^2 <= B.
int64_t count_N1_diagonal(int64_t B);

// N1(B) through the swap symmetry and per-fiber sweeps.
int64_t count_N1_fast(int64_t B, unsigned threads = 1);

// Full report without enumerating X: n_U = 8 n1 + strata.
surface::CountReport count_fast(int64_t B, unsigned threads = 1);

// Normalized forms at u = b/a, evaluated at (s, t) in R^2.
struct NormalizedForms {
    double p, q, r;
};
NormalizedForms normalized_forms(double u, double s, double t);

}  // namespace conicbundle::fibration

#endif  // CONICBUNDLE_FIBRATION_HPP
