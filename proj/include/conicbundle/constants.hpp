// constants.hpp
//
// Factors of the leading constant
//   c_{X,H} = alpha * beta * tau_H = 16 C* sigma_inf / (27 zeta(2)),
// each computed two ways where possible: p-adic densities by direct counting
// and by the nu-series, the archimedean density by the (s, t, u) integral and
// by the Leray form, and the finite main-term sums behind the asymptotic.
#ifndef CONICBUNDLE_CONSTANTS_HPP
#define CONICBUNDLE_CONSTANTS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "conicbundle/fibration.hpp"
#include "conicbundle/rational.hpp"

namespace conicbundle::constants {

struct Estimate {
    double value = 0;
    double error_bar = 0;
};

// ---------------------------------------------------------------------------
// rho-dagger: primitive pairs (x1, x2) mod p^{nu1+nu2+nu3+1} with
// p^{nu1} || x1 - x2, p^{nu2} || x1 + x2, p^{nu3} || x1^2 + x2^2.

struct RhoCaps {
    int nu_sum = 8;
    u128 p_max = 1000;
};

// Exact count. Valuations below max(nu)+1 are fixed by residues mod
// p^{max(nu)+1}, so the count is taken there and scaled by p^2 per extra level.
// Throws std::domain_error when a cap is exceeded.
i128 rho_dagger(u128 p, int nu1, int nu2, int nu3, const RhoCaps& caps = {});
Rational rho_dagger_bar(u128 p, int nu1, int nu2, int nu3, const RhoCaps& caps = {});

// Closed form of rho_dagger_bar, valid for every nu. Odd p, r = 1 + chi(p):
//   (0,0,0) -> (p-1)(p-1-r)/p^2, (k,0,0), (0,k,0) -> (p-1)^2/p^{k+2},
//   (0,0,k) -> r (p-1)^2/p^{k+2}, anything else -> 0.
// p = 2: (0,0,0) -> 1/2, (k,1,1), (1,k,1) for k >= 2 -> 2^{-k-2}, else 0.
Rational rho_dagger_bar_closed(u128 p, int nu1, int nu2, int nu3);

// kappa_p: 4/3 at p = 2, else 1.
Rational kappa(u128 p);

// Sum of g(p^{nu1+nu2+nu3}) rho_bar over the box nu_i <= cap.
Rational local_sum(u128 p, int cap);
long double local_sum_ld(u128 p, int cap);

// omega*_{H,p} from the series: kappa_p (1 + 1/p) local_sum.
Rational omega_p_series(u128 p, int cap);

// ---------------------------------------------------------------------------
// omega*_{H,p} by counting N*(p^n) = #{x mod p^n : p does not divide x,
// Phi1 = Phi2 = 0}, reported as N*(p^n) / p^{3n}.

enum class DirectMode { automatic, raw, hensel, fibered };

struct LocalDensityReport {
    u128 p = 0;
    int n = 0;
    Rational direct;  // N*(p^n) / p^{3n}
    Rational series;  // omega_p_series at `truncation`
    int truncation = 0;
    std::string mode;
};

// Raw: enumerate (x0, x1, x2), solve x3 and x4. Refuses p^{3n} > 2^27.
// Hensel: X mod p smooth at every primitive point, so N*(p^n) = N*(p) p^{3(n-1)}.
// Fibered: N*(p^n) = phi(p^n)^{-1} sum over primitive (a, b) of the primitive
// conic count mod p^n, grouped by square-class keys.
Rational omega_p_direct(u128 p, int n, DirectMode mode = DirectMode::automatic);
LocalDensityReport local_density(u128 p, int n, int cap);

// True when every primitive solution of Phi1 = Phi2 = 0 mod p has a rank-2
// Jacobian mod p.
bool smooth_mod_p(u128 p);

// omega_{H,p} = (1 - 1/p)^{-1} omega*_{H,p}.
Rational omega_p_full(const Rational& omega_star, u128 p);

// ---------------------------------------------------------------------------
// Diagonal ternary forms F = C x^2 + D y^2 + E z^2 mod p^n, by lifting classes
// one level at a time and closing each class as soon as Hensel applies.

enum class LevelFilter { none, xy_primitive, x_unit };

i128 count_diagonal(u128 p, int n, const std::array<i128, 3>& coeff, LevelFilter filter);
// Brute-force oracle for the same count. Pre: p^n small.
i128 count_diagonal_naive(u128 p, int n, const std::array<i128, 3>& coeff, LevelFilter filter);

// D*_{mu,nu}(p^n) = p^{-2n} #{p not | (x, y), c p^mu x^2 + d p^nu y^2 = 2 z^2 mod p^n}
// and D_{mu,nu}(p^n) without the primitivity condition. Pre: p^n <= 1e7,
// p does not divide cd.
Rational d_star_direct(u128 p, int n, int mu, int nu, i128 c, i128 d);
Rational d_full(u128 p, int n, int mu, int nu, i128 c, i128 d);

// Closed forms stated for D*: 1 - 1/p^2 for odd p, mu = nu = 0, and the main
// term (1 - 1/p)(mu(1 - 1/p) + 1 + 1/p) for mu >= 1, (2d | p) = 1.
Rational d_star_00_closed(u128 p);
Rational d_star_mu0_main(u128 p, int mu);

// #{x mod 2^m : x(x+1) = a} and #{x mod 2^m : x^2 = a}.
int64_t s_count(int m, int64_t a);
int64_t t_count(int m, int64_t a);

// N_mu = 2^{7-2n} #{(x, y, z) mod 2^{n-3} : x odd, 2^{mu-3} c x^2 + d y^2 = z^2}.
// Pre: mu >= 3, 2^{mu-1} c + d = 1 mod 8, else std::domain_error. n defaults to
// a level past the point where the value stabilizes.
Rational n_mu_check(int mu, i128 c, i128 d, int n = 0);
// The displayed closed form: 1 at mu = 3, mu - 4 for mu >= 4.
Rational n_mu_closed(int mu);

// ---------------------------------------------------------------------------
// C* = prod_p (1 - 1/p)^3 local_sum(p).

struct CStarConfig {
    uint64_t pmax = 10000;
    int nucap = 24;
    // Multiply and divide by L(1, chi) = pi/4: the factors times (1 - chi(p)/p)
    // converge absolutely, while the plain partial product only converges
    // conditionally.
    bool accelerate = true;
};

struct CStarReport {
    Estimate value;        // at pmax, bar = |value(pmax) - value(pmax/2)|
    double plain = 0;      // plain partial product at pmax
    double accelerated = 0;
};

CStarReport c_star(const CStarConfig& cfg = {});
// (1 - 1/p)^3 local_sum(p) in long double.
long double c_star_factor(uint64_t p, int nucap);
int chi4(uint64_t p);

// ---------------------------------------------------------------------------
// Archimedean densities.

enum class QuadMethod { monte_carlo, adaptive_grid };

struct QuadratureConfig {
    QuadMethod method = QuadMethod::monte_carlo;
    uint64_t seed = 20240601;
    uint64_t samples = 10'000'000;
    double tolerance = 1e-6;
    unsigned threads = 1;
};

// S_u = {t > 0, 0 < p_u <= 1, 0 < q_u <= 1, r_u > 0}.
bool in_S(double u, double s, double t);
// Lebesgue measure of the s-section of S_u at height t.
double section_length(double u, double t);
double vol_S(double u, double tolerance = 1e-8);
// f(u) = (vol S_u + vol S_{1/u}) / sqrt(1 - u^2), 0 < u < 1.
double f_func(double u, double tolerance = 1e-8);

// sigma_inf = int_0^1 f(u) du. Error bars are 3 standard errors for Monte
// Carlo; for the grid method, the change from halving the tolerance plus the
// tolerance itself.
Estimate sigma_infinity(const QuadratureConfig& cfg);

struct LerayReport {
    Estimate value;
    uint64_t excluded = 0;      // samples with x4 < 1e-9
    double excluded_bound = 0;  // bound on their mass
};
LerayReport omega_inf_leray(const QuadratureConfig& cfg);

// ---------------------------------------------------------------------------
// Main-term evaluator.

// delta_{a,b} = max(1, v_2(a^2 - b^2)).
int64_t delta_ab(int64_t a, int64_t b);

// chi for the region V_{a,b}(R) at (t1, t2), m = max(a, b).
bool in_V(int64_t m, const Rational& R, i128 t1, i128 t2);

// h(a, b; Y) = sum over n | a^4 - b^4 of (1*h)(n) chi_{d1 d2, d3}(Y).
Rational main_term_h(const fibration::Fiber& f, const Rational& Y);
double main_term_h_fast(int64_t a, int64_t b, long double Y);

struct MainTermConfig {
    int64_t B = 100000;
    double theta1 = 0.1;
    double theta2 = 0.1;
    double K = 1.0;
    double c_star = 0;  // taken from c_star() when 0
    unsigned threads = 1;
    int f_grid = 400;
};

struct MainTermReport {
    double sigma_direct = 0;   // Sigma_{theta1,theta2}(B/K)
    double sigma_closed = 0;   // C*(1 - theta1 - theta2)/36 (log B)^4
    double sigma_gap = 0;      // relative gap
    double farine_lower = 0;   // 8B/(3 zeta(2)) sum f(b/a) h(a,b;B/K)/a^2
    double farine_upper = 0;   // same with Y = B 2^{Z2+1}/K
    double z2 = 0;
    double c_star = 0;
    Rational vol_w0;
    double k_sensitivity = 0;  // relative change of sigma_direct at Y = B/(2K)
};

MainTermReport main_term_predict(const MainTermConfig& cfg);

// ---------------------------------------------------------------------------

long double zeta2();

struct PeyreConfig {
    CStarConfig cstar;
    QuadratureConfig quad;
    uint64_t direct_pmax = 50;  // omega_{H,p} by counting up to here
    int direct_n2 = 8;          // level used at p = 2
};

struct PeyreBreakdown {
    Rational alpha;
    int64_t beta = 1;
    Estimate c_star;
    Estimate sigma_inf;
    Estimate omega_inf;
    Estimate tau_H;
    Estimate c_XH;        // 16 C* sigma / (27 zeta(2))
    Estimate c_XH_route_a;  // alpha beta tau_H
    double route_gap = 0;
    bool routes_agree = false;
};

PeyreBreakdown peyre_assemble(const PeyreConfig& cfg);

}  // namespace conicbundle::constants

#endif  // CONICBUNDLE_CONSTANTS_HPP
