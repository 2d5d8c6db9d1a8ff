#include "conicbundle/fibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "conicbundle/arith.hpp"
#include "parallel.hpp"

namespace conicbundle::fibration {

namespace {

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

i128 isqrt_i(i128 n) { return n <= 0 ? 0 : static_cast<i128>(arith::isqrt(static_cast<u128>(n))); }

// largest t >= 0 with c * t^2 <= X, c > 0
i128 max_t(i128 c, i128 X) {
    i128 t = isqrt_i(X / c);
    while (t > 0 && checked_mul(c, t * t) > X) --t;
    while (checked_mul(c, (t + 1) * (t + 1)) <= X) ++t;
    return t;
}

i128 mod_inverse(i128 a, i128 m) {
    i128 g = m, x = 0, x1 = 1, r = ((a % m) + m) % m;
    while (r != 0) {
        i128 q = g / r;
        i128 t = g - q * r;
        g = r;
        r = t;
        t = x - q * x1;
        x = x1;
        x1 = t;
    }
    if (g != 1) throw std::domain_error("mod_inverse: not invertible");
    return ((x % m) + m) % m;
}

struct Vec2 {
    i128 s, t;
};

i128 dot(const Vec2& u, const Vec2& v) { return checked_add(checked_mul(u.s, v.s), checked_mul(u.t, v.t)); }

// Lagrange-Gauss reduction of a basis of a rank-2 lattice in Z^2.
void gauss_reduce(Vec2& u, Vec2& v) {
    if (dot(u, u) > dot(v, v)) std::swap(u, v);
    for (;;) {
        i128 uu = dot(u, u);
        i128 uv = dot(u, v);
        i128 m = floor_div(2 * uv + uu, 2 * uu);  // nearest integer to uv/uu
        v.s -= m * u.s;
        v.t -= m * u.t;
        if (dot(v, v) >= dot(u, u)) break;
        std::swap(u, v);
    }
}

// Calls visit(s, t) for every point of the lattice spanned by u, v in the box.
template <class Visit>
void enumerate_box(Vec2 u, Vec2 v, const Box& box, Visit&& visit) {
    gauss_reduce(u, v);
    i128 det = u.s * v.t - u.t * v.s;
    if (det < 0) {
        v.s = -v.s;
        v.t = -v.t;
        det = -det;
    }
    // j = (u.s * p.t - u.t * p.s) / det
    i128 lo = 0, hi = 0;
    bool first = true;
    for (i128 ps : {box.s_lo, box.s_hi}) {
        for (i128 pt : {box.t_lo, box.t_hi}) {
            i128 c = checked_sub(checked_mul(u.s, pt), checked_mul(u.t, ps));
            if (first || c < lo) lo = c;
            if (first || c > hi) hi = c;
            first = false;
        }
    }
    i128 jlo = ceil_div(lo, det), jhi = floor_div(hi, det);
    for (i128 j = jlo; j <= jhi; ++j) {
        i128 ilo = 0, ihi = -1;
        bool bounded = false, empty = false;
        auto restrict = [&](i128 comp, i128 base, i128 low, i128 high) {
            // need low <= i*comp + base <= high
            if (comp == 0) {
                if (base < low || base > high) empty = true;
                return;
            }
            i128 a = low - base, b = high - base, l, h;
            if (comp > 0) {
                l = ceil_div(a, comp);
                h = floor_div(b, comp);
            } else {
                l = ceil_div(b, comp);
                h = floor_div(a, comp);
            }
            if (!bounded) {
                ilo = l;
                ihi = h;
                bounded = true;
            } else {
                ilo = std::max(ilo, l);
                ihi = std::min(ihi, h);
            }
        };
        restrict(u.s, j * v.s, box.s_lo, box.s_hi);
        restrict(u.t, j * v.t, box.t_lo, box.t_hi);
        if (empty || !bounded) continue;
        for (i128 i = ilo; i <= ihi; ++i) visit(i * u.s + j * v.s, i * u.t + j * v.t);
    }
}

// Visits every admissible (s, t) in R(lambda H) whose profile is the cell's,
// passing the resulting point.
template <class Visit>
void sweep(const Fiber& f, int64_t H, Visit&& visit) {
    for (const LambdaProfile& cell : lambda_cells(f)) {
        i128 lam = cell.lambda();
        i128 X = checked_mul(lam, H);
        Box box = region_box(f, X);
        if (box.s_lo > box.s_hi || box.t_lo > box.t_hi) continue;
        i128 M = cell.lambda1 * cell.lambda2;
        // s = 0 mod lambda1, s = a t mod lambda2
        i128 c = 0;
        if (cell.lambda2 > 1) {
            i128 k = (static_cast<i128>(f.a) % cell.lambda2) * mod_inverse(cell.lambda1 % cell.lambda2, cell.lambda2) %
                     cell.lambda2;
            c = cell.lambda1 * k;
        }
        enumerate_box(Vec2{M, 0}, Vec2{c, 1}, box, [&](i128 s, i128 t) {
            if (t <= 0 || gcd128(s, t) != 1 || !admissible(f, s, t)) return;
            if (!in_region(f, s, t, X)) return;
            if (!(lambda_profile(f, s, t) == cell)) return;
            auto q = Q(f, s, t);
            visit(ConicPoint{-q[0] / lam, -q[1] / lam, -q[2] / lam});
        });
    }
    // (s : t) = (a : 1) is excluded above and gives (1, 1, a).
    if (H >= 1) visit(ConicPoint{1, 1, f.a});
}

}  // namespace

void check_fiber(const Fiber& f) {
    if (f.a < 1 || f.b < 1 || std::gcd(f.a, f.b) != 1 || (f.a == 1 && f.b == 1))
        throw std::domain_error("fiber needs a, b >= 1 coprime with ab != 1");
}

bool on_conic(const Fiber& f, const ConicPoint& p) {
    return f.D() * p.x * p.x + f.S() * p.y * p.y == 2 * p.z * p.z;
}

std::array<i128, 3> Q(const Fiber& f, i128 s, i128 t) {
    i128 a = f.a, D = f.D();
    i128 st = checked_mul(s, t), ss = checked_mul(s, s), tt = checked_mul(t, t);
    i128 q1 = checked_sub(checked_add(2 * ss, checked_mul(D, tt)), checked_mul(4 * a, st));
    i128 q2 = checked_add(-2 * ss, checked_mul(D, tt));
    i128 q3 = checked_sub(checked_add(checked_mul(-2 * a, ss), checked_mul(2 * D, st)), checked_mul(checked_mul(a, D), tt));
    return {q1, q2, q3};
}

bool admissible(const Fiber& f, i128 s, i128 t) {
    if (t <= 0 || gcd128(s, t) != 1) return false;
    if (s == 0 || s == static_cast<i128>(f.a) * t) return false;
    return checked_mul(2 * static_cast<i128>(f.a), s) != checked_mul(f.D(), t);
}

LambdaProfile lambda_profile(const Fiber& f, i128 s, i128 t) {
    if (gcd128(s, t) != 1) throw std::domain_error("lambda_profile needs gcd(s, t) = 1");
    i128 D = f.D(), S = f.S();
    i128 l1 = arith::odd_gcd(s, D);
    i128 l2 = arith::odd_gcd(s - static_cast<i128>(f.a) * t, S);
    int nu;
    if ((f.a % 2 == 0) || (f.b % 2 == 0)) {
        nu = (t % 2 == 0) ? 1 : 0;
    } else if (s % 2 != 0) {
        nu = 1;
    } else {
        nu = std::min(2 + arith::valuation(s, 2), arith::valuation(D, 2));
    }
    return {nu, l1, l2};
}

i128 lambda_direct(const Fiber& f, i128 s, i128 t) {
    auto q = Q(f, s, t);
    return gcd128(q[0], q[1]);
}

bool in_region(const Fiber& f, i128 s, i128 t, i128 X) {
    auto q = Q(f, s, t);
    return q[2] < 0 && q[0] < 0 && q[1] < 0 && -q[0] <= X && -q[1] <= X;
}

bool region_contains(const Fiber& f, const Rational& X, i128 s, i128 t) {
    if (!admissible(f, s, t)) return false;
    auto q = Q(f, s, t);
    if (q[2] >= 0 || q[0] >= 0 || q[1] >= 0) return false;
    // -Q <= num/den  <=>  -Q den <= num, den > 0
    return checked_mul(-q[0], X.den()) <= X.num() && checked_mul(-q[1], X.den()) <= X.num();
}

FiberPoint param_to_point(const Fiber& f, i128 s, i128 t) {
    check_fiber(f);
    if (gcd128(s, t) != 1) throw ParamDomainError(ParamError::not_coprime, "param_to_point: gcd(s, t) != 1");
    if (t == 0 || checked_mul(2 * static_cast<i128>(f.a), s) == checked_mul(f.D(), t))
        throw ParamDomainError(ParamError::tangent_line, "param_to_point: tangent line at xi");
    if (s == 0 || s == static_cast<i128>(f.a) * t)
        throw ParamDomainError(ParamError::excluded_line, "param_to_point: s(s - at) = 0");
    auto q = Q(f, s, t);
    if (t < 0 || q[0] >= 0 || q[1] >= 0 || q[2] >= 0)
        throw ParamDomainError(ParamError::wrong_chamber, "param_to_point: -Q1, -Q2, -Q3 not all positive");
    LambdaProfile prof = lambda_profile(f, s, t);
    i128 lam = prof.lambda();
    return FiberPoint{-q[0] / lam, -q[1] / lam, -q[2] / lam, s, t, prof};
}

i128 lattice_det(const LatticeSpec& L, int64_t a) {
    for (i128 v : {L.k1, L.k2, L.lambda1, L.lambda2, L.l}) {
        if (v < 1 || v % 2 == 0) throw std::domain_error("lattice_det: parameters must be odd and positive");
    }
    i128 m1 = checked_mul(L.k1, L.lambda1), m2 = checked_mul(L.k2, L.lambda2);
    if (gcd128(m1, m2) != 1 || gcd128(m2, a) != 1)
        throw std::domain_error("lattice_det: needs gcd(k1 lambda1, k2 lambda2) = gcd(k2 lambda2, a) = 1");
    i128 k = checked_mul(m1, m2);
    return checked_mul(k, checked_mul(L.l, L.l)) / gcd128(k, L.l);
}

i128 lattice_index_direct(const LatticeSpec& L, int64_t a) {
    i128 m1 = L.k1 * L.lambda1, m2 = L.k2 * L.lambda2;
    i128 A = m1 / gcd128(m1, L.l) * L.l;
    i128 N = m1 * m2 * L.l;
    i128 count = 0;
    for (i128 t = 0; t < N; t += L.l) {
        for (i128 s = 0; s < N; s += A) {
            if ((s - static_cast<i128>(a) * t) % m2 == 0) ++count;
        }
    }
    return N * N / count;
}

Box region_box(const Fiber& f, i128 X) {
    i128 D = f.D();
    if (D > 0) {
        return Box{1, isqrt_i(X), 1, max_t(D, 2 * X)};
    }
    i128 smax = isqrt_i(X / 2);
    return Box{-smax, smax, 1, max_t(-D, X)};
}

std::vector<LambdaProfile> lambda_cells(const Fiber& f) {
    check_fiber(f);
    std::vector<int> nus;
    if (f.a % 2 == 0 || f.b % 2 == 0) {
        nus = {0, 1};
    } else {
        nus = {1};
        for (int v = 3; v <= arith::valuation(f.D(), 2); ++v) nus.push_back(v);
    }
    auto d1 = arith::divisors(arith::factorize(arith::odd_part(f.D())));
    auto d2 = arith::divisors(arith::factorize(arith::odd_part(f.S())));
    std::vector<LambdaProfile> cells;
    for (int nu : nus) {
        for (i128 l1 : d1) {
            for (i128 l2 : d2) cells.push_back({nu, l1, l2});
        }
    }
    return cells;
}

std::vector<ConicPoint> fiber_points_naive(const Fiber& f, int64_t H, PointFilter filter) {
    check_fiber(f);
    std::vector<ConicPoint> out;
    for (int64_t x = 1; x <= H; ++x) {
        for (int64_t y = 1; y <= H; ++y) {
            if (std::gcd(x, y) != 1) continue;
            if (filter == PointFilter::M_hat && x * y == 1) continue;
            if (filter == PointFilter::M_tilde && std::max(x, y) <= f.max_ab()) continue;
            i128 w = f.D() * x * x + f.S() * y * y;
            if (w <= 0 || (w & 1)) continue;
            if (!arith::is_square(w / 2)) continue;
            out.push_back({x, y, static_cast<i128>(arith::isqrt(static_cast<u128>(w / 2)))});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ConicPoint> fiber_points_param(const Fiber& f, int64_t H) {
    check_fiber(f);
    std::vector<ConicPoint> out;
    sweep(f, H, [&](const ConicPoint& p) { out.push_back(p); });
    std::sort(out.begin(), out.end());
    return out;
}

int64_t fiber_count_param(const Fiber& f, int64_t H, int64_t lower) {
    check_fiber(f);
    int64_t c = 0;
    sweep(f, H, [&](const ConicPoint& p) {
        if (std::max(p.x, p.y) > lower) ++c;
    });
    return c;
}

int64_t count_N1_diagonal(int64_t B) {
    int64_t total = 0;
    int64_t r = static_cast<int64_t>(arith::isqrt(static_cast<u128>(B)));
    for (int64_t m = 2; m <= r; ++m) {
        std::vector<std::pair<int64_t, int64_t>> pairs;
        for (int64_t k = 1; k < m; ++k) {
            if (std::gcd(k, m) != 1) continue;
            pairs.emplace_back(m, k);
            pairs.emplace_back(k, m);
        }
        for (auto [a, b] : pairs) {
            i128 D = static_cast<i128>(a) * a - static_cast<i128>(b) * b;
            i128 S = static_cast<i128>(a) * a + static_cast<i128>(b) * b;
            for (auto [x, y] : pairs) {
                i128 w = D * x * x + S * y * y;
                if (w <= 0 || (w & 1)) continue;
                if (arith::is_square(w / 2)) ++total;
            }
        }
    }
    return total;
}

int64_t count_N1_fast(int64_t B, unsigned threads) {
    if (B < 1) return 0;
    std::vector<Fiber> fibers;
    for (int64_t m = 2; m * m < B; ++m) {
        if (B / m <= m) continue;
        for (int64_t k = 1; k < m; ++k) {
            if (std::gcd(k, m) != 1) continue;
            fibers.push_back({m, k});
            fibers.push_back({k, m});
        }
    }
    std::vector<int64_t> per(fibers.size(), 0);
    detail::parallel_for(fibers.size(), threads, [&](size_t i) {
        const Fiber& f = fibers[i];
        int64_t m = f.max_ab();
        per[i] = fiber_count_param(f, B / m, m);
    });
    int64_t off = std::accumulate(per.begin(), per.end(), int64_t{0});
    return 2 * off + count_N1_diagonal(B);
}

surface::CountReport count_fast(int64_t B, unsigned threads) {
    surface::CountReport r;
    r.B = B;
    r.n1 = count_N1_fast(B, threads);
    r.stratum_zero = surface::stratum_zero_fast(B);
    r.stratum_x4 = surface::stratum_x4_fast(B);
    r.n_U = 8 * r.n1 + r.stratum_zero + r.stratum_x4;
    r.engine = "fibration";
    return r;
}

NormalizedForms normalized_forms(double u, double s, double t) {
    double eps = (1.0 - u * u) > 0 ? 1.0 : -1.0;
    double al = std::sqrt(std::fabs(1.0 - u * u));
    NormalizedForms n;
    n.p = -2 * s * s - eps * t * t + 4 * s * t / al;
    n.q = 2 * s * s - eps * t * t;
    n.r = 2 * s * s - 2 * eps * al * s * t + eps * t * t;
    return n;
}

}  // namespace conicbundle::fibration
