// Brute-force reference implementations used only by the tests. Each one is
// written from the definitions, shares no code with the library, and is
// meant for small inputs.
#ifndef CONICBUNDLE_TESTS_ORACLES_HPP
#define CONICBUNDLE_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<std::pair<uint64_t, int>> trial_factor(uint64_t n) {
    std::vector<std::pair<uint64_t, int>> out;
    for (uint64_t p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline int64_t isqrt(int64_t n) {
    int64_t r = static_cast<int64_t>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline int v2(int64_t n) {
    int v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    return v;
}

// Points of U(Q) with H <= B, one per +-pair, by looping over x0..x3.
// Use for B <= 30 or so.
struct SurfaceCount {
    int64_t n_U = 0;
    int64_t n1 = 0;
};

inline SurfaceCount surface_count_4d(int64_t B) {
    SurfaceCount c;
    for (int64_t x0 = -B; x0 <= B; ++x0)
        for (int64_t x1 = -B; x1 <= B; ++x1)
            for (int64_t x2 = -B; x2 <= B; ++x2)
                for (int64_t x3 = -B; x3 <= B; ++x3) {
                    if (x0 * x1 != x2 * x3) continue;
                    int64_t w = x0 * x0 + x1 * x1 + x2 * x2 - x3 * x3;
                    if (w < 0 || w % 2) continue;
                    int64_t x4 = isqrt(w / 2);
                    if (x4 * x4 != w / 2) continue;
                    if (2 * x4 * x4 > 3 * B * B) continue;
                    for (int64_t s : {x4, -x4}) {
                        if (x4 == 0 && s < 0) continue;
                        std::array<int64_t, 5> x{x0, x1, x2, x3, s};
                        int64_t g = 0;
                        for (int64_t v : x) g = std::gcd(g, std::llabs(v));
                        if (g != 1) continue;
                        int64_t first = 0;
                        for (int64_t v : x) {
                            if (v != 0) {
                                first = v;
                                break;
                            }
                        }
                        if (first < 0) continue;
                        int64_t a0 = std::llabs(x0), a1 = std::llabs(x1), a2 = std::llabs(x2), a3 = std::llabs(x3);
                        if ((a0 == a2 && a1 == a3) || (a0 == a3 && a1 == a2)) continue;
                        ++c.n_U;
                        if (x0 > 0 && x1 > 0 && x2 > 0 && x3 > 0 && s > 0) ++c.n1;
                    }
                }
    return c;
}

// Calls fn(x) for every primitive point of X with max |x_i| <= B (i <= 3),
// both signs included. Cost about (2B)^3.
template <class Fn>
void for_each_point(int64_t B, Fn&& fn) {
    auto finish = [&](int64_t x0, int64_t x1, int64_t x2, int64_t x3) {
        int64_t w = x0 * x0 + x1 * x1 + x2 * x2 - x3 * x3;
        if (w < 0 || w % 2) return;
        int64_t x4 = isqrt(w / 2);
        if (x4 * x4 != w / 2) return;
        for (int64_t s : {x4, -x4}) {
            if (x4 == 0 && s < 0) continue;
            std::array<int64_t, 5> x{x0, x1, x2, x3, s};
            int64_t g = 0;
            for (int64_t v : x) g = std::gcd(g, std::llabs(v));
            if (g == 1) fn(x);
        }
    };
    for (int64_t x0 = -B; x0 <= B; ++x0)
        for (int64_t x1 = -B; x1 <= B; ++x1) {
            for (int64_t x2 = -B; x2 <= B; ++x2) {
                if (x2 == 0) continue;
                if ((x0 * x1) % x2 != 0) continue;
                int64_t x3 = x0 * x1 / x2;
                if (std::llabs(x3) <= B) finish(x0, x1, x2, x3);
            }
            if (x0 * x1 == 0)
                for (int64_t x3 = -B; x3 <= B; ++x3) finish(x0, x1, 0, x3);
        }
}

// #{(x1, x2) mod p^{s+1} : p not | (x1, x2), p^{nu_i} exactly divides L_i}.
inline int64_t rho_dagger(int64_t p, int nu1, int nu2, int nu3, int extra = 0) {
    int64_t q = 1;
    for (int i = 0; i < nu1 + nu2 + nu3 + 1 + extra; ++i) q *= p;
    auto exact = [&](int64_t v, int nu) {
        v %= q;
        if (v < 0) v += q;
        int64_t pk = 1;
        for (int i = 0; i < nu; ++i) pk *= p;
        return v % pk == 0 && (v / pk) % p != 0;
    };
    int64_t count = 0;
    for (int64_t x1 = 0; x1 < q; ++x1)
        for (int64_t x2 = 0; x2 < q; ++x2) {
            if (x1 % p == 0 && x2 % p == 0) continue;
            if (exact(x1 - x2, nu1) && exact(x1 + x2, nu2) && exact((x1 * x1 + x2 * x2) % q, nu3)) ++count;
        }
    return count;
}

// N*(p^n): primitive x mod p^n with Phi1 = Phi2 = 0. p^{5n} must be small.
inline int64_t n_star(int64_t p, int n) {
    int64_t q = 1;
    for (int i = 0; i < n; ++i) q *= p;
    auto md = [&](int64_t v) { return ((v % q) + q) % q; };
    int64_t count = 0;
    for (int64_t a = 0; a < q; ++a)
        for (int64_t b = 0; b < q; ++b)
            for (int64_t c = 0; c < q; ++c)
                for (int64_t d = 0; d < q; ++d) {
                    if (md(a * b - c * d) != 0) continue;
                    for (int64_t e = 0; e < q; ++e) {
                        if (a % p == 0 && b % p == 0 && c % p == 0 && d % p == 0 && e % p == 0) continue;
                        if (md(a * a + b * b + c * c - d * d - 2 * e * e) == 0) ++count;
                    }
                }
    return count;
}

// #{(x, y, z) mod p^n : c p^mu x^2 + d p^nu y^2 = 2 z^2}, optionally with
// p not dividing both x and y.
inline int64_t d_count(int64_t p, int n, int mu, int nu, int64_t c, int64_t d, bool primitive) {
    int64_t q = 1, pm = 1, pn = 1;
    for (int i = 0; i < n; ++i) q *= p;
    for (int i = 0; i < mu; ++i) pm *= p;
    for (int i = 0; i < nu; ++i) pn *= p;
    auto md = [&](int64_t v) { return ((v % q) + q) % q; };
    std::vector<int64_t> zc(static_cast<size_t>(q), 0);
    for (int64_t z = 0; z < q; ++z) ++zc[static_cast<size_t>(md(2 * z * z))];
    int64_t count = 0;
    for (int64_t x = 0; x < q; ++x)
        for (int64_t y = 0; y < q; ++y) {
            if (primitive && x % p == 0 && y % p == 0) continue;
            count += zc[static_cast<size_t>(md(md(c * pm % q * x % q * x) + md(d * pn % q * y % q * y)))];
        }
    return count;
}

}  // namespace oracle

#endif  // CONICBUNDLE_TESTS_ORACLES_HPP
