#include "conicbundle/constants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <tuple>

#include "conicbundle/arith.hpp"
#include "conicbundle/nefcone.hpp"
#include "parallel.hpp"

namespace conicbundle::constants {

namespace {

using arith::ipow;

void require_prime(u128 p) {
    if (!arith::is_prime(p)) throw std::domain_error("expected a prime, got " + to_string(static_cast<i128>(p)));
}

// p^e with an overflow check; throws when the result exceeds `limit`.
i128 bounded_pow(u128 p, int e, i128 limit) {
    i128 r = 1;
    for (int i = 0; i < e; ++i) {
        r = checked_mul(r, static_cast<i128>(p));
        if (r > limit) throw std::domain_error("modulus exceeds the configured cap");
    }
    return r;
}

i128 mod(i128 a, i128 m) {
    i128 r = a % m;
    return r < 0 ? r + m : r;
}

// Valuation of a residue mod p^n, reported as n for the zero residue.
int res_val(i128 r, u128 p, int n) {
    if (r == 0) return n;
    int v = 0;
    while (r % static_cast<i128>(p) == 0) {
        r /= static_cast<i128>(p);
        ++v;
    }
    return std::min(v, n);
}

Rational g_pp(u128 p, int e) { return arith::eval_prime_power({arith::Mult::g, 2}, p, e); }

long double g_pp_ld(uint64_t p, int e) {
    if (p == 2) return std::max(1, e - 1);
    long double pl = static_cast<long double>(p);
    return 1.0L + e * (pl - 1) / (pl + 1);
}

std::vector<uint64_t> primes_upto(uint64_t n) {
    std::vector<char> comp(n + 1, 0);
    std::vector<uint64_t> out;
    for (uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (uint64_t j = i * i; j <= n; j += i) comp[j] = 1;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// rho-dagger

i128 rho_dagger(u128 p, int nu1, int nu2, int nu3, const RhoCaps& caps) {
    require_prime(p);
    if (nu1 < 0 || nu2 < 0 || nu3 < 0) throw std::domain_error("negative valuation");
    if (nu1 + nu2 + nu3 > caps.nu_sum) throw std::domain_error("nu1+nu2+nu3 exceeds the configured cap");
    if (p > caps.p_max) throw std::domain_error("p exceeds the configured cap");
    int N = nu1 + nu2 + nu3 + 1;
    int M = std::max({nu1, nu2, nu3}) + 1;
    i128 q = bounded_pow(p, M, static_cast<i128>(1) << 14);
    i128 P = static_cast<i128>(p);
    i128 c = 0;
    for (i128 x1 = 0; x1 < q; ++x1) {
        for (i128 x2 = 0; x2 < q; ++x2) {
            if (x1 % P == 0 && x2 % P == 0) continue;
            if (res_val(mod(x1 - x2, q), p, M) != nu1) continue;
            if (res_val(mod(x1 + x2, q), p, M) != nu2) continue;
            if (res_val(mod(x1 * x1 + x2 * x2, q), p, M) != nu3) continue;
            ++c;
        }
    }
    return checked_mul(c, ipow(P, 2 * (N - M)));
}

Rational rho_dagger_bar(u128 p, int nu1, int nu2, int nu3, const RhoCaps& caps) {
    i128 c = rho_dagger(p, nu1, nu2, nu3, caps);
    return Rational(c, ipow(static_cast<i128>(p), 2 * (nu1 + nu2 + nu3 + 1)));
}

Rational rho_dagger_bar_closed(u128 p, int nu1, int nu2, int nu3) {
    require_prime(p);
    i128 P = static_cast<i128>(p);
    if (p == 2) {
        if (nu1 == 0 && nu2 == 0 && nu3 == 0) return Rational(1, 2);
        if (nu3 == 1 && nu2 == 1 && nu1 >= 2) return Rational(1, ipow(2, nu1 + 2));
        if (nu3 == 1 && nu1 == 1 && nu2 >= 2) return Rational(1, ipow(2, nu2 + 2));
        return Rational(0);
    }
    i128 r = (p % 4 == 1) ? 2 : 0;
    int nonzero = (nu1 > 0) + (nu2 > 0) + (nu3 > 0);
    if (nonzero == 0) return Rational((P - 1) * (P - 1 - r), P * P);
    if (nonzero > 1) return Rational(0);
    int k = nu1 + nu2 + nu3;
    i128 num = (P - 1) * (P - 1) * (nu3 > 0 ? r : 1);
    return Rational(num, ipow(P, k + 2));
}

Rational kappa(u128 p) { return p == 2 ? Rational(4, 3) : Rational(1); }

namespace {

// The nonzero cells of the closed form inside the box nu_i <= cap.
template <class Visit>
void visit_cells(u128 p, int cap, Visit&& visit) {
    visit(0, 0, 0);
    if (p == 2) {
        if (cap < 1) return;
        for (int k = 2; k <= cap; ++k) {
            visit(k, 1, 1);
            visit(1, k, 1);
        }
        return;
    }
    for (int k = 1; k <= cap; ++k) {
        visit(k, 0, 0);
        visit(0, k, 0);
        if (p % 4 == 1) visit(0, 0, k);
    }
}

}  // namespace

Rational local_sum(u128 p, int cap) {
    Rational s(0);
    visit_cells(p, cap, [&](int a, int b, int c) { s += g_pp(p, a + b + c) * rho_dagger_bar_closed(p, a, b, c); });
    return s;
}

long double local_sum_ld(u128 p, int cap) {
    long double s = 0;
    long double P = static_cast<long double>(p);
    visit_cells(p, cap, [&](int a, int b, int c) {
        long double rho;
        if (p == 2) {
            rho = (a + b + c == 0) ? 0.5L : std::pow(2.0L, -(std::max(a, b) + 2));
        } else {
            long double r = (p % 4 == 1) ? 2 : 0;
            int k = a + b + c;
            if (k == 0) {
                rho = (P - 1) * (P - 1 - r) / (P * P);
            } else {
                rho = (P - 1) * (P - 1) * (c > 0 ? r : 1) / std::pow(P, k + 2);
            }
        }
        s += g_pp_ld(static_cast<uint64_t>(p), a + b + c) * rho;
    });
    return s;
}

Rational omega_p_series(u128 p, int cap) {
    require_prime(p);
    return kappa(p) * (Rational(1) + Rational(1, static_cast<i128>(p))) * local_sum(p, cap);
}

Rational omega_p_full(const Rational& omega_star, u128 p) {
    Rational P = Rational::from_i128(static_cast<i128>(p));
    return omega_star * P / (P - 1);
}

// ---------------------------------------------------------------------------
// N*(p^n)

namespace {

struct X4Tables {
    std::vector<int64_t> all, unit;
};

X4Tables x4_tables(int64_t q, int64_t p) {
    X4Tables t{std::vector<int64_t>(q, 0), std::vector<int64_t>(q, 0)};
    for (int64_t x = 0; x < q; ++x) {
        int64_t r = (2 * x % q) * x % q;
        ++t.all[r];
        if (x % p != 0) ++t.unit[r];
    }
    return t;
}

int64_t inv_mod(int64_t a, int64_t m) {
    int64_t g = m, x = 0, x1 = 1, r = a % m;
    while (r != 0) {
        int64_t k = g / r;
        std::tie(g, r) = std::make_pair(r, g - k * r);
        std::tie(x, x1) = std::make_pair(x1, x - k * x1);
    }
    return ((x % m) + m) % m;
}

// Visit every (x0, x1, x2, x3) mod q with x0 x1 = x2 x3, passing the count of
// x4 that complete a primitive point.
i128 raw_count(int64_t p, int n) {
    int64_t q = 1;
    for (int i = 0; i < n; ++i) q *= p;
    X4Tables tab = x4_tables(q, p);
    std::vector<int> val(q);
    for (int64_t x = 0; x < q; ++x) val[x] = res_val(x, p, n);
    i128 total = 0;
    for (int64_t x0 = 0; x0 < q; ++x0) {
        for (int64_t x1 = 0; x1 < q; ++x1) {
            int64_t rhs = x0 * x1 % q;
            int64_t s01 = (x0 * x0 + x1 * x1) % q;
            bool p01 = (x0 % p == 0) && (x1 % p == 0);
            for (int64_t x2 = 0; x2 < q; ++x2) {
                int v = val[x2];
                int64_t g = 1;
                for (int i = 0; i < v; ++i) g *= p;
                if (rhs % g != 0) continue;
                int64_t m = q / g;
                int64_t base = (m == 1) ? 0 : (rhs / g) % m * inv_mod((x2 / g) % m, m) % m;
                int64_t s012 = (s01 + x2 * x2) % q;
                bool p012 = p01 && (x2 % p == 0);
                for (int64_t x3 = base; x3 < q; x3 += m) {
                    int64_t S = ((s012 - x3 * x3) % q + q) % q;
                    bool zero4 = p012 && (x3 % p == 0);
                    total += zero4 ? tab.unit[S] : tab.all[S];
                }
            }
        }
    }
    return total;
}

// Square-class key of A mod p^n under multiplication by unit squares.
std::pair<int, int> square_key(i128 A, u128 p, int n) {
    int v = res_val(A, p, n);
    if (v >= n) return {n, 0};
    i128 u = A;
    for (int i = 0; i < v; ++i) u /= static_cast<i128>(p);
    int m = n - v;
    if (p == 2) {
        int bits = std::min(m, 3);
        return {v, static_cast<int>(u % (static_cast<i128>(1) << bits))};
    }
    u128 e = (p - 1) / 2;
    u128 ls = arith::powmod(static_cast<u128>(u % static_cast<i128>(p)), e, p);
    return {v, ls == 1 ? 1 : -1};
}

i128 fibered_count(u128 p, int n) {
    i128 q = ipow(static_cast<i128>(p), n);
    i128 P = static_cast<i128>(p);
    std::map<std::tuple<int, int, int, int>, i128> cache;
    i128 total = 0;
    for (i128 a = 0; a < q; ++a) {
        for (i128 b = 0; b < q; ++b) {
            if (a % P == 0 && b % P == 0) continue;
            i128 A = mod(a * a - b * b, q), S = mod(a * a + b * b, q);
            auto ka = square_key(A, p, n), ks = square_key(S, p, n);
            auto key = std::make_tuple(ka.first, ka.second, ks.first, ks.second);
            auto it = cache.find(key);
            if (it == cache.end()) {
                i128 c = count_diagonal(p, n, {A, S, -2}, LevelFilter::xy_primitive);
                it = cache.emplace(key, c).first;
            }
            total += it->second;
        }
    }
    i128 phi = q - q / P;
    if (total % phi != 0) throw std::logic_error("fibered count not divisible by phi(p^n)");
    // The fibering only sees points with p not dividing (x0, .., x3). The
    // others need 2 x4^2 = 0 mod p^n with x4 a unit, which happens only mod 2:
    // the single point (0, 0, 0, 0, 1).
    return total / phi + ((p == 2 && n == 1) ? 1 : 0);
}

}  // namespace

bool smooth_mod_p(u128 pp) {
    require_prime(pp);
    if (pp > 2000) throw std::domain_error("smooth_mod_p: p too large");
    int64_t p = static_cast<int64_t>(pp);
    std::vector<std::vector<int64_t>> roots(p);
    for (int64_t x = 0; x < p; ++x) roots[(2 * x * x) % p].push_back(x);
    auto rank2 = [p](const std::array<int64_t, 5>& x) {
        std::array<int64_t, 5> j1 = {x[1], x[0], -x[3], -x[2], 0};
        std::array<int64_t, 5> j2 = {2 * x[0], 2 * x[1], 2 * x[2], -2 * x[3], -4 * x[4]};
        for (int i = 0; i < 5; ++i) {
            for (int k = i + 1; k < 5; ++k) {
                if (((j1[i] * j2[k] - j1[k] * j2[i]) % p + p) % p != 0) return true;
            }
        }
        return false;
    };
    for (int64_t x0 = 0; x0 < p; ++x0) {
        for (int64_t x1 = 0; x1 < p; ++x1) {
            for (int64_t x2 = 0; x2 < p; ++x2) {
                int64_t rhs = x0 * x1 % p;
                std::vector<int64_t> x3s;
                if (x2 != 0) {
                    x3s.push_back(rhs * inv_mod(x2, p) % p);
                } else if (rhs == 0) {
                    for (int64_t x3 = 0; x3 < p; ++x3) x3s.push_back(x3);
                }
                for (int64_t x3 : x3s) {
                    int64_t S = ((x0 * x0 + x1 * x1 + x2 * x2 - x3 * x3) % p + p) % p;
                    for (int64_t x4 : roots[S]) {
                        if (x0 == 0 && x1 == 0 && x2 == 0 && x3 == 0 && x4 == 0) continue;
                        if (!rank2({x0, x1, x2, x3, x4})) return false;
                    }
                }
            }
        }
    }
    return true;
}

Rational omega_p_direct(u128 p, int n, DirectMode mode) {
    require_prime(p);
    if (n < 1) throw std::domain_error("omega_p_direct needs n >= 1");
    const i128 raw_cap = static_cast<i128>(1) << 27;
    auto raw_ok = [&] {
        i128 q = 1;
        for (int i = 0; i < 3 * n; ++i) {
            q *= static_cast<i128>(p);
            if (q > raw_cap) return false;
        }
        return true;
    };
    i128 P = static_cast<i128>(p);
    if (mode == DirectMode::automatic) {
        if (raw_ok()) {
            mode = DirectMode::raw;
        } else if (p <= 2000 && smooth_mod_p(p)) {
            mode = DirectMode::hensel;
        } else {
            mode = DirectMode::fibered;
        }
    }
    switch (mode) {
        case DirectMode::raw:
            if (!raw_ok()) throw std::domain_error("raw counter refuses p^{3n} > 2^27");
            return Rational(raw_count(static_cast<int64_t>(p), n), ipow(P, 3 * n));
        case DirectMode::hensel:
            if (!smooth_mod_p(p)) throw std::domain_error("X is not smooth mod p; Hensel mode unavailable");
            return Rational(raw_count(static_cast<int64_t>(p), 1), P * P * P);
        case DirectMode::fibered:
            bounded_pow(p, n, 1 << 13);
            return Rational(fibered_count(p, n), ipow(P, 3 * n));
        case DirectMode::automatic:
            break;
    }
    throw std::logic_error("unreachable");
}

LocalDensityReport local_density(u128 p, int n, int cap) {
    LocalDensityReport r;
    r.p = p;
    r.n = n;
    r.direct = omega_p_direct(p, n);
    r.series = omega_p_series(p, cap);
    r.truncation = cap;
    const i128 raw_cap = static_cast<i128>(1) << 27;
    i128 q = 1;
    bool raw = true;
    for (int i = 0; i < 3 * n && raw; ++i) raw = (q *= static_cast<i128>(p)) <= raw_cap;
    r.mode = raw ? "raw" : (smooth_mod_p(p) ? "hensel" : "fibered");
    return r;
}

// ---------------------------------------------------------------------------
// Diagonal forms

i128 count_diagonal(u128 pp, int n, const std::array<i128, 3>& coeff, LevelFilter filter) {
    require_prime(pp);
    if (n < 1) throw std::domain_error("count_diagonal needs n >= 1");
    const i128 p = static_cast<i128>(pp);
    const i128 q = ipow(p, n);
    std::array<i128, 3> c;
    std::array<int, 3> vc;  // v_p(2 c_i), n or more meaning "vanishes mod p^n"
    for (int i = 0; i < 3; ++i) {
        c[i] = mod(coeff[i], q);
        vc[i] = res_val(mod(2 * c[i], q), pp, n);
        if (c[i] == 0) vc[i] = 2 * n + 2;
    }
    std::vector<i128> pw(3 * n + 3, 1);
    for (size_t i = 1; i < pw.size(); ++i) pw[i] = checked_mul(pw[i - 1], p);

    struct Cls {
        std::array<i128, 3> v;
        int k;
    };
    std::vector<Cls> stack;
    for (i128 x = 0; x < p; ++x) {
        for (i128 y = 0; y < p; ++y) {
            if (filter == LevelFilter::xy_primitive && x == 0 && y == 0) continue;
            if (filter == LevelFilter::x_unit && x == 0) continue;
            for (i128 z = 0; z < p; ++z) stack.push_back({{x, y, z}, 1});
        }
    }
    i128 total = 0;
    while (!stack.empty()) {
        Cls cl = stack.back();
        stack.pop_back();
        int k = cl.k;
        i128 F = 0;
        for (int i = 0; i < 3; ++i) F = mod(F + c[i] * mod(cl.v[i] * cl.v[i], q), q);
        int delta = 1 << 20;
        for (int i = 0; i < 3; ++i) {
            int vv = (cl.v[i] == 0) ? k : std::min(res_val(cl.v[i], pp, n), k);
            delta = std::min(delta, vc[i] + vv);
        }
        if (delta < k) {
            if (k + delta >= n) {
                if (F == 0) total += pw[3 * (n - k)];
            } else if (F % pw[k + delta] == 0) {
                total += pw[2 * (n - k) + delta];
            }
            continue;
        }
        int lvl = std::min(2 * k, n);
        if (F % pw[lvl] != 0) continue;
        if (k == n) {
            total += 1;
            continue;
        }
        for (i128 a = 0; a < p; ++a) {
            for (i128 b = 0; b < p; ++b) {
                for (i128 e = 0; e < p; ++e) {
                    stack.push_back({{cl.v[0] + a * pw[k], cl.v[1] + b * pw[k], cl.v[2] + e * pw[k]}, k + 1});
                }
            }
        }
    }
    return total;
}

i128 count_diagonal_naive(u128 pp, int n, const std::array<i128, 3>& coeff, LevelFilter filter) {
    const i128 p = static_cast<i128>(pp);
    const i128 q = bounded_pow(pp, n, 1 << 10);
    i128 total = 0;
    for (i128 x = 0; x < q; ++x) {
        for (i128 y = 0; y < q; ++y) {
            if (filter == LevelFilter::xy_primitive && x % p == 0 && y % p == 0) continue;
            if (filter == LevelFilter::x_unit && x % p == 0) continue;
            for (i128 z = 0; z < q; ++z) {
                if (mod(coeff[0] * x * x + coeff[1] * y * y + coeff[2] * z * z, q) == 0) ++total;
            }
        }
    }
    return total;
}

namespace {

std::array<i128, 3> d_coeffs(u128 p, int n, int mu, int nu, i128 c, i128 d) {
    require_prime(p);
    i128 P = static_cast<i128>(p);
    if (c % P == 0 || d % P == 0) throw std::domain_error("c and d must be coprime to p");
    if (mu < 0 || nu < 0) throw std::domain_error("negative exponent");
    i128 q = bounded_pow(p, n, 10'000'000);
    i128 pm = 1, pn = 1;
    for (int i = 0; i < mu && pm < q; ++i) pm *= P;
    for (int i = 0; i < nu && pn < q; ++i) pn *= P;
    return {mod(mod(c, q) * pm, q), mod(mod(d, q) * pn, q), -2};
}

}  // namespace

Rational d_star_direct(u128 p, int n, int mu, int nu, i128 c, i128 d) {
    auto co = d_coeffs(p, n, mu, nu, c, d);
    return Rational(count_diagonal(p, n, co, LevelFilter::xy_primitive), ipow(static_cast<i128>(p), 2 * n));
}

Rational d_full(u128 p, int n, int mu, int nu, i128 c, i128 d) {
    if (n == 0) return Rational(1);  // one residue class mod 1
    auto co = d_coeffs(p, n, mu, nu, c, d);
    return Rational(count_diagonal(p, n, co, LevelFilter::none), ipow(static_cast<i128>(p), 2 * n));
}

Rational d_star_00_closed(u128 p) {
    i128 P = static_cast<i128>(p);
    return Rational(1) - Rational(1, P * P);
}

Rational d_star_mu0_main(u128 p, int mu) {
    Rational ip(1, static_cast<i128>(p));
    return (Rational(1) - ip) * (Rational(mu) * (Rational(1) - ip) + Rational(1) + ip);
}

int64_t s_count(int m, int64_t a) {
    int64_t q = int64_t{1} << m, c = 0;
    int64_t r = ((a % q) + q) % q;
    for (int64_t x = 0; x < q; ++x) c += (x * (x + 1) % q == r);
    return c;
}

int64_t t_count(int m, int64_t a) {
    int64_t q = int64_t{1} << m, c = 0;
    int64_t r = ((a % q) + q) % q;
    for (int64_t x = 0; x < q; ++x) c += (x * x % q == r);
    return c;
}

Rational n_mu_check(int mu, i128 c, i128 d, int n) {
    if (mu < 3) throw std::domain_error("n_mu_check needs mu >= 3");
    if (c % 2 == 0 || d % 2 == 0) throw std::domain_error("n_mu_check needs odd c, d");
    if (mod(ipow(2, mu - 1) * c + d, 8) != 1) throw std::domain_error("hypothesis 2^{mu-1} c + d = 1 mod 8 fails");
    if (n == 0) n = 2 * mu + 6;
    if (n < 4) throw std::domain_error("n_mu_check needs n >= 4");
    int m = n - 3;
    i128 q = ipow(2, m);
    i128 cm = (mu - 3 >= m) ? 0 : mod(ipow(2, mu - 3) * mod(c, q), q);
    i128 cnt = count_diagonal(2, m, {cm, mod(d, q), -1}, LevelFilter::x_unit);
    // 2^{7-2n} cnt
    int e = 7 - 2 * n;
    return e >= 0 ? Rational::from_i128(cnt * ipow(2, e)) : Rational(cnt, ipow(2, -e));
}

Rational n_mu_closed(int mu) {
    if (mu < 3) throw std::domain_error("n_mu_closed needs mu >= 3");
    return mu == 3 ? Rational(1) : Rational(mu - 4);
}

// ---------------------------------------------------------------------------
// C*

int chi4(uint64_t p) {
    if (p % 2 == 0) return 0;
    return p % 4 == 1 ? 1 : -1;
}

long double c_star_factor(uint64_t p, int nucap) {
    long double ip = 1.0L / static_cast<long double>(p);
    long double f = (1 - ip) * (1 - ip) * (1 - ip);
    return f * local_sum_ld(p, nucap);
}

CStarReport c_star(const CStarConfig& cfg) {
    if (cfg.pmax < 2) throw std::domain_error("c_star needs pmax >= 2");
    auto primes = primes_upto(cfg.pmax);
    auto run = [&](uint64_t bound, long double& plain, long double& acc) {
        plain = 1;
        acc = std::numbers::pi_v<long double> / 4;
        for (uint64_t p : primes) {
            if (p > bound) break;
            long double f = c_star_factor(p, cfg.nucap);
            plain *= f;
            acc *= f * (1 - static_cast<long double>(chi4(p)) / static_cast<long double>(p));
        }
    };
    long double plain, acc, plain_h, acc_h;
    run(cfg.pmax, plain, acc);
    run(std::max<uint64_t>(2, cfg.pmax / 2), plain_h, acc_h);
    CStarReport r;
    r.plain = static_cast<double>(plain);
    r.accelerated = static_cast<double>(acc);
    if (cfg.accelerate) {
        r.value = {static_cast<double>(acc), static_cast<double>(std::fabs(acc - acc_h))};
    } else {
        r.value = {static_cast<double>(plain), static_cast<double>(std::fabs(plain - plain_h))};
    }
    return r;
}

// ---------------------------------------------------------------------------
// Archimedean densities

namespace {

// S_u in terms of eps = sign(1 - u^2) and alpha = sqrt|1 - u^2|.
struct Shape {
    double eps;
    double alpha;
};

Shape shape_of(double u) {
    if (!(u > 0) || u == 1.0) throw std::domain_error("S_u needs u > 0, u != 1");
    return {u < 1 ? 1.0 : -1.0, std::sqrt(std::fabs(1.0 - u * u))};
}

bool inside(const Shape& sh, double s, double t) {
    if (!(t > 0)) return false;
    double p = -2 * s * s - sh.eps * t * t + 4 * s * t / sh.alpha;
    double q = 2 * s * s - sh.eps * t * t;
    double r = 2 * s * s - 2 * sh.eps * sh.alpha * s * t + sh.eps * t * t;
    return p > 0 && p <= 1 && q > 0 && q <= 1 && r > 0;
}

void add_roots(double a, double b, double c, std::vector<double>& out) {
    if (a == 0) {
        if (b != 0) out.push_back(-c / b);
        return;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) return;
    double sq = std::sqrt(disc);
    double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
    if (qq != 0) {
        out.push_back(qq / a);
        out.push_back(c / qq);
    } else {
        out.push_back(0);
    }
}

double section(const Shape& sh, double t) {
    if (sh.alpha == 0 || !(t > 0)) return 0;
    std::vector<double> br;
    double e = sh.eps, al = sh.alpha;
    for (double lvl : {0.0, 1.0}) {
        add_roots(-2, 4 * t / al, -e * t * t - lvl, br);
        add_roots(2, 0, -e * t * t - lvl, br);
    }
    add_roots(2, -2 * e * al * t, e * t * t, br);
    std::sort(br.begin(), br.end());
    double len = 0;
    for (size_t i = 0; i + 1 < br.size(); ++i) {
        double lo = br[i], hi = br[i + 1];
        if (hi <= lo) continue;
        if (inside(sh, 0.5 * (lo + hi), t)) len += hi - lo;
    }
    return len;
}

// Adaptive Simpson on [a, b] with an initial geometric split toward a, so
// integrands supported on a short interval near a are still resolved.
template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15 * eps) return left + right + delta / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

template <class F>
double adaptive(F&& f, double a, double b, double eps, int geometric = 40) {
    std::vector<double> cuts;
    double w = b - a;
    for (int j = geometric; j >= 1; --j) cuts.push_back(a + w * std::ldexp(1.0, -j));
    cuts.push_back(b);
    double total = 0, lo = a;
    double per = eps / static_cast<double>(cuts.size());
    for (double hi : cuts) {
        for (int s = 0; s < 4; ++s) {
            double x0 = lo + (hi - lo) * s / 4, x1 = lo + (hi - lo) * (s + 1) / 4;
            double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
            double whole = (x1 - x0) / 6 * (f0 + 4 * fm + f1);
            total += simpson_rec(f, x0, x1, f0, fm, f1, whole, per / 4, 30);
        }
        lo = hi;
    }
    return total;
}

double vol_shape(const Shape& sh, double tol) {
    if (sh.alpha == 0) return 0;
    return adaptive([&](double t) { return section(sh, t); }, 0.0, std::sqrt(2.0), tol);
}

// Integrand of sigma_inf after u = 1 - v^2: 2/sqrt(2 - v^2) [vol S_u + vol S_{1/u}].
double sigma_integrand(double v, double tol) {
    double root = std::sqrt(2 - v * v);
    double a_lo = v * root;  // sqrt(1 - u^2)
    double u = 1 - v * v;
    if (u <= 0) return 0;
    Shape lo{1.0, a_lo};
    Shape hi{-1.0, a_lo / u};  // sqrt(1/u^2 - 1)
    return 2 / root * (vol_shape(lo, tol) + vol_shape(hi, tol));
}

struct Moments {
    double sum = 0, sumsq = 0;
    uint64_t excluded = 0;
    double max_est = 0;
};

constexpr uint64_t kChunk = 1 << 16;

std::mt19937_64 chunk_rng(uint64_t seed, uint64_t chunk) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(chunk),
                      static_cast<uint32_t>(chunk >> 32)};
    return std::mt19937_64(seq);
}

double unit_open(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53; }

// Runs `sample` over fixed-size chunks. Each chunk has its own stream, and
// chunk results are reduced in index order, so the estimate depends only on
// (seed, samples).
template <class Sample>
Moments run_chunks(uint64_t samples, uint64_t seed, unsigned threads, Sample&& sample) {
    uint64_t nchunks = (samples + kChunk - 1) / kChunk;
    std::vector<Moments> parts(nchunks);
    detail::parallel_for(nchunks, threads, [&](size_t c) {
        auto g = chunk_rng(seed, c);
        uint64_t lo = c * kChunk, hi = std::min(samples, lo + kChunk);
        Moments m;
        for (uint64_t i = lo; i < hi; ++i) sample(g, m);
        parts[c] = m;
    });
    Moments tot;
    for (const auto& m : parts) {
        tot.sum += m.sum;
        tot.sumsq += m.sumsq;
        tot.excluded += m.excluded;
        tot.max_est = std::max(tot.max_est, m.max_est);
    }
    return tot;
}

Estimate mean_bar(const Moments& m, uint64_t n, double scale) {
    double mean = m.sum / static_cast<double>(n);
    double var = std::max(0.0, m.sumsq / static_cast<double>(n) - mean * mean);
    double se = std::sqrt(var / static_cast<double>(n));
    return {scale * mean, 3 * scale * se};
}

}  // namespace

bool in_S(double u, double s, double t) { return inside(shape_of(u), s, t); }

double section_length(double u, double t) { return section(shape_of(u), t); }

double vol_S(double u, double tolerance) { return vol_shape(shape_of(u), tolerance); }

double f_func(double u, double tolerance) {
    if (!(u > 0 && u < 1)) throw std::domain_error("f needs 0 < u < 1");
    double a = std::sqrt(1 - u * u);
    return (vol_shape({1.0, a}, tolerance) + vol_shape({-1.0, a / u}, tolerance)) / a;
}

Estimate sigma_infinity(const QuadratureConfig& cfg) {
    if (cfg.method == QuadMethod::adaptive_grid) {
        auto run = [](double tol) {
            return adaptive([&](double v) { return sigma_integrand(v, tol * 0.1); }, 0.0, 1.0, tol, 12);
        };
        double coarse = run(2 * cfg.tolerance);
        double fine = run(cfg.tolerance);
        return {fine, std::fabs(fine - coarse) + cfg.tolerance};
    }
    if (cfg.samples == 0) throw std::domain_error("sigma_infinity needs samples > 0");
    const double box = 2 * std::sqrt(2.0);
    Moments m = run_chunks(cfg.samples, cfg.seed, cfg.threads, [&](std::mt19937_64& g, Moments& acc) {
        double v = unit_open(g);
        double s = 2 * unit_open(g) - 1;
        double t = std::sqrt(2.0) * unit_open(g);
        double root = std::sqrt(2 - v * v);
        double a = v * root, u = 1 - v * v;
        int hits = inside({1.0, a}, s, t) + inside({-1.0, a / u}, s, t);
        double est = hits ? 2 / root * hits * box : 0.0;
        acc.sum += est;
        acc.sumsq += est * est;
    });
    return mean_bar(m, cfg.samples, 1.0);
}

LerayReport omega_inf_leray(const QuadratureConfig& cfg) {
    if (cfg.samples == 0) throw std::domain_error("omega_inf_leray needs samples > 0");
    Moments m = run_chunks(cfg.samples, cfg.seed ^ 0x9e3779b97f4a7c15ULL, cfg.threads,
                           [&](std::mt19937_64& g, Moments& acc) {
                               double y0 = -std::log(unit_open(g));
                               double y1 = -std::log(unit_open(g));
                               double v = unit_open(g);
                               double x0 = std::exp(-y0), x1 = std::exp(-y1);
                               double A = x0 * x0 * x1 * x1, S = x0 * x0 + x1 * x1;
                               double ystar = 0.5 * std::log((S + std::sqrt(S * S + 4 * A)) / (2 * A));
                               double ymax = std::min(y0 + y1, ystar);
                               double y2 = ymax * (1 - v * v);
                               double x2 = std::exp(-y2);
                               double x3 = x0 * x1 / x2;
                               double w = 0.5 * (x0 * x0 + x1 * x1 + x2 * x2 - x3 * x3);
                               double x4 = w > 0 ? std::sqrt(w) : 0;
                               if (x4 < 1e-9) {
                                   ++acc.excluded;
                                   return;
                               }
                               double est = 2 * ymax * v / (4 * x4);
                               acc.sum += est;
                               acc.sumsq += est * est;
                               acc.max_est = std::max(acc.max_est, est);
                           });
    LerayReport r;
    r.value = mean_bar(m, cfg.samples, 8.0);
    r.excluded = m.excluded;
    r.excluded_bound = 8.0 * m.max_est * static_cast<double>(m.excluded) / static_cast<double>(cfg.samples);
    return r;
}

// ---------------------------------------------------------------------------
// Main-term evaluator

int64_t delta_ab(int64_t a, int64_t b) {
    i128 d = static_cast<i128>(a) * a - static_cast<i128>(b) * b;
    if (d == 0) throw std::domain_error("delta_ab needs a != b");
    return std::max(1, arith::valuation(d, 2));
}

bool in_V(int64_t m, const Rational& R, i128 t1, i128 t2) {
    if (t1 < 1 || t2 < 1) return false;
    i128 rn = R.num(), rd = R.den();
    i128 M = m;
    auto le = [](i128 a, i128 b) { return a <= b; };
    if (!le(checked_mul(checked_mul(M, t1), rd), checked_mul(rn, t2))) return false;
    if (!le(checked_mul(checked_mul(M, t2), rd), checked_mul(rn, t1))) return false;
    i128 t12 = checked_mul(t1, t2);
    if (!le(checked_mul(checked_mul(checked_mul(M, M), M), rd), checked_mul(rn, t12))) return false;
    if (!le(checked_mul(t12, rd), checked_mul(M, rn))) return false;
    return true;
}

namespace {

// Prime data of a^4 - b^4 = (a - b)(a + b)(a^2 + b^2): per prime, the
// exponents in the three factors.
struct PrimeRow {
    u128 p;
    int e1, e2, e3;
};

std::vector<PrimeRow> merge_rows(const arith::Factorization& f1, const arith::Factorization& f2,
                                 const arith::Factorization& f3) {
    std::map<u128, std::array<int, 3>> acc;
    for (auto& pp : f1) acc[pp.p][0] += pp.e;
    for (auto& pp : f2) acc[pp.p][1] += pp.e;
    for (auto& pp : f3) acc[pp.p][2] += pp.e;
    std::vector<PrimeRow> rows;
    for (auto& [p, e] : acc) rows.push_back({p, e[0], e[1], e[2]});
    return rows;
}

arith::Factorization factor_abs(i128 n) {
    if (n < 0) n = -n;
    if (n <= 1) return {};
    return arith::factorize(static_cast<u128>(n));
}

double one_star_h_ld(u128 p, int e) {
    if (e == 0) return 1;
    if (p == 2) return e >= 3 ? 1 : 0;
    double P = static_cast<double>(p);
    return (P - 1) / (P + 1);
}

// Walk all n | a^4 - b^4 with (1*h)(n) != 0, handing (weight, d1, d2, d3) to
// `visit` as long doubles.
template <class Visit>
void walk_divisors(const std::vector<PrimeRow>& rows, Visit&& visit) {
    size_t k = rows.size();
    std::vector<int> e(k, 0);
    std::function<void(size_t, double, long double, long double, long double)> rec =
        [&](size_t i, double w, long double d1, long double d2, long double d3) {
            if (i == k) {
                visit(w, d1, d2, d3);
                return;
            }
            const PrimeRow& r = rows[i];
            int tot = r.e1 + r.e2 + r.e3;
            long double P = static_cast<long double>(r.p);
            long double a1 = 1, a2 = 1, a3 = 1;
            for (int x = 0; x <= tot; ++x) {
                if (x > 0) {
                    if (x <= r.e1) a1 *= P;
                    if (x <= r.e2) a2 *= P;
                    if (x <= r.e3) a3 *= P;
                }
                double hw = one_star_h_ld(r.p, x);
                if (hw == 0) continue;
                rec(i + 1, w * hw, d1 * a1, d2 * a2, d3 * a3);
            }
        };
    rec(0, 1.0, 1, 1, 1);
}

bool in_V_ld(long double m, long double R, long double t1, long double t2) {
    return m * t1 <= R * t2 && m * t2 <= R * t1 && m * m * m / R <= t1 * t2 && t1 * t2 <= m * R;
}

std::vector<double> h_multi(const std::vector<PrimeRow>& rows, int64_t m, const std::vector<long double>& Ys) {
    std::vector<double> out(Ys.size(), 0.0);
    long double M = static_cast<long double>(m);
    walk_divisors(rows, [&](double w, long double d1, long double d2, long double d3) {
        for (size_t j = 0; j < Ys.size(); ++j) {
            if (in_V_ld(M, Ys[j], d1 * d2, d3)) out[j] += w;
        }
    });
    return out;
}

}  // namespace

Rational main_term_h(const fibration::Fiber& f, const Rational& Y) {
    fibration::check_fiber(f);
    if (Y <= Rational(0)) throw std::domain_error("main_term_h needs Y > 0");
    i128 a = f.a, b = f.b;
    auto rows = merge_rows(factor_abs(a - b), factor_abs(a + b), factor_abs(a * a + b * b));
    int64_t m = f.max_ab();
    Rational total(0);
    size_t k = rows.size();
    std::vector<int> e(k, 0);
    std::function<void(size_t, Rational, i128, i128, i128)> rec = [&](size_t i, Rational w, i128 d1, i128 d2,
                                                                       i128 d3) {
        if (i == k) {
            if (in_V(m, Y, checked_mul(d1, d2), d3)) total += w;
            return;
        }
        const PrimeRow& r = rows[i];
        i128 P = static_cast<i128>(r.p);
        i128 a1 = 1, a2 = 1, a3 = 1;
        for (int x = 0; x <= r.e1 + r.e2 + r.e3; ++x) {
            if (x > 0) {
                if (x <= r.e1) a1 *= P;
                if (x <= r.e2) a2 *= P;
                if (x <= r.e3) a3 *= P;
            }
            Rational hw = arith::eval_prime_power({arith::Mult::one_star_h, 2}, r.p, x);
            if (hw == Rational(0)) continue;
            rec(i + 1, w * hw, d1 * a1, d2 * a2, d3 * a3);
        }
    };
    rec(0, Rational(1), 1, 1, 1);
    return total;
}

double main_term_h_fast(int64_t a, int64_t b, long double Y) {
    fibration::check_fiber({a, b});
    i128 A = a, Bb = b;
    auto rows = merge_rows(factor_abs(A - Bb), factor_abs(A + Bb), factor_abs(A * A + Bb * Bb));
    return h_multi(rows, std::max(a, b), {Y})[0];
}

long double zeta2() {
    long double pi = std::numbers::pi_v<long double>;
    return pi * pi / 6;
}

MainTermReport main_term_predict(const MainTermConfig& cfg) {
    if (cfg.B < 16 || cfg.B > 10'000'000) throw std::domain_error("main_term_predict needs 16 <= B <= 1e7");
    if (!(cfg.theta1 > 0 && cfg.theta2 > 0 && cfg.theta1 + cfg.theta2 < 1))
        throw std::domain_error("need theta1, theta2 > 0 with theta1 + theta2 < 1");
    if (!(cfg.K >= 1)) throw std::domain_error("K must be >= 1");
    MainTermReport rep;
    const double B = static_cast<double>(cfg.B);
    const double logB = std::log(B);
    rep.z2 = std::log(logB);
    const double z2sq = rep.z2 * rep.z2;
    rep.c_star = cfg.c_star > 0 ? cfg.c_star : c_star().value.value;
    rep.vol_w0 = nefcone::vol_W0();

    // f on a uniform grid over the A2 range of u.
    const double ulo = 1 / z2sq, uhi = 1 - 1 / z2sq;
    const int G = std::max(8, cfg.f_grid);
    std::vector<double> fgrid(G + 1);
    detail::parallel_for(G + 1, cfg.threads, [&](size_t i) {
        double u = ulo + (uhi - ulo) * static_cast<double>(i) / G;
        fgrid[i] = f_func(std::clamp(u, 1e-9, 1 - 1e-9), 1e-7);
    });
    auto f_at = [&](double u) {
        double x = (u - ulo) / (uhi - ulo) * G;
        int i = std::clamp(static_cast<int>(x), 0, G - 1);
        double fr = std::clamp(x - i, 0.0, 1.0);
        return fgrid[i] * (1 - fr) + fgrid[i + 1] * fr;
    };

    const long double Ylow = static_cast<long double>(B) / cfg.K;
    const long double Yhalf = Ylow / 2;
    const long double Yup = Ylow * std::pow(2.0L, static_cast<long double>(rep.z2) + 1);
    const std::vector<long double> Ys = {Ylow, Yhalf, Yup};

    int64_t amax = static_cast<int64_t>(arith::isqrt(static_cast<u128>(cfg.B)));
    if (amax * amax == cfg.B) --amax;  // a < sqrt(B)
    arith::SpfSieve sieve(static_cast<uint32_t>(2 * cfg.B + 2));
    struct Part {
        double sig = 0, sig_half = 0, far_lo = 0, far_up = 0;
    };
    std::vector<Part> parts(amax + 1);
    detail::parallel_for(static_cast<size_t>(amax + 1), cfg.threads, [&](size_t ai) {
        int64_t a = static_cast<int64_t>(ai);
        if (a < 2) return;
        Part part;
        double inv = 1.0 / (static_cast<double>(a) * a);
        for (int64_t b = 1; b < a; ++b) {
            if (std::gcd(a, b) != 1) continue;
            bool in_sig = b >= cfg.theta1 * a && b <= (1 - cfg.theta2) * a;
            bool in_a2 = b >= a / z2sq && b <= a * (1 - 1 / z2sq);
            if (!in_sig && !in_a2) continue;
            auto rows = merge_rows(sieve.factorize(static_cast<uint64_t>(a - b)),
                                   sieve.factorize(static_cast<uint64_t>(a + b)),
                                   sieve.factorize(static_cast<uint64_t>(a * a + b * b)));
            auto h = h_multi(rows, a, Ys);
            if (in_sig) {
                part.sig += h[0] * inv;
                part.sig_half += h[1] * inv;
            }
            if (in_a2) {
                double fu = f_at(static_cast<double>(b) / a);
                part.far_lo += fu * h[0] * inv;
                part.far_up += fu * h[2] * inv;
            }
        }
        parts[ai] = part;
    });
    Part tot;
    for (const auto& p : parts) {
        tot.sig += p.sig;
        tot.sig_half += p.sig_half;
        tot.far_lo += p.far_lo;
        tot.far_up += p.far_up;
    }
    const double pref = 8 * B / (3 * static_cast<double>(zeta2()));
    rep.sigma_direct = tot.sig;
    rep.sigma_closed = 2 * rep.c_star * (1 - cfg.theta1 - cfg.theta2) * rep.vol_w0.to_double() * std::pow(logB, 4);
    rep.sigma_gap = (rep.sigma_direct - rep.sigma_closed) / rep.sigma_closed;
    rep.farine_lower = pref * tot.far_lo;
    rep.farine_upper = pref * tot.far_up;
    rep.k_sensitivity = tot.sig > 0 ? (tot.sig - tot.sig_half) / tot.sig : 0;
    return rep;
}

// ---------------------------------------------------------------------------

PeyreBreakdown peyre_assemble(const PeyreConfig& cfg) {
    PeyreBreakdown out;
    out.alpha = nefcone::alpha(nefcone::conj_qi_action(), 4).alpha;
    out.beta = 1;
    CStarReport cs = c_star(cfg.cstar);
    out.c_star = cs.value;

    QuadratureConfig q = cfg.quad;
    out.sigma_inf = sigma_infinity(q);
    QuadratureConfig ql = cfg.quad;
    ql.method = QuadMethod::monte_carlo;
    out.omega_inf = omega_inf_leray(ql).value;

    const long double z2 = zeta2();
    double cb = static_cast<double>(16.0L * out.c_star.value * out.sigma_inf.value / (27.0L * z2));
    double rel_b = out.c_star.error_bar / out.c_star.value + out.sigma_inf.error_bar / out.sigma_inf.value;
    out.c_XH = {cb, cb * rel_b};

    // tau_H = omega_inf prod_p (1 - 1/p)^5 omega_{H,p}, optionally with the
    // L(1, chi) = pi/4 factor pulled out.
    auto primes = primes_upto(cfg.cstar.pmax);
    long double prod = cfg.cstar.accelerate ? std::numbers::pi_v<long double> / 4 : 1.0L;
    for (uint64_t p : primes) {
        long double ip = 1.0L / static_cast<long double>(p);
        long double wstar;
        if (p <= cfg.direct_pmax) {
            int n = (p == 2) ? cfg.direct_n2 : 1;
            wstar = omega_p_direct(p, n).to_long_double();
        } else {
            wstar = (1 + ip) * local_sum_ld(p, cfg.cstar.nucap);
        }
        long double wfull = wstar / (1 - ip);
        long double f = std::pow(1 - ip, 5) * wfull;
        if (cfg.cstar.accelerate) f *= 1 - chi4(p) * ip;
        prod *= f;
    }
    double tau = static_cast<double>(static_cast<long double>(out.omega_inf.value) * prod);
    double rel_a = out.omega_inf.error_bar / out.omega_inf.value + out.c_star.error_bar / out.c_star.value;
    out.tau_H = {tau, tau * rel_a};
    double ca = out.alpha.to_double() * static_cast<double>(out.beta) * tau;
    out.c_XH_route_a = {ca, ca * rel_a};
    out.route_gap = std::fabs(ca - cb);
    out.routes_agree = out.route_gap <= out.c_XH.error_bar + out.c_XH_route_a.error_bar;
    return out;
}

}  // namespace conicbundle::constants
