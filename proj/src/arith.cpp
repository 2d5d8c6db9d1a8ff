#include "conicbundle/arith.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace conicbundle {

std::string to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace conicbundle

namespace conicbundle::arith {

u128 mulmod(u128 a, u128 b, u128 m) {
    a %= m;
    b %= m;
    if ((a >> 64) == 0 && (b >> 64) == 0) return (a * b) % m;
    u128 r = 0;
    while (b > 0) {
        if (b & 1) {
            r = (r >= m - a) ? r - (m - a) : r + a;
        }
        a = (a >= m - a) ? a - (m - a) : a + a;
        b >>= 1;
    }
    return r;
}

u128 powmod(u128 b, u128 e, u128 m) {
    u128 r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

i128 ipow(i128 b, int e) {
    i128 r = 1;
    for (int i = 0; i < e; ++i) r = checked_mul(r, b);
    return r;
}

bool is_prime(u128 n) {
    if (n < 2) return false;
    static const int small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (int p : small) {
        if (n % p == 0) return n == static_cast<u128>(p);
    }
    u128 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // The first 13 prime bases are deterministic below 3.3e24; beyond that
    // this is a strong probable-prime test.
    for (int a : small) {
        u128 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

namespace {

u128 ugcd(u128 a, u128 b) {
    while (b) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Montgomery arithmetic mod an odd n >= 2^64, where the bitwise mulmod is
// too slow for rho. Values stay in Montgomery form; the rho map
// x -> x^2 R^{-1} + c is still a polynomial mod every divisor of n.
struct Mont {
    u128 n, ninv;
    explicit Mont(u128 n_) : n(n_) {
        u128 x = n;
        for (int i = 0; i < 7; ++i) x *= 2 - n * x;
        ninv = -x;
    }
    static void mul_wide(u128 a, u128 b, u128& hi, u128& lo) {
        const u128 mask = ~uint64_t{0};
        u128 a0 = a & mask, a1 = a >> 64, b0 = b & mask, b1 = b >> 64;
        u128 p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
        u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
        lo = (mid << 64) | (p00 & mask);
        hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    }
    u128 mul(u128 a, u128 b) const {
        u128 th, tl, mh, ml;
        mul_wide(a, b, th, tl);
        mul_wide(tl * ninv, n, mh, ml);
        u128 r = th + mh + (tl + ml < tl ? 1 : 0);
        return r >= n ? r - n : r;
    }
};

template <class Mul>
u128 brent_loop(u128 n, u128 c, Mul mul) {
    u128 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u128 r = 1;
    const u128 m = 128;
    auto f = [&](u128 v) {
        u128 w = mul(v, v) + c;
        return w >= n ? w - n : w;
    };
    do {
        x = y;
        for (u128 i = 0; i < r; ++i) y = f(y);
        u128 k = 0;
        while (k < r && g == 1) {
            ys = y;
            for (u128 i = 0; i < std::min(m, r - k); ++i) {
                y = f(y);
                q = mul(q, x > y ? x - y : y - x);
            }
            g = ugcd(q, n);
            k += m;
        }
        r <<= 1;
    } while (g == 1);
    if (g == n) {
        do {
            ys = f(ys);
            g = ugcd(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

u128 pollard_brent(u128 n) {
    if (n % 2 == 0) return 2;
    for (u128 c = 1;; ++c) {
        u128 g;
        if ((n >> 64) == 0) {
            g = brent_loop(n, c, [n](u128 a, u128 b) { return (a * b) % n; });
        } else {
            Mont M(n);
            g = brent_loop(n, c, [&M](u128 a, u128 b) { return M.mul(a, b); });
        }
        if (g != n) return g;
    }
}

void factor_rec(u128 n, std::map<u128, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    u128 d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

Factorization factorize(u128 n) {
    if (n == 0) throw std::domain_error("factorize(0)");
    std::map<u128, int> acc;
    for (u128 p = 2; p < 1000 && p * p <= n; ++p) {
        while (n % p == 0) {
            ++acc[p];
            n /= p;
        }
    }
    if (n > 1) factor_rec(n, acc);
    Factorization f;
    for (auto& [p, e] : acc) f.push_back({p, e});
    return f;
}

Factorization factorize(i128 n) {
    if (n == 0) throw std::domain_error("factorize(0)");
    return factorize(static_cast<u128>(iabs(n)));
}

u128 isqrt(u128 n) {
    if (n == 0) return 0;
    u128 x = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
    while (x > 0 && x * x > n) --x;
    while ((x + 1) * (x + 1) <= n) ++x;
    return x;
}

bool is_square(i128 n) {
    if (n < 0) return false;
    u128 r = isqrt(static_cast<u128>(n));
    return r * r == static_cast<u128>(n);
}

int valuation(i128 n, u128 p) {
    if (n == 0) return kInfiniteValuation;
    u128 u = static_cast<u128>(iabs(n));
    int v = 0;
    while (u % p == 0) {
        u /= p;
        ++v;
    }
    return v;
}

i128 odd_part(i128 n) {
    n = iabs(n);
    if (n == 0) return 0;
    while ((n & 1) == 0) n >>= 1;
    return n;
}

i128 odd_gcd(i128 a, i128 b) {
    if (a == 0 && b == 0) throw std::domain_error("odd_gcd(0, 0)");
    return odd_part(gcd128(a, b));
}

std::vector<i128> divisors(const Factorization& f) {
    std::vector<i128> d{1};
    for (auto [p, e] : f) {
        size_t n = d.size();
        i128 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= static_cast<i128>(p);
            for (size_t i = 0; i < n; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}

namespace {

Rational pr(u128 p) { return Rational(static_cast<i128>(p), 1); }

i128 binom(int n, int k) {
    i128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

Rational eval_prime_power(const MultFn& f, u128 p, int e) {
    if (e == 0) return Rational(1);
    switch (f.kind) {
        case Mult::one:
            return Rational(0);
        case Mult::tau:
            return Rational(e + 1);
        case Mult::tau_k:
            // number of ordered k-factorizations of p^e
            return Rational(binom(e + f.k - 1, f.k - 1), 1);
        case Mult::phi:
            return Rational(ipow(static_cast<i128>(p), e - 1) * (static_cast<i128>(p) - 1), 1);
        case Mult::phi_star:
            return Rational(1) - Rational(1) / pr(p);
        case Mult::phi_dagger:
            return Rational(1) + Rational(1) / pr(p);
        case Mult::g:
            if (p == 2) return Rational(std::max(1, e - 1));
            return Rational(1) + Rational(e) * (pr(p) - 1) / (pr(p) + 1);
        case Mult::h:
            if (p == 2) {
                if (e == 1) return Rational(-1);
                if (e == 3) return Rational(1);
                return Rational(0);
            }
            if (e == 1) return Rational(-2) / (pr(p) + 1);
            return Rational(0);
        case Mult::one_star_h: {
            Rational s(1);
            for (int i = 1; i <= e; ++i) s += eval_prime_power({Mult::h, 2}, p, i);
            return s;
        }
    }
    throw std::logic_error("unknown multiplicative function");
}

Rational eval(const MultFn& f, i128 n) {
    if (n < 1) throw std::domain_error("multiplicative function at n < 1");
    Rational r(1);
    for (auto [p, e] : factorize(n)) r *= eval_prime_power(f, p, e);
    return r;
}

Rational dirichlet_convolve(const PrimePowerFn& f1, const PrimePowerFn& f2, i128 n) {
    if (n < 1) throw std::domain_error("convolution at n < 1");
    Rational r(1);
    for (auto [p, e] : factorize(n)) {
        Rational s(0);
        for (int i = 0; i <= e; ++i) s += f1(p, i) * f2(p, e - i);
        r *= s;
    }
    return r;
}

Rational dirichlet_convolve(const MultFn& f1, const MultFn& f2, i128 n) {
    return dirichlet_convolve([&](u128 p, int e) { return eval_prime_power(f1, p, e); },
                              [&](u128 p, int e) { return eval_prime_power(f2, p, e); }, n);
}

Rational g_value(i128 n) { return eval({Mult::g, 2}, n); }
Rational h_value(i128 n) { return eval({Mult::h, 2}, n); }

Rational g_value(u128 p, int nu) {
    if (!is_prime(p) || nu < 0) throw std::domain_error("g_value needs a prime p and nu >= 0");
    return eval_prime_power({Mult::g, 2}, p, nu);
}

Rational h_value(u128 p, int nu) {
    if (!is_prime(p) || nu < 1) throw std::domain_error("h_value needs a prime p and nu >= 1");
    return eval_prime_power({Mult::h, 2}, p, nu);
}

SpfSieve::SpfSieve(uint32_t limit) : limit_(limit), spf_(static_cast<size_t>(limit) + 1, 0) {
    for (uint32_t i = 2; i <= limit; ++i) {
        if (spf_[i] != 0) continue;
        for (uint64_t j = i; j <= limit; j += i) {
            if (spf_[j] == 0) spf_[j] = i;
        }
    }
}

Factorization SpfSieve::factorize(uint64_t n) const {
    if (n == 0) throw std::domain_error("factorize(0)");
    if (n > limit_) return arith::factorize(static_cast<u128>(n));
    Factorization f;
    while (n > 1) {
        uint32_t p = spf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.push_back({p, e});
    }
    return f;
}

}  // namespace conicbundle::arith
