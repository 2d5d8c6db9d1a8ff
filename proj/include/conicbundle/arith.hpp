// arith.hpp
#ifndef CONICBUNDLE_ARITH_HPP
#define CONICBUNDLE_ARITH_HPP

#include <cstdint>
#include <vector>
#include <functional>

#include "conicbundle/rational.hpp"

namespace conicbundle::arith {

struct PrimePower {
    u128 p;
    int e;
    bool operator==(const PrimePower&) const = default;
};

// Canonical factorization, primes ascending. Pre: n >= 1.
using Factorization = std::vector<PrimePower>;

bool is_prime(u128 n);
Factorization factorize(u128 n);
Factorization factorize(i128 n);  // of |n|, pre n != 0

u128 isqrt(u128 n);
bool is_square(i128 n);

// p-adic valuation; v_p(0) is reported as a large sentinel.
int valuation(i128 n, u128 p);
constexpr int kInfiniteValuation = 1 << 20;

// Odd part of gcd(a, b). Pre: (a, b) != (0, 0).
i128 odd_gcd(i128 a, i128 b);
i128 odd_part(i128 n);

u128 powmod(u128 b, u128 e, u128 m);
u128 mulmod(u128 a, u128 b, u128 m);
i128 ipow(i128 b, int e);

std::vector<i128> divisors(const Factorization& f);

// Multiplicative functions, evaluated exactly through the factorization.
enum class Mult { one, tau, tau_k, phi, phi_star, phi_dagger, g, h, one_star_h };

struct MultFn {
    Mult kind = Mult::one;
    int k = 2;  // only used by tau_k
};

Rational eval_prime_power(const MultFn& f, u128 p, int e);
Rational eval(const MultFn& f, i128 n);

// (f1 * f2)(n), Dirichlet convolution. Multiplicative inputs give a
// multiplicative output, so this works prime power by prime power.
Rational dirichlet_convolve(const MultFn& f1, const MultFn& f2, i128 n);

// Generic multiplicative-function form used by tests: any callable on
// (p, e) prime powers.
using PrimePowerFn = std::function<Rational(u128, int)>;
Rational dirichlet_convolve(const PrimePowerFn& f1, const PrimePowerFn& f2, i128 n);

Rational g_value(i128 n);
Rational h_value(i128 n);
// At a prime power p^nu. Throw std::domain_error unless p is prime.
Rational g_value(u128 p, int nu);
Rational h_value(u128 p, int nu);

// Smallest-prime-factor table for fast repeated factorization of small n.
class SpfSieve {
public:
    explicit SpfSieve(uint32_t limit);
    uint32_t limit() const { return limit_; }
    Factorization factorize(uint64_t n) const;  // falls back to trial division above limit

private:
    uint32_t limit_;
    std::vector<uint32_t> spf_;
};

}  // namespace conicbundle::arith

#endif  // CONICBUNDLE_ARITH_HPP
