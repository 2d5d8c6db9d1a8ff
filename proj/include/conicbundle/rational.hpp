// rational.hpp
#ifndef CONICBUNDLE_RATIONAL_HPP
#define CONICBUNDLE_RATIONAL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <ostream>
#include <compare>

namespace conicbundle {

using i128 = __int128;
using u128 = unsigned __int128;

struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("i128 multiplication overflow");
    return r;
}
inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("i128 addition overflow");
    return r;
}
inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("i128 subtraction overflow");
    return r;
}

inline i128 iabs(i128 a) { return a < 0 ? -a : a; }

inline i128 gcd128(i128 a, i128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string to_string(i128 v);

// Exact rational with numerator/denominator in 128 bits. Every operation
// reduces and throws OverflowError rather than wrapping.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}
    Rational(int n) : num_(n), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(i128 n, i128 d) : num_(n), den_(d) { normalize(); }
    static Rational from_i128(i128 n) { return Rational(n, 1); }

    i128 num() const { return num_; }
    i128 den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_long_double() const {
        return static_cast<long double>(num_) / static_cast<long double>(den_);
    }
    std::string str() const {
        return den_ == 1 ? to_string(num_) : to_string(num_) + "/" + to_string(den_);
    }

    Rational operator-() const { return Rational(-num_, den_, raw{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        i128 g = gcd128(a.den_, b.den_);
        i128 da = a.den_ / g, db = b.den_ / g;
        i128 n = checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da));
        i128 d = checked_mul(a.den_, db);
        return Rational(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        i128 g1 = gcd128(a.num_, b.den_);
        i128 g2 = gcd128(b.num_, a.den_);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        i128 n = checked_mul(a.num_ / g1, b.num_ / g2);
        i128 d = checked_mul(a.den_ / g2, b.den_ / g1);
        return Rational(n, d, raw{});
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational division by zero");
        return a * Rational(b.den_, b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        i128 l = checked_mul(a.num_, b.den_);
        i128 r = checked_mul(b.num_, a.den_);
        return l <=> r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    struct raw {};
    Rational(i128 n, i128 d, raw) : num_(n), den_(d) {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
    }
    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        i128 g = gcd128(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }
    i128 num_ = 0;
    i128 den_ = 1;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

}  // namespace conicbundle

#endif  // CONICBUNDLE_RATIONAL_HPP
