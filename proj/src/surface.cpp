#include "conicbundle/surface.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "conicbundle/arith.hpp"

namespace conicbundle::surface {

namespace {

int64_t iabs64(int64_t v) { return v < 0 ? -v : v; }

int64_t isqrt64(int64_t n) { return static_cast<int64_t>(arith::isqrt(static_cast<u128>(n))); }

bool square_root(int64_t n, int64_t& r) {
    if (n < 0) return false;
    r = isqrt64(n);
    return r * r == n;
}

}  // namespace

i128 phi1(const Point& x) { return static_cast<i128>(x[0]) * x[1] - static_cast<i128>(x[2]) * x[3]; }

i128 phi2(const Point& x) {
    auto sq = [](int64_t v) { return static_cast<i128>(v) * v; };
    return sq(x[0]) + sq(x[1]) + sq(x[2]) - sq(x[3]) - 2 * sq(x[4]);
}

bool on_surface(const Point& x) { return phi1(x) == 0 && phi2(x) == 0; }

bool is_primitive(const Point& x) {
    int64_t g = 0;
    for (int64_t v : x) g = std::gcd(g, iabs64(v));
    return g == 1;
}

double Height::value() const { return std::sqrt(squared.to_double()); }

Height height(const Point& x) {
    if (!is_primitive(x)) throw std::domain_error("height needs a primitive point");
    Rational best(0);
    for (int i = 0; i < 4; ++i) {
        Rational s = Rational::from_i128(static_cast<i128>(x[i]) * x[i]);
        if (s > best) best = s;
    }
    Rational s4 = Rational(2 * static_cast<i128>(x[4]) * x[4], 3);
    if (s4 > best) best = s4;
    return Height{best};
}

bool height_at_most(const Point& x, int64_t B) {
    for (int i = 0; i < 4; ++i) {
        if (iabs64(x[i]) > B) return false;
    }
    return 2 * static_cast<i128>(x[4]) * x[4] <= 3 * static_cast<i128>(B) * B;
}

std::string RationalLine::name() const {
    return "M" + std::to_string(family) + "(" + (e1 > 0 ? "+1" : "-1") + "," + (e2 > 0 ? "+1" : "-1") + ")";
}

std::vector<RationalLine> all_rational_lines() {
    std::vector<RationalLine> out;
    for (int f : {1, 2}) {
        for (int e1 : {1, -1}) {
            for (int e2 : {1, -1}) out.push_back({f, e1, e2});
        }
    }
    return out;
}

bool lies_on(const Point& x, const RationalLine& L) {
    if (L.family == 1) return x[0] == L.e1 * x[2] && x[0] == L.e2 * x[4] && x[1] == L.e1 * x[3];
    return x[1] == L.e1 * x[2] && x[1] == L.e2 * x[4] && x[0] == L.e1 * x[3];
}

std::vector<RationalLine> lines_through(const Point& x) {
    std::vector<RationalLine> out;
    for (const auto& L : all_rational_lines()) {
        if (lies_on(x, L)) out.push_back(L);
    }
    return out;
}

bool in_U(const Point& x) {
    if (!on_surface(x)) throw std::domain_error("in_U needs a point on X");
    int64_t a0 = iabs64(x[0]), a1 = iabs64(x[1]), a2 = iabs64(x[2]), a3 = iabs64(x[3]);
    bool same = (a0 == a2 && a1 == a3) || (a0 == a3 && a1 == a2);
    return !same;
}

Point canonical(const Point& x) {
    for (int64_t v : x) {
        if (v == 0) continue;
        if (v > 0) return x;
        Point y;
        for (int i = 0; i < 5; ++i) y[i] = -x[i];
        return y;
    }
    return x;
}

CountReport count_naive(int64_t B) {
    if (B < 1 || B > 2000) throw std::domain_error("count_naive needs 1 <= B <= 2000");
    int64_t all = 0, n1 = 0, zero = 0, x4zero = 0;
    auto tally = [&](const Point& v) {
        if (!is_primitive(v) || !in_U(v)) return;
        ++all;
        if (v[0] > 0 && v[1] > 0 && v[2] > 0 && v[3] > 0 && v[4] > 0) ++n1;
        if (v[0] == 0 || v[1] == 0 || v[2] == 0 || v[3] == 0) {
            ++zero;
        } else if (v[4] == 0) {
            ++x4zero;
        }
    };
    auto finish = [&](const Point& v) {
        // v has x0..x3 fixed; solve for x4.
        int64_t w = v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - v[3] * v[3];
        if (w < 0 || (w & 1)) return;
        int64_t r;
        if (!square_root(w / 2, r)) return;
        Point p = v;
        p[4] = r;
        tally(p);
        if (r != 0) {
            p[4] = -r;
            tally(p);
        }
    };
    for (int64_t x0 = -B; x0 <= B; ++x0) {
        for (int64_t x2 = -B; x2 <= B; ++x2) {
            if (x2 == 0) {
                if (x0 == 0) {
                    for (int64_t x1 = -B; x1 <= B; ++x1) {
                        for (int64_t x3 = -B; x3 <= B; ++x3) finish({0, x1, 0, x3, 0});
                    }
                } else {
                    for (int64_t x3 = -B; x3 <= B; ++x3) finish({x0, 0, 0, x3, 0});
                }
                continue;
            }
            int64_t step = iabs64(x2) / std::gcd(iabs64(x0), iabs64(x2));
            for (int64_t x1 = -(B / step) * step; x1 <= B; x1 += step) {
                int64_t x3 = x0 * x1 / x2;
                if (iabs64(x3) > B) continue;
                finish({x0, x1, x2, x3, 0});
            }
        }
    }
    CountReport r;
    r.B = B;
    r.n_U = all / 2;
    r.n1 = n1;
    r.stratum_zero = zero / 2;
    r.stratum_x4 = x4zero / 2;
    r.engine = "naive";
    return r;
}

int64_t count_N1_naive(int64_t B) {
    if (B < 1 || B > 10000) throw std::domain_error("count_N1_naive needs 1 <= B <= 1e4");
    int64_t count = 0;
    for (int64_t a = 1; a <= B; ++a) {
        for (int64_t b = 1; b <= B; ++b) {
            if (a == b || std::gcd(a, b) != 1) continue;
            int64_t m = std::max(a, b);
            int64_t H = B / m;
            if (H < 2) continue;
            int64_t D = a * a - b * b, S = a * a + b * b;
            for (int64_t x = 1; x <= H; ++x) {
                for (int64_t y = 1; y <= H; ++y) {
                    if (x == y || std::gcd(x, y) != 1) continue;
                    int64_t w = D * x * x + S * y * y;
                    if (w <= 0 || (w & 1)) continue;
                    int64_t z;
                    if (square_root(w / 2, z)) ++count;
                }
            }
        }
    }
    return count;
}

int64_t count_conic_minus(int64_t B) {
    // u = m^2 + 2n^2, v = |m^2 - 2n^2|, w = 2mn with m odd, gcd(m, n) = 1
    int64_t c = 0;
    for (int64_t m = 1; m * m < B; m += 2) {
        for (int64_t n = 1; m * m + 2 * n * n <= B; ++n) {
            if (std::gcd(m, n) == 1) ++c;
        }
    }
    return c;
}

int64_t count_conic_plus(int64_t B) {
    // u, v = P + Q, |P - Q| for primitive Pythagorean legs (P, Q); both orders.
    int64_t c = 0;
    for (int64_t m = 2; m * m <= B; ++m) {
        for (int64_t n = 1; n < m; ++n) {
            if (((m - n) & 1) == 0 || std::gcd(m, n) != 1) continue;
            int64_t P = m * m - n * n, Q = 2 * m * n;
            if (P + Q <= B) c += 2;
        }
    }
    return c;
}

int64_t count_conic_minus_naive(int64_t B) {
    int64_t c = 0;
    for (int64_t u = 1; u <= B; ++u) {
        for (int64_t v = 1; v < u; ++v) {
            int64_t d = u * u - v * v, w;
            if ((d & 1) || !square_root(d / 2, w) || w == 0) continue;
            if (std::gcd(std::gcd(u, v), w) == 1) ++c;
        }
    }
    return c;
}

int64_t count_conic_plus_naive(int64_t B) {
    int64_t c = 0;
    for (int64_t u = 1; u <= B; ++u) {
        for (int64_t v = 1; v <= B; ++v) {
            if (u == v) continue;
            int64_t s = u * u + v * v, w;
            if ((s & 1) || !square_root(s / 2, w)) continue;
            if (std::gcd(std::gcd(u, v), w) == 1) ++c;
        }
    }
    return c;
}

int64_t stratum_zero_fast(int64_t B) {
    // Two zeros among x0..x3 (one from {x0, x1}, one from {x2, x3}); the
    // remaining conic is u^2 - v^2 = 2w^2 for two of the four patterns and
    // u^2 + v^2 = 2w^2 for the other two. Each positive solution carries
    // 8 sign vectors, i.e. 4 projective points.
    return 8 * (count_conic_minus(B) + count_conic_plus(B));
}

int64_t stratum_x4_fast(int64_t B) {
    // Positive points with x4 = 0 written as (ax, by, ay, bx) need
    // (b^2 - a^2) x^2 = (a^2 + b^2) y^2. Either max(a, b) or max(x, y) is at
    // most sqrt(B); each side is swept separately.
    int64_t r = isqrt64(B);
    int64_t c = 0;
    auto coprime_ratio_squares = [](int64_t num, int64_t den, int64_t& p, int64_t& q) {
        int64_t g = std::gcd(num, den);
        return square_root(num / g, p) && square_root(den / g, q);
    };
    for (int64_t b = 2; b <= r; ++b) {
        for (int64_t a = 1; a < b; ++a) {
            if (std::gcd(a, b) != 1) continue;
            int64_t x, y;
            if (!coprime_ratio_squares(a * a + b * b, b * b - a * a, x, y)) continue;
            if (x != y && b * std::max(x, y) <= B) ++c;
        }
    }
    for (int64_t x = 2; x <= r; ++x) {
        for (int64_t y = 1; y < x; ++y) {
            if (std::gcd(x, y) != 1) continue;
            int64_t a, b;
            if (!coprime_ratio_squares(x * x - y * y, x * x + y * y, a, b)) continue;
            int64_t m = std::max(a, b);
            if (m > r && a != b && m * x <= B) ++c;
        }
    }
    return 4 * c;
}

}  // namespace conicbundle::surface
