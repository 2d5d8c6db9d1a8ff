#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "conicbundle/surface.hpp"
#include "oracles.hpp"

using namespace conicbundle;
using namespace conicbundle::surface;

namespace {

struct Golden {
    int64_t n_U, n1, zero, x4;
};

std::map<int64_t, Golden> golden() {
    std::ifstream f(CONICBUNDLE_GOLDEN);
    REQUIRE(f.good());
    std::string line;
    std::getline(f, line);
    REQUIRE(line == "B,n_U,n1,stratum_zero,stratum_x4");
    std::map<int64_t, Golden> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        char c;
        int64_t B;
        Golden g{};
        ss >> B >> c >> g.n_U >> c >> g.n1 >> c >> g.zero >> c >> g.x4;
        out[B] = g;
    }
    return out;
}

}  // namespace

TEST_CASE("on_surface") {
    CHECK(on_surface({1, 1, 1, 1, 1}));
    CHECK_FALSE(on_surface({1, 0, 0, 0, 0}));
    CHECK_FALSE(on_surface({1, 1, 1, 1, 0}));
    CHECK(on_surface({2, 5, 10, 1, 8}));
}

TEST_CASE("height") {
    CHECK(height({1, 1, 1, 1, 1}).squared == Rational(1));
    CHECK(height({0, 0, 0, 0, 1}).squared == Rational(2, 3));
    CHECK(height({0, 0, 0, 0, 1}).value() == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK_THROWS_AS(height({2, 2, 2, 2, 2}), std::domain_error);
    CHECK(height_at_most({0, 0, 0, 0, 1}, 1));
    // on X the x4 term never wins
    oracle::for_each_point(20, [](const Point& x) {
        int64_t m = 0;
        for (int i = 0; i < 4; ++i) m = std::max<int64_t>(m, std::llabs(x[i]));
        CHECK(height(x).squared == Rational(m * m));
    });
}

TEST_CASE("in_U and lines") {
    CHECK_FALSE(in_U({1, 1, 1, 1, 1}));
    CHECK(in_U({2, 5, 10, 1, 8}));
    CHECK_THROWS_AS(in_U({1, 0, 0, 0, 0}), std::domain_error);
    // points of M1(1, 1): x0 = x2 = x4, x1 = x3
    for (int64_t t = -5; t <= 5; ++t) {
        Point x{3, t, 3, t, 3};
        if (on_surface(x)) CHECK_FALSE(in_U(x));
    }
    auto L = lines_through({0, 1, 0, 1, 0});
    CHECK(std::count(L.begin(), L.end(), RationalLine{1, 1, 1}) == 1);
    CHECK(std::count(L.begin(), L.end(), RationalLine{1, 1, -1}) == 1);
    CHECK(lines_through({2, 5, 10, 1, 8}).empty());
    auto one = lines_through({1, 1, 1, 1, 1});
    CHECK(std::count(one.begin(), one.end(), RationalLine{1, 1, 1}) == 1);
    CHECK(all_rational_lines().size() == 8);
}

TEST_CASE("in_U is the complement of the rational lines up to height 200") {
    int64_t seen = 0;
    oracle::for_each_point(200, [&](const Point& x) {
        ++seen;
        if (in_U(x) != lines_through(x).empty()) FAIL("mismatch");
    });
    CHECK(seen > 0);
}

TEST_CASE("count_naive against a four-coordinate loop") {
    for (int64_t B : {1, 2, 3, 5, 8, 12, 20}) {
        auto want = oracle::surface_count_4d(B);
        auto got = count_naive(B);
        CHECK(got.n_U == want.n_U);
        CHECK(got.n1 == want.n1);
    }
    CHECK(count_naive(1).n_U == 0);
    CHECK_THROWS_AS(count_naive(0), std::domain_error);
    CHECK_THROWS_AS(count_naive(2001), std::domain_error);
}

TEST_CASE("golden counts") {
    for (auto [B, g] : golden()) {
        auto r = count_naive(B);
        CHECK(r.n_U == g.n_U);
        CHECK(r.n1 == g.n1);
        CHECK(r.stratum_zero == g.zero);
        CHECK(r.stratum_x4 == g.x4);
    }
}

TEST_CASE("count_naive is monotone in B") {
    int64_t prev = 0;
    for (int64_t B = 1; B <= 60; ++B) {
        int64_t n = count_naive(B).n_U;
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("count_N1_naive") {
    CHECK(count_N1_naive(1) == 0);
    // (a, b, x, y, z) = (2, 1, 1, 1, 2) has x = y and is not in N1; the first
    // points need max(a, b) max(x, y) >= 6.
    CHECK(count_N1_naive(4) == 0);
    for (int64_t B : {10, 20, 50}) CHECK(count_N1_naive(B) == oracle::surface_count_4d(B).n1);
}

TEST_CASE("exact reconciliation n_U = 8 N1 + strata") {
    for (int64_t B : {50, 100, 200, 500}) {
        auto r = count_naive(B);
        CHECK(r.n_U == 8 * count_N1_naive(B) + r.stratum_zero + r.stratum_x4);
        CHECK(r.stratum_zero == stratum_zero_fast(B));
        CHECK(r.stratum_x4 == stratum_x4_fast(B));
        CHECK(r.stratum_x4 == 0);
    }
}

TEST_CASE("stratum conic counts") {
    for (int64_t B : {1, 10, 37, 100, 300}) {
        CHECK(count_conic_minus(B) == count_conic_minus_naive(B));
        CHECK(count_conic_plus(B) == count_conic_plus_naive(B));
    }
}

TEST_CASE("y-parametrization is injective onto primitive solutions of x0 x1 = x2 x3") {
    std::set<std::array<int64_t, 4>> images;
    int64_t domain = 0;
    const int64_t C = 200;
    for (int64_t a = 1; a <= C; ++a)
        for (int64_t b = 1; b <= C; ++b) {
            if (std::gcd(a, b) != 1) continue;
            for (int64_t x = 1; x <= C / std::max(a, b); ++x)
                for (int64_t y = 1; y <= C / std::max(a, b); ++y) {
                    if (std::gcd(x, y) != 1) continue;
                    std::array<int64_t, 4> img{a * x, b * y, a * y, b * x};
                    CHECK(img[0] * img[1] == img[2] * img[3]);
                    CHECK(std::gcd(std::gcd(img[0], img[1]), std::gcd(img[2], img[3])) == 1);
                    images.insert(img);
                    ++domain;
                }
        }
    CHECK(static_cast<int64_t>(images.size()) == domain);
    // and it is onto: every positive primitive solution with coordinates <= 60
    int64_t onto = 0;
    for (int64_t x0 = 1; x0 <= 60; ++x0)
        for (int64_t x1 = 1; x1 <= 60; ++x1)
            for (int64_t x2 = 1; x2 <= 60; ++x2) {
                if ((x0 * x1) % x2) continue;
                int64_t x3 = x0 * x1 / x2;
                if (x3 > 60 || std::gcd(std::gcd(x0, x1), std::gcd(x2, x3)) != 1) continue;
                CHECK(images.count({x0, x1, x2, x3}) == 1);
                ++onto;
            }
    CHECK(onto > 0);
}

TEST_CASE("canonical representative") {
    CHECK(canonical({0, -1, 2, 0, 3}) == Point{0, 1, -2, 0, -3});
    CHECK(canonical({0, 1, -2, 0, -3}) == Point{0, 1, -2, 0, -3});
}
