#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "conicbundle/nefcone.hpp"

using namespace conicbundle;
using namespace conicbundle::nefcone;

namespace {

// Closure of the generators, for group orders.
std::set<Permutation> closure(const GroupAction& g) {
    int n = g.degree == 4 ? 16 : 27;
    Permutation id(n);
    for (int i = 0; i < n; ++i) id[i] = i;
    std::set<Permutation> seen{id};
    std::vector<Permutation> todo{id};
    while (!todo.empty()) {
        Permutation p = todo.back();
        todo.pop_back();
        for (const auto& s : g.generators) {
            Permutation q = compose(s, p);
            if (seen.insert(q).second) todo.push_back(q);
        }
    }
    return seen;
}

QVec qv(std::initializer_list<int> xs) {
    QVec v(static_cast<int>(xs.size()));
    int i = 0;
    for (int x : xs) v(i++) = Rational(x);
    return v;
}

// Integer coordinates of v in the columns of K, if they exist.
bool in_lattice(const IntMat& K, const IntVec& v, IntVec& c) {
    Eigen::MatrixXd Kd = K.cast<double>();
    Eigen::VectorXd x = Kd.colPivHouseholderQr().solve(v.cast<double>());
    c = IntVec(x.size());
    for (int i = 0; i < x.size(); ++i) c(i) = static_cast<int64_t>(std::llround(x(i)));
    return K * c == v;
}

const std::map<std::pair<int, int>, Rational> kQuartic = {
    {{6, 16}, Rational(1, 180)}, {{5, 8}, Rational(1, 36)}, {{4, 4}, Rational(1, 9)},
    {{4, 0}, Rational(1, 6)},    {{3, 2}, Rational(1, 3)},  {{3, 0}, Rational(1, 2)},
    {{2, 1}, Rational(2, 3)},    {{2, 0}, Rational(1)},     {{1, 0}, Rational(1)}};

}  // namespace

TEST_CASE("Picard lattice") {
    for (int d : {3, 4}) {
        auto L = pic_lattice(d);
        CHECK(L.rank == 10 - d);
        CHECK(L.dot(L.minus_K, L.minus_K) == d);
        // signature (1, rank - 1)
        Eigen::MatrixXd P = L.pairing.cast<double>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
        int pos = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) pos += es.eigenvalues()(i) > 0;
        CHECK(pos == 1);
    }
}

TEST_CASE("line classes and their incidence") {
    for (auto [d, count, meets] : std::vector<std::array<int, 3>>{{4, 16, 5}, {3, 27, 10}}) {
        auto L = pic_lattice(d);
        auto lines = line_classes(d);
        REQUIRE(static_cast<int>(lines.size()) == count);
        std::set<std::vector<int64_t>> distinct;
        for (size_t i = 0; i < lines.size(); ++i) {
            CHECK(L.dot(lines[i], lines[i]) == -1);
            CHECK(L.dot(lines[i], L.minus_K) == 1);
            distinct.insert(std::vector<int64_t>(lines[i].data(), lines[i].data() + lines[i].size()));
            int m = 0;
            for (size_t j = 0; j < lines.size(); ++j) {
                if (i == j) continue;
                int64_t e = L.dot(lines[i], lines[j]);
                CHECK(e >= 0);
                CHECK(e <= 3);
                m += e == 1;
            }
            CHECK(m == meets);
        }
        CHECK(static_cast<int>(distinct.size()) == count);
    }
}

TEST_CASE("root systems") {
    CHECK(roots(4).size() == 40);  // D5
    CHECK(roots(3).size() == 72);  // E6
    for (int d : {3, 4}) {
        auto L = pic_lattice(d);
        for (const auto& r : simple_roots(d)) {
            CHECK(L.dot(r, r) == -2);
            CHECK(L.dot(r, L.minus_K) == 0);
        }
    }
}

TEST_CASE("orbits") {
    auto triv = orbit_decompose(trivial_action(4));
    CHECK(triv.size() == 16);
    CHECK(orbit_signature(triv) == "(1^16)");
    auto conj = orbit_decompose(conj_qi_action());
    CHECK(orbit_signature(conj) == "(1^8, 2^4)");
    CHECK(orbit_signature(orbit_decompose(full_weyl_action(4))) == "(16^1)");
    CHECK(orbit_signature(orbit_decompose(full_weyl_action(3))) == "(27^1)");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        GroupAction g{4, {random_weyl_element(4, rng, 5 + i % 7)}};
        size_t order = closure(g).size();
        for (const auto& o : orbit_decompose(g)) CHECK(order % o.size() == 0);
    }
}

TEST_CASE("invalid actions are rejected") {
    Permutation p(16);
    for (int i = 0; i < 16; ++i) p[i] = i;
    std::swap(p[0], p[5]);  // e1 <-> l - e1 - e2 does not preserve the pairing
    GroupAction bad{4, {p}};
    CHECK_THROWS_AS(validate_action(bad), std::domain_error);
    CHECK_THROWS_AS(orbit_decompose(bad), std::domain_error);
    CHECK_THROWS_AS(alpha(bad, 4), std::domain_error);
    GroupAction dup{4, {Permutation(16, 0)}};
    CHECK_THROWS_AS(validate_action(dup), std::domain_error);
    CHECK_THROWS(parse_cycles(4, "(0 16)"));
}

TEST_CASE("cycle notation round trip") {
    auto g = conj_qi_action();
    std::string text;
    std::vector<char> done(16, 0);
    for (int i = 0; i < 16; ++i) {
        if (done[i] || g.generators[0][i] == i) continue;
        text += "(" + std::to_string(i);
        done[i] = 1;
        for (int j = g.generators[0][i]; j != i; j = g.generators[0][j]) {
            text += " " + std::to_string(j);
            done[j] = 1;
        }
        text += ")";
    }
    auto h = parse_cycles(4, text);
    REQUIRE(h.generators.size() == 1);
    CHECK(h.generators[0] == g.generators[0]);
}

TEST_CASE("effective generators") {
    auto L = pic_lattice(4);
    auto lines = line_classes(4);
    auto triv = trivial_action(4);
    auto gens = effective_generators(triv, orbit_decompose(triv));
    REQUIRE(gens.size() == 16);
    for (size_t i = 0; i < 16; ++i) CHECK(gens[i] == lines[i]);

    auto conj = conj_qi_action();
    auto cg = effective_generators(conj, orbit_decompose(conj));
    CHECK(cg.size() == 12);
    for (const auto& g : cg) CHECK(L.dot(g, L.minus_K) > 0);

    IntMat K = invariant_lattice(conj);
    CHECK(K.cols() == 5);
    // the invariant lattice is spanned by l, e1, e2, e3, e4 + e5
    IntMat W = IntMat::Zero(6, 5);
    for (int i = 0; i < 4; ++i) W(i, i) = 1;
    W(4, 4) = 1;
    W(5, 4) = 1;
    IntMat C(5, 5);
    for (int j = 0; j < 5; ++j) {
        IntVec c;
        CHECK(in_lattice(K, W.col(j), c));
        C.col(j) = c;
    }
    CHECK(std::llabs(std::llround(C.cast<double>().determinant())) == 1);
    for (const auto& g : cg) {
        IntVec c;
        CHECK(in_lattice(K, g, c));
    }
}

TEST_CASE("alpha on the reference actions") {
    auto t4 = alpha(trivial_action(4), 4);
    CHECK(t4.alpha == Rational(1, 180));
    CHECK(t4.alpha_ii == Rational(1, 180));
    CHECK(t4.rank == 6);
    CHECK(t4.n_rational_lines == 16);
    auto c = alpha(conj_qi_action(), 4);
    CHECK(c.alpha == Rational(1, 36));
    CHECK(c.rank == 5);
    CHECK(c.n_rational_lines == 8);
    CHECK(alpha(full_weyl_action(4), 4).alpha == Rational(1));
    CHECK(alpha(full_weyl_action(3), 3).alpha == Rational(1));
    CHECK(alpha(trivial_action(3), 3).alpha == Rational(1, 120));
    CHECK_THROWS_AS(alpha(trivial_action(4), 3), std::domain_error);
}

TEST_CASE("alpha on random subgroups of W(D5) matches the quartic table") {
    std::mt19937_64 rng(1);
    std::set<std::pair<int, int>> hit;
    for (int it = 0; it < 300; ++it) {
        GroupAction g{4, {}};
        for (int j = 0; j < 1 + it % 2; ++j) g.generators.push_back(random_weyl_element(4, rng, 3 + static_cast<int>(rng() % 30)));
        auto r = alpha(g, 4);
        auto key = std::make_pair(r.rank, r.n_rational_lines);
        REQUIRE(kQuartic.count(key) == 1);
        CHECK(r.alpha == kQuartic.at(key));
        hit.insert(key);
    }
    CHECK(hit.size() == kQuartic.size());
}

TEST_CASE("alpha on random subgroups of W(E6) matches the cubic table") {
    // rows fixed by (rank, rational lines)
    const std::map<std::pair<int, int>, Rational> by_lines = {
        {{7, 27}, Rational(1, 120)}, {{6, 15}, Rational(1, 30)}, {{5, 7}, Rational(1, 8)},
        {{5, 9}, Rational(5, 48)},   {{4, 5}, Rational(5, 18)},  {{3, 0}, Rational(1)},
        {{3, 2}, Rational(17, 24)},  {{3, 3}, Rational(1, 2)},   {{2, 1}, Rational(1)},
        {{1, 0}, Rational(1)}};
    // rows that need the orbit structure
    const std::map<std::string, Rational> by_orbits = {
        {"(1^3, 2^12)", Rational(7, 18)},
        {"(1^3, 2^8, 4^2)", Rational(7, 18)},
        {"(1^3, 2^6, 4^3)", Rational(7, 18)},
        {"(1^3, 2^3, 3^4, 6^1)", Rational(3, 8)},
        {"(1^1, 2^2, 3^2, 4^1, 6^2)", Rational(1)},
        {"(1^1, 2^4, 3^2, 6^2)", Rational(1)},
        {"(1^1, 2^3, 4^5)", Rational(5, 6)},
        {"(1^1, 2^3, 4^3, 8^1)", Rational(5, 6)},
        {"(1^1, 2^5, 4^2, 8^1)", Rational(5, 6)},
        {"(1^1, 2^5, 4^4)", Rational(5, 6)},
        {"(1^1, 2^2, 4^2, 6^1, 8^1)", Rational(5, 6)},
        {"(3^2, 6^2, 9^1)", Rational(2)},
        {"(3^5, 6^2)", Rational(2)},
        {"(2^1, 5^3, 10^1)", Rational(3, 2)},
        {"(2^1, 5^1, 10^2)", Rational(3, 2)},
        {"(3^1, 6^4)", Rational(4, 3)},
        {"(3^1, 6^2, 12^1)", Rational(4, 3)},
        {"(6^3, 9^1)", Rational(4, 3)},
        {"(6^2, 15^1)", Rational(4, 3)}};
    std::mt19937_64 rng(1);
    int checked = 0;
    for (int it = 0; it < 300; ++it) {
        GroupAction g{3, {}};
        for (int j = 0; j < 1 + it % 2; ++j) g.generators.push_back(random_weyl_element(3, rng, 3 + static_cast<int>(rng() % 30)));
        auto r = alpha(g, 3);
        auto key = std::make_pair(r.rank, r.n_rational_lines);
        if (by_lines.count(key)) {
            CHECK(r.alpha == by_lines.at(key));
        } else if (r.orbit_signature == "(3^3, 6^3)") {
            // six distinct orbit sums give 2, otherwise 4/3
            std::set<std::vector<int64_t>> sums;
            for (const auto& D : effective_generators(g, orbit_decompose(g)))
                sums.insert(std::vector<int64_t>(D.data(), D.data() + D.size()));
            CHECK(r.alpha == (sums.size() == 6 ? Rational(2) : Rational(4, 3)));
        } else {
            REQUIRE_MESSAGE(by_orbits.count(r.orbit_signature) == 1, r.orbit_signature);
            CHECK(r.alpha == by_orbits.at(r.orbit_signature));
        }
        ++checked;
    }
    CHECK(checked == 300);
}

TEST_CASE("alpha is a conjugacy invariant") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i) {
        int d = i % 2 ? 3 : 4;
        GroupAction g{d, {random_weyl_element(d, rng, 10)}};
        Permutation w = random_weyl_element(d, rng, 25), wi = inverse(w);
        GroupAction h{d, {compose(w, compose(g.generators[0], wi))}};
        auto a = alpha(g, d), b = alpha(h, d);
        CHECK(a.alpha == b.alpha);
        CHECK(a.orbit_signature == b.orbit_signature);
    }
}

TEST_CASE("polytope volume") {
    for (int d = 1; d <= 5; ++d) {
        RationalPolytope S{{}, d, d};
        S.vertices.push_back(QVec::Zero(d));
        for (int i = 0; i < d; ++i) {
            QVec e = QVec::Zero(d);
            e(i) = Rational(1);
            S.vertices.push_back(e);
        }
        Rational fact(1);
        for (int k = 2; k <= d; ++k) fact *= Rational(k);
        CHECK(polytope_volume(S).volume == Rational(1) / fact);
    }
    RationalPolytope cube{{}, 4, 4};
    for (int m = 0; m < 16; ++m) cube.vertices.push_back(qv({m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1}));
    CHECK(polytope_volume(cube).volume == Rational(1));

    RationalPolytope flat{{qv({0, 0, 0}), qv({1, 0, 0}), qv({0, 1, 0}), qv({1, 1, 0})}, 3, 2};
    auto v = polytope_volume(flat);
    CHECK(v.degenerate);
    CHECK(v.volume == Rational(0));
}

TEST_CASE("polytope volume is invariant under unimodular maps") {
    std::mt19937_64 rng(4);
    RationalPolytope cube{{}, 3, 3};
    for (int m = 0; m < 8; ++m) cube.vertices.push_back(qv({m & 1, (m >> 1) & 1, 2 * ((m >> 2) & 1)}));
    cube.vertices.push_back(qv({1, 1, 3}));  // a pyramid on top
    Rational base = polytope_volume(cube).volume;
    CHECK(base == Rational(2) + Rational(1, 3));
    for (int it = 0; it < 20; ++it) {
        QMat U = QMat::Identity(3, 3);
        for (int k = 0; k < 6; ++k) {
            int i = static_cast<int>(rng() % 3), j = static_cast<int>(rng() % 3);
            if (i == j) continue;
            int c = static_cast<int>(rng() % 5) - 2;
            QMat E = QMat::Identity(3, 3);
            E(i, j) = Rational(c);
            U = U * E;
        }
        RationalPolytope img{{}, 3, 3};
        for (const auto& x : cube.vertices) img.vertices.push_back(U * x);
        CHECK(polytope_volume(img).volume == base);
    }
}

TEST_CASE("vol(W0)") {
    CHECK(vol_W0() == Rational(1, 72));
    auto H = region_W0(true);
    auto V = enumerate_vertices(H);
    for (const auto& v : V.vertices) {
        for (int i = 0; i < 4; ++i) {
            CHECK(v(i) >= Rational(0));
            CHECK(v(i) <= Rational(1));
        }
        CHECK(v(3) <= Rational(1, 2));
        for (int i = 0; i < 3; ++i) CHECK(v(i) <= v(3));
    }
    CHECK(volume_h(region_W0(false)) > vol_W0());
}
