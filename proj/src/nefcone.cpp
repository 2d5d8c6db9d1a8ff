#include "conicbundle/nefcone.hpp"

#include <Eigen/LU>
#include <cmath>
#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace conicbundle::nefcone {

namespace {

int r_of(int degree) {
    if (degree != 3 && degree != 4) throw std::domain_error("degree must be 3 or 4");
    return 9 - degree;
}

IntVec zero_vec(int n) { return IntVec::Zero(n); }

std::vector<int64_t> key_of(const IntVec& v) { return std::vector<int64_t>(v.data(), v.data() + v.size()); }

// ---------------------------------------------------------------------------
// Exact and floating elimination, shared through the scalar type.

bool is_zero(const Rational& x) { return x == Rational(0); }

template <class S>
int pick_pivot(const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& M, int row0, int col) {
    int best = -1;
    for (int i = row0; i < M.rows(); ++i) {
        if (M(i, col) == S(0)) continue;
        if constexpr (std::is_same_v<S, double>) {
            if (best < 0 || std::fabs(M(i, col)) > std::fabs(M(best, col))) best = i;
        } else {
            return i;
        }
    }
    return best;
}

// Reduced row echelon form in place; returns pivot columns.
template <class S>
std::vector<int> rref(Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& M) {
    std::vector<int> piv;
    int row = 0;
    for (int col = 0; col < M.cols() && row < M.rows(); ++col) {
        int p = pick_pivot(M, row, col);
        if (p < 0) continue;
        M.row(p).swap(M.row(row));
        S inv = S(1) / M(row, col);
        for (int j = 0; j < M.cols(); ++j) M(row, j) = M(row, j) * inv;
        for (int i = 0; i < M.rows(); ++i) {
            if (i == row || M(i, col) == S(0)) continue;
            S f = M(i, col);
            for (int j = 0; j < M.cols(); ++j) M(i, j) = M(i, j) - f * M(row, j);
        }
        piv.push_back(col);
        ++row;
    }
    return piv;
}

Rational det_exact(QMat M) {
    const int n = static_cast<int>(M.rows());
    Rational det(1);
    for (int c = 0; c < n; ++c) {
        int p = pick_pivot(M, c, c);
        if (p < 0) return Rational(0);
        if (p != c) {
            M.row(p).swap(M.row(c));
            det = -det;
        }
        det *= M(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (is_zero(M(i, c))) continue;
            Rational f = M(i, c) / M(c, c);
            for (int j = c; j < n; ++j) M(i, j) -= f * M(c, j);
        }
    }
    return det;
}

bool solve_exact(const QMat& A, const QVec& b, QVec& x) {
    const int n = static_cast<int>(A.cols());
    QMat aug(A.rows(), n + 1);
    aug.leftCols(n) = A;
    aug.col(n) = b;
    auto piv = rref(aug);
    if (static_cast<int>(piv.size()) < n || piv.back() == n) return false;
    x = QVec(n);
    for (int i = 0; i < n; ++i) x(i) = aug(i, n);
    return true;
}

int affine_rank(const std::vector<QVec>& pts, const std::vector<int>& idx) {
    if (idx.size() <= 1) return 0;
    const int D = static_cast<int>(pts[idx[0]].size());
    QMat M(static_cast<int>(idx.size()) - 1, D);
    for (size_t i = 1; i < idx.size(); ++i) M.row(static_cast<int>(i) - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
    return static_cast<int>(rref(M).size());
}

Rational factorial(int n) {
    Rational f(1);
    for (int i = 2; i <= n; ++i) f *= Rational(i);
    return f;
}

bool next_combination(std::vector<int>& c, int n) {
    int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Pulling triangulation driven by the vertex/constraint incidence: every
// face is cut into cones from its smallest-index vertex over the facets not
// containing it.
class Triangulator {
public:
    Triangulator(const std::vector<QVec>& pts, const std::vector<std::vector<int>>& tight, int ncons)
        : pts_(pts), tight_(pts.size(), std::vector<char>(ncons, 0)), ncons_(ncons) {
        for (size_t v = 0; v < tight.size(); ++v) {
            for (int j : tight[v]) tight_[v][j] = 1;
        }
    }

    std::vector<std::vector<int>> simplices(const std::vector<int>& face, int k) {
        if (k == 0) return {{face[0]}};
        auto it = memo_.find(face);
        if (it != memo_.end()) return it->second;
        int v0 = face[0];
        std::vector<std::vector<int>> out;
        for (const auto& F : facets(face, k)) {
            if (std::binary_search(F.begin(), F.end(), v0)) continue;
            for (auto s : simplices(F, k - 1)) {
                s.push_back(v0);
                out.push_back(std::move(s));
            }
        }
        memo_.emplace(face, out);
        return out;
    }

private:
    std::vector<std::vector<int>> facets(const std::vector<int>& face, int k) {
        std::set<std::vector<int>> found;
        for (int j = 0; j < ncons_; ++j) {
            std::vector<int> S;
            for (int v : face) {
                if (tight_[v][j]) S.push_back(v);
            }
            if (S.size() == face.size() || static_cast<int>(S.size()) < k) continue;
            if (found.count(S)) continue;
            if (affine_rank(pts_, S) == k - 1) found.insert(S);
        }
        return {found.begin(), found.end()};
    }

    const std::vector<QVec>& pts_;
    std::vector<std::vector<char>> tight_;
    int ncons_;
    std::map<std::vector<int>, std::vector<std::vector<int>>> memo_;
};

Rational volume_from_incidence(const std::vector<QVec>& pts, const std::vector<std::vector<int>>& tight, int ncons,
                               int D) {
    if (pts.empty()) return Rational(0);
    std::vector<int> all(pts.size());
    std::iota(all.begin(), all.end(), 0);
    if (affine_rank(pts, all) < D) return Rational(0);
    Triangulator tri(pts, tight, ncons);
    Rational vol(0);
    for (const auto& s : tri.simplices(all, D)) {
        QMat M(D, D);
        for (int i = 0; i < D; ++i) M.col(i) = pts[s[i]] - pts[s[D]];
        vol += abs(det_exact(M));
    }
    return vol / factorial(D);
}

// ---------------------------------------------------------------------------
// Unimodular column reduction: A U is in column echelon form, with U and
// U^{-1} integral. Columns rank..n-1 of U span ker A over Z.

struct ColumnReduction {
    IntMat U, Uinv;
    int rank = 0;
};

ColumnReduction column_reduce(IntMat A) {
    const int n = static_cast<int>(A.cols());
    ColumnReduction cr{IntMat::Identity(n, n), IntMat::Identity(n, n), 0};
    int r = 0;
    for (int i = 0; i < A.rows() && r < n; ++i) {
        while (true) {
            int best = -1;
            for (int c = r; c < n; ++c) {
                if (A(i, c) != 0 && (best < 0 || std::llabs(A(i, c)) < std::llabs(A(i, best)))) best = c;
            }
            if (best < 0) break;
            if (best != r) {
                A.col(best).swap(A.col(r));
                cr.U.col(best).swap(cr.U.col(r));
                cr.Uinv.row(best).swap(cr.Uinv.row(r));
            }
            bool clean = true;
            for (int c = r + 1; c < n; ++c) {
                if (A(i, c) == 0) continue;
                int64_t q = A(i, c) / A(i, r);
                A.col(c) -= q * A.col(r);
                cr.U.col(c) -= q * cr.U.col(r);
                cr.Uinv.row(r) += q * cr.Uinv.row(c);
                if (A(i, c) != 0) clean = false;
            }
            if (clean) {
                ++r;
                break;
            }
        }
    }
    cr.rank = r;
    return cr;
}

struct Invariant {
    IntMat basis;   // n x d
    IntMat coords;  // d x n, coords * v for invariant v
};

Invariant invariant_data(const GroupAction& action) {
    PicLattice L = pic_lattice(action.degree);
    const int n = L.rank;
    IntMat stack(n * std::max<size_t>(1, action.generators.size()), n);
    stack.setZero();
    for (size_t g = 0; g < action.generators.size(); ++g) {
        stack.block(static_cast<int>(g) * n, 0, n, n) =
            lattice_matrix(action.degree, action.generators[g]) - IntMat::Identity(n, n);
    }
    ColumnReduction cr = column_reduce(stack);
    int d = n - cr.rank;
    return {cr.U.rightCols(d), cr.Uinv.bottomRows(d)};
}

}  // namespace

// ---------------------------------------------------------------------------

PicLattice pic_lattice(int degree) {
    int r = r_of(degree);
    PicLattice L;
    L.degree = degree;
    L.rank = r + 1;
    L.pairing = IntMat::Identity(r + 1, r + 1) * -1;
    L.pairing(0, 0) = 1;
    L.minus_K = IntVec::Constant(r + 1, -1);
    L.minus_K(0) = 3;
    return L;
}

std::vector<IntVec> line_classes(int degree) {
    int r = r_of(degree);
    std::vector<IntVec> out;
    for (int i = 1; i <= r; ++i) {
        IntVec v = zero_vec(r + 1);
        v(i) = 1;
        out.push_back(v);
    }
    for (int i = 1; i <= r; ++i) {
        for (int j = i + 1; j <= r; ++j) {
            IntVec v = zero_vec(r + 1);
            v(0) = 1;
            v(i) = -1;
            v(j) = -1;
            out.push_back(v);
        }
    }
    if (degree == 4) {
        IntVec v = IntVec::Constant(r + 1, -1);
        v(0) = 2;
        out.push_back(v);
    } else {
        for (int i = 1; i <= r; ++i) {
            IntVec v = IntVec::Constant(r + 1, -1);
            v(0) = 2;
            v(i) = 0;
            out.push_back(v);
        }
    }
    return out;
}

std::vector<IntVec> roots(int degree) {
    int r = r_of(degree);
    PicLattice L = pic_lattice(degree);
    std::vector<IntVec> out;
    // (E, E) = -2 and (E, -K) = 0 force small coefficients; search a box.
    IntVec v = zero_vec(r + 1);
    std::function<void(int)> rec = [&](int i) {
        if (i == r + 1) {
            if (L.dot(v, v) == -2 && L.dot(v, L.minus_K) == 0) out.push_back(v);
            return;
        }
        int lo = (i == 0) ? -3 : -2, hi = (i == 0) ? 3 : 2;
        for (int x = lo; x <= hi; ++x) {
            v(i) = x;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

std::vector<IntVec> simple_roots(int degree) {
    int r = r_of(degree);
    std::vector<IntVec> out;
    for (int i = 1; i < r; ++i) {
        IntVec v = zero_vec(r + 1);
        v(i) = 1;
        v(i + 1) = -1;
        out.push_back(v);
    }
    IntVec v = zero_vec(r + 1);
    v(0) = 1;
    v(1) = v(2) = v(3) = -1;
    out.push_back(v);
    return out;
}

Permutation reflection_permutation(int degree, const IntVec& root) {
    PicLattice L = pic_lattice(degree);
    if (L.dot(root, root) != -2 || L.dot(root, L.minus_K) != 0) throw std::domain_error("not a root");
    auto lines = line_classes(degree);
    std::map<std::vector<int64_t>, int> index;
    for (size_t i = 0; i < lines.size(); ++i) index[key_of(lines[i])] = static_cast<int>(i);
    Permutation perm(lines.size());
    for (size_t i = 0; i < lines.size(); ++i) {
        IntVec img = lines[i] + L.dot(lines[i], root) * root;
        perm[i] = index.at(key_of(img));
    }
    return perm;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    Permutation c(b.size());
    for (size_t i = 0; i < b.size(); ++i) c[i] = a[b[i]];
    return c;
}

Permutation inverse(const Permutation& a) {
    Permutation c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<int>(i);
    return c;
}

GroupAction trivial_action(int degree) {
    r_of(degree);
    return {degree, {}};
}

GroupAction full_weyl_action(int degree) {
    GroupAction g{degree, {}};
    for (const auto& r : simple_roots(degree)) g.generators.push_back(reflection_permutation(degree, r));
    return g;
}

GroupAction conj_qi_action() {
    IntVec r = zero_vec(6);
    r(4) = 1;
    r(5) = -1;
    return {4, {reflection_permutation(4, r)}};
}

GroupAction parse_cycles(int degree, const std::string& text) {
    const int n = degree == 4 ? 16 : 27;
    r_of(degree);
    GroupAction g{degree, {}};
    std::string norm = text;
    for (char& ch : norm) {
        if (ch == ';') ch = '\n';
    }
    std::istringstream lines(norm);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Permutation p(n);
        std::iota(p.begin(), p.end(), 0);
        std::vector<char> seen(n, 0);
        size_t pos = 0;
        while ((pos = line.find('(', pos)) != std::string::npos) {
            size_t end = line.find(')', pos);
            if (end == std::string::npos) throw std::domain_error("unbalanced cycle in: " + line);
            std::istringstream cyc(line.substr(pos + 1, end - pos - 1));
            std::vector<int> c;
            std::string tok;
            while (cyc >> tok) {
                size_t used = 0;
                int v = std::stoi(tok, &used);
                if (used != tok.size() || v < 0 || v >= n) throw std::domain_error("bad line index: " + tok);
                if (seen[v]) throw std::domain_error("repeated line index " + tok);
                seen[v] = 1;
                c.push_back(v);
            }
            for (size_t i = 0; i < c.size(); ++i) p[c[i]] = c[(i + 1) % c.size()];
            pos = end + 1;
        }
        g.generators.push_back(p);
    }
    return g;
}

Permutation random_weyl_element(int degree, std::mt19937_64& rng, int length) {
    auto gens = full_weyl_action(degree).generators;
    Permutation p(gens[0].size());
    std::iota(p.begin(), p.end(), 0);
    std::uniform_int_distribution<size_t> pick(0, gens.size() - 1);
    for (int i = 0; i < length; ++i) p = compose(gens[pick(rng)], p);
    return p;
}

IntMat lattice_matrix(int degree, const Permutation& perm) {
    int r = r_of(degree);
    auto lines = line_classes(degree);
    if (perm.size() != lines.size()) throw std::domain_error("permutation has the wrong size");
    IntMat M(r + 1, r + 1);
    // l = (l - e1 - e2) + e1 + e2; index of l - e1 - e2 is r.
    M.col(0) = lines[perm[r]] + lines[perm[0]] + lines[perm[1]];
    for (int i = 1; i <= r; ++i) M.col(i) = lines[perm[i - 1]];
    return M;
}

void validate_action(const GroupAction& action) {
    auto lines = line_classes(action.degree);
    PicLattice L = pic_lattice(action.degree);
    const size_t n = lines.size();
    for (const auto& p : action.generators) {
        if (p.size() != n) throw std::domain_error("generator has the wrong size");
        std::vector<char> hit(n, 0);
        for (int v : p) {
            if (v < 0 || static_cast<size_t>(v) >= n || hit[v]) throw std::domain_error("generator is not a bijection");
            hit[v] = 1;
        }
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i; j < n; ++j) {
                if (L.dot(lines[i], lines[j]) != L.dot(lines[p[i]], lines[p[j]]))
                    throw std::domain_error("generator does not preserve the pairing");
            }
        }
        IntMat M = lattice_matrix(action.degree, p);
        for (size_t i = 0; i < n; ++i) {
            if (M * lines[i] != lines[p[i]]) throw std::domain_error("generator is not induced by the lattice");
        }
        if (M * L.minus_K != L.minus_K) throw std::domain_error("generator moves -K");
    }
}

std::vector<std::vector<int>> orbit_decompose(const GroupAction& action) {
    validate_action(action);
    const int n = action.degree == 4 ? 16 : 27;
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> orbits;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> orb{s};
        comp[s] = static_cast<int>(orbits.size());
        for (size_t k = 0; k < orb.size(); ++k) {
            for (const auto& g : action.generators) {
                int t = g[orb[k]];
                if (comp[t] < 0) {
                    comp[t] = comp[s];
                    orb.push_back(t);
                }
            }
        }
        std::sort(orb.begin(), orb.end());
        orbits.push_back(orb);
    }
    return orbits;
}

std::string orbit_signature(const std::vector<std::vector<int>>& orbits) {
    std::map<size_t, int> mult;
    for (const auto& o : orbits) ++mult[o.size()];
    std::string s = "(";
    bool first = true;
    for (auto [size, m] : mult) {
        if (!first) s += ", ";
        first = false;
        s += std::to_string(size) + "^" + std::to_string(m);
    }
    return s + ")";
}

IntMat invariant_lattice(const GroupAction& action) {
    validate_action(action);
    return invariant_data(action).basis;
}

std::vector<IntVec> effective_generators(const GroupAction& action, const std::vector<std::vector<int>>& orbits) {
    auto lines = line_classes(action.degree);
    std::vector<IntVec> out;
    for (const auto& o : orbits) {
        IntVec s = zero_vec(static_cast<int>(lines[0].size()));
        for (int i : o) s += lines[i];
        out.push_back(s);
    }
    return out;
}

AlphaReport alpha(const GroupAction& action, int degree) {
    if (action.degree != degree) throw std::domain_error("action degree mismatch");
    auto orbits = orbit_decompose(action);
    PicLattice L = pic_lattice(degree);
    Invariant inv = invariant_data(action);
    const int d = static_cast<int>(inv.basis.cols());

    AlphaReport rep;
    rep.rank = d;
    rep.orbit_signature = orbit_signature(orbits);
    for (const auto& o : orbits) rep.n_rational_lines += (o.size() == 1);

    // The nef cone lives in the dual of Pic(X): y with y(D) >= 0 for every
    // orbit sum D, sliced at y(-K) = 1 and measured against the dual lattice.
    // In coordinates dual to the invariant basis both are plain dot products.
    IntVec kappa = inv.coords * L.minus_K;
    if (inv.basis * kappa != L.minus_K) throw std::logic_error("-K is not in the invariant lattice");

    std::vector<IntVec> cons;  // a . y >= 0
    for (const auto& D : effective_generators(action, orbits)) {
        IntVec c = inv.coords * D;
        if (inv.basis * c != D) throw std::logic_error("orbit sum outside the invariant lattice");
        cons.push_back(c);
    }

    // Unimodular V with kappa^T V = (m, 0, ..., 0).
    IntMat row = kappa.transpose();
    ColumnReduction cr = column_reduce(row);
    IntMat V = cr.U;
    int64_t m = (row * V)(0, 0);
    if (m < 0) {
        V.col(0) = -V.col(0);
        m = -m;
    }
    rep.m = m;
    if (m == 0) throw std::domain_error("degenerate cone: -K pairs trivially");

    if (d == 1) {
        for (const auto& a : cons) {
            if ((a.transpose() * V)(0, 0) < 0) throw std::domain_error("degenerate cone: empty slice");
        }
        rep.alpha = Rational(1);
        rep.alpha_ii = Rational(1, m);
        rep.n_vertices = 1;
        return rep;
    }

    const int D = d - 1;
    HPolytope H{QMat(static_cast<int>(cons.size()), D), QVec(static_cast<int>(cons.size()))};
    for (size_t j = 0; j < cons.size(); ++j) {
        IntVec w = (cons[j].transpose() * V).transpose();
        for (int i = 0; i < D; ++i) H.A(static_cast<int>(j), i) = Rational(-w(i + 1));
        H.b(static_cast<int>(j)) = Rational(static_cast<i128>(w(0)), static_cast<i128>(m));
    }
    VPolytope P = enumerate_vertices(H);
    rep.n_vertices = P.vertices.size();
    Rational vol = volume_from_incidence(P.vertices, P.tight, static_cast<int>(H.A.rows()), D);
    if (vol == Rational(0)) throw std::domain_error("degenerate cone: slice has empty interior");
    rep.alpha = vol;
    rep.alpha_ii = vol / Rational(m);
    return rep;
}

// ---------------------------------------------------------------------------

VPolytope enumerate_vertices(const HPolytope& H) {
    const int n = static_cast<int>(H.A.rows());
    const int D = static_cast<int>(H.A.cols());
    Eigen::MatrixXd Ad(n, D);
    Eigen::VectorXd bd(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < D; ++j) Ad(i, j) = H.A(i, j).to_double();
        bd(i) = H.b(i).to_double();
    }
    std::set<std::vector<Rational>> found;
    VPolytope out;
    if (n < D) return out;
    std::vector<int> c(D);
    std::iota(c.begin(), c.end(), 0);
    do {
        Eigen::MatrixXd S(D, D);
        Eigen::VectorXd r(D);
        for (int i = 0; i < D; ++i) {
            S.row(i) = Ad.row(c[i]);
            r(i) = bd(c[i]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
        if (lu.rank() < D) continue;
        Eigen::VectorXd x = lu.solve(r);
        if (((Ad * x - bd).array() > 1e-7 * (1 + bd.cwiseAbs().array())).any()) continue;
        QMat Sq(D, D);
        QVec rq(D);
        for (int i = 0; i < D; ++i) {
            Sq.row(i) = H.A.row(c[i]);
            rq(i) = H.b(c[i]);
        }
        QVec xq;
        if (!solve_exact(Sq, rq, xq)) continue;
        std::vector<Rational> key(xq.data(), xq.data() + D);
        if (found.count(key)) continue;
        QVec lhs = H.A * xq;
        bool ok = true;
        std::vector<int> tight;
        for (int i = 0; i < n && ok; ++i) {
            if (lhs(i) > H.b(i)) ok = false;
            if (lhs(i) == H.b(i)) tight.push_back(i);
        }
        if (!ok) continue;
        found.insert(key);
        out.vertices.push_back(xq);
        out.tight.push_back(tight);
    } while (next_combination(c, n));
    return out;
}

Rational volume_h(const HPolytope& H) {
    VPolytope P = enumerate_vertices(H);
    return volume_from_incidence(P.vertices, P.tight, static_cast<int>(H.A.rows()), static_cast<int>(H.A.cols()));
}

VolumeResult polytope_volume(const RationalPolytope& P) {
    const int D = P.ambient_dim;
    VolumeResult res;
    for (const auto& v : P.vertices) {
        if (v.size() != D) throw std::domain_error("vertex dimension mismatch");
    }
    std::vector<int> all(P.vertices.size());
    std::iota(all.begin(), all.end(), 0);
    if (static_cast<int>(P.vertices.size()) < D + 1 || affine_rank(P.vertices, all) < D) {
        res.degenerate = true;
        res.volume = Rational(0);
        return res;
    }
    // Facets: hyperplanes through D vertices with every vertex on one side.
    std::vector<std::pair<QVec, Rational>> facets;
    std::set<std::vector<int>> seen;
    const int nv = static_cast<int>(P.vertices.size());
    std::vector<int> c(D);
    std::iota(c.begin(), c.end(), 0);
    do {
        QMat M(D - 1, D);
        for (int i = 1; i < D; ++i) M.row(i - 1) = (P.vertices[c[i]] - P.vertices[c[0]]).transpose();
        auto piv = rref(M);
        if (static_cast<int>(piv.size()) != D - 1) continue;
        // Normal vector from the single free column of the RREF.
        int free = 0;
        while (std::find(piv.begin(), piv.end(), free) != piv.end()) ++free;
        QVec a = QVec::Zero(D);
        a(free) = Rational(1);
        for (size_t i = 0; i < piv.size(); ++i) a(piv[i]) = -M(static_cast<int>(i), free);
        Rational b = a.dot(P.vertices[c[0]]);
        bool le = true, ge = true;
        std::vector<int> on;
        for (int v = 0; v < nv; ++v) {
            Rational s = a.dot(P.vertices[v]);
            if (s > b) le = false;
            if (s < b) ge = false;
            if (s == b) on.push_back(v);
        }
        if (!le && !ge) continue;
        if (!seen.insert(on).second) continue;
        if (!le) {
            a = -a;
            b = -b;
        }
        facets.emplace_back(a, b);
    } while (next_combination(c, nv));
    std::vector<std::vector<int>> tight(nv);
    for (size_t j = 0; j < facets.size(); ++j) {
        for (int v = 0; v < nv; ++v) {
            if (facets[j].first.dot(P.vertices[v]) == facets[j].second) tight[v].push_back(static_cast<int>(j));
        }
    }
    res.volume = volume_from_incidence(P.vertices, tight, static_cast<int>(facets.size()), D);
    return res;
}

HPolytope region_W0(bool cap_half) {
    // Rows of A w <= b.
    std::vector<std::pair<std::array<int, 4>, Rational>> rows = {
        {{1, 1, -2, 1}, Rational(1)},    // w1 + w2 + w4 <= 1 + 2 w3
        {{-1, -1, 2, 1}, Rational(1)},   // 2 w3 + w4 <= 1 + w1 + w2
        {{-1, -1, -2, 3}, Rational(1)},  // 3 w4 <= 1 + w1 + w2 + 2 w3
        {{1, 1, 2, -1}, Rational(1)},    // w1 + w2 + 2 w3 <= 1 + w4
        {{-1, 0, 0, 0}, Rational(0)},  {{0, -1, 0, 0}, Rational(0)}, {{0, 0, -1, 0}, Rational(0)},
        {{0, 0, 0, -1}, Rational(0)},  {{1, 0, 0, -1}, Rational(0)}, {{0, 1, 0, -1}, Rational(0)},
        {{0, 0, 1, -1}, Rational(0)},  {{1, 0, 0, 0}, Rational(1)},  {{0, 1, 0, 0}, Rational(1)},
        {{0, 0, 1, 0}, Rational(1)},   {{0, 0, 0, 1}, Rational(1)},
    };
    if (cap_half) rows.push_back({{0, 0, 0, 1}, Rational(1, 2)});
    HPolytope H{QMat(static_cast<int>(rows.size()), 4), QVec(static_cast<int>(rows.size()))};
    for (size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < 4; ++j) H.A(static_cast<int>(i), j) = Rational(rows[i].first[j]);
        H.b(static_cast<int>(i)) = rows[i].second;
    }
    return H;
}

Rational vol_W0() { return volume_h(region_W0(true)); }

}  // namespace conicbundle::nefcone
