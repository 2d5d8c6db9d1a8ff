// nefcone.hpp
//
// Picard lattice of a del Pezzo surface of degree 4 or 3 in the basis
// (l, e1, ..., er), its lines, Weyl group actions on them, and the volume
//   alpha(X) = vol{x in Nef(X) : (x, -K) = 1}
// of the nef cone slice for the invariant sublattice of an action. The nef
// cone sits in the dual of Pic(X) and is measured against the dual lattice;
// when Pic(X) is not unimodular this differs from the volume computed inside
// Pic(X) (x) R through the pairing by the discriminant.
#ifndef CONICBUNDLE_NEFCONE_HPP
#define CONICBUNDLE_NEFCONE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "conicbundle/rational.hpp"

namespace Eigen {

template <>
struct NumTraits<conicbundle::Rational> : GenericNumTraits<conicbundle::Rational> {
    using Real = conicbundle::Rational;
    using NonInteger = conicbundle::Rational;
    using Literal = conicbundle::Rational;
    using Nested = conicbundle::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 2,
        AddCost = 8,
        MulCost = 8
    };
    static Real epsilon() { return Real(0); }
    static Real dummy_precision() { return Real(0); }
    static int digits10() { return 0; }
};

}  // namespace Eigen

namespace conicbundle::nefcone {

using IntVec = Eigen::Matrix<int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using QVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using QMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

struct PicLattice {
    int degree = 4;
    int rank = 6;
    IntMat pairing;  // diag(1, -1, ..., -1)
    IntVec minus_K;  // (3, -1, ..., -1)
    int64_t dot(const IntVec& a, const IntVec& b) const { return a.dot(pairing * b); }
};

// Pre: degree 3 or 4.
PicLattice pic_lattice(int degree);

// Degree 4 (16): e_i, l - e_i - e_j (i < j, lex), 2l - sum e.
// Degree 3 (27): e_i, l - e_i - e_j, 2l - sum_{k != i} e_k.
std::vector<IntVec> line_classes(int degree);
// R = {E : (E, E) = -2, (E, -K) = 0}.
std::vector<IntVec> roots(int degree);
// D5: e_i - e_{i+1} (i < 5), l - e1 - e2 - e3. E6: e_i - e_{i+1} (i < 6), l - e1 - e2 - e3.
std::vector<IntVec> simple_roots(int degree);

// Permutation of line indices: perm[i] is the image of line i.
using Permutation = std::vector<int>;

struct GroupAction {
    int degree = 4;
    std::vector<Permutation> generators;
};

// s(x) = x + (x, r) r, the reflection in a root r, as a permutation of lines.
Permutation reflection_permutation(int degree, const IntVec& root);
Permutation compose(const Permutation& a, const Permutation& b);  // a after b
Permutation inverse(const Permutation& a);

GroupAction trivial_action(int degree);
GroupAction full_weyl_action(int degree);
// Complex conjugation on the lines of X: the reflection in e4 - e5, which
// fixes 8 lines and swaps 4 pairs.
GroupAction conj_qi_action();

// Generators separated by newlines or ';', each in cycle notation such as
// "(0 1)(4 5 6)". Indices run over 0..15 or 0..26.
GroupAction parse_cycles(int degree, const std::string& text);

// A random word of `length` simple reflections.
Permutation random_weyl_element(int degree, std::mt19937_64& rng, int length = 40);

// Throws std::domain_error unless each generator is a bijection preserving
// the intersection numbers of lines.
void validate_action(const GroupAction& action);

// Matrix of the induced lattice automorphism in the (l, e) basis.
IntMat lattice_matrix(int degree, const Permutation& perm);

std::vector<std::vector<int>> orbit_decompose(const GroupAction& action);
// "(1^8, 2^4)": orbit sizes ascending with multiplicities.
std::string orbit_signature(const std::vector<std::vector<int>>& orbits);

// Columns: a basis of the invariant sublattice Pic(X) = Pic(X_bar)^G.
IntMat invariant_lattice(const GroupAction& action);

// Orbit sums in (l, e) coordinates.
std::vector<IntVec> effective_generators(const GroupAction& action, const std::vector<std::vector<int>>& orbits);

struct AlphaReport {
    Rational alpha;     // slice measure from the lattice {y : y(-K) = 0}
    Rational alpha_ii;  // rank * vol(Nef and y(-K) <= 1) = alpha / m
    int64_t m = 1;      // gcd of the coordinates of -K in Pic(X)
    int rank = 0;
    int n_rational_lines = 0;
    std::string orbit_signature;
    std::string convention = "lattice-slice";
    size_t n_vertices = 0;
};

// Pre: valid action. Throws std::domain_error for a degenerate cone.
AlphaReport alpha(const GroupAction& action, int degree);

// ---------------------------------------------------------------------------
// Exact polytopes

struct RationalPolytope {
    std::vector<QVec> vertices;
    int ambient_dim = 0;
    int affine_dim = 0;
};

struct VolumeResult {
    Rational volume;
    bool degenerate = false;
};

// Lebesgue volume in the ambient coordinates. Vertices that do not span the
// ambient space give zero with the degeneracy flag set.
VolumeResult polytope_volume(const RationalPolytope& P);

// {x : A x <= b}, bounded. Vertices with their tight-constraint sets.
struct HPolytope {
    QMat A;
    QVec b;
};
struct VPolytope {
    std::vector<QVec> vertices;
    std::vector<std::vector<int>> tight;  // constraint indices tight at each vertex
};
VPolytope enumerate_vertices(const HPolytope& H);
Rational volume_h(const HPolytope& H);

// W0 = W and {max(w1, w2, w3) <= w4 <= 1/2} in [0, 1]^4. With cap_half false
// the w4 <= 1/2 constraint is dropped.
HPolytope region_W0(bool cap_half = true);
Rational vol_W0();

}  // namespace conicbundle::nefcone

#endif  // CONICBUNDLE_NEFCONE_HPP
