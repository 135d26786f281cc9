#pragma once

#include "hfl/matrix.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hfl {

enum class Space { MirabolicGL, HermPoint, HermPair, SplitInertLie, LinearLie };

std::string space_name(Space s);
Space parse_space(const std::string& s);

// One point of one of the five orbit spaces. Unused slots stay 0x0.
//   MirabolicGL   z, w
//   LinearLie     X, Y, w
//   HermPoint     x1
//   HermPair      x1, x2
//   SplitInertLie x1 (the operator X; both forms are the identity)
struct OrbitPoint {
    Space space = Space::MirabolicGL;
    int n = 1;
    FieldConfig cfg;
    MatF z, X, Y, w;
    MatE x1, x2;

    static OrbitPoint mirabolic(const MatF& z, const MatF& w, const FieldConfig& cfg);
    static OrbitPoint linear_lie(const MatF& X, const MatF& Y, const MatF& w, const FieldConfig& cfg);
    static OrbitPoint herm_point(const MatE& x, const FieldConfig& cfg);
    static OrbitPoint herm_pair(const MatE& x1, const MatE& x2, const FieldConfig& cfg);
    static OrbitPoint split_inert(const MatE& X, const FieldConfig& cfg);
};

// monic polynomial over F, lowest degree first, leading 1 included
struct OrbitInvariant {
    std::vector<Padic> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }
    friend bool operator==(const OrbitInvariant& a, const OrbitInvariant& b) { return a.c == b.c; }
    std::string str() const;
};

OrbitInvariant invariant_poly(const OrbitPoint& pt);
bool is_regular_ss(const OrbitPoint& pt);
bool is_strongly_regular(const OrbitPoint& pt);
bool matches(const OrbitPoint& a, const OrbitPoint& b);

// η(det z)^n η(det[w; wz; ...])
int transfer_factor_mirabolic(const MatF& z, const MatF& w);

// (η_0, η_2) with η_0 = η; twisted2 selects η_2 = η, otherwise η_2 = 1
struct EtaPair {
    bool twisted2 = true;
};
// η_2(det YX)^n η_0(det[w; w YX; ...]) η_2(det Y)
int transfer_factor_lie_linear(EtaPair e, const MatF& X, const MatF& Y, const MatF& w);
// same shape on the group side, y = [[A, B], [C, D]] of size 2n:
// η_2(det BC)^n η_2(det C) η_0(det[w; wD; ...])
int transfer_factor_group(EtaPair e, const MatF& y, const MatF& w);
int delta_epsilon(const MatE& x1, const MatE& x2);

struct StableOrbitClass {
    std::vector<OrbitPoint> reps;
    std::vector<std::vector<int>> labels; // norm-class label per representative, one entry per factor
    std::vector<int> eps;                 // ε-sign per representative
};

StableOrbitClass stable_orbit_reps(const OrbitPoint& pt);

// X -> -ν (1 + X)(1 - X)^{-1}; throws OnSingularDivisor on det(1 - X) = 0
MatF cayley(int nu, const MatF& X);
// y -> (νy - 1)^{-1}(νy + 1); throws OnSingularDivisor on det(ν - y) = 0
MatF cayley_inv(int nu, const MatF& y);
// the block matrix [[0, X], [Y, 0]]
MatF lie_block(const MatF& X, const MatF& Y);
// reduction avoids D_1 (lie_chart) or D_ν (group chart); throws NotIntegral
bool in_heart_locus(const MatF& x, int nu, bool lie_chart);

// s with s* G s = I for a Hermitian G whose determinant has even valuation
MatE orthonormalize(const MatE& G, const FieldConfig& cfg);

struct Construction {
    std::optional<OrbitPoint> point;
    std::string no_match_proof; // set iff no point exists, with the reason
    bool matched() const { return point.has_value(); }
};

// throws RepresentativeSearchFailed when neither a point nor a proof is found
Construction construct_representative(Space space, const OrbitInvariant& target, const FieldConfig& cfg);

std::string serialize(const OrbitPoint& pt);
OrbitPoint deserialize(const std::string& s, const FieldConfig& cfg);

} // namespace hfl
