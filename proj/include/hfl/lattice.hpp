#pragma once

#include "hfl/matrix.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hfl {

// canonical representative of x modulo ϖ^a (finite ϖ-adic expansion below a)
Padic reduce_mod(const Padic& x, int a);
QuadExt reduce_mod(const QuadExt& x, int a);

// Column Hermite normal form over O_F or O_E: upper triangular, diagonal ϖ^{a_i},
// entries above the diagonal reduced modulo the diagonal entry of their row.
template <class S>
struct LatticeBasis {
    Mat<S> basis;
    std::vector<int> exps;

    int index_valuation() const
    {
        int t = 0;
        for (int a : exps) t += a;
        return t;
    }
    std::string key() const;
    friend bool operator==(const LatticeBasis& x, const LatticeBasis& y) { return x.key() == y.key(); }
};

// HNF of the lattice spanned by the columns of `gens` (n x m, rank n)
template <class S>
LatticeBasis<S> hnf(const Mat<S>& gens);

// Sublattice enumeration. `prune` is called on partial bases (off-diagonal entry known
// only to a prefix of its digits) and must return false only when no completion can
// qualify; `visit` receives complete bases.
template <class S>
using LatticePrune = std::function<bool(const Mat<S>&)>;
template <class S>
using LatticeVisit = std::function<void(const Mat<S>&)>;

// all L with ϖ^depth O^n ⊆ L ⊆ O^n and idx_min <= [O^n : L]_ϖ <= idx_max, n in {1,2}
template <class S>
void for_each_sublattice(const FieldConfig& cfg, int n, int depth, int idx_min, int idx_max,
                         const LatticePrune<S>& prune, const LatticeVisit<S>& visit);

// all L with lo ⊆ L ⊆ hi; bases are columns
template <class S>
void for_each_between(const FieldConfig& cfg, const Mat<S>& hi, const Mat<S>& lo,
                      const LatticePrune<S>& prune, const LatticeVisit<S>& visit);

// [Λ : Λ'] containment test: true iff span(b) ⊆ span(a); three valued during pruning
template <class S>
int contains_partial(const Mat<S>& a, const Mat<S>& b);
template <class S>
bool contains(const Mat<S>& a, const Mat<S>& b);

struct StableLattice {
    LatticeBasis<Padic> lattice; // standard coordinates
    int v = 0;                   // valuation of det of the basis
    int eta = 1;                 // (-1)^v
    Signature relpos;            // elementary divisors of A on L
};

struct StableLatticeList {
    int v_min = 0;
    std::vector<StableLattice> lattices;
};

// Lattices L in F^n with A L ⊆ L, w L ⊆ O_F and 0 <= v(L) - v_min <= v_max.
StableLatticeList enumerate_stable_lattices(const MatF& A, const MatF& w, int v_max, const FieldConfig& cfg);

} // namespace hfl
