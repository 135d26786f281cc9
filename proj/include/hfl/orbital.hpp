#pragma once

#include "hfl/orbits.hpp"
#include "hfl/symmetric.hpp"

#include <map>
#include <string>

namespace hfl {

// A test function on one orbit space, as a finite combination of basis indicators.
//   MirabolicGL     gl ⊗ RowLattice(row_k)
//   HermPoint       herm + Σ balls[k]·UnitBall(k)
//   HermPair        herm ⊗ herm2 + Σ balls[k]·UnitBall(k)⊗UnitBall(k)
//   LinearLie       Σ balls[k]·UnitBall(k)⊗UnitBall(k) ⊗ RowLattice(0)
//   SplitInertLie   Σ balls[k]·UnitBall(k)
// UnitBall(k) is the indicator of ϖ^k times the integral points.
struct TestFunction {
    Space space = Space::MirabolicGL;
    int n = 1;
    long long q = 3;
    HeckeElement gl;
    int row_k = 0;
    HermModuleElement herm, herm2;
    std::map<int, Rat> balls;

    static TestFunction hecke(const HeckeElement& f, int row_k = 0);
    static TestFunction herm_point(const HermModuleElement& f, long long q);
    static TestFunction herm_pair(const HermModuleElement& f1, const HermModuleElement& f2, long long q);
    static TestFunction unit_ball(Space s, int n, long long q, int k, const Rat& coef = 1);

    std::string str() const;
};

struct RegularizedValue {
    RationalInQs series; // Δ · (lattice sum) / L(s, T, η) as a function of T = q^{-s}
    Rat value = 0;       // at s = 0
    std::string provenance;
};

// Σ over K_E-orbits λ with λ_n >= k and |λ| = d
HermModuleElement unit_ball_slice(int n, int k, int d);

RegularizedValue mirabolic_orbital(const HeckeElement& f, int row_k, const MatF& z, const MatF& w, int v_max);
// φ = UnitBall(k)⊗UnitBall(k), Φ = RowLattice(0); s_1 = 0
RegularizedValue lie_linear_orbital(EtaPair e, int k, const MatF& X, const MatF& Y, const MatF& w, int v_max);

Rat unitary_stable(const HermModuleElement& f, const MatE& x, const FieldConfig& cfg);
Rat unitary_stable_ball(int k, const MatE& x, const FieldConfig& cfg);
Rat two_var_stable(const HermModuleElement& f1, const HermModuleElement& f2, const MatE& x1, const MatE& x2,
                   const FieldConfig& cfg);
Rat two_var_stable_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg);
// Δ_ε(x) · Σ_α ε(α) Orb(f, x_α)
Rat epsilon_orbital(const HermModuleElement& f1, const HermModuleElement& f2, const MatE& x1, const MatE& x2,
                    const FieldConfig& cfg);
Rat epsilon_orbital_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg);
Rat split_inert_stable(int k, const MatE& X, const FieldConfig& cfg);

// engine value of a test function at a point; LinearLie uses η̲ = e
Rat evaluate(const TestFunction& f, const OrbitPoint& pt, int v_max, EtaPair e = {});

// Independent evaluation by enumerating lattices in standard coordinates inside the box
// ϖ^R O^n ⊆ Λ ⊆ ϖ^{-R} O^n for R = m, m+1, ... until the value is stable.
// Throws CellBoundUncertified when the count has not settled by radius m + 6.
Rat brute_force_oracle(const TestFunction& f, const OrbitPoint& pt, int m, int v_max, EtaPair e = {});
RegularizedValue oracle_mirabolic(const HeckeElement& f, int row_k, const MatF& z, const MatF& w, int v_max, int m);
RegularizedValue oracle_lie_linear(EtaPair e, int k, const MatF& X, const MatF& Y, const MatF& w, int v_max, int m);
Rat oracle_epsilon_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg, int m);

} // namespace hfl
