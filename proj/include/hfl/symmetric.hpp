#pragma once

#include "hfl/errors.hpp"
#include "hfl/matrix.hpp"
#include "hfl/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace hfl {

// a + b h with h^2 = q
struct Qh {
    Rat a = 0, b = 0;
    long long q = 0;

    Qh() = default;
    Qh(Rat a_, Rat b_, long long q_) : a(std::move(a_)), b(std::move(b_)), q(q_) {}
    static Qh rat(const Rat& r, long long q) { return {r, 0, q}; }
    static Qh h_pow(long long q, int k);

    bool is_zero() const { return a == 0 && b == 0; }
    Qh inv() const;
    friend Qh operator+(const Qh& x, const Qh& y) { return {x.a + y.a, x.b + y.b, x.q ? x.q : y.q}; }
    friend Qh operator-(const Qh& x, const Qh& y) { return {x.a - y.a, x.b - y.b, x.q ? x.q : y.q}; }
    Qh operator-() const { return {-a, -b, q}; }
    friend Qh operator*(const Qh& x, const Qh& y);
    friend Qh operator/(const Qh& x, const Qh& y) { return x * y.inv(); }
    friend bool operator==(const Qh& x, const Qh& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Qh& x, const Qh& y) { return !(x == y); }
    std::string str() const;
};

inline bool coef_zero(const Rat& r) { return r == 0; }
inline bool coef_zero(const QPoly& r) { return r.is_zero(); }
inline bool coef_zero(const Qh& r) { return r.is_zero(); }

// Laurent polynomial in n variables, exponent vector -> coefficient
template <class R>
using LPoly = std::map<std::vector<int>, R>;

template <class R>
void add_term(LPoly<R>& p, const std::vector<int>& e, const R& c)
{
    auto it = p.find(e);
    if (it == p.end()) {
        if (!coef_zero(c)) p.emplace(e, c);
        return;
    }
    it->second = it->second + c;
    if (coef_zero(it->second)) p.erase(it);
}

template <class R>
LPoly<R> poly_mul(const LPoly<R>& x, const LPoly<R>& y)
{
    LPoly<R> r;
    for (const auto& [ex, cx] : x)
        for (const auto& [ey, cy] : y) {
            std::vector<int> e = ex;
            for (size_t i = 0; i < e.size(); ++i) e[i] += ey[i];
            add_term(r, e, R(cx * cy));
        }
    return r;
}

template <class R>
LPoly<R> poly_add(LPoly<R> x, const LPoly<R>& y, bool subtract = false)
{
    for (const auto& [e, c] : y) add_term(x, e, subtract ? R(-c) : c);
    return x;
}

// drop monomials of total degree above cut
template <class R>
LPoly<R> truncate_degree(const LPoly<R>& x, int cut)
{
    LPoly<R> r;
    for (const auto& [e, c] : x) {
        int d = 0;
        for (int v : e) d += v;
        if (d <= cut) r.emplace(e, c);
    }
    return r;
}

// Symmetric Laurent polynomial in Z_1..Z_n over Q(h), h^2 = q
struct SymLaurent {
    int n = 1;
    long long q = 0;
    LPoly<Qh> c;

    static SymLaurent one(int n, long long q);
    static SymLaurent monomial(int n, long long q, const std::vector<int>& e, const Qh& coef);
    bool is_symmetric() const;
    // S_n-orbit representatives (weakly decreasing exponents) with their coefficients
    LPoly<Qh> orbit_reps() const;
    SymLaurent truncated(int cut) const { return {n, q, truncate_degree(c, cut)}; }
    SymLaurent squared_variables() const; // Z_i -> Z_i^2

    friend SymLaurent operator+(const SymLaurent& x, const SymLaurent& y) { return {x.n, x.q, poly_add(x.c, y.c)}; }
    friend SymLaurent operator-(const SymLaurent& x, const SymLaurent& y)
    {
        return {x.n, x.q, poly_add(x.c, y.c, true)};
    }
    friend SymLaurent operator*(const SymLaurent& x, const SymLaurent& y) { return {x.n, x.q, poly_mul(x.c, y.c)}; }
    friend SymLaurent operator*(const Qh& s, const SymLaurent& y);
    friend bool operator==(const SymLaurent& x, const SymLaurent& y) { return x.c == y.c; }
    std::string str() const;
};

// Hall–Littlewood polynomial with coefficients in Q[t]
struct HLPoly {
    int n = 1;
    LPoly<QPoly> c;
    LPoly<Rat> at(const Rat& t) const;
};

// all weakly decreasing λ of length n with λ_n >= 0 and |λ| = d
std::vector<Signature> partitions(int n, int d);
// n(λ) = Σ (i-1) λ_i
int n_of(const Signature& lam);

// normalizer w_λ^{(n)}(t) = Π over distinct parts Π_{k=1}^{m_i} (1 - t^k)
QPoly hl_normalizer(const Signature& lam);
HLPoly hall_littlewood(const Signature& lam);

enum class Group { GL_F, GL_E };

struct HeckeElement {
    Group group = Group::GL_F;
    int n = 1;
    long long q = 0; // residue cardinality of F
    std::map<Signature, Qh> c;

    static HeckeElement basis(Group g, long long q, const Signature& lam);
    static HeckeElement unit(Group g, int n, long long q) { return basis(g, q, Signature(size_t(n), 0)); }
    // 1_d: indicator of integral matrices with determinant valuation d
    static HeckeElement det_slice(int n, long long q, int d);
    void add(const Signature& lam, const Qh& coef);
    friend HeckeElement operator+(HeckeElement x, const HeckeElement& y);
    friend HeckeElement operator*(const Qh& s, HeckeElement y);
    friend bool operator==(const HeckeElement& x, const HeckeElement& y) { return x.c == y.c; }
    std::string str() const;
};

SymLaurent satake(const HeckeElement& f);
HeckeElement inverse_satake(const SymLaurent& P, Group g = Group::GL_F);
HeckeElement hecke_convolve(const HeckeElement& f, const HeckeElement& g);
HeckeElement base_change(const HeckeElement& f);

// K_E-invariant functions on Herm°_n(F), stored in the orbit basis 1_λ
struct HermModuleElement {
    int n = 1;
    std::map<Signature, Rat> c;

    static HermModuleElement orbit(const Signature& lam, const Rat& coef = 1);
    static HermModuleElement det_slice(int n, int d, const Rat& coef = 1);
    // 1_{Herm°(O_F)}, the orbit of λ = 0
    static HermModuleElement unit_ball(int n) { return orbit(Signature(size_t(n), 0)); }

    void add(const Signature& lam, const Rat& coef);
    // true iff the element is a finite combination of the Φ_d
    bool filtration_span() const;
    // d -> coefficient of Φ_d; throws OutsideFiltrationSpan
    std::map<int, Rat> filtration_coeffs() const;
    Rat value(const Signature& lam) const;

    friend HermModuleElement operator+(HermModuleElement x, const HermModuleElement& y);
    friend HermModuleElement operator*(const Rat& s, HermModuleElement y);
    friend bool operator==(const HermModuleElement& x, const HermModuleElement& y) { return x.c == y.c; }
    std::string str() const;
};

HeckeElement hironaka_filtration(const HermModuleElement& phi, long long q);
HermModuleElement hironaka_product(const HermModuleElement& phi, const HermModuleElement& psi, long long q);

bool check_hl_generating_series(int n, int degree_cut);
// alternating = false drops the (-1)^i sign (negative control)
bool check_eps_generating_identity(int n, int degree_cut, bool alternating = true);

struct UnitImage {
    SymLaurent series;      // Π (1 - q^{n-1} Z_i^2)^{-1} through degree cut
    bool matches = false;   // equals Sat(1_gl) * Sat(η 1_gl) through degree cut
};
// twisted = false replaces η 1_gl by 1_gl (negative control)
UnitImage sf_unit_image(int n, long long q, int degree_cut, bool twisted = true);

} // namespace hfl
