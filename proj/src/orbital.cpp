#include "hfl/orbital.hpp"

#include "hfl/lattice.hpp"

#include <climits>
#include <functional>
#include <sstream>

namespace hfl {

namespace {

int cap(const FieldConfig& c) { return precision_cap(c.p); }
Padic fint(const FieldConfig& c, long long x) { return Padic::from_int(c.p, x, cap(c)); }
Padic unif(const FieldConfig& c, int e) { return Padic::from_parts(c.p, e, 1, cap(c)); }
QuadExt eF(const FieldConfig& c, const Padic& x) { return QuadExt::from_F(x, c.u); }
QuadExt eunif(const FieldConfig& c, int e) { return eF(c, unif(c, e)); }
// enumerated bases have exact entries; generate them at full word precision
FieldConfig exact(const FieldConfig& c) { return FieldConfig::make(c.p, cap(c)); }

FieldConfig cfg_from(const MatF& m, const FieldConfig* hint = nullptr)
{
    if (hint) return *hint;
    int p = 0;
    for (const auto& e : m.data())
        if (e.p()) p = e.p();
    return FieldConfig::make(p, precision_cap(p));
}

bool nonneg(const Signature& s)
{
    for (int x : s)
        if (x < 0) return false;
    return true;
}

Signature neg_reverse(Signature s)
{
    std::reverse(s.begin(), s.end());
    for (auto& x : s) x = -x;
    return s;
}

Rat hecke_value(const HeckeElement& f, const Signature& lam)
{
    auto it = f.c.find(lam);
    if (it == f.c.end()) return 0;
    if (it->second.b != 0) throw InvalidConfig("test function value outside Q");
    return it->second.a;
}

void require_nonneg(const HermModuleElement& f)
{
    for (const auto& [lam, c] : f.c)
        if (!nonneg(lam)) throw InvalidConfig("Hermitian test function with non-integral orbit " + f.str());
}

std::vector<Padic> char_over_F(const MatE& r) { return descend(r.char_poly()); }

bool integral_poly(const std::vector<Padic>& f)
{
    for (const auto& c : f)
        if (!c.is_exact_zero() && c.val_lower() < 0) {
            if (c.certified_nonzero()) return false;
            throw PrecisionExhausted("coefficient valuation undetermined");
        }
    return true;
}

bool unimodular(const MatE& g)
{
    if (!g.is_integral()) return false;
    QuadExt d = g.det();
    return d.certified_nonzero() && d.val() == 0;
}

bool inverse_integral(const MatE& g)
{
    QuadExt d = g.det();
    if (!d.certified_nonzero()) throw PrecisionExhausted("Gram determinant not certified nonzero");
    return MatE(g.inverse()).is_integral();
}

// -------------------------------------------------------------------------------------------
// regularization

// a_v = coefficient of T^v for v in [v_lo, v_hi]; returns Δ · S(T) / L(s, T, η)
RegularizedValue regularize(const std::map<int, Rat>& a, int v_lo, int v_hi, const RationalInQs& L, int delta,
                            const std::string& what)
{
    int len = v_hi - v_lo + 1;
    std::vector<Rat> s(static_cast<size_t>(len));
    for (const auto& [v, c] : a)
        if (v >= v_lo && v <= v_hi) s[static_cast<size_t>(v - v_lo)] += c;
    if (L.num.deg() != 0) throw InvalidConfig("L-factor with nontrivial numerator");
    QPoly prod = QPoly(s) * L.den;
    std::vector<Rat> P(static_cast<size_t>(len));
    for (int i = 0; i < len; ++i) P[static_cast<size_t>(i)] = prod.at(i) / L.num.at(0);
    for (int i = std::max(0, len - 3); i < len; ++i)
        if (P[static_cast<size_t>(i)] != 0)
            throw WindowInsufficient("regularized lattice sum not yet a polynomial; enlarge v_max");
    QPoly poly(P);
    RegularizedValue out;
    QPoly shift;
    shift.c.assign(static_cast<size_t>(std::abs(v_lo)) + 1, Rat(0));
    shift.c.back() = 1;
    QPoly sd = QPoly{Rat(delta)} * poly;
    if (v_lo >= 0)
        out.series = {sd * shift, QPoly{Rat(1)}};
    else
        out.series = {sd, shift};
    out.value = Rat(delta) * poly.eval(Rat(1));
    std::ostringstream os;
    os << what << "; transfer factor " << delta << "; divided by L(s,T,eta) = 1/(" << L.den.str() << ")";
    out.provenance = os.str();
    return out;
}

RationalInQs l_factor_of(const MatF& z)
{
    return tate_l_factor(etale_algebra(z.char_poly()));
}

// -------------------------------------------------------------------------------------------
// lattice model for a Hermitian form G on E^n and a G-self-adjoint operator r (n <= 2)
//
// Coordinates are taken in L = E[r] with its maximal order O_L = O_E^n:
//   Line   n = 1
//   Split  F[r] = F x F, L = E x E through the eigen-idempotents
//   Unram  F[r] unramified over F, L = E x E with conjugation swapping the factors
//   Ram    F[r] ramified, L = E[Π], Π^2 of valuation 1

enum class ModelKind { Line, Split, Unram, Ram };

struct HermModel {
    ModelKind kind = ModelKind::Line;
    int n = 1;
    FieldConfig cfg;
    MatE P;     // columns: standard coordinates of the O_E-basis of O_L
    MatE GL;    // Gram of that basis
    MatE theta; // r in L-coordinates
    MatE omega; // O_L = O_E[omega]
    int kappa = 0;
    bool integral = true;
};

MatE ideal_basis(const HermModel& M, const std::vector<int>& a)
{
    const FieldConfig& c = M.cfg;
    switch (M.kind) {
    case ModelKind::Line:
        return MatE::diag({eunif(c, a[0])});
    case ModelKind::Split:
    case ModelKind::Unram:
        return MatE::diag({eunif(c, a[0]), eunif(c, a[1])});
    case ModelKind::Ram: {
        MatE b = MatE::identity(2, c);
        MatE step = a[0] >= 0 ? M.omega : MatE(M.omega.inverse());
        for (int i = 0; i < std::abs(a[0]); ++i) b = step * b;
        return b;
    }
    }
    return {};
}

HermModel build_model(const MatE& G, const MatE& r, const FieldConfig& cfg)
{
    HermModel M;
    M.n = r.rows();
    M.cfg = exact(cfg);
    std::vector<Padic> f = char_over_F(r);
    M.integral = integral_poly(f);
    if (M.n == 1) {
        M.kind = ModelKind::Line;
        M.P = MatE::identity(1, cfg);
        M.GL = G;
        M.theta = r;
        M.omega = MatE::identity(1, cfg);
        return M;
    }
    if (M.n != 2) throw InvalidConfig("Hermitian lattice model supports n <= 2");
    MatE I = MatE::identity(2, cfg);
    // cyclic vector
    MatE e;
    for (int t = 0; t < 3; ++t) {
        MatE v = MatE::zero(2, 1, cfg);
        if (t != 1) v(0, 0) = eF(cfg, fint(cfg, 1));
        if (t != 0) v(1, 0) = eF(cfg, fint(cfg, 1));
        MatE K = MatE::zero(2, 2, cfg);
        MatE rv = r * v;
        K.set_block(0, 0, v);
        K.set_block(0, 1, rv);
        if (K.det().certified_nonzero()) {
            e = v;
            break;
        }
    }
    if (e.rows() == 0) throw NotRegularSS("operator has no cyclic vector");
    auto desc = etale_algebra(f);
    Padic half = fint(cfg, 2).inv();
    Padic a = -(f[1] * half);
    Padic D = a * a - f[0];
    auto column_pair = [&](const MatE& u1, const MatE& u2) {
        MatE P = MatE::zero(2, 2, cfg);
        P.set_block(0, 0, u1);
        P.set_block(0, 1, u2);
        return P;
    };
    if (desc.factors.size() == 2 || !desc.factors[0].ramified) {
        M.kind = desc.factors.size() == 2 ? ModelKind::Split : ModelKind::Unram;
        QuadExt s = M.kind == ModelKind::Split ? eF(cfg, sqrt(D)) : sqrt_in_E(D, cfg);
        QuadExt r1 = eF(cfg, a) + s, r2 = eF(cfg, a) - s;
        QuadExt dr = r1 - r2;
        MatE e1 = dr.inv() * MatE(r - r2 * I);
        MatE e2 = (-dr).inv() * MatE(r - r1 * I);
        M.P = column_pair(MatE(e1 * e), MatE(e2 * e));
        M.theta = MatE::diag({r1, r2});
        M.omega = MatE::diag({eF(cfg, fint(cfg, 1)), eF(cfg, Padic::zero(cfg.p))});
        M.kappa = M.integral ? dr.val() : 0;
    } else {
        M.kind = ModelKind::Ram;
        int m = (D.val() - 1) / 2;
        Padic pi = D * unif(cfg, -2 * m);
        MatE Pi = eunif(cfg, -m) * MatE(r - eF(cfg, a) * I);
        M.P = column_pair(e, MatE(Pi * e));
        M.omega = MatE::zero(2, 2, cfg);
        M.omega(0, 1) = eF(cfg, pi);
        M.omega(1, 0) = eF(cfg, fint(cfg, 1));
        M.theta = MatE(eF(cfg, a) * I + eunif(cfg, m) * M.omega);
        M.kappa = M.integral ? std::max(m, 0) : 0;
    }
    M.GL = M.P.star() * G * M.P;
    // eigenlines are orthogonal (Split) or isotropic (Unram); drop the rounding residue
    auto must_vanish = [&](int i, int j) {
        const QuadExt& x = M.GL(i, j);
        if (x.certified_nonzero()) throw PrecisionExhausted("eigenline Gram entry not zero");
        M.GL(i, j) = eF(cfg, Padic::zero(cfg.p));
    };
    if (M.kind == ModelKind::Split) {
        must_vanish(0, 1);
        must_vanish(1, 0);
    } else if (M.kind == ModelKind::Unram) {
        must_vanish(0, 0);
        must_vanish(1, 1);
    }
    return M;
}

enum class LatMode { SelfDual, Pair };

// SelfDual: Λ^∨ = Λ and θΛ ⊆ Λ.  Pair: Λ^∨ ⊆ Λ and θΛ ⊆ Λ^∨.
// Unram lattices are taken modulo the translation (ϖ, ϖ^{-1}) of the unitary torus.
std::vector<MatE> model_lattices(const HermModel& M, LatMode mode)
{
    std::vector<MatE> out;
    if (!M.integral) return out;
    const FieldConfig& c = M.cfg;
    MatE Q = mode == LatMode::SelfDual ? M.GL : MatE(M.GL * M.theta);
    QuadExt pk2 = eunif(c, 2 * M.kappa);
    auto admissible = [&](const MatE& B) {
        MatE GI = B.star() * M.GL * B;
        if (!inverse_integral(GI)) return false;
        return MatE(pk2 * MatE(B.star() * Q * B)).is_integral();
    };
    std::vector<std::vector<int>> ideals;
    for (int W = 8;; W *= 2) {
        if (W > 256) throw WindowInsufficient("ideal exponent scan did not close");
        ideals.clear();
        bool edge = false;
        std::vector<std::vector<int>> cand;
        if (M.kind == ModelKind::Split)
            for (int a1 = -W; a1 <= W; ++a1)
                for (int a2 = -W; a2 <= W; ++a2) cand.push_back({a1, a2});
        else if (M.kind == ModelKind::Unram)
            for (int a2 = -W; a2 <= W; ++a2) cand.push_back({0, a2});
        else
            for (int a = -W; a <= W; ++a) cand.push_back({a});
        for (const auto& a : cand) {
            if (!admissible(ideal_basis(M, a))) continue;
            ideals.push_back(a);
            for (int x : a)
                if (std::abs(x) == W) edge = true;
        }
        if (!edge) break;
    }
    QuadExt pk = eunif(c, M.kappa);
    for (const auto& a : ideals) {
        MatE BI = ideal_basis(M, a);
        std::string key = hnf(BI).key();
        for_each_between<QuadExt>(
            c, BI, MatE(pk * BI), [&](const MatE& B) { return contains_partial(B, MatE(M.theta * B)) != 0; },
            [&](const MatE& B) {
                if (!contains(B, MatE(M.theta * B))) return;
                MatE gen = MatE::zero(M.n, 2 * M.n, c);
                gen.set_block(0, 0, B);
                gen.set_block(0, M.n, MatE(M.omega * B));
                if (hnf(gen).key() != key) return;
                MatE G = B.star() * M.GL * B;
                if (mode == LatMode::SelfDual) {
                    if (!unimodular(G)) return;
                } else {
                    if (!inverse_integral(G)) return;
                    if (!MatE(B.star() * M.GL * M.theta * B).is_integral()) return;
                }
                out.push_back(B);
            });
    }
    return out;
}

// -------------------------------------------------------------------------------------------

Rat two_var_single(const HermModuleElement& f1, const HermModuleElement& f2, const MatE& x1, const MatE& x2,
                   const FieldConfig& cfg)
{
    HermModel M = build_model(MatE(x1.inverse()), MatE(x1 * x2), cfg);
    Rat s = 0;
    for (const MatE& B : model_lattices(M, LatMode::Pair)) {
        MatE G = B.star() * M.GL * B;
        MatE G2 = B.star() * M.GL * M.theta * B;
        Rat v1 = f1.value(neg_reverse(cartan_coordinate(G)));
        if (v1 == 0) continue;
        s += v1 * f2.value(cartan_coordinate(G2));
    }
    return s;
}

int det_val(const MatE& x)
{
    QuadExt d = x.det();
    if (!d.certified_nonzero()) throw NotRegularSS("singular Hermitian matrix");
    return d.val();
}

Rat two_var_ball_single(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg)
{
    int n = x1.rows();
    int d = det_val(x1) + det_val(x2);
    Rat s = 0;
    // Σ_{i+j=d} slice(k,i) ⊗ slice(k,j), evaluated in one lattice pass
    HermModel M = build_model(MatE(x1.inverse()), MatE(x1 * x2), cfg);
    if (d < 2 * n * k) return 0;
    for (const MatE& B : model_lattices(M, LatMode::Pair)) {
        MatE G = B.star() * M.GL * B;
        MatE G2 = B.star() * M.GL * M.theta * B;
        Signature l1 = neg_reverse(cartan_coordinate(G)), l2 = cartan_coordinate(G2);
        if (l1.back() >= k && l2.back() >= k) s += 1;
    }
    return s;
}

} // namespace

// -------------------------------------------------------------------------------------------
// TestFunction

TestFunction TestFunction::hecke(const HeckeElement& f, int row_k)
{
    TestFunction t;
    t.space = Space::MirabolicGL;
    t.n = f.n;
    t.q = f.q;
    t.gl = f;
    t.row_k = row_k;
    return t;
}

TestFunction TestFunction::herm_point(const HermModuleElement& f, long long q)
{
    TestFunction t;
    t.space = Space::HermPoint;
    t.n = f.n;
    t.q = q;
    t.herm = f;
    return t;
}

TestFunction TestFunction::herm_pair(const HermModuleElement& f1, const HermModuleElement& f2, long long q)
{
    TestFunction t;
    t.space = Space::HermPair;
    t.n = f1.n;
    t.q = q;
    t.herm = f1;
    t.herm2 = f2;
    return t;
}

TestFunction TestFunction::unit_ball(Space s, int n, long long q, int k, const Rat& coef)
{
    TestFunction t;
    t.space = s;
    t.n = n;
    t.q = q;
    if (s == Space::MirabolicGL) {
        // ϖ^k gl_n(O) ∩ GL_n = Σ_{λ_n >= k} 1_λ is not finite; only k with a det slice makes sense
        throw InvalidConfig("UnitBall is not a finite Hecke combination");
    }
    t.balls[k] = coef;
    t.herm.n = t.herm2.n = n;
    return t;
}

std::string TestFunction::str() const
{
    std::ostringstream os;
    os << space_name(space) << " n=" << n << ":";
    if (space == Space::MirabolicGL) os << " " << gl.str() << " (x) RowLattice(" << row_k << ")";
    if (!herm.c.empty()) os << " " << herm.str();
    if (!herm2.c.empty()) os << " (x) " << herm2.str();
    for (const auto& [k, c] : balls) os << " + " << c.str() << "*UnitBall(" << k << ")";
    return os.str();
}

HermModuleElement unit_ball_slice(int n, int k, int d)
{
    HermModuleElement f;
    f.n = n;
    if (n == 1) {
        if (d >= k) f.add({d}, 1);
        return f;
    }
    if (n != 2) throw InvalidConfig("unit_ball_slice supports n <= 2");
    for (int a = d - k; 2 * a >= d; --a) f.add({a, d - a}, 1);
    return f;
}

// -------------------------------------------------------------------------------------------
// mirabolic and linear Lie engines

RegularizedValue mirabolic_orbital(const HeckeElement& f, int row_k, const MatF& z, const MatF& w, int v_max)
{
    FieldConfig cfg = cfg_from(z);
    MatF wk = unif(cfg, -row_k) * w;
    int delta = transfer_factor_mirabolic(z, w);
    StableLatticeList list = enumerate_stable_lattices(z, wk, v_max, cfg);
    RationalInQs L = l_factor_of(z);
    std::map<int, Rat> a;
    if (z.det().certified_nonzero())
        for (const auto& s : list.lattices) {
            Rat v = hecke_value(f, s.relpos);
            if (v != 0) a[s.v] += (s.v % 2 == 0) ? v : Rat(-v);
        }
    return regularize(a, list.v_min, list.v_min + v_max, L, delta, "mirabolic lattice sum");
}

RegularizedValue lie_linear_orbital(EtaPair e, int k, const MatF& X, const MatF& Y, const MatF& w, int v_max)
{
    FieldConfig cfg = cfg_from(X);
    int n = X.rows();
    MatF Xs = unif(cfg, -k) * X, Ys = unif(cfg, -k) * Y;
    MatF z = Ys * Xs;
    int scale = transfer_factor_lie_linear(e, X, Y, w) * transfer_factor_lie_linear(e, Xs, Ys, w);
    Padic dz = z.det();
    if (!dz.certified_nonzero()) throw NotRegularSS("YX is singular");
    int d = dz.val();
    HeckeElement phi;
    phi.n = n;
    phi.q = cfg.p;
    phi.group = Group::GL_F;
    for (int i = 0; i <= d; ++i) {
        HeckeElement t = hecke_convolve(HeckeElement::det_slice(n, cfg.p, i), HeckeElement::det_slice(n, cfg.p, d - i));
        int sign = (e.twisted2 && i % 2 != 0) ? -1 : 1;
        if (!e.twisted2 && (n * d) % 2 != 0) sign = -sign;
        phi = phi + Qh::rat(Rat(sign), cfg.p) * t;
    }
    RegularizedValue r = mirabolic_orbital(phi, 0, z, w, v_max);
    r.series = RationalInQs{QPoly{Rat(scale)} * r.series.num, r.series.den};
    r.value *= scale;
    r.provenance = "contraction to GL_n via sum of det-slice convolutions; " + r.provenance;
    return r;
}

// -------------------------------------------------------------------------------------------
// Hermitian engines

Rat unitary_stable(const HermModuleElement& f, const MatE& x, const FieldConfig& cfg)
{
    require_nonneg(f);
    auto st = stable_orbit_reps(OrbitPoint::herm_point(x, cfg));
    Rat s = 0;
    for (const auto& rep : st.reps) {
        HermModel M = build_model(MatE::identity(x.rows(), cfg), rep.x1, cfg);
        for (const MatE& B : model_lattices(M, LatMode::SelfDual))
            s += f.value(cartan_coordinate(MatE(B.inverse() * M.theta * B)));
    }
    return s;
}

Rat unitary_stable_ball(int k, const MatE& x, const FieldConfig& cfg)
{
    return unitary_stable(unit_ball_slice(x.rows(), k, det_val(x)), x, cfg);
}

Rat two_var_stable(const HermModuleElement& f1, const HermModuleElement& f2, const MatE& x1, const MatE& x2,
                   const FieldConfig& cfg)
{
    require_nonneg(f1);
    require_nonneg(f2);
    auto st = stable_orbit_reps(OrbitPoint::herm_pair(x1, x2, cfg));
    Rat s = 0;
    for (const auto& rep : st.reps) s += two_var_single(f1, f2, rep.x1, rep.x2, cfg);
    return s;
}

Rat two_var_stable_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg)
{
    auto st = stable_orbit_reps(OrbitPoint::herm_pair(x1, x2, cfg));
    Rat s = 0;
    for (const auto& rep : st.reps) s += two_var_ball_single(k, rep.x1, rep.x2, cfg);
    return s;
}

Rat epsilon_orbital(const HermModuleElement& f1, const HermModuleElement& f2, const MatE& x1, const MatE& x2,
                    const FieldConfig& cfg)
{
    require_nonneg(f1);
    require_nonneg(f2);
    auto st = stable_orbit_reps(OrbitPoint::herm_pair(x1, x2, cfg));
    Rat s = 0;
    for (size_t i = 0; i < st.reps.size(); ++i)
        s += Rat(st.eps[i]) * two_var_single(f1, f2, st.reps[i].x1, st.reps[i].x2, cfg);
    return Rat(delta_epsilon(x1, x2)) * s;
}

Rat epsilon_orbital_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg)
{
    auto st = stable_orbit_reps(OrbitPoint::herm_pair(x1, x2, cfg));
    Rat s = 0;
    for (size_t i = 0; i < st.reps.size(); ++i)
        s += Rat(st.eps[i]) * two_var_ball_single(k, st.reps[i].x1, st.reps[i].x2, cfg);
    return Rat(delta_epsilon(x1, x2)) * s;
}

Rat split_inert_stable(int k, const MatE& X, const FieldConfig& cfg)
{
    int n = X.rows();
    auto st = stable_orbit_reps(OrbitPoint::split_inert(X, cfg));
    Rat s = 0;
    QuadExt up = eunif(cfg, k), down = eunif(cfg, -k);
    for (const auto& rep : st.reps) {
        MatE Mx = rep.x1.star() * rep.x1;
        MatE Mi = Mx.inverse();
        HermModel M = build_model(MatE::identity(n, cfg), MatE(eunif(cfg, -2 * k) * Mx), cfg);
        for (const MatE& BL : model_lattices(M, LatMode::SelfDual)) {
            MatE B2 = M.P * BL;
            for_each_between<QuadExt>(
                exact(cfg), MatE(up * MatE(Mi * B2)), MatE(down * B2), [](const MatE&) { return true; },
                [&](const MatE& B1) {
                    if (unimodular(MatE(B1.star() * Mx * B1))) s += 1;
                });
        }
    }
    return s;
}

Rat evaluate(const TestFunction& f, const OrbitPoint& pt, int v_max, EtaPair e)
{
    Rat s = 0;
    switch (pt.space) {
    case Space::MirabolicGL:
        return mirabolic_orbital(f.gl, f.row_k, pt.z, pt.w, v_max).value;
    case Space::HermPoint:
        if (!f.herm.c.empty()) s += unitary_stable(f.herm, pt.x1, pt.cfg);
        for (const auto& [k, c] : f.balls) s += c * unitary_stable_ball(k, pt.x1, pt.cfg);
        return s;
    case Space::HermPair:
        if (!f.herm.c.empty() && !f.herm2.c.empty()) s += two_var_stable(f.herm, f.herm2, pt.x1, pt.x2, pt.cfg);
        for (const auto& [k, c] : f.balls) s += c * two_var_stable_ball(k, pt.x1, pt.x2, pt.cfg);
        return s;
    case Space::LinearLie:
        for (const auto& [k, c] : f.balls) s += c * lie_linear_orbital(e, k, pt.X, pt.Y, pt.w, v_max).value;
        return s;
    case Space::SplitInertLie:
        for (const auto& [k, c] : f.balls) s += c * split_inert_stable(k, pt.x1, pt.cfg);
        return s;
    }
    return s;
}

// -------------------------------------------------------------------------------------------
// oracles

namespace {

template <class S>
Mat<S> scaled_identity(int n, const FieldConfig& c, int e)
{
    return Mat<S>(make_unif<S>(c, e) * Mat<S>::identity(n, c));
}

template <class S>
void for_each_in_box(const FieldConfig& c, int n, int R, const LatticePrune<S>& prune, const LatticeVisit<S>& visit)
{
    for_each_between<S>(c, scaled_identity<S>(n, c, -R), scaled_identity<S>(n, c, R), prune, visit);
}

bool partial_ok(int r) { return r != 0; }

// per-radius result: weighted value and support size
struct BoxCount {
    Rat value = 0;
    long long support = 0;
};

// compact centralizer: the box count stabilizes; otherwise it grows by 2·(answer) per step
Rat stabilize(const std::function<BoxCount(int)>& count, int m, bool noncompact)
{
    std::vector<BoxCount> seen;
    const int R_max = m + 6;
    for (int R = m; R <= R_max; ++R) {
        seen.push_back(count(R));
        size_t k = seen.size();
        if (!noncompact && k >= 3 && seen[k - 1].support == seen[k - 2].support &&
            seen[k - 2].support == seen[k - 3].support && seen[k - 1].value == seen[k - 2].value)
            return seen[k - 1].value;
        if (noncompact && k >= 4) {
            long long d1 = seen[k - 1].support - seen[k - 2].support;
            long long d2 = seen[k - 2].support - seen[k - 3].support;
            long long d3 = seen[k - 3].support - seen[k - 4].support;
            Rat v1 = seen[k - 1].value - seen[k - 2].value, v2 = seen[k - 2].value - seen[k - 3].value;
            if (d1 == d2 && d2 == d3 && v1 == v2) return v1 / 2;
        }
    }
    throw CellBoundUncertified("box count did not stabilize by radius " + std::to_string(R_max));
}

bool noncompact_torus(const std::vector<Padic>& f)
{
    if (f.size() != 3) return false;
    auto desc = etale_algebra(f);
    return desc.factors.size() == 1 && desc.factors[0].contains_E;
}

Rat oracle_herm_point(const HermModuleElement& f, const MatE& x, const FieldConfig& cfg, int m)
{
    require_nonneg(f);
    int n = x.rows();
    auto st = stable_orbit_reps(OrbitPoint::herm_point(x, cfg));
    bool nc = noncompact_torus(char_over_F(x));
    Rat total = 0;
    for (const auto& rep : st.reps) {
        const MatE& y = rep.x1;
        total += stabilize(
            [&](int R) {
                BoxCount bc;
                for_each_in_box<QuadExt>(
                    exact(cfg), n, R,
                    [&](const MatE& B) {
                        return partial_ok(contains_partial(B, MatE(y * B))) &&
                               partial_ok(MatE(B.star() * B).entries_at_least_partial(0));
                    },
                    [&](const MatE& B) {
                        if (!contains(B, MatE(y * B))) return;
                        if (!unimodular(MatE(B.star() * B))) return;
                        Rat v = f.value(cartan_coordinate(MatE(B.inverse() * y * B)));
                        ++bc.support;
                        bc.value += v;
                    });
                return bc;
            },
            m, nc);
    }
    return total;
}

// f1 ⊗ f2 on the pair; k >= 0 with use_ball replaces them by the UnitBall(k) indicators
Rat oracle_herm_pair(const HermModuleElement& f1, const HermModuleElement& f2, bool use_ball, int k, const MatE& x1,
                     const MatE& x2, const FieldConfig& cfg, int m, bool eps)
{
    int n = x1.rows();
    auto st = stable_orbit_reps(OrbitPoint::herm_pair(x1, x2, cfg));
    bool nc = noncompact_torus(char_over_F(MatE(x2 * x1)));
    Rat total = 0;
    for (size_t i = 0; i < st.reps.size(); ++i) {
        const MatE& a = st.reps[i].x1;
        const MatE& b = st.reps[i].x2;
        Rat o = stabilize(
            [&](int R) {
                BoxCount bc;
                for_each_in_box<QuadExt>(
                    exact(cfg), n, R,
                    [&](const MatE& B) {
                        // g·x1 = B^{-1} x1 B^{-*} and g·x2 = B* x2 B for Λ = B O^n
                        if (!partial_ok(MatE(B.star() * b * B).entries_at_least_partial(0))) return false;
                        MatE Bi = B.inverse();
                        return partial_ok(MatE(Bi * a * Bi.star()).entries_at_least_partial(0));
                    },
                    [&](const MatE& B) {
                        MatE Bi = B.inverse();
                        MatE g1 = Bi * a * Bi.star(), g2 = B.star() * b * B;
                        if (!g1.is_integral() || !g2.is_integral()) return;
                        Signature l1 = cartan_coordinate(g1), l2 = cartan_coordinate(g2);
                        Rat v = use_ball ? Rat((l1.back() >= k && l2.back() >= k) ? 1 : 0)
                                         : f1.value(l1) * f2.value(l2);
                        ++bc.support;
                        bc.value += v;
                    });
                return bc;
            },
            m, nc);
        total += eps ? Rat(st.eps[i]) * o : o;
    }
    return eps ? Rat(delta_epsilon(x1, x2)) * total : total;
}

Rat oracle_split_inert(int k, const MatE& X, const FieldConfig& cfg, int m)
{
    int n = X.rows();
    auto st = stable_orbit_reps(OrbitPoint::split_inert(X, cfg));
    bool nc = noncompact_torus(char_over_F(MatE(X.star() * X)));
    QuadExt down = eunif(cfg, -k), up = eunif(cfg, k);
    Rat total = 0;
    for (const auto& rep : st.reps) {
        const MatE& Xr = rep.x1;
        MatE Xis = Xr.star().inverse();
        MatE Mk = eunif(cfg, -2 * k) * MatE(Xr.star() * Xr);
        total += stabilize(
            [&](int R) {
                BoxCount bc;
                MatE box = scaled_identity<QuadExt>(n, cfg, -R);
                // (Λ1, Λ2) both self-dual with X Λ2 ⊆ ϖ^k Λ1, both in the box
                for_each_in_box<QuadExt>(
                    exact(cfg), n, R,
                    [&](const MatE& B) {
                        if (!partial_ok(MatE(B.star() * B).entries_at_least_partial(0))) return false;
                        // Λ1 exists only if ϖ^{-k} X Λ2 ⊆ ϖ^k X^{-*} Λ2, i.e. ϖ^{-2k} X*X Λ2 ⊆ Λ2
                        return partial_ok(contains_partial(B, MatE(Mk * B)));
                    },
                    [&](const MatE& B2) {
                        if (!unimodular(MatE(B2.star() * B2))) return;
                        MatE lo = down * MatE(Xr * B2), hi = up * MatE(Xis * B2);
                        if (!contains(hi, lo)) return;
                        for_each_between<QuadExt>(
                            exact(cfg), hi, lo, [](const MatE&) { return true; },
                            [&](const MatE& B1) {
                                if (!contains(box, B1)) return;
                                if (!contains(B1, MatE(scaled_identity<QuadExt>(n, cfg, R)))) return;
                                if (!unimodular(MatE(B1.star() * B1))) return;
                                ++bc.support;
                                bc.value += 1;
                            });
                    });
                return bc;
            },
            m, nc);
    }
    return total;
}

} // namespace

RegularizedValue oracle_mirabolic(const HeckeElement& f, int row_k, const MatF& z, const MatF& w, int v_max, int m)
{
    FieldConfig cfg = cfg_from(z);
    int n = z.rows();
    MatF wk = unif(cfg, -row_k) * w;
    int delta = transfer_factor_mirabolic(z, w);
    bool inv = z.det().certified_nonzero();
    // a z-stable lattice exists iff char(z) is integral; then some multiple also satisfies wL ⊆ O
    if (!integral_poly(z.char_poly())) return regularize({}, 0, v_max, l_factor_of(z), delta, "empty lattice sum");
    // all z-stable L with wL ⊆ O inside the box; the lowest v(L) fixes the window
    auto collect = [&](int R) {
        std::map<int, std::pair<Rat, long long>> by_v;
        for_each_in_box<Padic>(
            cfg, n, R,
            [&](const MatF& B) {
                return partial_ok(contains_partial(B, MatF(z * B))) &&
                       partial_ok(MatF(wk * B).entries_at_least_partial(0));
            },
            [&](const MatF& B) {
                if (!contains(B, MatF(z * B)) || !MatF(wk * B).is_integral()) return;
                int v = B.det().val();
                Rat val = inv ? hecke_value(f, cartan_coordinate(MatF(B.inverse() * z * B))) : Rat(0);
                auto& slot = by_v[v];
                slot.first += (v % 2 == 0) ? val : Rat(-val);
                slot.second += 1;
            });
        return by_v;
    };
    std::map<int, std::pair<Rat, long long>> prev;
    int stable = 0;
    for (int R = m; R <= m + v_max + 8; ++R) {
        auto cur = collect(R);
        if (cur.empty()) {
            prev = cur;
            continue;
        }
        int lo = cur.begin()->first;
        auto window = [&](const std::map<int, std::pair<Rat, long long>>& mp) {
            std::map<int, std::pair<Rat, long long>> r;
            for (const auto& [v, x] : mp)
                if (v <= lo + v_max) r[v] = x;
            return r;
        };
        auto wc = window(cur), wp = window(prev);
        bool same = !prev.empty() && prev.begin()->first == lo && wc.size() == wp.size();
        if (same)
            for (const auto& [v, x] : wc) {
                auto it = wp.find(v);
                if (it == wp.end() || it->second.first != x.first || it->second.second != x.second) same = false;
            }
        stable = same ? stable + 1 : 0;
        prev = cur;
        if (stable >= 2) {
            std::map<int, Rat> a;
            for (const auto& [v, x] : wc) a[v] = x.first;
            return regularize(a, lo, lo + v_max, l_factor_of(z), delta, "box lattice sum");
        }
    }
    throw CellBoundUncertified("mirabolic box count did not stabilize");
}

RegularizedValue oracle_lie_linear(EtaPair e, int k, const MatF& X, const MatF& Y, const MatF& w, int v_max, int m)
{
    FieldConfig cfg = cfg_from(X);
    int n = X.rows();
    MatF z = Y * X;
    int omega = transfer_factor_lie_linear(e, X, Y, w);
    MatF Yi = Y.inverse();
    Padic up = unif(cfg, k), down = unif(cfg, -k);
    MatF zk = unif(cfg, -2 * k) * z;
    if (!integral_poly(zk.char_poly())) return regularize({}, 0, v_max, l_factor_of(z), omega, "empty lattice-pair sum");
    // pairs (L1, L2): X L2 ⊆ ϖ^k L1, Y L1 ⊆ ϖ^k L2, w L2 ⊆ O; weight η_2(L1 L2) (-T)^{v(L2)}
    auto collect = [&](int R) {
        std::map<int, std::pair<Rat, long long>> by_v;
        for_each_in_box<Padic>(
            cfg, n, R,
            [&](const MatF& B) {
                return partial_ok(contains_partial(B, MatF(zk * B))) &&
                       partial_ok(MatF(w * B).entries_at_least_partial(0));
            },
            [&](const MatF& B2) {
                if (!MatF(w * B2).is_integral()) return;
                MatF lo = down * MatF(X * B2), hi = up * MatF(Yi * B2);
                if (!contains(hi, lo)) return;
                int v2 = B2.det().val();
                Rat s = 0;
                long long cnt = 0;
                for_each_between<Padic>(
                    cfg, hi, lo, [](const MatF&) { return true; },
                    [&](const MatF& B1) {
                        int v1 = B1.det().val();
                        s += (e.twisted2 && (v1 + v2) % 2 != 0) ? -1 : 1;
                        ++cnt;
                    });
                if (cnt == 0) return;
                auto& slot = by_v[v2];
                slot.first += (v2 % 2 == 0) ? s : Rat(-s);
                slot.second += cnt;
            });
        return by_v;
    };
    std::map<int, std::pair<Rat, long long>> prev;
    int stable = 0;
    for (int R = m; R <= m + v_max + 8; ++R) {
        auto cur = collect(R);
        if (cur.empty()) {
            prev = cur;
            continue;
        }
        int lo = cur.begin()->first;
        bool same = !prev.empty() && prev.begin()->first == lo;
        if (same)
            for (int v = lo; v <= lo + v_max; ++v) {
                auto a = cur.find(v), b = prev.find(v);
                bool ina = a != cur.end(), inb = b != prev.end();
                if (ina != inb || (ina && (a->second.first != b->second.first || a->second.second != b->second.second)))
                    same = false;
            }
        stable = same ? stable + 1 : 0;
        prev = cur;
        if (stable >= 2) {
            std::map<int, Rat> a;
            for (const auto& [v, x] : cur)
                if (v <= lo + v_max) a[v] = x.first;
            return regularize(a, lo, lo + v_max, l_factor_of(z), omega, "lattice-pair sum");
        }
    }
    throw CellBoundUncertified("linear Lie box count did not stabilize");
}

Rat brute_force_oracle(const TestFunction& f, const OrbitPoint& pt, int m, int v_max, EtaPair e)
{
    if (m < 1) throw InvalidConfig("cell precision m must be >= 1");
    Rat s = 0;
    switch (pt.space) {
    case Space::MirabolicGL:
        return oracle_mirabolic(f.gl, f.row_k, pt.z, pt.w, v_max, m).value;
    case Space::HermPoint:
        if (!f.herm.c.empty()) s += oracle_herm_point(f.herm, pt.x1, pt.cfg, m);
        for (const auto& [k, c] : f.balls)
            s += c * oracle_herm_point(unit_ball_slice(pt.n, k, det_val(pt.x1)), pt.x1, pt.cfg, m);
        return s;
    case Space::HermPair:
        if (!f.herm.c.empty() && !f.herm2.c.empty())
            s += oracle_herm_pair(f.herm, f.herm2, false, 0, pt.x1, pt.x2, pt.cfg, m, false);
        for (const auto& [k, c] : f.balls)
            s += c * oracle_herm_pair(f.herm, f.herm2, true, k, pt.x1, pt.x2, pt.cfg, m, false);
        return s;
    case Space::LinearLie:
        for (const auto& [k, c] : f.balls) s += c * oracle_lie_linear(e, k, pt.X, pt.Y, pt.w, v_max, m).value;
        return s;
    case Space::SplitInertLie:
        for (const auto& [k, c] : f.balls) s += c * oracle_split_inert(k, pt.x1, pt.cfg, m);
        return s;
    }
    return s;
}

// ε-weighted oracle, used by the verifier for the ε-transfer check
Rat oracle_epsilon_ball(int k, const MatE& x1, const MatE& x2, const FieldConfig& cfg, int m)
{
    HermModuleElement none;
    return oracle_herm_pair(none, none, true, k, x1, x2, cfg, m, true);
}

} // namespace hfl
