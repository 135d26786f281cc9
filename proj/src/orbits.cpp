#include "hfl/orbits.hpp"

#include <climits>
#include <sstream>

namespace hfl {

namespace {

Padic fint(const FieldConfig& c, long long x) { return Padic::from_int(c.p, x, precision_cap(c.p)); }
Padic unif(const FieldConfig& c, int e) { return Padic::from_parts(c.p, e, 1, precision_cap(c.p)); }
QuadExt eF(const FieldConfig& c, const Padic& x) { return QuadExt::from_F(x, c.u); }

FieldConfig cfg_of(int p, long long u)
{
    FieldConfig c = FieldConfig::make(p, precision_cap(p));
    c.u = u;
    return c;
}

int min_abs_prec(const MatF& m)
{
    int r = INT_MAX;
    for (const auto& e : m.data())
        if (!e.is_exact_zero()) r = std::min(r, e.abs_prec());
    return r;
}
int min_abs_prec(const MatE& m)
{
    int r = INT_MAX;
    for (const auto& e : m.data()) {
        if (!e.a().is_exact_zero()) r = std::min(r, e.a().abs_prec());
        if (!e.b().is_exact_zero()) r = std::min(r, e.b().abs_prec());
    }
    return r;
}

// vanishing to the full precision of the entries counts as singular
template <class S>
bool invertible(const Mat<S>& m)
{
    S d = m.det();
    if (nonzero(d)) return true;
    if (exact_zero(d)) return false;
    if (d.abs_prec() >= min_abs_prec(m)) return false;
    throw PrecisionExhausted("determinant not certified nonzero");
}

Padic det_in_F(const MatE& m)
{
    QuadExt d = m.det();
    if (!d.b().is_exact_zero() && d.b().certified_nonzero())
        throw NotInImage("determinant not in F");
    return d.a();
}

// Sylvester resultant of f and f'; zero iff f has a repeated root
bool separable(const std::vector<Padic>& f)
{
    int d = static_cast<int>(f.size()) - 1;
    if (d <= 1) return true;
    if (d == 2) {
        try {
            etale_algebra(f);
        } catch (const Inseparable&) {
            return false;
        }
        return true;
    }
    int p = f[0].p() ? f[0].p() : f[1].p();
    std::vector<Padic> g;
    for (int i = 1; i <= d; ++i) g.push_back(f[static_cast<size_t>(i)] * Padic::from_int(p, i, precision_cap(p)));
    int N = 2 * d - 1;
    MatF S(N, N, Padic::zero(p));
    for (int r = 0; r < d - 1; ++r)
        for (int i = 0; i <= d; ++i) S(r, r + i) = f[static_cast<size_t>(d - i)];
    for (int r = 0; r < d; ++r)
        for (int i = 0; i <= d - 1; ++i) S(d - 1 + r, r + i) = g[static_cast<size_t>(d - 1 - i)];
    return invertible(S);
}

// canonical roots of a split quadratic T^2 + c1 T + c0
std::pair<Padic, Padic> split_roots(const std::vector<Padic>& f)
{
    int p = f[0].p() ? f[0].p() : f[1].p();
    Padic two = Padic::from_int(p, 2, precision_cap(p));
    Padic disc = f[1] * f[1] - two * two * f[0];
    Padic s = sqrt(disc);
    // the root of larger absolute value has no cancellation; the other is c0 over it
    Padic a = -f[1] + s, b = -f[1] - s;
    bool a_big = !b.certified_nonzero() || (a.certified_nonzero() && a.val() <= b.val());
    if (a_big) return {a / two, f[0] / (a / two)};
    return {f[0] / (b / two), b / two};
}

// c = alpha + beta R, one per class of A^x modulo norms, identity class first
struct Twist {
    Padic alpha, beta;
    std::vector<int> label;
    int eta_norm = 1;
};

std::vector<Twist> twists(const OrbitInvariant& f, const FieldConfig& cfg)
{
    std::vector<Twist> out;
    Padic one = fint(cfg, 1), zero = Padic::zero(cfg.p);
    if (f.degree() == 1) {
        out.push_back({one, zero, {0}, 1});
        out.push_back({unif(cfg, 1), zero, {1}, -1});
        return out;
    }
    auto desc = etale_algebra(f.c);
    if (desc.factors.size() == 2) {
        auto [l1, l2] = split_roots(f.c);
        for (int e1 = 0; e1 <= 1; ++e1)
            for (int e2 = 0; e2 <= 1; ++e2) {
                Padic t1 = unif(cfg, e1), t2 = unif(cfg, e2);
                Padic beta = (e1 == e2) ? zero : (t1 - t2) / (l1 - l2);
                Padic alpha = (e1 == e2) ? t1 : t1 - beta * l1;
                out.push_back({alpha, beta, {e1, e2}, (e1 + e2) % 2 == 0 ? 1 : -1});
            }
        return out;
    }
    out.push_back({one, zero, {0}, 1});
    if (desc.factors[0].ramified) {
        // N(-c1/2 - θ) = f(-c1/2) = -disc/4 has odd valuation
        Padic half = fint(cfg, 2).inv();
        out.push_back({-(f.c[1] * half), -one, {1}, -1});
    }
    return out;
}

MatE poly_in(const Padic& alpha, const Padic& beta, const MatE& R, const FieldConfig& cfg)
{
    return MatE(eF(cfg, alpha) * MatE::identity(R.rows(), cfg) + eF(cfg, beta) * R);
}

OrbitInvariant invariant_of(std::vector<Padic> c) { return OrbitInvariant{std::move(c)}; }

MatF companion(const OrbitInvariant& f, const FieldConfig& cfg)
{
    if (f.degree() == 1) return MatF::diag({-f.c[0]});
    MatF C = MatF::zero(2, 2, cfg);
    C(0, 1) = -f.c[0];
    C(1, 0) = fint(cfg, 1);
    C(1, 1) = -f.c[1];
    return C;
}

// Hermitian x with char(x) = f, or nullopt when no diagonal entry in the search range works
std::optional<MatE> hermitian_with_char(const OrbitInvariant& f, const FieldConfig& cfg)
{
    if (f.degree() == 1) return MatE::diag({eF(cfg, -f.c[0])});
    auto desc = etale_algebra(f.c);
    if (desc.factors.size() == 2) {
        auto [l1, l2] = split_roots(f.c);
        return MatE::diag({eF(cfg, l1), eF(cfg, l2)});
    }
    Padic half = fint(cfg, 2).inv();
    Padic centre = -(f.c[1] * half);
    // closest perturbation first, so integral invariants give integral matrices
    for (int k = 8; k >= -4; --k)
        for (long long j : {0LL, 1LL, -1LL}) {
            Padic alpha = (j == 0) ? centre : centre + fint(cfg, j) * unif(cfg, k);
            Padic delta = -f.c[1] - alpha;
            Padic nb = alpha * delta - f.c[0]; // N(β) = αδ - c0 = -f(α)
            if (!nb.certified_nonzero() || nb.val() % 2 != 0) continue;
            QuadExt beta = norm_preimage(nb, cfg);
            return MatE::from_rows({{eF(cfg, alpha), beta}, {beta.conj(), eF(cfg, delta)}});
        }
    return std::nullopt;
}

std::string mat_str(const MatF& m)
{
    std::string s;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += (s.empty() ? "" : ";") + m(i, j).str();
    return s;
}
std::string mat_str(const MatE& m)
{
    std::string s;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += (s.empty() ? "" : ";") + m(i, j).a().str() + "/" + m(i, j).b().str();
    return s;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> r;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            r.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    r.push_back(cur);
    return r;
}

} // namespace

std::string space_name(Space s)
{
    switch (s) {
    case Space::MirabolicGL: return "MirabolicGL";
    case Space::HermPoint: return "HermPoint";
    case Space::HermPair: return "HermPair";
    case Space::SplitInertLie: return "SplitInertLie";
    case Space::LinearLie: return "LinearLie";
    }
    return "?";
}

Space parse_space(const std::string& s)
{
    for (Space sp : {Space::MirabolicGL, Space::HermPoint, Space::HermPair, Space::SplitInertLie, Space::LinearLie})
        if (space_name(sp) == s) return sp;
    throw std::invalid_argument("unknown space '" + s + "'");
}

OrbitPoint OrbitPoint::mirabolic(const MatF& z, const MatF& w, const FieldConfig& cfg)
{
    OrbitPoint p;
    p.space = Space::MirabolicGL;
    p.n = z.rows();
    p.cfg = cfg;
    p.z = z;
    p.w = w;
    return p;
}

OrbitPoint OrbitPoint::linear_lie(const MatF& X, const MatF& Y, const MatF& w, const FieldConfig& cfg)
{
    OrbitPoint p;
    p.space = Space::LinearLie;
    p.n = X.rows();
    p.cfg = cfg;
    p.X = X;
    p.Y = Y;
    p.w = w;
    return p;
}

OrbitPoint OrbitPoint::herm_point(const MatE& x, const FieldConfig& cfg)
{
    OrbitPoint p;
    p.space = Space::HermPoint;
    p.n = x.rows();
    p.cfg = cfg;
    p.x1 = x;
    return p;
}

OrbitPoint OrbitPoint::herm_pair(const MatE& x1, const MatE& x2, const FieldConfig& cfg)
{
    OrbitPoint p;
    p.space = Space::HermPair;
    p.n = x1.rows();
    p.cfg = cfg;
    p.x1 = x1;
    p.x2 = x2;
    return p;
}

OrbitPoint OrbitPoint::split_inert(const MatE& X, const FieldConfig& cfg)
{
    OrbitPoint p;
    p.space = Space::SplitInertLie;
    p.n = X.rows();
    p.cfg = cfg;
    p.x1 = X;
    return p;
}

std::string OrbitInvariant::str() const
{
    std::string s = "[";
    for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + c[i].str();
    return s + "]";
}

OrbitInvariant invariant_poly(const OrbitPoint& pt)
{
    switch (pt.space) {
    case Space::MirabolicGL: return invariant_of(pt.z.char_poly());
    case Space::LinearLie: return invariant_of(MatF(pt.Y * pt.X).char_poly());
    case Space::HermPoint: return invariant_of(descend(pt.x1.char_poly()));
    case Space::HermPair: return invariant_of(descend(MatE(pt.x2 * pt.x1).char_poly()));
    case Space::SplitInertLie: return invariant_of(descend(MatE(-(pt.x1.star() * pt.x1)).char_poly()));
    }
    throw std::logic_error("invariant_poly: bad space");
}

bool is_regular_ss(const OrbitPoint& pt)
{
    bool inv = false;
    switch (pt.space) {
    case Space::MirabolicGL: inv = invertible(pt.z); break;
    case Space::LinearLie: inv = invertible(pt.X) && invertible(pt.Y); break;
    case Space::HermPoint: inv = invertible(pt.x1); break;
    case Space::HermPair: inv = invertible(pt.x1) && invertible(pt.x2); break;
    case Space::SplitInertLie: inv = invertible(pt.x1); break;
    }
    return inv && separable(invariant_poly(pt).c);
}

bool is_strongly_regular(const OrbitPoint& pt)
{
    if (!is_regular_ss(pt)) return false;
    if (pt.space == Space::MirabolicGL) return invertible(krylov_rows(pt.w, pt.z));
    if (pt.space == Space::LinearLie) return invertible(krylov_rows(pt.w, MatF(pt.Y * pt.X)));
    return true;
}

bool matches(const OrbitPoint& a, const OrbitPoint& b)
{
    return invariant_poly(a) == invariant_poly(b);
}

int transfer_factor_mirabolic(const MatF& z, const MatF& w)
{
    MatF C = krylov_rows(w, z);
    if (!invertible(C)) throw NotStronglyRegular("Krylov matrix of (z, w) is singular");
    int n = z.rows();
    int ez = eta(z.det());
    return (n % 2 == 0 ? 1 : ez) * eta(C.det());
}

int transfer_factor_lie_linear(EtaPair e, const MatF& X, const MatF& Y, const MatF& w)
{
    MatF R = Y * X;
    MatF C = krylov_rows(w, R);
    if (!invertible(C)) throw NotStronglyRegular("Krylov matrix of (YX, w) is singular");
    int n = X.rows();
    int s = eta(C.det());
    if (e.twisted2) {
        if (n % 2 == 1) s *= eta(R.det());
        s *= eta(Y.det());
    }
    return s;
}

int transfer_factor_group(EtaPair e, const MatF& y, const MatF& w)
{
    int n = y.rows() / 2;
    MatF B = y.block(0, n, n, n), C = y.block(n, 0, n, n), D = y.block(n, n, n, n);
    MatF K = krylov_rows(w, D);
    if (!invertible(K)) throw NotStronglyRegular("Krylov matrix of (D, w) is singular");
    int s = eta(K.det());
    if (e.twisted2) {
        if (n % 2 == 1) s *= eta(MatF(B * C).det());
        s *= eta(C.det());
    }
    return s;
}

int delta_epsilon(const MatE& x1, const MatE&)
{
    return eta(det_in_F(x1));
}

MatE orthonormalize(const MatE& G, const FieldConfig& cfg)
{
    int n = G.rows();
    if (n == 1) {
        Padic a = det_in_F(G);
        return MatE::diag({norm_preimage(a.inv(), cfg)});
    }
    if (n != 2) throw std::invalid_argument("orthonormalize: n must be 1 or 2");
    Padic d = det_in_F(G);
    if (!d.certified_nonzero() || d.val() % 2 != 0)
        throw NotInImage("form is not isometric to the identity form");
    QuadExt zero = eF(cfg, Padic::zero(cfg.p)), one = eF(cfg, fint(cfg, 1));
    QuadExt s = QuadExt::sqrt_u(cfg);
    auto q = [&](const MatE& v) { return det_in_F(MatE(v.star() * G * v)); };
    auto col = [&](const QuadExt& x, const QuadExt& y) { return MatE::from_rows({{x}, {y}}); };
    // G-orthogonal complement of v inside E^2
    auto complement = [&](const MatE& v, const Padic& t) {
        MatE e = v(0, 0).certified_nonzero() ? col(zero, one) : col(one, zero);
        QuadExt coef = MatE(v.star() * G * e)(0, 0) / eF(cfg, t);
        return MatE(e - coef * v);
    };
    MatE v;
    for (const MatE& c : {col(one, zero), col(zero, one), col(one, one), col(one, s)})
        if (q(c).certified_nonzero()) {
            v = c;
            break;
        }
    if (v.rows() == 0) throw RepresentativeSearchFailed("no anisotropic vector found");
    Padic g1 = q(v);
    MatE u = complement(v, g1);
    Padic g2 = q(u);
    if (g1.val() % 2 != 0 && g2.val() % 2 == 0) {
        std::swap(v, u);
        std::swap(g1, g2);
    }
    if (g1.val() % 2 != 0) {
        // both odd: v + ϖ^{-j}β u has norm g1·ϖ once N(β) = (ϖ - 1)/c0, c = g2/g1 = ϖ^{2j} c0
        Padic c = g2 / g1;
        int j = c.val() / 2;
        Padic c0 = c * unif(cfg, -2 * j);
        QuadExt beta = norm_preimage((unif(cfg, 1) - fint(cfg, 1)) / c0, cfg);
        v = v + (eF(cfg, unif(cfg, -j)) * beta) * u;
        g1 = q(v);
        if (g1.val() % 2 != 0) throw RepresentativeSearchFailed("norm adjustment failed");
        u = complement(v, g1);
        g2 = q(u);
    }
    MatE S(2, 2, zero);
    QuadExt n1 = norm_preimage(g1, cfg).inv(), n2 = norm_preimage(g2, cfg).inv();
    for (int i = 0; i < 2; ++i) {
        S(i, 0) = v(i, 0) * n1;
        S(i, 1) = u(i, 0) * n2;
    }
    return S;
}


// orthogonal eigenline basis (columns) for the identity form; both norms 1 (e = 0) or ϖ (e = 1)
MatE eigenline_basis(int e, const FieldConfig& cfg)
{
    if (e == 0) return MatE::identity(2, cfg);
    QuadExt one = eF(cfg, fint(cfg, 1));
    QuadExt beta = norm_preimage(unif(cfg, 1) - fint(cfg, 1), cfg);
    return MatE::from_rows({{one, -beta.conj()}, {beta, one}});
}

// Hermitian operator for the identity form with eigenvalues l1, l2 whose eigenlines have norms of
// valuation parity e
MatE split_class_operator(const Padic& l1, const Padic& l2, int e, const FieldConfig& cfg)
{
    MatE V = eigenline_basis(e, cfg);
    Padic q = e == 0 ? fint(cfg, 1) : unif(cfg, 1);
    MatE D = MatE::diag({eF(cfg, l1 / q), eF(cfg, l2 / q)});
    return MatE(V * D * V.star());
}

// X with X*X = split_class_operator(l1, l2, e), from an orthonormal basis of the diagonal form
MatE split_class_root(const Padic& l1, const Padic& l2, int e, const FieldConfig& cfg)
{
    MatE V = eigenline_basis(e, cfg);
    Padic q = e == 0 ? fint(cfg, 1) : unif(cfg, 1);
    MatE S = orthonormalize(MatE::diag({eF(cfg, l1 * q), eF(cfg, l2 * q)}), cfg);
    return MatE(V * S).inverse();
}

// valuation parity of the norm of an l1-eigenvector of y
int eigenline_parity(const MatE& y, const Padic& l1, const Padic& l2, const FieldConfig& cfg)
{
    (void)l1;
    MatE a = y - eF(cfg, l2) * MatE::identity(2, cfg);
    int best = -1, bv = 0;
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            const QuadExt& x = a(i, j);
            if (!x.certified_nonzero()) continue;
            if (best < 0 || x.val() < bv) best = j, bv = x.val();
        }
    if (best < 0) throw PrecisionExhausted("eigenvector not determined");
    MatE c = a.block(0, best, 2, 1);
    return ((MatE(c.star() * c)(0, 0)).val() % 2 + 2) % 2;
}

StableOrbitClass stable_orbit_reps(const OrbitPoint& pt)
{
    if (pt.n > 2) throw std::invalid_argument("stable_orbit_reps: n must be at most 2");
    if (!is_regular_ss(pt)) throw NotRegularSS("stable_orbit_reps needs a regular semi-simple point");
    StableOrbitClass out;
    const FieldConfig& cfg = pt.cfg;
    if (pt.space == Space::MirabolicGL || pt.space == Space::LinearLie) {
        out.reps.push_back(pt);
        out.labels.push_back({});
        out.eps.push_back(1);
        return out;
    }
    OrbitInvariant f = invariant_poly(pt);
    auto tw = twists(f, cfg);
    for (const auto& t : tw) {
        bool identity = t.beta.is_exact_zero() && t.alpha == fint(cfg, 1);
        if (pt.space == Space::HermPair) {
            MatE c = poly_in(t.alpha, t.beta, MatE(pt.x2 * pt.x1), cfg);
            OrbitPoint r = identity ? pt : OrbitPoint::herm_pair(MatE(pt.x1 * c), MatE(c.inverse() * pt.x2), cfg);
            out.reps.push_back(r);
            out.labels.push_back(t.label);
            out.eps.push_back(t.eta_norm);
            continue;
        }
        // one-form spaces: only classes that keep the identity form; for n <= 2 the one nontrivial
        // such class is the split (1,1) class, built directly from the eigenvalues
        if (t.eta_norm != 1) continue;
        OrbitPoint r = pt;
        if (!identity) {
            MatE y = pt.space == Space::HermPoint ? pt.x1 : MatE(pt.x1.star() * pt.x1);
            auto [l1, l2] = split_roots(descend(y.char_poly()));
            int e = 1 - eigenline_parity(y, l1, l2, cfg);
            r = pt.space == Space::HermPoint ? OrbitPoint::herm_point(split_class_operator(l1, l2, e, cfg), cfg)
                                             : OrbitPoint::split_inert(split_class_root(l1, l2, e, cfg), cfg);
        }
        out.reps.push_back(r);
        out.labels.push_back(t.label);
        out.eps.push_back(1);
    }
    return out;
}

MatF cayley(int nu, const MatF& X)
{
    int n = X.rows();
    FieldConfig c = cfg_of(X(0, 0).p(), 2);
    MatF I = MatF::identity(n, c);
    MatF D = I - X;
    if (!invertible(D)) throw OnSingularDivisor("det(1 - X) = 0");
    return MatF(fint(c, -nu) * MatF((I + X) * D.inverse()));
}

MatF cayley_inv(int nu, const MatF& y)
{
    int n = y.rows();
    FieldConfig c = cfg_of(y(0, 0).p(), 2);
    MatF I = MatF::identity(n, c);
    MatF ny = fint(c, nu) * y;
    MatF D = ny - I;
    if (!invertible(D)) throw OnSingularDivisor("det(nu - y) = 0");
    return D.inverse() * (ny + I);
}

MatF lie_block(const MatF& X, const MatF& Y)
{
    int n = X.rows();
    MatF Z(2 * n, 2 * n, Padic::zero(X(0, 0).p()));
    Z.set_block(0, n, X);
    Z.set_block(n, 0, Y);
    return Z;
}

bool in_heart_locus(const MatF& x, int nu, bool lie_chart)
{
    if (!x.is_integral()) throw NotIntegral("heart locus is defined on integral points");
    if (!invertible(x) && !lie_chart) return false;
    if (!separable(x.char_poly())) return false;
    FieldConfig c = cfg_of(x(0, 0).p(), 2);
    MatF I = MatF::identity(x.rows(), c);
    MatF D = lie_chart ? MatF(I - x) : MatF(fint(c, nu) * I - x);
    Padic d = D.det();
    if (d.is_exact_zero()) return false;
    if (d.certified_nonzero()) return d.val() == 0;
    if (d.val_lower() == 0) throw PrecisionExhausted("heart test undetermined");
    return false;
}

Construction construct_representative(Space space, const OrbitInvariant& f, const FieldConfig& cfg)
{
    int n = f.degree();
    if (n < 1 || n > 2) throw std::invalid_argument("construct_representative: n must be 1 or 2");
    if (!separable(f.c)) throw Inseparable("target invariant is not separable");
    if (!f.c[0].certified_nonzero()) throw NotRegularSS("target has a zero root");
    Construction out;
    switch (space) {
    case Space::MirabolicGL: {
        MatF w = MatF::zero(1, n, cfg);
        w(0, n - 1) = fint(cfg, 1);
        out.point = OrbitPoint::mirabolic(companion(f, cfg), w, cfg);
        return out;
    }
    case Space::LinearLie: {
        MatF w = MatF::zero(1, n, cfg);
        w(0, n - 1) = fint(cfg, 1);
        out.point = OrbitPoint::linear_lie(companion(f, cfg), MatF::identity(n, cfg), w, cfg);
        return out;
    }
    case Space::HermPoint: {
        auto x = hermitian_with_char(f, cfg);
        if (!x) throw RepresentativeSearchFailed("no Hermitian solve in the search range");
        out.point = OrbitPoint::herm_point(*x, cfg);
        return out;
    }
    case Space::HermPair: {
        if (n == 1) {
            Padic a = -f.c[0];
            int v = a.val();
            int h = v >= 0 ? (v + 1) / 2 : -((-v) / 2);
            Padic x1 = unif(cfg, h);
            out.point = OrbitPoint::herm_pair(MatE::diag({eF(cfg, x1)}), MatE::diag({eF(cfg, a / x1)}), cfg);
            return out;
        }
        auto x = hermitian_with_char(f, cfg);
        if (!x) throw RepresentativeSearchFailed("no Hermitian solve in the search range");
        out.point = OrbitPoint::herm_pair(MatE::identity(2, cfg), *x, cfg);
        return out;
    }
    case Space::SplitInertLie: {
        // X*X = M with char(-M) = f, so det M = det(-M)(-1)^n = c0
        Padic c0 = f.c[0];
        if (c0.val() % 2 != 0) {
            out.no_match_proof = "v(det X*X) = 2 v(det X) is even but the target constant term has valuation " +
                                 std::to_string(c0.val());
            return out;
        }
        if (n == 1) {
            out.point = OrbitPoint::split_inert(MatE::diag({norm_preimage(c0, cfg)}), cfg);
            return out;
        }
        OrbitInvariant g{{f.c[0], -f.c[1], f.c[2]}}; // char(M)(T) = f(-T)
        auto M = hermitian_with_char(g, cfg);
        if (!M) throw RepresentativeSearchFailed("no Hermitian solve in the search range");
        out.point = OrbitPoint::split_inert(orthonormalize(*M, cfg).inverse(), cfg);
        return out;
    }
    }
    throw std::logic_error("construct_representative: bad space");
}

std::string serialize(const OrbitPoint& pt)
{
    std::ostringstream os;
    os << space_name(pt.space) << " " << pt.n;
    switch (pt.space) {
    case Space::MirabolicGL: os << " z=" << mat_str(pt.z) << " w=" << mat_str(pt.w); break;
    case Space::LinearLie:
        os << " X=" << mat_str(pt.X) << " Y=" << mat_str(pt.Y) << " w=" << mat_str(pt.w);
        break;
    case Space::HermPoint:
    case Space::SplitInertLie: os << " x1=" << mat_str(pt.x1); break;
    case Space::HermPair: os << " x1=" << mat_str(pt.x1) << " x2=" << mat_str(pt.x2); break;
    }
    return os.str();
}

OrbitPoint deserialize(const std::string& s, const FieldConfig& cfg)
{
    std::istringstream is(s);
    std::string tag;
    int n = 0;
    is >> tag >> n;
    OrbitPoint pt;
    pt.space = parse_space(tag);
    pt.n = n;
    pt.cfg = cfg;
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad slot '" + tok + "'");
        std::string name = tok.substr(0, eq);
        auto cells = split(tok.substr(eq + 1), ';');
        int rows = name == "w" ? 1 : n;
        int cols = n;
        if (static_cast<int>(cells.size()) != rows * cols) throw std::invalid_argument("slot size mismatch in '" + name + "'");
        if (name == "x1" || name == "x2") {
            MatE m = MatE::zero(rows, cols, cfg);
            for (int i = 0; i < rows * cols; ++i) {
                auto ab = split(cells[static_cast<size_t>(i)], '/');
                if (ab.size() != 2) throw std::invalid_argument("bad E entry");
                m(i / cols, i % cols) =
                    QuadExt(Padic::parse(cfg.p, ab[0], cfg.N), Padic::parse(cfg.p, ab[1], cfg.N), cfg.u);
            }
            (name == "x1" ? pt.x1 : pt.x2) = m;
        } else {
            MatF m = MatF::zero(rows, cols, cfg);
            for (int i = 0; i < rows * cols; ++i) m(i / cols, i % cols) = Padic::parse(cfg.p, cells[static_cast<size_t>(i)], cfg.N);
            if (name == "z") pt.z = m;
            else if (name == "w") pt.w = m;
            else if (name == "X") pt.X = m;
            else if (name == "Y") pt.Y = m;
            else throw std::invalid_argument("unknown slot '" + name + "'");
        }
    }
    return pt;
}

} // namespace hfl
