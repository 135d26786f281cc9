#include "hfl/lattice.hpp"

#include <sstream>

namespace hfl {

namespace {

Padic exact_int(int p, u64 x)
{
    if (x == 0) return Padic::zero(p);
    return Padic::from_parts(p, 0, x, precision_cap(p));
}

template <class S>
S unif_like(const S& x, int a);
template <>
Padic unif_like<Padic>(const Padic& x, int a) { return Padic::from_parts(x.p(), a, 1, precision_cap(x.p())); }
template <>
QuadExt unif_like<QuadExt>(const QuadExt& x, int a)
{
    return QuadExt::from_F(Padic::from_parts(x.p(), a, 1, precision_cap(x.p())), x.u());
}

template <class S>
S zero_like(const S& x);
template <>
Padic zero_like<Padic>(const Padic& x) { return Padic::zero(x.p()); }
template <>
QuadExt zero_like<QuadExt>(const QuadExt& x) { return QuadExt::from_F(Padic::zero(x.p()), x.u()); }

// unit part of a certified nonzero scalar: x / ϖ^{v(x)}
template <class S>
S unit_part(const S& x) { return x * unif_like(x, -val_of(x)); }

std::string scalar_key(const Padic& x)
{
    if (x.is_exact_zero()) return "0";
    return std::to_string(x.val()) + ":" + std::to_string(x.unit());
}
std::string scalar_key(const QuadExt& x) { return scalar_key(x.a()) + "+" + scalar_key(x.b()); }

// digits of the off-diagonal entry: one residue for O_F, a pair for O_E
template <class S>
struct Digits;
template <>
struct Digits<Padic> {
    int p;
    u64 x = 0;
    u64 count() const { return static_cast<u64>(p); }
    void set(int j, u64 d, u64 base) { x = x % base + d * base; (void)j; }
    Padic partial(int j, const Padic&) const { return Padic::from_residue(p, x, j); }
    Padic full(const Padic&) const { return exact_int(p, x); }
};
template <>
struct Digits<QuadExt> {
    int p;
    u64 x = 0, y = 0;
    u64 count() const { return static_cast<u64>(p) * static_cast<u64>(p); }
    void set(int j, u64 d, u64 base)
    {
        (void)j;
        x = x % base + (d % static_cast<u64>(p)) * base;
        y = y % base + (d / static_cast<u64>(p)) * base;
    }
    QuadExt partial(int j, const QuadExt& t) const
    {
        return {Padic::from_residue(p, x, j), Padic::from_residue(p, y, j), t.u()};
    }
    QuadExt full(const QuadExt& t) const { return {exact_int(p, x), exact_int(p, y), t.u()}; }
};

template <class S>
bool prune_ok(const LatticePrune<S>& prune, const Mat<S>& b)
{
    if (!prune) return true;
    try {
        return prune(b);
    } catch (const PrecisionExhausted&) {
        return true;
    }
}

} // namespace

Padic reduce_mod(const Padic& x, int a)
{
    int p = x.p();
    if (x.is_exact_zero()) return x;
    if (x.is_fuzzy()) {
        if (x.abs_prec() >= a) return Padic::zero(p);
        throw PrecisionExhausted("entry not known modulo the lattice");
    }
    if (x.val() >= a) return Padic::zero(p);
    if (x.abs_prec() < a) throw PrecisionExhausted("entry not known modulo the lattice");
    u64 r = x.unit() % ppow(p, a - x.val());
    return Padic::from_parts(p, x.val(), r, precision_cap(p));
}

QuadExt reduce_mod(const QuadExt& x, int a) { return {reduce_mod(x.a(), a), reduce_mod(x.b(), a), x.u()}; }

template <class S>
std::string LatticeBasis<S>::key() const
{
    std::ostringstream os;
    int n = basis.rows();
    for (int a : exps) os << a << ",";
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) os << "|" << scalar_key(basis(i, j));
    return os.str();
}

template <class S>
LatticeBasis<S> hnf(const Mat<S>& gens)
{
    int n = gens.rows(), m = gens.cols();
    Mat<S> G = gens;
    std::vector<int> free_cols;
    for (int j = 0; j < m; ++j) free_cols.push_back(j);
    std::vector<int> pivot(static_cast<size_t>(n), -1);
    std::vector<int> exps(static_cast<size_t>(n), 0);
    const S z = zero_like(G(0, 0));

    for (int i = n - 1; i >= 0; --i) {
        int best = -1, bv = 0;
        for (int j : free_cols) {
            const S& e = G(i, j);
            if (nonzero(e) && (best < 0 || val_of(e) < bv)) {
                best = j;
                bv = val_of(e);
            }
        }
        for (int j : free_cols) {
            const S& e = G(i, j);
            if (!nonzero(e) && !exact_zero(e) && (best < 0 || val_lower_of(e) < bv))
                throw PrecisionExhausted("HNF pivot undetermined");
        }
        if (best < 0) throw SingularInput("generators do not span a full lattice");
        S ui = unit_part(G(i, best)).inv();
        for (int r = 0; r < n; ++r) G(r, best) = ui * G(r, best);
        G(i, best) = unif_like(z, bv);
        for (int j : free_cols) {
            if (j == best || exact_zero(G(i, j))) continue;
            S q = G(i, j) * unif_like(z, -bv);
            for (int r = 0; r < n; ++r) G(r, j) = G(r, j) - q * G(r, best);
            G(i, j) = z;
        }
        free_cols.erase(std::find(free_cols.begin(), free_cols.end(), best));
        pivot[static_cast<size_t>(i)] = best;
        exps[static_cast<size_t>(i)] = bv;
    }

    Mat<S> B(n, n, z);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < n; ++r) B(r, i) = r > i ? z : G(r, pivot[static_cast<size_t>(i)]);
    for (int i = 0; i < n; ++i) B(i, i) = unif_like(z, exps[static_cast<size_t>(i)]);
    for (int i = 1; i < n; ++i)
        for (int r = i - 1; r >= 0; --r) {
            int a = exps[static_cast<size_t>(r)];
            S rem = reduce_mod(B(r, i), a);
            S q = (B(r, i) - rem) * unif_like(z, -a);
            for (int k = 0; k < r; ++k) B(k, i) = B(k, i) - q * B(k, r);
            B(r, i) = rem;
        }
    return {B, exps};
}

template <class S>
int contains_partial(const Mat<S>& a, const Mat<S>& b)
{
    S d = a.det();
    if (!nonzero(d)) throw PrecisionExhausted("basis determinant undetermined");
    return (a.adjugate() * b).entries_at_least_partial(val_of(d));
}

template <class S>
bool contains(const Mat<S>& a, const Mat<S>& b)
{
    int r = contains_partial(a, b);
    if (r < 0) throw PrecisionExhausted("containment undetermined");
    return r == 1;
}

template <class S>
void for_each_sublattice(const FieldConfig& cfg, int n, int depth, int idx_min, int idx_max,
                         const LatticePrune<S>& prune, const LatticeVisit<S>& visit)
{
    const S one = make_scalar<S>(cfg, 1);
    idx_min = std::max(idx_min, 0);
    if (n == 1) {
        for (int a = idx_min; a <= std::min(depth, idx_max); ++a) {
            Mat<S> B(1, 1, unif_like(one, a));
            if (prune_ok(prune, B)) visit(B);
        }
        return;
    }
    if (n != 2) throw InvalidConfig("sublattice enumeration supports n <= 2");
    for (int a1 = 0; a1 <= depth; ++a1)
        for (int a2 = 0; a2 <= depth; ++a2) {
            int idx = a1 + a2;
            if (idx < idx_min || idx > idx_max) continue;
            // ϖ^depth e2 ∈ L forces the digits of c below a1 + a2 - depth to vanish
            int zero_below = std::max(0, idx - depth);
            Mat<S> B(2, 2, zero_like(one));
            B(0, 0) = unif_like(one, a1);
            B(1, 1) = unif_like(one, a2);
            Digits<S> dg{cfg.p};
            std::function<void(int)> rec = [&](int j) {
                if (j == a1) {
                    B(0, 1) = dg.full(one);
                    if (prune_ok(prune, B)) visit(B);
                    return;
                }
                u64 base = ppow(cfg.p, j);
                u64 cnt = j < zero_below ? 1 : dg.count();
                Digits<S> saved = dg;
                for (u64 d = 0; d < cnt; ++d) {
                    dg = saved;
                    dg.set(j, d, base);
                    B(0, 1) = dg.partial(j + 1, one);
                    if (!prune_ok(prune, B)) continue;
                    rec(j + 1);
                }
            };
            rec(0);
        }
}

template <class S>
void for_each_between(const FieldConfig& cfg, const Mat<S>& hi, const Mat<S>& lo,
                      const LatticePrune<S>& prune, const LatticeVisit<S>& visit)
{
    Mat<S> Y = hi.inverse() * lo;
    if (!Y.is_integral()) return;
    Signature ed = cartan_coordinate(Y);
    int depth = ed.front();
    int total = size_of(ed);
    for_each_sublattice<S>(
        cfg, hi.rows(), depth, 0, total,
        [&](const Mat<S>& H) {
            int c = contains_partial(H, Y);
            if (c == 0) return false;
            return prune_ok(prune, Mat<S>(hi * H));
        },
        [&](const Mat<S>& H) {
            if (!contains(H, Y)) return;
            visit(hi * H);
        });
}

StableLatticeList enumerate_stable_lattices(const MatF& A, const MatF& w, int v_max, const FieldConfig& cfg)
{
    int n = A.rows();
    MatF C = krylov_rows(w, A);
    Padic dc = C.det();
    if (dc.is_exact_zero()) throw NotStronglyRegular("Krylov matrix of (A, w) is singular");
    if (!dc.certified_nonzero()) {
        // vanishing to the full precision of the entries counts as singular
        int inp = INT_MAX;
        for (const auto& e : C.data())
            if (!e.is_exact_zero()) inp = std::min(inp, e.abs_prec());
        if (dc.abs_prec() >= inp) throw NotStronglyRegular("Krylov matrix of (A, w) is singular");
        throw PrecisionExhausted("strong regularity undetermined");
    }
    MatF Ci = C.inverse();
    MatF Ap = C * A * Ci;
    StableLatticeList out;
    out.v_min = -dc.val();
    if (!Ap.is_integral()) return out;
    bool invertible = A.det().certified_nonzero();
    for_each_sublattice<Padic>(
        cfg, n, v_max, 0, v_max,
        [&](const MatF& H) { return contains_partial(H, MatF(Ap * H)) != 0; },
        [&](const MatF& H) {
            MatF AH = Ap * H;
            if (!contains(H, AH)) return;
            StableLattice s;
            s.lattice = hnf(MatF(Ci * H));
            s.v = out.v_min + val_of(H.det());
            s.eta = (s.v % 2 == 0) ? 1 : -1;
            if (invertible) s.relpos = cartan_coordinate(MatF(H.inverse() * AH));
            out.lattices.push_back(std::move(s));
        });
    return out;
}

template struct LatticeBasis<Padic>;
template struct LatticeBasis<QuadExt>;
template LatticeBasis<Padic> hnf(const MatF&);
template LatticeBasis<QuadExt> hnf(const MatE&);
template int contains_partial(const MatF&, const MatF&);
template int contains_partial(const MatE&, const MatE&);
template bool contains(const MatF&, const MatF&);
template bool contains(const MatE&, const MatE&);
template void for_each_sublattice<Padic>(const FieldConfig&, int, int, int, int, const LatticePrune<Padic>&,
                                         const LatticeVisit<Padic>&);
template void for_each_sublattice<QuadExt>(const FieldConfig&, int, int, int, int, const LatticePrune<QuadExt>&,
                                           const LatticeVisit<QuadExt>&);
template void for_each_between<Padic>(const FieldConfig&, const MatF&, const MatF&, const LatticePrune<Padic>&,
                                      const LatticeVisit<Padic>&);
template void for_each_between<QuadExt>(const FieldConfig&, const MatE&, const MatE&, const LatticePrune<QuadExt>&,
                                        const LatticeVisit<QuadExt>&);

} // namespace hfl
