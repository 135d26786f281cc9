#include "hfl/symmetric.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>

namespace hfl {

// ---- Q(h) ----

Qh Qh::h_pow(long long q, int k)
{
    // h^{2m} = q^m, h^{2m+1} = q^m h
    int m = (k >= 0) ? k / 2 : -((-k + 1) / 2);
    Rat qm = rat_pow(Rat(q), m);
    if (k - 2 * m == 0) return {qm, 0, q};
    return {0, qm, q};
}

Qh operator*(const Qh& x, const Qh& y)
{
    long long q = x.q ? x.q : y.q;
    return {x.a * y.a + x.b * y.b * q, x.a * y.b + x.b * y.a, q};
}

Qh Qh::inv() const
{
    Rat nrm = a * a - b * b * q;
    if (nrm == 0) throw std::domain_error("division by zero in Q(h)");
    return {a / nrm, -b / nrm, q};
}

std::string Qh::str() const
{
    if (b == 0) return a.str();
    if (a == 0) return "(" + b.str() + ")h";
    return "(" + a.str() + " + (" + b.str() + ")h)";
}

namespace {

std::vector<int> unit_vec(int n, int i)
{
    std::vector<int> e(static_cast<size_t>(n), 0);
    e[static_cast<size_t>(i)] = 1;
    return e;
}

template <class R>
LPoly<R> permute(const LPoly<R>& p, const std::vector<int>& sigma)
{
    LPoly<R> r;
    for (const auto& [e, c] : p) {
        std::vector<int> f(e.size());
        for (size_t k = 0; k < e.size(); ++k) f[static_cast<size_t>(sigma[k])] = e[k];
        r.emplace(f, c);
    }
    return r;
}

int perm_sign(const std::vector<int>& s)
{
    int inv = 0;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (s[i] > s[j]) ++inv;
    return inv % 2 ? -1 : 1;
}

// exact division by (x_i - x_j), leading terms taken with x_i first, then x_j
template <class R>
LPoly<R> divide_by_difference(LPoly<R> a, int i, int j)
{
    LPoly<R> quo;
    if (a.empty()) return quo;
    int floor_i = INT_MAX;
    for (const auto& [e, c] : a) floor_i = std::min(floor_i, e[static_cast<size_t>(i)]);
    auto key_less = [&](const std::vector<int>& x, const std::vector<int>& y) {
        if (x[static_cast<size_t>(i)] != y[static_cast<size_t>(i)]) return x[static_cast<size_t>(i)] < y[static_cast<size_t>(i)];
        if (x[static_cast<size_t>(j)] != y[static_cast<size_t>(j)]) return x[static_cast<size_t>(j)] < y[static_cast<size_t>(j)];
        return x < y;
    };
    while (!a.empty()) {
        auto lead = a.begin();
        for (auto it = a.begin(); it != a.end(); ++it)
            if (key_less(lead->first, it->first)) lead = it;
        std::vector<int> m = lead->first;
        R c = lead->second;
        if (m[static_cast<size_t>(i)] <= floor_i) throw std::logic_error("inexact division by x_i - x_j");
        std::vector<int> mq = m;
        --mq[static_cast<size_t>(i)];
        add_term(quo, mq, c);
        a.erase(lead);
        std::vector<int> mj = mq;
        ++mj[static_cast<size_t>(j)];
        add_term(a, mj, c);
    }
    return quo;
}

Rat sign_pow(int k) { return (k % 2 == 0) ? Rat(1) : Rat(-1); }

int two_rho_pairing(const Signature& lam)
{
    int n = static_cast<int>(lam.size()), s = 0;
    for (int i = 1; i <= n; ++i) s += lam[static_cast<size_t>(i - 1)] * (n + 1 - 2 * i);
    return s;
}

std::mutex hl_mutex;

std::map<Signature, HLPoly>& hl_cache()
{
    static std::map<Signature, HLPoly> c;
    return c;
}

} // namespace

// ---- SymLaurent ----

SymLaurent SymLaurent::one(int n, long long q)
{
    return monomial(n, q, std::vector<int>(static_cast<size_t>(n), 0), Qh::rat(1, q));
}

SymLaurent SymLaurent::monomial(int n, long long q, const std::vector<int>& e, const Qh& coef)
{
    SymLaurent s{n, q, {}};
    add_term(s.c, e, coef);
    return s;
}

bool SymLaurent::is_symmetric() const
{
    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        if (permute(c, sigma) != c) return false;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return true;
}

LPoly<Qh> SymLaurent::orbit_reps() const
{
    LPoly<Qh> r;
    for (const auto& [e, v] : c)
        if (std::is_sorted(e.begin(), e.end(), std::greater<int>())) r.emplace(e, v);
    return r;
}

SymLaurent SymLaurent::squared_variables() const
{
    SymLaurent r{n, q, {}};
    for (const auto& [e, v] : c) {
        std::vector<int> f = e;
        for (int& x : f) x *= 2;
        r.c.emplace(f, v);
    }
    return r;
}

SymLaurent operator*(const Qh& s, const SymLaurent& y)
{
    SymLaurent r{y.n, y.q, {}};
    for (const auto& [e, v] : y.c) add_term(r.c, e, s * v);
    return r;
}

std::string SymLaurent::str() const
{
    if (c.empty()) return "0";
    // graded, then lexicographically decreasing
    std::vector<std::pair<std::vector<int>, Qh>> terms(c.begin(), c.end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
        int dx = std::accumulate(x.first.begin(), x.first.end(), 0);
        int dy = std::accumulate(y.first.begin(), y.first.end(), 0);
        if (dx != dy) return dx < dy;
        return x.first > y.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, v] : terms) {
        if (!first) os << " + ";
        first = false;
        os << v.str();
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0) os << "*Z" << (i + 1) << (e[i] != 1 ? "^" + std::to_string(e[i]) : "");
    }
    return os.str();
}

// ---- Hall–Littlewood ----

LPoly<Rat> HLPoly::at(const Rat& t) const
{
    LPoly<Rat> r;
    for (const auto& [e, v] : c) add_term(r, e, v.eval(t));
    return r;
}

std::vector<Signature> partitions(int n, int d)
{
    std::vector<Signature> out;
    Signature cur;
    std::function<void(int, int, int)> rec = [&](int left, int maxpart, int slots) {
        if (slots == 0) {
            if (left == 0) out.push_back(cur);
            return;
        }
        for (int x = std::min(left, maxpart); x >= 0; --x) {
            if (x * slots < left) break;
            cur.push_back(x);
            rec(left - x, x, slots - 1);
            cur.pop_back();
        }
    };
    rec(d, d, n);
    return out;
}

int n_of(const Signature& lam)
{
    int s = 0;
    for (size_t i = 0; i < lam.size(); ++i) s += static_cast<int>(i) * lam[i];
    return s;
}

QPoly hl_normalizer(const Signature& lam)
{
    QPoly w{Rat(1)};
    size_t i = 0;
    while (i < lam.size()) {
        size_t j = i;
        while (j < lam.size() && lam[j] == lam[i]) ++j;
        for (size_t k = 1; k <= j - i; ++k) {
            std::vector<Rat> f(k + 1, Rat(0));
            f[0] = 1;
            f[k] = -1;
            w = w * QPoly(f);
        }
        i = j;
    }
    return w;
}

HLPoly hall_littlewood(const Signature& lam0)
{
    if (!is_signature(lam0)) throw std::invalid_argument("hall_littlewood needs a weakly decreasing signature");
    auto& cache = hl_cache();
    {
        std::lock_guard lock(hl_mutex);
        if (auto it = cache.find(lam0); it != cache.end()) return it->second;
    }

    int n = static_cast<int>(lam0.size());
    int shift = lam0.back();
    Signature lam = lam0;
    for (int& x : lam) x -= shift;

    // x^λ Π_{i<j} (x_i - t x_j)
    LPoly<QPoly> f;
    f.emplace(std::vector<int>(lam.begin(), lam.end()), QPoly{Rat(1)});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            LPoly<QPoly> g;
            g.emplace(unit_vec(n, i), QPoly{Rat(1)});
            g.emplace(unit_vec(n, j), QPoly{Rat(0), Rat(-1)});
            f = poly_mul(f, g);
        }
    LPoly<QPoly> anti;
    std::vector<int> sigma(static_cast<size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        QPoly s{Rat(perm_sign(sigma))};
        for (const auto& [e, v] : permute(f, sigma)) add_term(anti, e, QPoly(s * v));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) anti = divide_by_difference(anti, i, j);

    // P_λ = (1-t)^n / w_λ(t) * Σ_σ σ(...), and w_λ(t) / (1-t)^n is a polynomial
    QPoly norm = hl_normalizer(lam);
    for (int k = 0; k < n; ++k) norm = QPoly::divmod(norm, QPoly{Rat(1), Rat(-1)}).first;
    HLPoly out{n, {}};
    for (const auto& [e, v] : anti) {
        auto [qq, r] = QPoly::divmod(v, norm);
        if (!r.is_zero()) throw std::logic_error("Hall-Littlewood normalizer does not divide");
        std::vector<int> f2 = e;
        for (int& x : f2) x += shift;
        add_term(out.c, f2, qq);
    }
    std::lock_guard lock(hl_mutex);
    cache.emplace(lam0, out);
    return out;
}

// ---- Hecke algebra ----

HeckeElement HeckeElement::basis(Group g, long long q, const Signature& lam)
{
    HeckeElement h{g, static_cast<int>(lam.size()), q, {}};
    h.add(lam, Qh::rat(1, q));
    return h;
}

HeckeElement HeckeElement::det_slice(int n, long long q, int d)
{
    HeckeElement h{Group::GL_F, n, q, {}};
    for (const auto& lam : partitions(n, d)) h.add(lam, Qh::rat(1, q));
    return h;
}

void HeckeElement::add(const Signature& lam, const Qh& coef)
{
    auto it = c.find(lam);
    if (it == c.end()) {
        if (!coef.is_zero()) c.emplace(lam, coef);
        return;
    }
    it->second = it->second + coef;
    if (it->second.is_zero()) c.erase(it);
}

HeckeElement operator+(HeckeElement x, const HeckeElement& y)
{
    for (const auto& [l, v] : y.c) x.add(l, v);
    return x;
}

HeckeElement operator*(const Qh& s, HeckeElement y)
{
    HeckeElement r{y.group, y.n, y.q, {}};
    for (const auto& [l, v] : y.c) r.add(l, s * v);
    return r;
}

std::string HeckeElement::str() const
{
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << it->second.str() << "*1[";
        for (size_t i = 0; i < it->first.size(); ++i) os << (i ? "," : "") << it->first[i];
        os << "]";
    }
    return os.str();
}

namespace {

// Satake image of a single basis element 1_{Kϖ^λK}
SymLaurent satake_basis(Group g, long long q, const Signature& lam)
{
    int n = static_cast<int>(lam.size());
    int e = (g == Group::GL_E) ? 2 : 1; // q_G = h^{2e}
    Rat tG = Rat(1) / rat_pow(Rat(q), e);
    Qh scale = Qh::h_pow(q, e * two_rho_pairing(lam));
    SymLaurent s{n, q, {}};
    for (const auto& [ex, v] : hall_littlewood(lam).at(tG)) add_term(s.c, ex, scale * Qh::rat(v, q));
    return s;
}

} // namespace

SymLaurent satake(const HeckeElement& f)
{
    SymLaurent s{f.n, f.q, {}};
    for (const auto& [lam, v] : f.c) s = s + v * satake_basis(f.group, f.q, lam);
    return s;
}

HeckeElement inverse_satake(const SymLaurent& P0, Group g)
{
    if (!P0.is_symmetric()) throw NotInImage("polynomial is not symmetric");
    SymLaurent P = P0;
    HeckeElement f{g, P.n, P.q, {}};
    int e = (g == Group::GL_E) ? 2 : 1;
    for (int guard = 0; !P.c.empty(); ++guard) {
        if (guard > 100000) throw NotInImage("inverse Satake did not terminate");
        auto lead = std::prev(P.c.end()); // lexicographically largest exponent
        Signature lam = lead->first;
        if (!is_signature(lam)) throw NotInImage("leading exponent not dominant");
        Qh coef = lead->second * Qh::h_pow(P.q, -e * two_rho_pairing(lam));
        f.add(lam, coef);
        P = P - coef * satake_basis(g, P.q, lam);
    }
    return f;
}

HeckeElement hecke_convolve(const HeckeElement& f, const HeckeElement& g)
{
    if (f.group != g.group || f.n != g.n) throw std::invalid_argument("Hecke elements from different algebras");
    return inverse_satake(satake(f) * satake(g), f.group);
}

HeckeElement base_change(const HeckeElement& f)
{
    if (f.group != Group::GL_E) throw std::invalid_argument("base change starts from GL_n(E)");
    return inverse_satake(satake(f).squared_variables(), Group::GL_F);
}

// ---- Hermitian module ----

HermModuleElement HermModuleElement::orbit(const Signature& lam, const Rat& coef)
{
    HermModuleElement h{static_cast<int>(lam.size()), {}};
    h.add(lam, coef);
    return h;
}

HermModuleElement HermModuleElement::det_slice(int n, int d, const Rat& coef)
{
    HermModuleElement h{n, {}};
    for (const auto& lam : partitions(n, d)) h.add(lam, coef);
    return h;
}

void HermModuleElement::add(const Signature& lam, const Rat& coef)
{
    auto it = c.find(lam);
    if (it == c.end()) {
        if (coef != 0) c.emplace(lam, coef);
        return;
    }
    it->second += coef;
    if (it->second == 0) c.erase(it);
}

Rat HermModuleElement::value(const Signature& lam) const
{
    auto it = c.find(lam);
    return it == c.end() ? Rat(0) : it->second;
}

bool HermModuleElement::filtration_span() const
{
    try {
        filtration_coeffs();
        return true;
    } catch (const OutsideFiltrationSpan&) {
        return false;
    }
}

std::map<int, Rat> HermModuleElement::filtration_coeffs() const
{
    std::map<int, Rat> out;
    for (const auto& [lam, v] : c) {
        if (lam.back() < 0) throw OutsideFiltrationSpan("orbit with a negative part");
        int d = size_of(lam);
        if (out.count(d)) continue;
        for (const auto& mu : partitions(n, d))
            if (value(mu) != v) throw OutsideFiltrationSpan("not constant on the determinant slice");
        out[d] = v;
    }
    return out;
}

HermModuleElement operator+(HermModuleElement x, const HermModuleElement& y)
{
    for (const auto& [l, v] : y.c) x.add(l, v);
    return x;
}

HermModuleElement operator*(const Rat& s, HermModuleElement y)
{
    HermModuleElement r{y.n, {}};
    for (const auto& [l, v] : y.c) r.add(l, s * v);
    return r;
}

std::string HermModuleElement::str() const
{
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    if (filtration_span()) {
        for (const auto& [d, v] : filtration_coeffs()) {
            if (!first) os << " + ";
            first = false;
            os << v.str() << "*Phi_" << d;
        }
        return os.str();
    }
    for (const auto& [lam, v] : c) {
        if (!first) os << " + ";
        first = false;
        os << v.str() << "*1[";
        for (size_t i = 0; i < lam.size(); ++i) os << (i ? "," : "") << lam[i];
        os << "]";
    }
    return os.str();
}

HeckeElement hironaka_filtration(const HermModuleElement& phi, long long q)
{
    HeckeElement h{Group::GL_F, phi.n, q, {}};
    for (const auto& [d, v] : phi.filtration_coeffs())
        h = h + Qh::rat(v * sign_pow(phi.n * d), q) * HeckeElement::det_slice(phi.n, q, d);
    return h;
}

HermModuleElement hironaka_product(const HermModuleElement& phi, const HermModuleElement& psi, long long q)
{
    int n = phi.n;
    HeckeElement h = hecke_convolve(hironaka_filtration(phi, q), hironaka_filtration(psi, q));
    HermModuleElement out{n, {}};
    std::map<int, Qh> slice;
    for (const auto& [lam, v] : h.c) {
        if (lam.back() < 0) throw NotRepresentable("convolution leaves integral matrices");
        int d = size_of(lam);
        if (slice.count(d)) continue;
        for (const auto& mu : partitions(n, d)) {
            auto it = h.c.find(mu);
            if (it == h.c.end() || it->second != v)
                throw NotRepresentable("convolution is not a combination of the determinant slices 1_d");
        }
        slice[d] = v;
    }
    for (const auto& [d, v] : slice) {
        if (v.b != 0) throw NotRepresentable("irrational slice coefficient");
        out = out + HermModuleElement::det_slice(n, d, v.a * sign_pow(n * d));
    }
    return out;
}

// ---- generating series ----

bool check_hl_generating_series(int n, int degree_cut)
{
    LPoly<QPoly> lhs;
    for (int d = 0; d <= degree_cut; ++d)
        for (const auto& lam : partitions(n, d)) {
            std::vector<Rat> tp(static_cast<size_t>(n_of(lam)) + 1, Rat(0));
            tp.back() = 1;
            QPoly w(tp);
            for (const auto& [e, v] : hall_littlewood(lam).c) add_term(lhs, e, QPoly(w * v));
        }
    LPoly<QPoly> rhs;
    std::vector<int> e(static_cast<size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == n) {
            rhs.emplace(e, QPoly{Rat(1)});
            return;
        }
        for (int x = 0; x <= left; ++x) {
            e[static_cast<size_t>(i)] = x;
            rec(i + 1, left - x);
        }
    };
    rec(0, degree_cut);
    return lhs == rhs;
}

namespace {

// complete homogeneous polynomial h_d in n variables, as exponent vectors
LPoly<Rat> complete_homogeneous(int n, int d)
{
    LPoly<Rat> r;
    std::vector<int> e(static_cast<size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == n - 1) {
            e[static_cast<size_t>(i)] = left;
            r.emplace(e, Rat(1));
            return;
        }
        for (int x = 0; x <= left; ++x) {
            e[static_cast<size_t>(i)] = x;
            rec(i + 1, left - x);
        }
    };
    rec(0, d);
    return r;
}

} // namespace

bool check_eps_generating_identity(int n, int degree_cut, bool alternating)
{
    std::vector<LPoly<Rat>> T;
    for (int d = 0; d <= degree_cut; ++d) {
        LPoly<Rat> t;
        for (const auto& [e, v] : complete_homogeneous(n, d)) t.emplace(e, v * sign_pow(n * d));
        T.push_back(t);
    }
    LPoly<Rat> lhs;
    for (int d = 0; d <= degree_cut; ++d)
        for (int i = 0; i <= d; ++i) {
            LPoly<Rat> pr = poly_mul(T[static_cast<size_t>(i)], T[static_cast<size_t>(d - i)]);
            Rat s = alternating ? sign_pow(i) : Rat(1);
            for (const auto& [e, v] : pr) add_term(lhs, e, Rat(s * v));
        }
    // Π 1/((1 - X_i)(1 + X_i)) = Σ_k h_k(X^2)
    LPoly<Rat> rhs;
    for (int k = 0; 2 * k <= degree_cut; ++k)
        for (const auto& [e, v] : complete_homogeneous(n, k)) {
            std::vector<int> f = e;
            for (int& x : f) x *= 2;
            add_term(rhs, f, v);
        }
    return lhs == rhs;
}

UnitImage sf_unit_image(int n, long long q, int degree_cut, bool twisted)
{
    UnitImage out;
    out.series = SymLaurent{n, q, {}};
    Rat qn = rat_pow(Rat(q), n - 1);
    for (int k = 0; 2 * k <= degree_cut; ++k)
        for (const auto& [e, v] : complete_homogeneous(n, k)) {
            std::vector<int> f = e;
            for (int& x : f) x *= 2;
            add_term(out.series.c, f, Qh::rat(rat_pow(qn, k) * v, q));
        }
    SymLaurent a{n, q, {}}, b{n, q, {}};
    for (int d = 0; d <= degree_cut; ++d) {
        SymLaurent s = satake(HeckeElement::det_slice(n, q, d));
        a = a + s;
        b = b + Qh::rat(twisted ? sign_pow(d) : Rat(1), q) * s;
    }
    out.matches = (a * b).truncated(degree_cut) == out.series;
    return out;
}

} // namespace hfl
