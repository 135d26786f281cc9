#include "hfl/local_fields.hpp"

#include <algorithm>
#include <array>
#include <climits>

namespace hfl {

namespace {

constexpr int kBig = INT_MAX / 4;

u64 powmod(u64 b, u64 e, u64 m)
{
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

u64 reduce_signed(long long x, u64 m)
{
    long long r = static_cast<long long>(static_cast<__int128>(x) % static_cast<__int128>(m));
    if (r < 0) r += static_cast<long long>(m);
    return static_cast<u64>(r);
}

u64 reduce_big(const Int& x, u64 m)
{
    Int r = x % Int(m);
    if (r < 0) r += Int(m);
    return static_cast<u64>(r);
}

} // namespace

namespace {

int compute_cap(int p)
{
    int k = 0;
    u128 x = 1;
    while (x * static_cast<u128>(p) < (static_cast<u128>(1) << 62)) {
        x *= static_cast<u128>(p);
        ++k;
    }
    return k;
}

// caps and powers for small primes, filled once
constexpr int kTableP = 128;

struct PowTable {
    std::array<int, kTableP> cap{};
    std::array<std::array<u64, 64>, kTableP> pw{};
    PowTable()
    {
        for (int p = 2; p < kTableP; ++p) {
            cap[p] = compute_cap(p);
            u64 r = 1;
            for (int k = 0; k < 64; ++k) {
                pw[p][k] = r;
                r *= static_cast<u64>(p);
            }
        }
    }
};

const PowTable& table()
{
    static const PowTable t;
    return t;
}

} // namespace

int precision_cap(int p)
{
    if (p >= 2 && p < kTableP) return table().cap[p];
    return compute_cap(p);
}

u64 ppow(int p, int k)
{
    if (p >= 2 && p < kTableP && k >= 0 && k < 64) return table().pw[p][k];
    u64 r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<u64>(p);
    return r;
}

u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 invmod(u64 a, u64 m)
{
    __int128 t = 0, nt = 1, r = m, nr = a % m;
    while (nr != 0) {
        __int128 q = r / nr;
        __int128 tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw ZeroInput("residue not invertible");
    if (t < 0) t += m;
    return static_cast<u64>(t);
}

bool is_odd_prime(long long p)
{
    if (p < 3 || p % 2 == 0) return false;
    for (long long d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

int legendre(long long a, int p)
{
    u64 x = reduce_signed(a, static_cast<u64>(p));
    if (x == 0) return 0;
    return powmod(x, static_cast<u64>(p - 1) / 2, static_cast<u64>(p)) == 1 ? 1 : -1;
}

FieldConfig FieldConfig::make(int p, int N)
{
    FieldConfig c;
    c.p = p;
    c.N = N;
    c.u = 2;
    if (is_odd_prime(p))
        while (legendre(c.u, p) != -1) ++c.u;
    c.validate();
    return c;
}

void FieldConfig::validate() const
{
    if (!is_odd_prime(p)) throw InvalidConfig("p must be an odd prime, got " + std::to_string(p));
    if (N < 4) throw InvalidConfig("precision must be at least 4");
    if (N > precision_cap(p))
        throw InvalidConfig("precision " + std::to_string(N) + " exceeds capacity " +
                            std::to_string(precision_cap(p)) + " for p=" + std::to_string(p));
    if (legendre(u, p) != -1) throw InvalidConfig("u must be a quadratic non-residue mod p");
}

// ---- Padic ----

Padic Padic::fuzzy(int p, int abs_prec)
{
    Padic r;
    r.p_ = p;
    r.kind_ = Kind::Fuzzy;
    r.v_ = abs_prec;
    return r;
}

Padic Padic::from_parts(int p, int v, u64 unit, int rel)
{
    rel = std::min(rel, precision_cap(p));
    if (rel <= 0) return fuzzy(p, v);
    u64 P = static_cast<u64>(p);
    unit %= ppow(p, rel);
    if (unit == 0) return fuzzy(p, v + rel);
    while (unit % P == 0) {
        unit /= P;
        ++v;
        --rel;
    }
    Padic r;
    r.p_ = p;
    r.kind_ = Kind::Unit;
    r.v_ = v;
    r.rel_ = rel;
    r.u_ = unit % ppow(p, rel);
    return r;
}

Padic Padic::from_int(int p, long long x, int rel)
{
    if (x == 0) return zero(p);
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    rel = std::min(rel, precision_cap(p));
    return from_parts(p, v, reduce_signed(x, ppow(p, rel)), rel);
}

Padic Padic::from_big(int p, const Int& x0, int rel)
{
    if (x0 == 0) return zero(p);
    Int x = x0;
    int v = 0;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    rel = std::min(rel, precision_cap(p));
    return from_parts(p, v, reduce_big(x, ppow(p, rel)), rel);
}

Padic Padic::from_rat(int p, const Rat& x, int rel)
{
    if (x == 0) return zero(p);
    return from_big(p, numerator(x), rel) / from_big(p, denominator(x), rel);
}

Padic Padic::from_residue(int p, u64 x, int A)
{
    x %= ppow(p, A);
    if (x == 0) return fuzzy(p, A);
    return from_parts(p, 0, x, A);
}

bool Padic::is_zero() const
{
    if (kind_ == Kind::Zero) return true;
    if (kind_ == Kind::Unit) return false;
    throw PrecisionExhausted("zero test on value known only mod p^" + std::to_string(v_));
}

int Padic::val() const
{
    if (kind_ == Kind::Unit) return v_;
    if (kind_ == Kind::Zero) throw ZeroInput("valuation of zero");
    throw PrecisionExhausted("valuation of value known only mod p^" + std::to_string(v_));
}

int Padic::abs_prec() const
{
    switch (kind_) {
    case Kind::Zero: return kBig;
    case Kind::Fuzzy: return v_;
    default: return v_ + rel_;
    }
}

int Padic::val_lower() const
{
    return kind_ == Kind::Zero ? kBig : v_;
}

Padic Padic::operator-() const
{
    if (kind_ != Kind::Unit) return *this;
    Padic r = *this;
    u64 m = ppow(p_, rel_);
    r.u_ = (m - u_) % m;
    return r;
}

Padic operator+(const Padic& a, const Padic& b)
{
    if (a.is_exact_zero()) return b.p_ ? b : a;
    if (b.is_exact_zero()) return a;
    int p = a.p_;
    int A = std::min(a.abs_prec(), b.abs_prec());
    int m = std::min(a.val_lower(), b.val_lower());
    if (A <= m) return Padic::fuzzy(p, A);
    int k = A - m;
    u64 M = ppow(p, k);
    u64 x = 0;
    for (const Padic* t : {&a, &b}) {
        if (t->kind_ != Padic::Kind::Unit) continue;
        int s = t->v_ - m;
        if (s >= k) continue;
        x = (x + mulmod(t->u_ % M, ppow(p, s), M)) % M;
    }
    if (x == 0) return Padic::fuzzy(p, A);
    return Padic::from_parts(p, m, x, k);
}

Padic operator*(const Padic& a, const Padic& b)
{
    if (a.is_exact_zero() || b.is_exact_zero()) return Padic::zero(a.p_ ? a.p_ : b.p_);
    int p = a.p_;
    if (a.is_fuzzy() || b.is_fuzzy()) return Padic::fuzzy(p, a.val_lower() + b.val_lower());
    int rel = std::min(a.rel_, b.rel_);
    u64 M = ppow(p, rel);
    Padic r;
    r.p_ = p;
    r.kind_ = Padic::Kind::Unit;
    r.v_ = a.v_ + b.v_;
    r.rel_ = rel;
    r.u_ = mulmod(a.u_ % M, b.u_ % M, M);
    return r;
}

Padic Padic::inv() const
{
    if (kind_ == Kind::Zero) throw ZeroInput("inverse of zero");
    if (kind_ == Kind::Fuzzy) throw PrecisionExhausted("inverse of value known only mod p^" + std::to_string(v_));
    Padic r = *this;
    r.v_ = -v_;
    r.u_ = invmod(u_, ppow(p_, rel_));
    return r;
}

Padic Padic::shift(int k) const
{
    if (kind_ == Kind::Zero) return *this;
    Padic r = *this;
    r.v_ += k;
    return r;
}

Padic Padic::truncate(int rel) const
{
    if (kind_ != Kind::Unit || rel >= rel_) return *this;
    return from_parts(p_, v_, u_, rel);
}

bool operator==(const Padic& a, const Padic& b)
{
    return !(a - b).certified_nonzero();
}

u64 Padic::residue(int A) const
{
    if (kind_ == Kind::Zero) return 0;
    if (kind_ == Kind::Fuzzy) {
        if (v_ >= A) return 0;
        throw PrecisionExhausted("residue mod p^" + std::to_string(A) + " of value known mod p^" + std::to_string(v_));
    }
    if (v_ < 0) throw NotIntegral("residue of non-integral value");
    if (v_ >= A) return 0;
    if (v_ + rel_ < A) throw PrecisionExhausted("residue mod p^" + std::to_string(A) + " exceeds precision");
    u64 M = ppow(p_, A - v_);
    return (u_ % M) * ppow(p_, v_);
}

std::string Padic::str() const
{
    if (kind_ == Kind::Zero) return "0";
    if (kind_ == Kind::Fuzzy) return "O(" + std::to_string(v_) + ")";
    std::string s = std::to_string(v_) + ":";
    u64 x = u_;
    for (int i = 0; i < rel_; ++i) {
        int d = static_cast<int>(x % static_cast<u64>(p_));
        s += static_cast<char>(d < 10 ? '0' + d : 'a' + d - 10);
        x /= static_cast<u64>(p_);
    }
    return s;
}

Padic Padic::parse(int p, const std::string& s, int rel)
{
    if (s == "0") return zero(p);
    if (s.size() > 3 && s.rfind("O(", 0) == 0 && s.back() == ')')
        return fuzzy(p, std::stoi(s.substr(2, s.size() - 3)));
    auto colon = s.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad scalar '" + s + "'");
    int v = std::stoi(s.substr(0, colon));
    std::string digits = s.substr(colon + 1);
    int n = std::min<int>(static_cast<int>(digits.size()), precision_cap(p));
    u64 x = 0;
    for (int i = n - 1; i >= 0; --i) {
        char c = digits[static_cast<size_t>(i)];
        int d = c >= 'a' ? c - 'a' + 10 : c - '0';
        if (d < 0 || d >= p) throw std::invalid_argument("bad digit in '" + s + "'");
        x = x * static_cast<u64>(p) + static_cast<u64>(d);
    }
    if (x % static_cast<u64>(p) == 0) throw std::invalid_argument("unit digits of '" + s + "' not a unit");
    return from_parts(p, v, x, std::min(n, rel));
}

int eta(const Padic& x)
{
    return x.val() % 2 == 0 ? 1 : -1;
}

bool is_square(const Padic& x)
{
    int v = x.val();
    return v % 2 == 0 && legendre(static_cast<long long>(x.unit_digit()), x.p()) == 1;
}

Padic sqrt(const Padic& x)
{
    if (!is_square(x)) throw NotInImage("not a square in F");
    int p = x.p();
    u64 P = static_cast<u64>(p);
    u64 M = ppow(p, x.rel());
    u64 u = x.unit();
    u64 r = 1;
    while (mulmod(r, r, P) != u % P) ++r;
    // Newton: r <- (r + u/r)/2, doubling correct digits each step
    u64 half = invmod(2, M);
    for (int good = 1; good < x.rel(); good *= 2)
        r = mulmod((r + mulmod(u, invmod(r, M), M)) % M, half, M);
    return Padic::from_parts(p, x.val() / 2, r, x.rel());
}

// ---- QuadExt ----

QuadExt QuadExt::sqrt_u(const FieldConfig& c)
{
    return {Padic::zero(c.p), Padic::from_int(c.p, 1, c.N), c.u};
}

Padic QuadExt::norm() const
{
    int pp = p();
    return a_ * a_ - Padic::from_int(pp, u_, precision_cap(pp)) * b_ * b_;
}

Padic QuadExt::trace() const
{
    return a_ + a_;
}

bool QuadExt::in_F() const
{
    return !b_.certified_nonzero();
}

bool QuadExt::is_zero() const
{
    if (certified_nonzero()) return false;
    if (a_.is_exact_zero() && b_.is_exact_zero()) return true;
    throw PrecisionExhausted("zero test in E at exhausted precision");
}

bool QuadExt::certified_nonzero() const
{
    return a_.certified_nonzero() || b_.certified_nonzero();
}

int QuadExt::val() const
{
    if (!certified_nonzero()) {
        if (a_.is_exact_zero() && b_.is_exact_zero()) throw ZeroInput("valuation of zero in E");
        throw PrecisionExhausted("valuation in E at exhausted precision");
    }
    int m = kBig;
    for (const Padic* t : {&a_, &b_})
        if (t->certified_nonzero()) m = std::min(m, t->val());
    for (const Padic* t : {&a_, &b_})
        if (t->is_fuzzy() && t->abs_prec() <= m) throw PrecisionExhausted("valuation in E at exhausted precision");
    return m;
}

int QuadExt::val_lower() const
{
    return std::min(a_.val_lower(), b_.val_lower());
}

int QuadExt::abs_prec() const
{
    return std::min(a_.abs_prec(), b_.abs_prec());
}

QuadExt operator+(const QuadExt& x, const QuadExt& y)
{
    return {x.a_ + y.a_, x.b_ + y.b_, x.u_ ? x.u_ : y.u_};
}

QuadExt operator*(const QuadExt& x, const QuadExt& y)
{
    long long u = x.u_ ? x.u_ : y.u_;
    int pp = x.p() ? x.p() : y.p();
    Padic U = Padic::from_int(pp, u, precision_cap(pp));
    return {x.a_ * y.a_ + U * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, u};
}

QuadExt QuadExt::inv() const
{
    Padic n = norm();
    if (!n.certified_nonzero()) {
        if (a_.is_exact_zero() && b_.is_exact_zero()) throw ZeroInput("inverse of zero in E");
        throw PrecisionExhausted("inverse in E at exhausted precision");
    }
    Padic ni = n.inv();
    return {a_ * ni, -(b_ * ni), u_};
}

std::string QuadExt::str() const
{
    return a_.str() + "+" + b_.str() + "*s";
}

NormTraceConj norm_trace_conj(const QuadExt& a)
{
    return {a.norm(), a.trace(), a.conj()};
}

QuadExt norm_preimage(const Padic& c, const FieldConfig& cfg)
{
    int v = c.val();
    if (v % 2 != 0) throw NotInImage("odd valuation is not a norm from unramified E");
    int p = cfg.p;
    u64 P = static_cast<u64>(p);
    Padic unit = c.shift(-v);
    Padic U = Padic::from_int(p, cfg.u, precision_cap(p));
    for (u64 b = 0; b < P; ++b) {
        Padic B = Padic::from_int(p, static_cast<long long>(b), c.rel());
        Padic t = unit + U * B * B;
        if (!t.certified_nonzero() || t.val() != 0) continue;
        if (!is_square(t)) continue;
        return {sqrt(t).shift(v / 2), B.shift(v / 2), cfg.u};
    }
    throw NotInImage("norm equation has no solution");
}

QuadExt sqrt_in_E(const Padic& x, const FieldConfig& cfg)
{
    if (is_square(x)) return QuadExt::from_F(sqrt(x), cfg.u);
    Padic y = x / Padic::from_int(cfg.p, cfg.u, precision_cap(cfg.p));
    if (is_square(y)) return {Padic::zero(cfg.p), sqrt(y), cfg.u};
    throw NotInImage("not a square in E");
}

// ---- etale algebras and L-factors ----

int EtaleAlgebraDesc::count_S1() const
{
    return static_cast<int>(std::count_if(factors.begin(), factors.end(), [](const EtaleFactor& f) { return !f.contains_E; }));
}

int EtaleAlgebraDesc::count_S2() const
{
    return static_cast<int>(std::count_if(factors.begin(), factors.end(), [](const EtaleFactor& f) { return f.contains_E; }));
}

EtaleAlgebraDesc etale_algebra(const std::vector<Padic>& f)
{
    EtaleAlgebraDesc d;
    d.source = f;
    int deg = static_cast<int>(f.size()) - 1;
    if (deg == 1) {
        d.factors.push_back({1, 1, false, false});
        return d;
    }
    if (deg != 2) throw std::invalid_argument("etale_algebra: degree must be 1 or 2");
    int p = f[0].p() ? f[0].p() : f[1].p();
    Padic disc = f[1] * f[1] - Padic::from_int(p, 4, precision_cap(p)) * f[0];
    if (disc.is_exact_zero()) throw Inseparable("discriminant is zero");
    if (disc.is_fuzzy()) {
        // zero to the full precision of the input: treat as a repeated root
        int inp = std::min(f[0].abs_prec(), f[1].abs_prec());
        if (disc.abs_prec() >= inp) throw Inseparable("discriminant vanishes at working precision");
        throw PrecisionExhausted("discriminant not certified nonzero");
    }
    if (is_square(disc)) {
        d.factors.push_back({1, 1, false, false});
        d.factors.push_back({1, 1, false, false});
    } else if (disc.val() % 2 == 0) {
        d.factors.push_back({2, 2, false, true});
    } else {
        d.factors.push_back({2, 1, true, false});
    }
    return d;
}

RationalInQs RationalInQs::reduced() const
{
    if (den.is_zero()) throw std::domain_error("zero denominator");
    QPoly g = QPoly::gcd(num, den);
    QPoly n = QPoly::divmod(num, g).first;
    QPoly d = QPoly::divmod(den, g).first;
    Rat lead = d.at(0) != 0 ? d.at(0) : d.c.back();
    for (auto& x : n.c) x /= lead;
    for (auto& x : d.c) x /= lead;
    return {n, d};
}

bool RationalInQs::finite_at_zero() const
{
    return reduced().den.eval(Rat(1)) != 0;
}

Rat RationalInQs::value_at_zero() const
{
    RationalInQs r = reduced();
    Rat d = r.den.eval(Rat(1));
    if (d == 0) throw PoleAtZero("pole at s=0");
    return r.num.eval(Rat(1)) / d;
}

std::string RationalInQs::str() const
{
    return "(" + num.str() + ")/(" + den.str() + ")";
}

RationalInQs tate_l_factor(const EtaleAlgebraDesc& desc)
{
    RationalInQs r;
    for (const auto& f : desc.factors) {
        std::vector<Rat> c(static_cast<size_t>(f.residue_degree) + 1, Rat(0));
        c[0] = 1;
        // contains E: eta_i trivial. Otherwise eta_i = eta o Nm is unramified and sends a uniformizer to -1.
        c.back() = f.contains_E ? Rat(-1) : Rat(1);
        r.den = r.den * QPoly(std::move(c));
    }
    return r;
}

} // namespace hfl
