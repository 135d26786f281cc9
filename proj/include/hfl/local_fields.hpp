#pragma once

#include "hfl/errors.hpp"
#include "hfl/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hfl {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Largest k with p^k < 2^62, so products of residues fit in 128 bits.
int precision_cap(int p);
u64 ppow(int p, int k);
u64 mulmod(u64 a, u64 b, u64 m);
u64 invmod(u64 a, u64 m);
bool is_odd_prime(long long p);
int legendre(long long a, int p);

struct FieldConfig {
    int p = 3;
    int N = 12;
    long long u = 2; // quadratic non-residue mod p, E = F(sqrt u)

    static FieldConfig make(int p, int N);
    void validate() const;
};

// Element of Q_p known to relative precision `rel` (unit known mod p^rel).
// A fuzzy value is only known to be divisible by p^abs.
class Padic {
public:
    enum class Kind : std::uint8_t { Zero, Fuzzy, Unit };

    Padic() = default;
    static Padic zero(int p) { Padic r; r.p_ = p; return r; }
    static Padic fuzzy(int p, int abs_prec);
    static Padic from_parts(int p, int v, u64 unit, int rel);
    static Padic from_int(int p, long long x, int rel);
    static Padic from_big(int p, const Int& x, int rel);
    static Padic from_rat(int p, const Rat& x, int rel);
    static Padic uniformizer(int p, int rel) { return from_parts(p, 1, 1, rel); }
    // integral residue x mod p^A
    static Padic from_residue(int p, u64 x, int A);

    int p() const { return p_; }
    Kind kind() const { return kind_; }
    bool is_exact_zero() const { return kind_ == Kind::Zero; }
    bool is_fuzzy() const { return kind_ == Kind::Fuzzy; }
    bool certified_nonzero() const { return kind_ == Kind::Unit; }
    // throws PrecisionExhausted if the value cannot be told apart from zero
    bool is_zero() const;
    int val() const;
    u64 unit() const { return u_; }
    int rel() const { return rel_; }
    int abs_prec() const;
    // min(val, abs_prec) style lower bound on the valuation, usable on fuzzy values
    int val_lower() const;
    u64 unit_digit() const { return u_ % static_cast<u64>(p_); }

    Padic operator-() const;
    friend Padic operator+(const Padic& a, const Padic& b);
    friend Padic operator-(const Padic& a, const Padic& b) { return a + (-b); }
    friend Padic operator*(const Padic& a, const Padic& b);
    friend Padic operator/(const Padic& a, const Padic& b) { return a * b.inv(); }
    Padic& operator+=(const Padic& o) { return *this = *this + o; }
    Padic& operator-=(const Padic& o) { return *this = *this - o; }
    Padic& operator*=(const Padic& o) { return *this = *this * o; }
    Padic inv() const;
    Padic shift(int k) const; // multiply by p^k
    Padic truncate(int rel) const;

    // indistinguishable at the available precision
    friend bool operator==(const Padic& a, const Padic& b);
    friend bool operator!=(const Padic& a, const Padic& b) { return !(a == b); }

    // residue mod p^A of an integral value
    u64 residue(int A) const;
    std::string str() const;
    static Padic parse(int p, const std::string& s, int rel);

private:
    int p_ = 0;
    int v_ = 0;
    int rel_ = 0;
    Kind kind_ = Kind::Zero;
    u64 u_ = 0;
};

int eta(const Padic& x);
bool is_square(const Padic& x);
Padic sqrt(const Padic& x);

// a + b sqrt(u)
class QuadExt {
public:
    QuadExt() = default;
    QuadExt(Padic a, Padic b, long long u) : a_(a), b_(b), u_(u) {}
    static QuadExt from_F(const Padic& a, long long u) { return {a, Padic::zero(a.p()), u}; }
    static QuadExt sqrt_u(const FieldConfig& c);

    const Padic& a() const { return a_; }
    const Padic& b() const { return b_; }
    long long u() const { return u_; }
    int p() const { return a_.p() ? a_.p() : b_.p(); }

    QuadExt conj() const { return {a_, -b_, u_}; }
    Padic norm() const;
    Padic trace() const;
    bool in_F() const; // b is zero to known precision
    bool is_zero() const;
    bool certified_nonzero() const;
    int val() const;
    int val_lower() const;
    int abs_prec() const;

    QuadExt operator-() const { return {-a_, -b_, u_}; }
    friend QuadExt operator+(const QuadExt& x, const QuadExt& y);
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) { return x + (-y); }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y);
    friend QuadExt operator*(const Padic& s, const QuadExt& y) { return {s * y.a_, s * y.b_, y.u_}; }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inv(); }
    QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
    QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
    QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }
    QuadExt inv() const;
    QuadExt shift(int k) const { return {a_.shift(k), b_.shift(k), u_}; }
    friend bool operator==(const QuadExt& x, const QuadExt& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
    std::string str() const;

private:
    Padic a_, b_;
    long long u_ = 0;
};

struct NormTraceConj {
    Padic norm;
    Padic trace;
    QuadExt conj;
};
NormTraceConj norm_trace_conj(const QuadExt& a);

// solve Nm(x) = c for c in F with even valuation (always solvable, E/F unramified)
QuadExt norm_preimage(const Padic& c, const FieldConfig& cfg);
// square root in E of an element of F (F-square or u times an F-square)
QuadExt sqrt_in_E(const Padic& x, const FieldConfig& cfg);

struct EtaleFactor {
    int degree = 1;
    int residue_degree = 1;
    bool ramified = false;
    bool contains_E = false;
};

struct EtaleAlgebraDesc {
    std::vector<EtaleFactor> factors;
    std::vector<Padic> source; // monic, lowest degree first

    int count_S1() const;
    int count_S2() const;
    bool elliptic() const { return count_S2() == 0; }
};

// f monic of degree 1 or 2, coefficients lowest degree first (leading 1 included)
EtaleAlgebraDesc etale_algebra(const std::vector<Padic>& f);

// Rational function in T = q^{-s}
struct RationalInQs {
    QPoly num{Rat(1)};
    QPoly den{Rat(1)};

    RationalInQs reduced() const;
    bool finite_at_zero() const; // s = 0 is T = 1
    Rat value_at_zero() const;
    friend RationalInQs operator*(const RationalInQs& a, const RationalInQs& b)
    {
        return {a.num * b.num, a.den * b.den};
    }
    std::string str() const;
};

RationalInQs tate_l_factor(const EtaleAlgebraDesc& desc);

} // namespace hfl
