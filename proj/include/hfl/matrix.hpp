#pragma once

#include "hfl/local_fields.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <vector>

namespace hfl {

// ---- scalar traits shared by Padic and QuadExt ----

inline Padic conj(const Padic& x) { return x; }
inline QuadExt conj(const QuadExt& x) { return x.conj(); }
inline bool nonzero(const Padic& x) { return x.certified_nonzero(); }
inline bool nonzero(const QuadExt& x) { return x.certified_nonzero(); }
inline bool exact_zero(const Padic& x) { return x.is_exact_zero(); }
inline bool exact_zero(const QuadExt& x) { return x.a().is_exact_zero() && x.b().is_exact_zero(); }
inline int val_of(const Padic& x) { return x.val(); }
inline int val_of(const QuadExt& x) { return x.val(); }
inline int val_lower_of(const Padic& x) { return x.val_lower(); }
inline int val_lower_of(const QuadExt& x) { return x.val_lower(); }

template <class S>
S make_scalar(const FieldConfig& c, long long k);
template <>
inline Padic make_scalar<Padic>(const FieldConfig& c, long long k) { return Padic::from_int(c.p, k, c.N); }
template <>
inline QuadExt make_scalar<QuadExt>(const FieldConfig& c, long long k)
{
    return QuadExt::from_F(Padic::from_int(c.p, k, c.N), c.u);
}

template <class S>
S make_unif(const FieldConfig& c, int e);
template <>
inline Padic make_unif<Padic>(const FieldConfig& c, int e) { return Padic::from_parts(c.p, e, 1, c.N); }
template <>
inline QuadExt make_unif<QuadExt>(const FieldConfig& c, int e)
{
    return QuadExt::from_F(Padic::from_parts(c.p, e, 1, c.N), c.u);
}

inline QuadExt lift(const Padic& x, const FieldConfig& c) { return QuadExt::from_F(x, c.u); }

// ---- dense matrices ----

template <class S>
class Mat {
public:
    Mat() = default;
    Mat(int r, int c, const S& fill) : r_(r), c_(c), a_(static_cast<size_t>(r * c), fill) {}

    static Mat zero(int r, int c, const FieldConfig& cfg) { return Mat(r, c, make_scalar<S>(cfg, 0)); }
    static Mat identity(int n, const FieldConfig& cfg)
    {
        Mat m = zero(n, n, cfg);
        for (int i = 0; i < n; ++i) m(i, i) = make_scalar<S>(cfg, 1);
        return m;
    }
    static Mat diag(const std::vector<S>& d)
    {
        int n = static_cast<int>(d.size());
        Mat m(n, n, exact_zero_like(d[0]));
        for (int i = 0; i < n; ++i) m(i, i) = d[i];
        return m;
    }
    static Mat from_rows(const std::vector<std::vector<S>>& rows)
    {
        Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), rows[0][0]);
        for (int i = 0; i < m.r_; ++i)
            for (int j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    bool square() const { return r_ == c_; }
    S& operator()(int i, int j) { return a_[static_cast<size_t>(i * c_ + j)]; }
    const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i * c_ + j)]; }

    friend Mat operator+(const Mat& x, const Mat& y)
    {
        Mat r = x;
        for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = x.a_[i] + y.a_[i];
        return r;
    }
    friend Mat operator-(const Mat& x, const Mat& y)
    {
        Mat r = x;
        for (size_t i = 0; i < r.a_.size(); ++i) r.a_[i] = x.a_[i] - y.a_[i];
        return r;
    }
    Mat operator-() const
    {
        Mat r = *this;
        for (auto& e : r.a_) e = -e;
        return r;
    }
    friend Mat operator*(const Mat& x, const Mat& y)
    {
        Mat r(x.r_, y.c_, x(0, 0));
        for (int i = 0; i < x.r_; ++i)
            for (int j = 0; j < y.c_; ++j) {
                S s = x(i, 0) * y(0, j);
                for (int k = 1; k < x.c_; ++k) s += x(i, k) * y(k, j);
                r(i, j) = s;
            }
        return r;
    }
    friend Mat operator*(const S& s, const Mat& y)
    {
        Mat r = y;
        for (auto& e : r.a_) e = s * e;
        return r;
    }
    friend bool operator==(const Mat& x, const Mat& y)
    {
        if (x.r_ != y.r_ || x.c_ != y.c_) return false;
        for (size_t i = 0; i < x.a_.size(); ++i)
            if (!(x.a_[i] == y.a_[i])) return false;
        return true;
    }

    Mat transpose() const
    {
        Mat r(c_, r_, a_[0]);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    Mat conj_entries() const
    {
        Mat r = *this;
        for (auto& e : r.a_) e = conj(e);
        return r;
    }
    Mat star() const { return conj_entries().transpose(); }

    Mat minor_matrix(const std::vector<int>& rs, const std::vector<int>& cs) const
    {
        Mat m(static_cast<int>(rs.size()), static_cast<int>(cs.size()), a_[0]);
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = 0; j < cs.size(); ++j) m(int(i), int(j)) = (*this)(rs[i], cs[j]);
        return m;
    }
    Mat block(int r0, int c0, int nr, int nc) const
    {
        Mat m(nr, nc, a_[0]);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
        return m;
    }
    void set_block(int r0, int c0, const Mat& b)
    {
        for (int i = 0; i < b.r_; ++i)
            for (int j = 0; j < b.c_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    // Laplace expansion; division free, fine for n <= 4
    S det() const
    {
        if (r_ == 1) return a_[0];
        if (r_ == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
        S s = exact_zero_like(a_[0]);
        std::vector<int> rs;
        for (int i = 1; i < r_; ++i) rs.push_back(i);
        for (int j = 0; j < c_; ++j) {
            std::vector<int> cs;
            for (int k = 0; k < c_; ++k)
                if (k != j) cs.push_back(k);
            S t = (*this)(0, j) * minor_matrix(rs, cs).det();
            s = (j % 2 == 0) ? s + t : s - t;
        }
        return s;
    }

    Mat adjugate() const
    {
        Mat r(r_, c_, a_[0]);
        if (r_ == 1) {
            r(0, 0) = one_like(a_[0]);
            return r;
        }
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) {
                std::vector<int> rs, cs;
                for (int k = 0; k < r_; ++k)
                    if (k != j) rs.push_back(k);
                for (int k = 0; k < c_; ++k)
                    if (k != i) cs.push_back(k);
                S m = minor_matrix(rs, cs).det();
                r(i, j) = ((i + j) % 2 == 0) ? m : -m;
            }
        return r;
    }

    Mat inverse() const
    {
        S d = det();
        if (exact_zero(d)) throw SingularInput("matrix is singular");
        if (!nonzero(d)) throw PrecisionExhausted("determinant not certified nonzero");
        S di = d.inv();
        return di * adjugate();
    }

    // coefficients of det(T - M), lowest degree first, leading 1 included
    std::vector<S> char_poly() const
    {
        int n = r_;
        std::vector<S> c(static_cast<size_t>(n + 1), exact_zero_like(a_[0]));
        c[static_cast<size_t>(n)] = one_like(a_[0]);
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::vector<int> idx;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) idx.push_back(i);
            int k = static_cast<int>(idx.size());
            S m = minor_matrix(idx, idx).det();
            c[static_cast<size_t>(n - k)] = (k % 2 == 0) ? c[static_cast<size_t>(n - k)] + m : c[static_cast<size_t>(n - k)] - m;
        }
        return c;
    }

    // minimal valuation over entries; INT_MAX/4 if all exactly zero
    int min_val() const
    {
        int m = INT_MAX / 4;
        for (const auto& e : a_)
            if (nonzero(e)) m = std::min(m, val_of(e));
        for (const auto& e : a_)
            if (!nonzero(e) && !exact_zero(e) && val_lower_of(e) < m)
                throw PrecisionExhausted("entry valuation undetermined");
        return m;
    }
    // every entry has valuation >= k (certified); false if some entry is certainly below
    bool entries_at_least(int k) const
    {
        for (const auto& e : a_) {
            if (exact_zero(e)) continue;
            if (nonzero(e)) {
                if (val_of(e) < k) return false;
            } else if (val_lower_of(e) < k) {
                throw PrecisionExhausted("entry valuation undetermined");
            }
        }
        return true;
    }
    // three-valued test usable during pruning: 1 yes, 0 no, -1 undetermined
    int entries_at_least_partial(int k) const
    {
        int r = 1;
        for (const auto& e : a_) {
            if (exact_zero(e)) continue;
            if (nonzero(e)) {
                if (val_of(e) < k) return 0;
            } else if (val_lower_of(e) < k) {
                r = -1;
            }
        }
        return r;
    }
    bool is_integral() const { return entries_at_least(0); }
    bool is_hermitian() const { return *this == star(); }

    const std::vector<S>& data() const { return a_; }

private:
    static S exact_zero_like(const S& x);
    static S one_like(const S& x);

    int r_ = 0, c_ = 0;
    std::vector<S> a_;
};

template <>
inline Padic Mat<Padic>::exact_zero_like(const Padic& x) { return Padic::zero(x.p()); }
template <>
inline Padic Mat<Padic>::one_like(const Padic& x) { return Padic::from_int(x.p(), 1, precision_cap(x.p())); }
template <>
inline QuadExt Mat<QuadExt>::exact_zero_like(const QuadExt& x) { return QuadExt::from_F(Padic::zero(x.p()), x.u()); }
template <>
inline QuadExt Mat<QuadExt>::one_like(const QuadExt& x)
{
    return QuadExt::from_F(Padic::from_int(x.p(), 1, precision_cap(x.p())), x.u());
}

using MatF = Mat<Padic>;
using MatE = Mat<QuadExt>;

MatE lift(const MatF& m, const FieldConfig& c);
// entries certified in F (b-part zero at precision); throws NotInImage otherwise
MatF descend(const MatE& m);
std::vector<Padic> descend(const std::vector<QuadExt>& v);

// Signature: weakly decreasing integers
using Signature = std::vector<int>;
bool is_signature(const Signature& s);
int size_of(const Signature& s);

// elementary-divisor valuations of an invertible matrix, weakly decreasing
template <class S>
Signature cartan_coordinate(const Mat<S>& g)
{
    int n = g.rows();
    std::vector<int> d(static_cast<size_t>(n + 1), 0);
    for (int k = 1; k <= n; ++k) {
        int best = INT_MAX / 4;
        bool undecided = false;
        std::function<void(int, int, std::vector<int>&, std::vector<std::vector<int>>&)> subsets =
            [&](int start, int left, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
                if (left == 0) {
                    out.push_back(cur);
                    return;
                }
                for (int i = start; i < n; ++i) {
                    cur.push_back(i);
                    subsets(i + 1, left - 1, cur, out);
                    cur.pop_back();
                }
            };
        std::vector<std::vector<int>> subs;
        std::vector<int> cur;
        subsets(0, k, cur, subs);
        std::vector<int> lowers;
        for (const auto& rsub : subs)
            for (const auto& csub : subs) {
                S m = g.minor_matrix(rsub, csub).det();
                if (nonzero(m))
                    best = std::min(best, val_of(m));
                else if (!exact_zero(m))
                    lowers.push_back(val_lower_of(m));
            }
        for (int l : lowers)
            if (l < best) undecided = true;
        if (best >= INT_MAX / 4) {
            if (k == n) throw SingularInput("cartan_coordinate of singular matrix");
            undecided = true;
        }
        if (undecided) throw PrecisionExhausted("elementary divisors undetermined");
        d[static_cast<size_t>(k)] = best;
    }
    Signature lam;
    for (int k = n; k >= 1; --k) lam.push_back(d[static_cast<size_t>(k)] - d[static_cast<size_t>(k - 1)]);
    return lam;
}

// column vector stacking helpers
template <class S>
Mat<S> column(const std::vector<S>& v)
{
    Mat<S> m(static_cast<int>(v.size()), 1, v[0]);
    for (size_t i = 0; i < v.size(); ++i) m(int(i), 0) = v[i];
    return m;
}

// det[w | w R | ... | w R^{n-1}] with rows w R^k
template <class S>
Mat<S> krylov_rows(const Mat<S>& w, const Mat<S>& R)
{
    int n = R.rows();
    Mat<S> C(n, n, R(0, 0));
    Mat<S> v = w;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) C(k, j) = v(0, j);
        v = v * R;
    }
    return C;
}

} // namespace hfl
