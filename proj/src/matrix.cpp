#include "hfl/matrix.hpp"

namespace hfl {

MatE lift(const MatF& m, const FieldConfig& c)
{
    MatE r(m.rows(), m.cols(), lift(m(0, 0), c));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = lift(m(i, j), c);
    return r;
}

MatF descend(const MatE& m)
{
    MatF r(m.rows(), m.cols(), m(0, 0).a());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (!m(i, j).in_F()) throw NotInImage("matrix entry not in F");
            r(i, j) = m(i, j).a();
        }
    return r;
}

std::vector<Padic> descend(const std::vector<QuadExt>& v)
{
    std::vector<Padic> r;
    for (const auto& x : v) {
        if (!x.in_F()) throw NotInImage("coefficient not in F");
        r.push_back(x.a());
    }
    return r;
}

bool is_signature(const Signature& s)
{
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[i - 1]) return false;
    return true;
}

int size_of(const Signature& s)
{
    int t = 0;
    for (int x : s) t += x;
    return t;
}

} // namespace hfl
