#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hfl {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r)
{
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rat rat_pow(const Rat& b, int e)
{
    Rat r = 1;
    Rat x = e >= 0 ? b : Rat(1) / b;
    for (int i = 0; i < (e >= 0 ? e : -e); ++i) r *= x;
    return r;
}

// Dense univariate polynomial over Q, lowest degree first.
struct QPoly {
    std::vector<Rat> c;

    QPoly() = default;
    QPoly(std::initializer_list<Rat> l) : c(l) { trim(); }
    explicit QPoly(std::vector<Rat> v) : c(std::move(v)) { trim(); }

    void trim()
    {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    Rat at(int i) const { return i >= 0 && i < static_cast<int>(c.size()) ? c[i] : Rat(0); }
    Rat eval(const Rat& x) const
    {
        Rat r = 0;
        for (int i = deg(); i >= 0; --i) r = r * x + c[i];
        return r;
    }

    friend QPoly operator+(const QPoly& a, const QPoly& b)
    {
        std::vector<Rat> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.at(int(i)) + b.at(int(i));
        return QPoly(std::move(r));
    }
    friend QPoly operator-(const QPoly& a, const QPoly& b)
    {
        std::vector<Rat> r(std::max(a.c.size(), b.c.size()));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.at(int(i)) - b.at(int(i));
        return QPoly(std::move(r));
    }
    friend QPoly operator*(const QPoly& a, const QPoly& b)
    {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rat> r(a.c.size() + b.c.size() - 1);
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return QPoly(std::move(r));
    }
    friend bool operator==(const QPoly& a, const QPoly& b) { return a.c == b.c; }

    // quotient and remainder
    static std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);
    static QPoly gcd(QPoly a, QPoly b);
    std::string str(const char* var = "T") const;
};

inline std::pair<QPoly, QPoly> QPoly::divmod(const QPoly& a, const QPoly& b)
{
    QPoly r = a;
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rat> q(std::max(0, a.deg() - b.deg() + 1));
    while (!r.is_zero() && r.deg() >= b.deg()) {
        int s = r.deg() - b.deg();
        Rat f = r.c.back() / b.c.back();
        q[s] = f;
        for (int i = 0; i <= b.deg(); ++i) r.c[i + s] -= f * b.c[i];
        r.trim();
    }
    return {QPoly(std::move(q)), r};
}

inline QPoly QPoly::gcd(QPoly a, QPoly b)
{
    while (!b.is_zero()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) {
        Rat lc = a.c.back();
        for (auto& x : a.c) x /= lc;
    }
    return a;
}

inline std::string QPoly::str(const char* var) const
{
    if (is_zero()) return "0";
    std::string s;
    for (int i = 0; i <= deg(); ++i) {
        if (c[i] == 0) continue;
        if (!s.empty()) s += " + ";
        s += "(" + c[i].str() + ")";
        if (i > 0) s += std::string("*") + var + "^" + std::to_string(i);
    }
    return s;
}

} // namespace hfl
