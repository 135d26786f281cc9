#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hfl/local_fields.hpp"

#include <random>

using namespace hfl;

namespace {

Padic rand_nonzero(std::mt19937_64& rng, int p, int N, int vlo, int vhi)
{
    std::uniform_int_distribution<int> vd(vlo, vhi);
    std::uniform_int_distribution<u64> ud(1, ppow(p, N) - 1);
    u64 x;
    do x = ud(rng);
    while (x % static_cast<u64>(p) == 0);
    return Padic::from_parts(p, vd(rng), x, N);
}

std::vector<Padic> poly(int p, int N, std::initializer_list<long long> low_first)
{
    std::vector<Padic> r;
    for (long long c : low_first) r.push_back(Padic::from_int(p, c, N));
    return r;
}

} // namespace

TEST_CASE("config validation")
{
    auto c = FieldConfig::make(3, 12);
    CHECK(c.u == 2);
    CHECK(legendre(c.u, 3) == -1);
    CHECK(FieldConfig::make(7, 8).u == 3);
    CHECK_THROWS_AS(FieldConfig::make(4, 12), InvalidConfig);
    CHECK_THROWS_AS(FieldConfig::make(3, 3), InvalidConfig);
    CHECK_THROWS_AS(FieldConfig::make(3, 60), InvalidConfig);
    FieldConfig bad{5, 10, 4};
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}

TEST_CASE("eta examples")
{
    const int p = 3, N = 12;
    CHECK(eta(Padic::from_int(p, 1, N)) == 1);
    CHECK(eta(Padic::uniformizer(p, N)) == -1);
    CHECK(eta(Padic::from_int(p, 9 * 7, N)) == 1);
    CHECK_THROWS_AS(eta(Padic::zero(p)), ZeroInput);
    CHECK_THROWS_AS(eta(Padic::fuzzy(p, 5)), PrecisionExhausted);
}

TEST_CASE("norm trace conj examples")
{
    auto c = FieldConfig::make(3, 12);
    const int p = c.p, N = c.N;
    auto s = QuadExt::sqrt_u(c);
    auto r = norm_trace_conj(s);
    CHECK(r.norm == Padic::from_int(p, -c.u, N));
    CHECK(r.trace.is_exact_zero());
    CHECK(r.conj == -s);

    QuadExt one = QuadExt::from_F(Padic::from_int(p, 1, N), c.u);
    r = norm_trace_conj(one + s);
    CHECK(r.norm == Padic::from_int(p, 1 - c.u, N));
    CHECK(r.trace == Padic::from_int(p, 2, N));
    CHECK(r.conj == one - s);

    QuadExt w = QuadExt::from_F(Padic::uniformizer(p, N), c.u);
    r = norm_trace_conj(w);
    CHECK(r.norm == Padic::from_int(p, 9, N));
    CHECK(r.trace == Padic::from_int(p, 6, N));
    CHECK(r.conj == w);
}

TEST_CASE("is_square examples")
{
    auto c = FieldConfig::make(3, 12);
    CHECK(is_square(Padic::from_int(3, 4, 12)));
    CHECK_FALSE(is_square(Padic::uniformizer(3, 12)));
    CHECK_FALSE(is_square(Padic::from_int(3, c.u, 12)));
    CHECK_THROWS_AS(is_square(Padic::zero(3)), ZeroInput);
    auto r = sqrt(Padic::from_int(3, 4 * 81, 12));
    CHECK(r * r == Padic::from_int(3, 4 * 81, 12));
    CHECK(r.val() == 2);
}

TEST_CASE("padic arithmetic and precision")
{
    const int p = 5, N = 10;
    auto a = Padic::from_int(p, 7, N);
    auto b = Padic::from_rat(p, Rat(3, 25), N);
    CHECK(b.val() == -2);
    CHECK((a * b) / b == a);
    CHECK(a - a == Padic::zero(p));
    CHECK((a - a).is_fuzzy());
    CHECK_THROWS_AS((a - a).val(), PrecisionExhausted);
    auto x = Padic::from_int(p, 1, N) + Padic::from_int(p, 5 * 5 * 5, N);
    CHECK(x.rel() == N);
    auto y = Padic::parse(p, a.str(), N);
    CHECK(y == a);
    CHECK(Padic::parse(p, "0", N).is_exact_zero());
    CHECK(Padic::from_int(p, 125, N).residue(4) == 125);
    CHECK_THROWS_AS(b.residue(3), NotIntegral);
}

TEST_CASE("etale algebra examples")
{
    const int p = 3, N = 12;
    auto c = FieldConfig::make(p, N);
    auto d = etale_algebra(poly(p, N, {-1, 0, 1}));
    CHECK(d.factors.size() == 2);
    CHECK(d.count_S1() == 2);
    d = etale_algebra(poly(p, N, {-c.u, 0, 1}));
    REQUIRE(d.factors.size() == 1);
    CHECK(d.factors[0].contains_E);
    CHECK(d.count_S2() == 1);
    d = etale_algebra(poly(p, N, {-p, 0, 1}));
    REQUIRE(d.factors.size() == 1);
    CHECK(d.factors[0].ramified);
    CHECK_FALSE(d.factors[0].contains_E);
    CHECK(d.count_S1() == 1);
    CHECK_THROWS_AS(etale_algebra(poly(p, N, {1, 2, 1})), Inseparable);
    d = etale_algebra(poly(p, N, {-1, 1}));
    CHECK(d.factors.size() == 1);
    CHECK(d.count_S1() == 1);
}

TEST_CASE("tate L-factor examples")
{
    const int p = 3, N = 12;
    auto c = FieldConfig::make(p, N);
    auto L = tate_l_factor(etale_algebra(poly(p, N, {-1, 1})));
    CHECK(L.num == QPoly{Rat(1)});
    CHECK(L.den == (QPoly{Rat(1), Rat(1)}));
    L = tate_l_factor(etale_algebra(poly(p, N, {-1, 0, 1})));
    CHECK(L.den == (QPoly{Rat(1), Rat(2), Rat(1)}));
    CHECK(L.value_at_zero() == Rat(1, 4));
    L = tate_l_factor(etale_algebra(poly(p, N, {-c.u, 0, 1})));
    CHECK(L.den == (QPoly{Rat(1), Rat(0), Rat(-1)}));
    CHECK_FALSE(L.finite_at_zero());
    CHECK_THROWS_AS(L.value_at_zero(), PoleAtZero);
}

TEST_CASE("property: eta is multiplicative")
{
    std::mt19937_64 rng(11);
    for (int p : {3, 5, 7})
        for (int i = 0; i < 200; ++i) {
            auto x = rand_nonzero(rng, p, 8, -5, 5);
            auto y = rand_nonzero(rng, p, 8, -5, 5);
            CHECK(eta(x * y) == eta(x) * eta(y));
        }
}

TEST_CASE("property: norm multiplicative and onto units")
{
    std::mt19937_64 rng(12);
    for (int p : {3, 5, 7}) {
        auto c = FieldConfig::make(p, 8);
        for (int i = 0; i < 100; ++i) {
            QuadExt x{rand_nonzero(rng, p, 8, 0, 3), rand_nonzero(rng, p, 8, 0, 3), c.u};
            QuadExt y{rand_nonzero(rng, p, 8, 0, 3), rand_nonzero(rng, p, 8, 0, 3), c.u};
            CHECK((x * y).norm() == x.norm() * y.norm());
            CHECK((x * x.inv()) == QuadExt::from_F(Padic::from_int(p, 1, 8), c.u));
            auto t = rand_nonzero(rng, p, 8, 0, 0);
            auto a = norm_preimage(t, c);
            CHECK(a.norm() == t);
        }
    }
}

TEST_CASE("property: classification stable under precision increase")
{
    std::mt19937_64 rng(13);
    for (int p : {3, 5}) {
        const int N = 10;
        for (int i = 0; i < 200; ++i) {
            std::uniform_int_distribution<long long> cd(-400, 400);
            long long c0 = cd(rng), c1 = cd(rng);
            long long disc = c1 * c1 - 4 * c0;
            if (disc == 0) continue;
            auto dv = Padic::from_int(p, disc, N).val();
            if (dv > N - 4) continue;
            auto d1 = etale_algebra(poly(p, N, {c0, c1, 1}));
            auto d2 = etale_algebra(poly(p, N + 4, {c0, c1, 1}));
            REQUIRE(d1.factors.size() == d2.factors.size());
            for (size_t k = 0; k < d1.factors.size(); ++k) {
                CHECK(d1.factors[k].contains_E == d2.factors[k].contains_E);
                CHECK(d1.factors[k].ramified == d2.factors[k].ramified);
            }
        }
    }
}

TEST_CASE("property: L-factor finite at s=0 iff elliptic")
{
    std::mt19937_64 rng(14);
    const int p = 3, N = 12;
    for (int i = 0; i < 200; ++i) {
        std::uniform_int_distribution<long long> cd(-300, 300);
        long long c0 = cd(rng), c1 = cd(rng);
        if (c1 * c1 - 4 * c0 == 0) continue;
        auto d = etale_algebra(poly(p, N, {c0, c1, 1}));
        auto L = tate_l_factor(d);
        CHECK(L.finite_at_zero() == d.elliptic());
        if (L.finite_at_zero()) CHECK(L.value_at_zero() != 0);
    }
}
