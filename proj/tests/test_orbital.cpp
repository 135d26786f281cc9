#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hfl/orbital.hpp"

#include <random>

using namespace hfl;

namespace {

// full word precision: the moved points below are exact up to the sampled digits
const FieldConfig C3 = FieldConfig::make(3, precision_cap(3));

Padic F(long long x) { return Padic::from_int(C3.p, x, C3.N); }
Padic W(int e) { return Padic::from_parts(C3.p, e, 1, C3.N); }
Padic U(int e, long long unit) { return Padic::from_parts(C3.p, e, static_cast<u64>(unit), C3.N); }
QuadExt E(const Padic& a) { return QuadExt::from_F(a, C3.u); }
QuadExt E(long long a, long long b = 0) { return {F(a), F(b), C3.u}; }

MatF mf(std::initializer_list<std::initializer_list<Padic>> rows)
{
    std::vector<std::vector<Padic>> r;
    for (auto& row : rows) r.emplace_back(row);
    return MatF::from_rows(r);
}

MatF m1(const Padic& a) { return mf({{a}}); }
MatE e1(const QuadExt& a) { return MatE::diag({a}); }
OrbitInvariant inv(std::initializer_list<Padic> c) { return OrbitInvariant{std::vector<Padic>(c)}; }

Padic rnd(std::mt19937_64& rng, int vlo, int vhi)
{
    std::uniform_int_distribution<int> vd(vlo, vhi);
    std::uniform_int_distribution<u64> ud(1, ppow(3, 10) - 1);
    u64 x;
    do x = ud(rng);
    while (x % 3 == 0);
    return Padic::from_parts(3, vd(rng), x, precision_cap(3));
}

MatF rnd_glO(std::mt19937_64& rng, int n)
{
    while (true) {
        MatF m = MatF::zero(n, n, C3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rnd(rng, 0, 2);
        Padic d = m.det();
        if (d.certified_nonzero() && d.val() == 0) return m;
    }
}

// separable quadratic invariants, split or field, with integral coefficients
OrbitInvariant rnd_quadratic(std::mt19937_64& rng, int vlo, int vhi)
{
    while (true) {
        OrbitInvariant f = inv({rnd(rng, vlo, vhi), rnd(rng, 0, 2), F(1)});
        try {
            etale_algebra(f.c);
            return f;
        } catch (const Inseparable&) {
        }
    }
}

MatE rnd_unitary(std::mt19937_64& rng, int n)
{
    MatE S = MatE::zero(n, n, C3);
    QuadExt s = QuadExt::sqrt_u(C3);
    for (int i = 0; i < n; ++i) {
        S(i, i) = s * E(rnd(rng, 0, 2));
        for (int j = i + 1; j < n; ++j) {
            S(i, j) = QuadExt(rnd(rng, 0, 2), rnd(rng, 0, 2), C3.u);
            S(j, i) = -S(i, j).conj();
        }
    }
    MatE I = MatE::identity(n, C3);
    return MatE((I + S) * MatE(I - S).inverse());
}

MatE rnd_glE(std::mt19937_64& rng, int n)
{
    while (true) {
        MatE m = MatE::zero(n, n, C3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = QuadExt(rnd(rng, -1, 2), rnd(rng, -1, 2), C3.u);
        if (m.det().certified_nonzero()) return m;
    }
}

HeckeElement hk(int n, const Signature& lam) { return HeckeElement::basis(Group::GL_F, 3, lam); }

} // namespace

TEST_CASE("unit_ball_slice")
{
    CHECK(unit_ball_slice(1, 0, 3) == HermModuleElement::orbit({3}));
    CHECK(unit_ball_slice(1, 2, 1).c.empty());
    HermModuleElement s = unit_ball_slice(2, 1, 4);
    CHECK(s == HermModuleElement::orbit({3, 1}) + HermModuleElement::orbit({2, 2}));
}

TEST_CASE("mirabolic examples")
{
    MatF w = m1(F(1));
    for (int d = -2; d <= 4; ++d) {
        MatF z = m1(U(d, 2));
        HeckeElement f = hk(1, {d});
        RegularizedValue r = mirabolic_orbital(f, 0, z, w, 8);
        CHECK(r.value == Rat(d < 0 ? 0 : d % 2 == 0 ? 1 : -1));
        CHECK(mirabolic_orbital(hk(1, {d + 1}), 0, z, w, 8).value == 0);
    }
    MatF z = mf({{F(1), F(0)}, {F(0), F(2)}});
    RegularizedValue r = mirabolic_orbital(HeckeElement::unit(Group::GL_F, 2, 3), 0, z, mf({{F(1), F(1)}}), 8);
    CHECK(r.value == 1);
    CHECK(r.series.num.eval(Rat(1)) == Rat(1) * r.series.den.eval(Rat(1)));
    CHECK_THROWS_AS(mirabolic_orbital(HeckeElement::unit(Group::GL_F, 2, 3), 0, z, mf({{F(1), F(0)}}), 8),
                    NotStronglyRegular);
}

TEST_CASE("lie_linear examples")
{
    MatF w = m1(F(1));
    for (int i = -1; i <= 3; ++i)
        for (int j = -1; j <= 3; ++j) {
            int d = i + j;
            MatF X = m1(U(i, 2)), Y = m1(U(j, 4));
            Rat ii = lie_linear_orbital({false}, 0, X, Y, w, 8).value;
            Rat si = lie_linear_orbital({true}, 0, X, Y, w, 8).value;
            CHECK(ii == Rat(d >= 0 ? d + 1 : 0));
            CHECK(si == Rat(d >= 0 && d % 2 == 0 ? 1 : 0));
        }
}

TEST_CASE("unitary_stable examples")
{
    for (int d = 0; d <= 4; ++d)
        for (int v = -1; v <= 4; ++v)
            CHECK(unitary_stable(HermModuleElement::det_slice(1, d), e1(E(U(v, 2))), C3) == Rat(v == d ? 1 : 0));
    MatE x = MatE::diag({E(1), E(2)});
    CHECK(unitary_stable_ball(0, x, C3) == 1);
    CHECK(brute_force_oracle(TestFunction::unit_ball(Space::HermPoint, 2, 3, 0), OrbitPoint::herm_point(x, C3), 2, 8) ==
          1);
}

TEST_CASE("two_var_stable examples")
{
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j)
            for (int d = 0; d <= 6; ++d) {
                MatE x1 = e1(E(U(d / 2, 2))), x2 = e1(E(U(d - d / 2, 1)));
                Rat v = two_var_stable(HermModuleElement::orbit({i}), HermModuleElement::orbit({j}), x1, x2, C3);
                CHECK(v == Rat(i + j == d ? 1 : 0));
            }
    for (int d = -2; d <= 6; ++d) {
        MatE x1 = e1(E(W(d))), x2 = e1(E(2));
        CHECK(two_var_stable_ball(0, x1, x2, C3) == Rat(d >= 0 ? d + 1 : 0));
    }
}

TEST_CASE("epsilon_orbital examples")
{
    for (int d = 0; d <= 6; ++d) {
        MatE x1 = e1(E(2)), x2 = e1(E(U(d, 1)));
        CHECK(epsilon_orbital_ball(0, x1, x2, C3) == Rat(d % 2 == 0 ? 1 : 0));
        for (int i = 0; i <= d; ++i) {
            Rat s = epsilon_orbital(HermModuleElement::orbit({i}), HermModuleElement::orbit({d - i}), x1, x2, C3);
            CHECK(s * s == 1);
        }
    }
}

TEST_CASE("split_inert examples")
{
    for (int v = -2; v <= 3; ++v) {
        MatE X = e1(E(U(v, 2)));
        CHECK(split_inert_stable(0, X, C3) == Rat(v >= 0 ? 1 : 0));
        CHECK(split_inert_stable(1, X, C3) == Rat(v >= 1 ? 1 : 0));
        CHECK(split_inert_stable(1, X, C3) == split_inert_stable(0, e1(E(U(v - 1, 2))), C3));
    }
}

TEST_CASE("oracle: n = 1 closed forms")
{
    MatF w = m1(F(1));
    for (int d = 0; d <= 4; ++d) {
        MatF z = m1(U(d, 2));
        CHECK(oracle_mirabolic(hk(1, {d}), 0, z, w, 6, 2).value == Rat(d % 2 == 0 ? 1 : -1));
        CHECK(oracle_mirabolic(hk(1, {d}), 0, z, w, 6, 2).value == mirabolic_orbital(hk(1, {d}), 0, z, w, 6).value);
    }
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) {
            OrbitPoint pt = OrbitPoint::herm_pair(e1(E(W(i))), e1(E(U(j, 2))), C3);
            for (int a = 0; a <= i + j; ++a) {
                TestFunction f =
                    TestFunction::herm_pair(HermModuleElement::orbit({a}), HermModuleElement::orbit({i + j - a}), 3);
                CHECK(brute_force_oracle(f, pt, 2, 6) == evaluate(f, pt, 6));
            }
        }
}

TEST_CASE("property: oracle equivalence on random orbits, n = 2")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 3);
        INFO(f.str());
        auto mir = construct_representative(Space::MirabolicGL, f, C3);
        REQUIRE(mir.matched());
        HeckeElement one = HeckeElement::unit(Group::GL_F, 2, 3);
        CHECK(mirabolic_orbital(one, 0, mir.point->z, mir.point->w, 8).value ==
              oracle_mirabolic(one, 0, mir.point->z, mir.point->w, 8, 2).value);

        auto hp = construct_representative(Space::HermPoint, f, C3);
        REQUIRE(hp.matched());
        TestFunction ball = TestFunction::unit_ball(Space::HermPoint, 2, 3, 0);
        CHECK(evaluate(ball, *hp.point, 8) == brute_force_oracle(ball, *hp.point, 2, 8));

        auto lin = construct_representative(Space::LinearLie, f, C3);
        REQUIRE(lin.matched());
        for (bool tw : {false, true}) {
            TestFunction lb = TestFunction::unit_ball(Space::LinearLie, 2, 3, 0);
            CHECK(evaluate(lb, *lin.point, 8, {tw}) == brute_force_oracle(lb, *lin.point, 2, 8, {tw}));
        }

        auto si = construct_representative(Space::SplitInertLie, f, C3);
        if (si.matched()) {
            TestFunction sb = TestFunction::unit_ball(Space::SplitInertLie, 2, 3, 0);
            CHECK(evaluate(sb, *si.point, 8) == brute_force_oracle(sb, *si.point, 2, 8));
        }

        auto pr = construct_representative(Space::HermPair, f, C3);
        REQUIRE(pr.matched());
        TestFunction pb = TestFunction::unit_ball(Space::HermPair, 2, 3, 0);
        CHECK(evaluate(pb, *pr.point, 8) == brute_force_oracle(pb, *pr.point, 2, 8));
    }
}

TEST_CASE("property: mirabolic value is a class function and independent of w")
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 3);
        auto mir = construct_representative(Space::MirabolicGL, f, C3);
        const MatF& z = mir.point->z;
        const MatF& w = mir.point->w;
        HeckeElement phi = HeckeElement::unit(Group::GL_F, 2, 3) + hk(2, {1, 0});
        Rat base = mirabolic_orbital(phi, 0, z, w, 10).value;
        MatF h = rnd_glO(rng, 2);
        MatF hi = h.inverse();
        CHECK(mirabolic_orbital(phi, 0, MatF(hi * z * h), MatF(w * h), 10).value == base);
        MatF w2 = mf({{rnd(rng, -1, 2), rnd(rng, -1, 2)}});
        OrbitPoint p2 = OrbitPoint::mirabolic(z, w2, C3);
        if (is_strongly_regular(p2)) CHECK(mirabolic_orbital(phi, 0, z, w2, 10).value == base);
        CHECK(mirabolic_orbital(phi, 0, z, w, 14).value == base);
    }
}

TEST_CASE("property: engines are linear in the test function")
{
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 4);
        auto hp = construct_representative(Space::HermPoint, f, C3);
        HermModuleElement a = HermModuleElement::orbit({2, 0}), b = HermModuleElement::orbit({1, 1});
        Rat sa = unitary_stable(a, hp.point->x1, C3), sb = unitary_stable(b, hp.point->x1, C3);
        CHECK(unitary_stable(Rat(2) * a + Rat(-3) * b, hp.point->x1, C3) == Rat(2) * sa - Rat(3) * sb);

        auto mir = construct_representative(Space::MirabolicGL, f, C3);
        HeckeElement g1 = hk(2, {1, 0}), g2 = hk(2, {2, 0});
        auto val = [&](const HeckeElement& g) { return mirabolic_orbital(g, 0, mir.point->z, mir.point->w, 10).value; };
        CHECK(val(Qh::rat(Rat(5), 3) * g1 + g2) == Rat(5) * val(g1) + val(g2));
    }
}

TEST_CASE("property: split-inert vanishing off the matching locus")
{
    std::mt19937_64 rng(17);
    int seen = 0;
    for (int t = 0; t < 40 && seen < 8; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 3);
        if (f.c[0].val() % 2 == 0) continue;
        ++seen;
        CHECK_FALSE(construct_representative(Space::SplitInertLie, f, C3).matched());
        auto lin = construct_representative(Space::LinearLie, f, C3);
        CHECK(lie_linear_orbital({true}, 0, lin.point->X, lin.point->Y, lin.point->w, 10).value == 0);
    }
    CHECK(seen > 0);
}

TEST_CASE("errors")
{
    MatF w = m1(F(1));
    CHECK_THROWS_AS(brute_force_oracle(TestFunction::hecke(hk(1, {0})), OrbitPoint::mirabolic(m1(F(1)), w, C3), 0, 6),
                    InvalidConfig);
    CHECK_THROWS_AS(unitary_stable(HermModuleElement::orbit({-1}), e1(E(1)), C3), InvalidConfig);
}

TEST_CASE("property: Hermitian engines are orbit invariant")
{
    std::mt19937_64 rng(19);
    for (int t = 0; t < 20; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 3);
        INFO(f.str());
        auto hp = construct_representative(Space::HermPoint, f, C3);
        MatE x = hp.point->x1;
        MatE u = rnd_unitary(rng, 2);
        MatE y = u * x * u.star();
        CHECK(unitary_stable_ball(0, y, C3) == unitary_stable_ball(0, x, C3));
        HermModuleElement phi = HermModuleElement::orbit({1, 0}) + HermModuleElement::orbit({2, 1});
        CHECK(unitary_stable(phi, y, C3) == unitary_stable(phi, x, C3));

        auto pr = construct_representative(Space::HermPair, f, C3);
        MatE g = rnd_glE(rng, 2);
        MatE gi = g.inverse();
        MatE a1 = g * pr.point->x1 * g.star(), a2 = gi.star() * pr.point->x2 * gi;
        CHECK(two_var_stable_ball(0, a1, a2, C3) == two_var_stable_ball(0, pr.point->x1, pr.point->x2, C3));
        CHECK(epsilon_orbital_ball(0, a1, a2, C3) == epsilon_orbital_ball(0, pr.point->x1, pr.point->x2, C3));

        auto si = construct_representative(Space::SplitInertLie, f, C3);
        if (si.matched()) {
            MatE u2 = rnd_unitary(rng, 2);
            MatE X2 = u * si.point->x1 * u2.star();
            CHECK(split_inert_stable(0, X2, C3) == split_inert_stable(0, si.point->x1, C3));
        }
    }
}

TEST_CASE("property: oracle window stability and k = 1 equivalence")
{
    std::mt19937_64 rng(23);
    for (int t = 0; t < 12; ++t) {
        OrbitInvariant f = rnd_quadratic(rng, 0, 4);
        INFO(f.str());
        auto hp = construct_representative(Space::HermPoint, f, C3);
        TestFunction ball = TestFunction::unit_ball(Space::HermPoint, 2, 3, 0);
        CHECK(brute_force_oracle(ball, *hp.point, 2, 8) == brute_force_oracle(ball, *hp.point, 3, 8));

        auto lin = construct_representative(Space::LinearLie, f, C3);
        TestFunction lb = TestFunction::unit_ball(Space::LinearLie, 2, 3, 1);
        for (bool tw : {false, true})
            CHECK(evaluate(lb, *lin.point, 8, {tw}) == brute_force_oracle(lb, *lin.point, 2, 8, {tw}));

        auto si = construct_representative(Space::SplitInertLie, f, C3);
        if (si.matched())
            CHECK(split_inert_stable(1, si.point->x1, C3) == brute_force_oracle(TestFunction::unit_ball(Space::SplitInertLie, 2, 3, 1), *si.point, 2, 8));

        auto pr = construct_representative(Space::HermPair, f, C3);
        CHECK(epsilon_orbital_ball(0, pr.point->x1, pr.point->x2, C3) ==
              oracle_epsilon_ball(0, pr.point->x1, pr.point->x2, C3, 2));
        CHECK(epsilon_orbital_ball(1, pr.point->x1, pr.point->x2, C3) ==
              oracle_epsilon_ball(1, pr.point->x1, pr.point->x2, C3, 2));
    }
}
