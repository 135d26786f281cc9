#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hfl/orbits.hpp"

#include <random>
#include <set>

using namespace hfl;

namespace {

const FieldConfig C3 = FieldConfig::make(3, 12);

Padic F(long long x) { return Padic::from_int(C3.p, x, C3.N); }
Padic W(int e) { return Padic::from_parts(C3.p, e, 1, C3.N); }
QuadExt E(const Padic& a) { return QuadExt::from_F(a, C3.u); }
QuadExt E(long long a, long long b = 0) { return {F(a), F(b), C3.u}; }

MatF mf(std::initializer_list<std::initializer_list<Padic>> rows)
{
    std::vector<std::vector<Padic>> r;
    for (auto& row : rows) r.emplace_back(row);
    return MatF::from_rows(r);
}

OrbitInvariant inv(std::initializer_list<Padic> c) { return OrbitInvariant{std::vector<Padic>(c)}; }

Padic rnd(std::mt19937_64& rng, int vlo, int vhi)
{
    std::uniform_int_distribution<int> vd(vlo, vhi);
    std::uniform_int_distribution<u64> ud(1, ppow(3, 10) - 1);
    u64 x;
    do x = ud(rng);
    while (x % 3 == 0);
    return Padic::from_parts(3, vd(rng), x, C3.N);
}

MatF rnd_mat(std::mt19937_64& rng, int n, int vlo, int vhi)
{
    MatF m = MatF::zero(n, n, C3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rnd(rng, vlo, vhi);
    return m;
}

MatF rnd_gl(std::mt19937_64& rng, int n)
{
    while (true) {
        MatF m = rnd_mat(rng, n, -1, 2);
        if (m.det().certified_nonzero()) return m;
    }
}

MatE rnd_gl_E(std::mt19937_64& rng, int n)
{
    while (true) {
        MatE m = MatE::zero(n, n, C3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = QuadExt(rnd(rng, -1, 2), rnd(rng, -1, 2), C3.u);
        if (m.det().certified_nonzero()) return m;
    }
}

MatE rnd_herm(std::mt19937_64& rng, int n, int vlo, int vhi)
{
    MatE m = MatE::zero(n, n, C3);
    for (int i = 0; i < n; ++i) {
        m(i, i) = E(rnd(rng, vlo, vhi));
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = QuadExt(rnd(rng, vlo, vhi), rnd(rng, vlo, vhi), C3.u);
            m(j, i) = m(i, j).conj();
        }
    }
    return m;
}

// unitary for the identity form: Cayley transform of a skew-Hermitian matrix
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

bool same_poly(const OrbitInvariant& a, const OrbitInvariant& b) { return a == b; }

} // namespace

TEST_CASE("invariant_poly examples")
{
    MatF I1 = MatF::identity(1, C3);
    auto a = invariant_poly(OrbitPoint::linear_lie(I1, I1, I1, C3));
    CHECK(a == inv({F(-1), F(1)}));
    auto b = invariant_poly(OrbitPoint::herm_pair(MatE::diag({E(W(1))}), MatE::diag({E(W(1))}), C3));
    CHECK(b == inv({-W(2), F(1)}));
    auto c = invariant_poly(OrbitPoint::split_inert(MatE::diag({QuadExt::sqrt_u(C3)}), C3));
    CHECK(c == inv({F(-C3.u), F(1)}));
}

TEST_CASE("regularity examples")
{
    auto p = OrbitPoint::mirabolic(MatF::diag({F(1), F(1) + W(1)}), mf({{F(1), F(1)}}), C3);
    CHECK(is_strongly_regular(p));
    CHECK_FALSE(is_regular_ss(OrbitPoint::mirabolic(MatF::identity(2, C3), mf({{F(1), F(1)}}), C3)));
    auto q = OrbitPoint::mirabolic(MatF::diag({F(1), F(2)}), mf({{F(1), F(0)}}), C3);
    CHECK(is_regular_ss(q));
    CHECK_FALSE(is_strongly_regular(q));
}

TEST_CASE("matches examples")
{
    auto h = OrbitPoint::herm_point(MatE::diag({E(3)}), C3);
    auto m = OrbitPoint::mirabolic(MatF::diag({F(3)}), mf({{F(1)}}), C3);
    CHECK(matches(h, m));
    auto hp = OrbitPoint::herm_pair(MatE::diag({E(W(1))}), MatE::diag({E(W(1))}), C3);
    auto z = OrbitPoint::mirabolic(MatF::diag({W(2)}), mf({{F(1)}}), C3);
    CHECK(matches(hp, z));
    auto hq = OrbitPoint::herm_pair(MatE::diag({E(W(1))}), MatE::diag({E(1)}), C3);
    CHECK_FALSE(matches(hq, z));
}

TEST_CASE("transfer factor examples")
{
    CHECK(transfer_factor_mirabolic(MatF::diag({W(1)}), mf({{F(1)}})) == -1);
    CHECK(transfer_factor_mirabolic(MatF::diag({W(2)}), mf({{F(1)}})) == 1);
    CHECK(transfer_factor_mirabolic(MatF::diag({F(1), F(2)}), mf({{F(1), F(1)}})) == 1);
    CHECK_THROWS_AS(transfer_factor_mirabolic(MatF::diag({F(1), F(2)}), mf({{F(1), F(0)}})), NotStronglyRegular);

    MatF one = MatF::diag({F(1)});
    CHECK(transfer_factor_lie_linear({false}, one, one, one) == 1);
    // η(det YX)^1 η(det[w]) η(det Y) = η(ϖ) η(1) η(ϖ)
    CHECK(transfer_factor_lie_linear({true}, one, MatF::diag({W(1)}), one) == 1);
    MatF X = mf({{F(1), W(1)}, {F(2), F(1)}});
    MatF w = mf({{F(1), F(0)}});
    MatF C = krylov_rows(w, X);
    CHECK(transfer_factor_lie_linear({false}, X, MatF::identity(2, C3), w) == eta(C.det()));

    CHECK(delta_epsilon(MatE::diag({E(1)}), MatE::diag({E(1)})) == 1);
    CHECK(delta_epsilon(MatE::diag({E(W(1))}), MatE::diag({E(1)})) == -1);
    CHECK(delta_epsilon(MatE::diag({E(W(1)), E(1)}), MatE::identity(2, C3)) == -1);
}

TEST_CASE("stable_orbit_reps examples")
{
    auto hp = OrbitPoint::herm_pair(MatE::diag({E(W(1))}), MatE::diag({E(W(1))}), C3);
    auto st = stable_orbit_reps(hp);
    REQUIRE(st.reps.size() == 2);
    CHECK(st.reps[0].x1 == MatE::diag({E(W(1))}));
    CHECK(st.eps[0] == 1);
    CHECK(st.reps[1].x1 == MatE::diag({E(W(2))}));
    CHECK(st.reps[1].x2 == MatE::diag({E(1)}));
    CHECK(st.eps[1] == -1);

    CHECK(stable_orbit_reps(OrbitPoint::herm_point(MatE::diag({E(3)}), C3)).reps.size() == 1);
    MatF one = MatF::diag({F(1)});
    CHECK(stable_orbit_reps(OrbitPoint::linear_lie(one, MatF::diag({F(2)}), one, C3)).reps.size() == 1);
}

TEST_CASE("cayley examples")
{
    CHECK(cayley(-1, MatF::zero(2, 2, C3)) == MatF::identity(2, C3));
    CHECK_THROWS_AS(cayley(1, MatF::identity(2, C3)), OnSingularDivisor);
    // ϖ gl(O) lands in I + ϖ gl(O)
    MatF X = mf({{W(1), W(2)}, {F(0), W(1)}});
    MatF y = cayley(-1, X);
    CHECK(MatF(y - MatF::identity(2, C3)).entries_at_least(1));
    std::mt19937_64 rng(31);
    int done = 0;
    while (done < 20) {
        MatF A = rnd_mat(rng, 2, -1, 2);
        OrbitPoint pt = OrbitPoint::mirabolic(A, mf({{F(1), F(0)}}), C3);
        try {
            if (!is_regular_ss(pt)) continue;
            for (int nu : {1, -1}) CHECK(cayley_inv(nu, cayley(nu, A)) == A);
        } catch (const OnSingularDivisor&) {
            continue;
        }
        ++done;
    }
}

TEST_CASE("heart locus examples")
{
    CHECK(in_heart_locus(MatF::diag({F(1) + W(1)}), -1, false));
    CHECK_FALSE(in_heart_locus(MatF::identity(1, C3), 1, false));
    CHECK(in_heart_locus(MatF::zero(1, 1, C3), 1, true));
    CHECK_THROWS_AS(in_heart_locus(MatF::diag({W(-1)}), 1, false), NotIntegral);
}

TEST_CASE("construct_representative examples")
{
    auto m = construct_representative(Space::MirabolicGL, inv({F(2), F(-3), F(1)}), C3);
    REQUIRE(m.matched());
    CHECK(m.point->z == mf({{F(0), F(-2)}, {F(1), F(3)}}));
    CHECK(m.point->w == mf({{F(0), F(1)}}));

    auto s = construct_representative(Space::SplitInertLie, inv({-W(1), F(1)}), C3);
    CHECK_FALSE(s.matched());
    CHECK(s.no_match_proof.find("even") != std::string::npos);

    auto h = construct_representative(Space::HermPair, inv({-W(2), F(1)}), C3);
    REQUIRE(h.matched());
    CHECK(h.point->x1 == MatE::diag({E(W(1))}));
    CHECK(h.point->x2 == MatE::diag({E(W(1))}));
}

TEST_CASE("property: constructed representatives carry the target invariant")
{
    std::mt19937_64 rng(32);
    int split = 0, field = 0;
    for (int i = 0; i < 60; ++i) {
        OrbitInvariant f = inv({rnd(rng, -2, 3), rnd(rng, -1, 3), F(1)});
        try {
            if (etale_algebra(f.c).factors.size() == 2) ++split;
            else ++field;
        } catch (const Inseparable&) {
            continue;
        }
        for (Space sp : {Space::MirabolicGL, Space::LinearLie, Space::HermPoint, Space::HermPair, Space::SplitInertLie}) {
            auto c = construct_representative(sp, f, C3);
            if (!c.matched()) {
                CHECK(sp == Space::SplitInertLie);
                CHECK(f.c[0].val() % 2 != 0);
                continue;
            }
            CHECK(invariant_poly(*c.point) == f);
            if (sp == Space::HermPoint) CHECK(c.point->x1.is_hermitian());
            if (sp == Space::HermPair) CHECK((c.point->x1.is_hermitian() && c.point->x2.is_hermitian()));
        }
    }
    CHECK(split > 0);
    CHECK(field > 0);
}

TEST_CASE("property: invariant_poly is constant on orbits")
{
    std::mt19937_64 rng(33);
    for (int i = 0; i < 20; ++i) {
        MatF z = rnd_mat(rng, 2, 0, 2), w = mf({{rnd(rng, 0, 1), rnd(rng, 0, 1)}});
        MatF h = rnd_gl(rng, 2);
        auto p = OrbitPoint::mirabolic(z, w, C3);
        auto q = OrbitPoint::mirabolic(MatF(h.inverse() * z * h), MatF(w * h), C3);
        CHECK(same_poly(invariant_poly(p), invariant_poly(q)));

        MatF X = rnd_mat(rng, 2, 0, 2), Y = rnd_mat(rng, 2, 0, 2), h2 = rnd_gl(rng, 2);
        auto l = OrbitPoint::linear_lie(X, Y, w, C3);
        auto l2 = OrbitPoint::linear_lie(MatF(h * X * h2.inverse()), MatF(h2 * Y * h.inverse()), MatF(w * h2.inverse()), C3);
        CHECK(invariant_poly(l) == invariant_poly(l2));

        MatE x = rnd_herm(rng, 2, 0, 2), u = rnd_unitary(rng, 2);
        CHECK(invariant_poly(OrbitPoint::herm_point(x, C3)) ==
              invariant_poly(OrbitPoint::herm_point(MatE(u.star() * x * u), C3)));

        MatE x2 = rnd_herm(rng, 2, 0, 2), g = rnd_gl_E(rng, 2);
        MatE gsi = g.star().inverse();
        CHECK(invariant_poly(OrbitPoint::herm_pair(x, x2, C3)) ==
              invariant_poly(OrbitPoint::herm_pair(MatE(g * x * g.star()), MatE(gsi * x2 * g.inverse()), C3)));

        MatE Xe = rnd_gl_E(rng, 2), u2 = rnd_unitary(rng, 2);
        CHECK(invariant_poly(OrbitPoint::split_inert(Xe, C3)) ==
              invariant_poly(OrbitPoint::split_inert(MatE(u * Xe * u2.star()), C3)));
    }
}

TEST_CASE("property: stable classes share the invariant and carry consistent ε")
{
    std::mt19937_64 rng(34);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        MatE x1 = rnd_herm(rng, 2, -1, 2), x2 = rnd_herm(rng, 2, -1, 2);
        auto pt = OrbitPoint::herm_pair(x1, x2, C3);
        if (!is_regular_ss(pt)) continue;
        auto st = stable_orbit_reps(pt);
        auto f = invariant_poly(pt);
        CHECK(st.eps[0] == 1);
        for (size_t k = 0; k < st.reps.size(); ++k) {
            CHECK(invariant_poly(st.reps[k]) == f);
            CHECK(st.reps[k].x1.is_hermitian());
            CHECK(st.reps[k].x2.is_hermitian());
            CHECK(st.eps[k] == eta(descend(std::vector<QuadExt>{st.reps[k].x1.det()})[0]) * delta_epsilon(x1, x2));
        }
        if (st.reps.size() == 4) // split: ε is a character of the label group
            CHECK(st.eps[3] == st.eps[1] * st.eps[2]);
        std::set<std::vector<int>> labels(st.labels.begin(), st.labels.end());
        CHECK(labels.size() == st.reps.size());
        ++checked;

        auto hp = OrbitPoint::herm_point(x2, C3);
        if (!is_regular_ss(hp)) continue;
        auto sh = stable_orbit_reps(hp);
        for (const auto& r : sh.reps) {
            CHECK(r.x1.is_hermitian());
            CHECK(invariant_poly(r) == invariant_poly(hp));
        }
    }
    CHECK(checked > 10);
}

TEST_CASE("property: cayley equivariance and transfer factor relation")
{
    std::mt19937_64 rng(35);
    int heart = 0, eq = 0;
    while (eq < 50 || heart < 20) {
        MatF X = rnd_mat(rng, 2, 0, 2), Y = rnd_mat(rng, 2, 0, 2);
        MatF Z = lie_block(X, Y);
        auto lin = OrbitPoint::linear_lie(X, Y, mf({{F(1), F(0)}}), C3);
        try {
            if (!is_strongly_regular(lin)) continue;
        } catch (const PrecisionExhausted&) {
            continue;
        }
        MatF h1 = rnd_gl(rng, 2), h2 = rnd_gl(rng, 2);
        MatF H = MatF::zero(4, 4, C3);
        H.set_block(0, 0, h1);
        H.set_block(2, 2, h2);
        int nu = (eq % 2 == 0) ? 1 : -1;
        MatF y;
        try {
            y = cayley(nu, Z);
        } catch (const OnSingularDivisor&) {
            continue;
        }
        if (eq < 50) {
            CHECK(cayley(nu, MatF(H * Z * H.inverse())) == MatF(H * y * H.inverse()));
            CHECK(cayley_inv(nu, y) == Z);
            ++eq;
        }
        if (heart < 20 && in_heart_locus(Z, nu, true)) {
            MatF w = lin.w;
            MatF IXY = MatF::identity(2, C3) - X * Y;
            for (bool tw : {true, false}) {
                int lhs = transfer_factor_lie_linear({tw}, X, Y, w);
                int rhs = (tw ? eta(IXY.det()) : 1) * transfer_factor_group({tw}, y, w);
                CHECK(lhs == rhs);
            }
            ++heart;
        }
    }
}

TEST_CASE("property: congruence image of the Cayley transform")
{
    std::mt19937_64 rng(36);
    for (int i = 0; i < 20; ++i) {
        int k = 1 + i % 2;
        MatF Z = lie_block(rnd_mat(rng, 2, k, k + 2), rnd_mat(rng, 2, k, k + 2));
        MatF y = cayley(-1, Z);
        CHECK(MatF(y - MatF::identity(4, C3)).entries_at_least(k));
        // and back: a point outside ϖ^k gl(O) leaves the congruence set
        MatF Z2 = lie_block(rnd_mat(rng, 2, k - 1, k - 1), rnd_mat(rng, 2, k, k + 2));
        try {
            MatF y2 = cayley(-1, Z2);
            CHECK_FALSE(MatF(y2 - MatF::identity(4, C3)).entries_at_least(k));
        } catch (const OnSingularDivisor&) {
        }
    }
}

TEST_CASE("property: mirabolic transfer factor cocycle")
{
    std::mt19937_64 rng(37);
    int done = 0;
    while (done < 20) {
        MatF z = rnd_mat(rng, 2, 0, 2), w = mf({{rnd(rng, 0, 1), rnd(rng, 0, 1)}}), h = rnd_gl(rng, 2);
        auto p = OrbitPoint::mirabolic(z, w, C3);
        try {
            if (!is_strongly_regular(p)) continue;
        } catch (const PrecisionExhausted&) {
            continue;
        }
        int d0 = transfer_factor_mirabolic(z, w);
        int d1 = transfer_factor_mirabolic(MatF(h.inverse() * z * h), MatF(w * h));
        CHECK(d1 == eta(h.det()) * d0);
        ++done;
    }
}

TEST_CASE("serialization round trip")
{
    auto a = OrbitPoint::mirabolic(MatF::diag({F(1), W(2)}), mf({{F(1), F(5)}}), C3);
    auto b = OrbitPoint::herm_pair(MatE::from_rows({{E(1), E(2, 1)}, {E(2, -1), E(W(1))}}), MatE::identity(2, C3), C3);
    for (const auto& p : {a, b}) {
        auto q = deserialize(serialize(p), C3);
        CHECK(q.space == p.space);
        CHECK(serialize(q) == serialize(p));
        CHECK(invariant_poly(q) == invariant_poly(p));
    }
}

TEST_CASE("property: orthonormalize returns an isometry to the identity form")
{
    std::mt19937_64 rng(41);
    int done = 0;
    for (int t = 0; t < 200 && done < 40; ++t) {
        MatE G = rnd_herm(rng, 2, -2, 3);
        QuadExt d = G.det();
        if (!d.certified_nonzero() || d.val() % 2 != 0) continue;
        ++done;
        MatE S = orthonormalize(G, C3);
        CHECK(MatE(S.star() * G * S) == MatE::identity(2, C3));
    }
    CHECK(done >= 20);
    MatE D = MatE::diag({E(W(3)), E(W(1))});
    MatE S = orthonormalize(D, C3);
    CHECK(MatE(S.star() * D * S) == MatE::identity(2, C3));
}
