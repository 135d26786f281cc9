#include "hfl/verifier.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

namespace hfl {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

long long to_ll(const std::string& key, const std::string& v)
{
    try {
        size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidConfig("key " + key + " expects an integer, got '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_ll(key, v)); }

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidConfig("key " + key + " expects true or false, got '" + v + "'");
}

Rat sgn(int k) { return k % 2 == 0 ? Rat(1) : Rat(-1); }

using Clock = std::chrono::steady_clock;

// exact p-adic number ϖ^v·unit with unit < p^digits
Padic sample_coeff(std::mt19937_64& rng, int p, int vlo, int vhi, int digits)
{
    std::uniform_int_distribution<int> vd(vlo, vhi);
    std::uniform_int_distribution<u64> ud(1, ppow(p, digits) - 1);
    int v = vd(rng);
    u64 x;
    do x = ud(rng);
    while (x % static_cast<u64>(p) == 0);
    return Padic::from_parts(p, v, x, precision_cap(p));
}

int sample_digits(const CampaignConfig& cfg) { return std::min({cfg.field.N, 10, precision_cap(cfg.field.p) - 1}); }

MatF rnd_mat(std::mt19937_64& rng, const FieldConfig& W, int n, int vlo, int vhi, int digits)
{
    MatF m = MatF::zero(n, n, W);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = sample_coeff(rng, W.p, vlo, vhi, digits);
    return m;
}

MatF rnd_gl(std::mt19937_64& rng, const FieldConfig& W, int n, int vlo, int digits)
{
    while (true) {
        MatF m = rnd_mat(rng, W, n, vlo, 2, digits);
        Padic d = m.det();
        if (d.certified_nonzero() && (vlo < 0 || d.val() == 0)) return m;
    }
}

MatE rnd_glE(std::mt19937_64& rng, const FieldConfig& W, int n, int digits)
{
    while (true) {
        MatE m = MatE::zero(n, n, W);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = QuadExt(sample_coeff(rng, W.p, -1, 2, digits), sample_coeff(rng, W.p, -1, 2, digits), W.u);
        if (m.det().certified_nonzero()) return m;
    }
}

// Cayley image of an integral skew-Hermitian matrix
MatE rnd_unitary(std::mt19937_64& rng, const FieldConfig& W, int n, int digits)
{
    MatE S = MatE::zero(n, n, W);
    QuadExt s = QuadExt::sqrt_u(W);
    for (int i = 0; i < n; ++i) {
        S(i, i) = s * QuadExt::from_F(sample_coeff(rng, W.p, 0, 2, digits), W.u);
        for (int j = i + 1; j < n; ++j) {
            S(i, j) = QuadExt(sample_coeff(rng, W.p, 0, 2, digits), sample_coeff(rng, W.p, 0, 2, digits), W.u);
            S(j, i) = -S(i, j).conj();
        }
    }
    MatE I = MatE::identity(n, W);
    return MatE((I + S) * MatE(I - S).inverse());
}

MatF scaled(const MatF& x, int e, const FieldConfig& W) { return MatF(make_unif<Padic>(W, e) * x); }
MatE scaled(const MatE& x, int e, const FieldConfig& W)
{
    return MatE(QuadExt::from_F(make_unif<Padic>(W, e), W.u) * x);
}

// ---- case plumbing ----

struct Outcome {
    Rat lhs = 0, rhs = 0;
    std::vector<std::string> mismatches;
    bool no_match = false;
    std::string note;

    void expect(const std::string& what, const Rat& a, const Rat& b)
    {
        if (a != b) mismatches.push_back(what + ": " + rat_str(a) + " != " + rat_str(b));
    }
    void expect_true(const std::string& what, bool ok)
    {
        if (!ok) mismatches.push_back(what);
    }
    void add_note(const std::string& s) { note += (note.empty() ? "" : "; ") + s; }
};

struct Job {
    std::vector<std::string> invariant;
    std::string label;
    std::function<Outcome()> body;
};

CaseRecord run_job(const Job& job)
{
    auto t0 = Clock::now();
    CaseRecord r;
    r.invariant = job.invariant;
    r.label = job.label;
    auto inconclusive = [&](const std::exception& e) {
        r.status = CaseStatus::Inconclusive;
        r.note = e.what();
    };
    try {
        Outcome o = job.body();
        r.lhs = o.lhs;
        r.rhs = o.rhs;
        r.equal = o.lhs == o.rhs;
        r.note = o.note;
        for (const auto& m : o.mismatches) r.note += (r.note.empty() ? "" : "; ") + m;
        if (r.equal && o.mismatches.empty())
            r.status = o.no_match ? CaseStatus::NoMatchProved : CaseStatus::Pass;
        else
            r.status = CaseStatus::Fail;
    } catch (const RepresentativeSearchFailed& e) {
        inconclusive(e);
    } catch (const WindowInsufficient& e) {
        inconclusive(e);
    } catch (const CellBoundUncertified& e) {
        inconclusive(e);
    } catch (const PrecisionExhausted& e) {
        inconclusive(e);
    } catch (const std::exception& e) {
        r.status = CaseStatus::Fail;
        r.note = std::string("unexpected error: ") + e.what();
    }
    r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    return r;
}

std::vector<CaseRecord> run_jobs(const std::vector<Job>& jobs, int threads)
{
    std::vector<CaseRecord> out(jobs.size());
    size_t workers = threads > 0 ? static_cast<size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < jobs.size(); i = next++) out[i] = run_job(jobs[i]);
    };
    std::vector<std::thread> pool;
    for (size_t i = 1; i < workers; ++i) pool.emplace_back(work);
    if (workers > 0) work();
    for (auto& t : pool) t.join();
    return out;
}

std::vector<std::string> inv_strings(const OrbitInvariant& f)
{
    std::vector<std::string> s;
    for (const auto& c : f.c) s.push_back(c.str());
    return s;
}

// Value of one side of an identity. A representative that provably does not exist contributes 0.
template <class Fn>
Rat side(const MatchedTuple& t, Space s, Outcome& o, Fn fn)
{
    if (auto it = t.search_failed.find(s); it != t.search_failed.end()) throw RepresentativeSearchFailed(it->second);
    const OrbitPoint* pt = t.point(s);
    if (!pt) {
        o.no_match = true;
        o.add_note("no " + space_name(s) + " point: " + t.reps.at(s).no_match_proof);
        return 0;
    }
    return fn(*pt);
}

const OrbitPoint& need(const MatchedTuple& t, Space s)
{
    if (auto it = t.search_failed.find(s); it != t.search_failed.end()) throw RepresentativeSearchFailed(it->second);
    const OrbitPoint* pt = t.point(s);
    if (!pt) throw NotRepresentable("no " + space_name(s) + " point for " + t.inv.str());
    return *pt;
}

Signature sig(int n, int top)
{
    Signature s(static_cast<size_t>(n), 0);
    s[0] = top;
    return s;
}

// ---- FL checks ----

struct Ctx {
    const CampaignConfig& cfg;
    FieldConfig W;
    int n;
    long long q;
    std::vector<MatchedTuple> tuples;
};

std::vector<Job> fl_unit(const Ctx& c)
{
    std::vector<Job> jobs;
    for (const auto& t : c.tuples)
        jobs.push_back({inv_strings(t.inv), "unit", [&c, &t] {
                            Outcome o;
                            HermModuleElement phi = HermModuleElement::unit_ball(c.n);
                            HeckeElement one = HeckeElement::unit(Group::GL_F, c.n, c.q);
                            o.lhs = side(t, Space::HermPoint, o, [&](const OrbitPoint& pt) {
                                Rat v = unitary_stable(phi, pt.x1, c.W);
                                if (c.cfg.oracle)
                                    o.expect("unitary side vs oracle", v,
                                             brute_force_oracle(TestFunction::herm_point(phi, c.q), pt, c.cfg.m,
                                                                c.cfg.v_max));
                                return v;
                            });
                            o.rhs = side(t, Space::MirabolicGL, o, [&](const OrbitPoint& pt) {
                                Rat v = mirabolic_orbital(one, 0, pt.z, pt.w, c.cfg.v_max).value;
                                if (c.cfg.oracle)
                                    o.expect("linear side vs oracle", v,
                                             oracle_mirabolic(one, 0, pt.z, pt.w, c.cfg.v_max, c.cfg.m).value);
                                return v;
                            });
                            return o;
                        }});
    return jobs;
}

std::vector<Job> fl_det_slice(const Ctx& c)
{
    std::vector<Job> jobs;
    for (const auto& t : c.tuples)
        for (int d = 0; d <= c.cfg.degree_cut; ++d)
            jobs.push_back({inv_strings(t.inv), "d=" + std::to_string(d), [&c, &t, d] {
                                Outcome o;
                                o.lhs = side(t, Space::HermPoint, o, [&](const OrbitPoint& pt) {
                                    return unitary_stable(HermModuleElement::det_slice(c.n, d), pt.x1, c.W);
                                });
                                o.rhs = sgn(c.n * d) * side(t, Space::MirabolicGL, o, [&](const OrbitPoint& pt) {
                                            return mirabolic_orbital(HeckeElement::det_slice(c.n, c.q, d), 0, pt.z,
                                                                     pt.w, c.cfg.v_max)
                                                .value;
                                        });
                                return o;
                            }});
    return jobs;
}

std::vector<Job> fl_two_var(const Ctx& c)
{
    std::vector<Job> jobs;
    for (const auto& t : c.tuples)
        for (int i = 0; i <= c.cfg.degree_cut; ++i)
            for (int j = 0; i + j <= c.cfg.degree_cut; ++j)
                jobs.push_back({inv_strings(t.inv), "i=" + std::to_string(i) + ",j=" + std::to_string(j),
                                [&c, &t, i, j] {
                                    Outcome o;
                                    HermModuleElement a = HermModuleElement::det_slice(c.n, i);
                                    HermModuleElement b = HermModuleElement::det_slice(c.n, j);
                                    o.lhs = side(t, Space::HermPair, o, [&](const OrbitPoint& pt) {
                                        return two_var_stable(a, b, pt.x1, pt.x2, c.W);
                                    });
                                    HeckeElement h =
                                        hecke_convolve(hironaka_filtration(a, c.q), hironaka_filtration(b, c.q));
                                    o.rhs = side(t, Space::MirabolicGL, o, [&](const OrbitPoint& pt) {
                                        return mirabolic_orbital(h, 0, pt.z, pt.w, c.cfg.v_max).value;
                                    });
                                    return o;
                                }});
    return jobs;
}

std::vector<Job> fl_one_var(const Ctx& c)
{
    // pairs whose product leaves the determinant-slice span are outside the identity's domain
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i <= c.cfg.degree_cut; ++i)
        for (int j = 0; i + j <= c.cfg.degree_cut; ++j) try {
                hironaka_product(HermModuleElement::det_slice(c.n, i), HermModuleElement::det_slice(c.n, j), c.q);
                pairs.emplace_back(i, j);
            } catch (const NotRepresentable&) {
            }
    std::vector<Job> jobs;
    for (const auto& t : c.tuples)
        for (auto [i, j] : pairs)
            jobs.push_back({inv_strings(t.inv), "i=" + std::to_string(i) + ",j=" + std::to_string(j),
                            [&c, &t, i = i, j = j] {
                                Outcome o;
                                HermModuleElement a = HermModuleElement::det_slice(c.n, i);
                                HermModuleElement b = HermModuleElement::det_slice(c.n, j);
                                o.lhs = side(t, Space::HermPair, o, [&](const OrbitPoint& pt) {
                                    return two_var_stable(a, b, pt.x1, pt.x2, c.W);
                                });
                                HermModuleElement ab = hironaka_product(a, b, c.q);
                                o.rhs = side(t, Space::HermPoint, o,
                                             [&](const OrbitPoint& pt) { return unitary_stable(ab, pt.x1, c.W); });
                                return o;
                            }});
    return jobs;
}

enum class LieKind { SplitInert, InertInert, Epsilon };

Outcome lie_case(const Ctx& c, const MatchedTuple& t, LieKind kind, int k)
{
    Outcome o;
    const int m = c.cfg.m, vm = c.cfg.v_max;
    const bool orc = c.cfg.oracle;
    auto linear = [&](bool twisted) {
        return side(t, Space::LinearLie, o, [&](const OrbitPoint& pt) {
            Rat v = lie_linear_orbital({twisted}, k, pt.X, pt.Y, pt.w, vm).value;
            if (orc) o.expect("linear side vs oracle", v, oracle_lie_linear({twisted}, k, pt.X, pt.Y, pt.w, vm, m).value);
            if (k > 0) {
                Rat v0 = lie_linear_orbital({twisted}, 0, scaled(pt.X, -k, c.W), scaled(pt.Y, -k, c.W), pt.w, vm).value;
                o.expect("linear side vs k = 0 at the scaled point", v, (twisted ? sgn(k) : Rat(1)) * v0);
            }
            return v;
        });
    };
    auto split_inert = [&] {
        return side(t, Space::SplitInertLie, o, [&](const OrbitPoint& pt) {
            Rat v = split_inert_stable(k, pt.x1, c.W);
            if (orc)
                o.expect("split-inert side vs oracle", v,
                         brute_force_oracle(TestFunction::unit_ball(Space::SplitInertLie, c.n, c.q, k), pt, m, vm));
            if (k > 0) o.expect("split-inert side vs k = 0 at the scaled point", v,
                                split_inert_stable(0, scaled(pt.x1, -k, c.W), c.W));
            return v;
        });
    };
    switch (kind) {
    case LieKind::SplitInert:
        o.lhs = linear(true);
        o.rhs = sgn(k) * split_inert();
        break;
    case LieKind::InertInert:
        o.lhs = linear(false);
        o.rhs = side(t, Space::HermPair, o, [&](const OrbitPoint& pt) {
            Rat v = two_var_stable_ball(k, pt.x1, pt.x2, c.W);
            if (orc)
                o.expect("unitary side vs oracle", v,
                         brute_force_oracle(TestFunction::unit_ball(Space::HermPair, c.n, c.q, k), pt, m, vm));
            if (k > 0) o.expect("unitary side vs k = 0 at the scaled point", v,
                                two_var_stable_ball(0, scaled(pt.x1, -k, c.W), scaled(pt.x2, -k, c.W), c.W));
            return v;
        });
        break;
    case LieKind::Epsilon:
        o.lhs = side(t, Space::HermPair, o, [&](const OrbitPoint& pt) {
            Rat v = epsilon_orbital_ball(k, pt.x1, pt.x2, c.W);
            if (orc) o.expect("ε side vs oracle", v, oracle_epsilon_ball(k, pt.x1, pt.x2, c.W, m));
            if (k > 0) o.expect("ε side vs k = 0 at the scaled point", v,
                                sgn(k) * epsilon_orbital_ball(0, scaled(pt.x1, -k, c.W), scaled(pt.x2, -k, c.W), c.W));
            return v;
        });
        o.rhs = sgn(k) * split_inert();
        break;
    }
    return o;
}

std::vector<Job> fl_lie(const Ctx& c, LieKind kind, int k)
{
    std::vector<Job> jobs;
    for (const auto& t : c.tuples)
        jobs.push_back({inv_strings(t.inv), "k=" + std::to_string(k), [&c, &t, kind, k] { return lie_case(c, t, kind, k); }});
    return jobs;
}

// ---- SYM_suite ----

int vp(long long x, long long q)
{
    if (x == 0) return 1 << 20;
    int v = 0;
    while (x % q == 0) {
        x /= q;
        ++v;
    }
    return v;
}

long long ipow(long long b, int e)
{
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// (1_λ * 1_μ)(ϖ^ν) for GL_2(Q_p): count lattices L = y O^2 ⊆ O^2 in Hermite form
// [[ϖ^{a1}, c], [0, ϖ^{a2}]] with relpos(O^2, L) = λ and relpos(L, ϖ^ν O^2) = μ
long long coset_convolution(const Signature& lam, const Signature& mu, const Signature& nu, long long q)
{
    long long cnt = 0;
    int d = lam[0] + lam[1];
    for (int a1 = 0; a1 <= d; ++a1) {
        int a2 = d - a1;
        for (long long cc = 0; cc < ipow(q, a1); ++cc) {
            int e1 = std::min({a1, a2, vp(cc, q)});
            if (Signature{d - e1, e1} != lam) continue;
            int f1 = std::min({a2 + nu[0], vp(cc, q) + nu[1], a1 + nu[1]}) - d;
            int tot = nu[0] + nu[1] - d;
            if (Signature{tot - f1, f1} == mu) ++cnt;
        }
    }
    return cnt;
}

std::vector<Job> sym_suite(const Ctx& c)
{
    std::vector<Job> jobs;
    const int cut = c.cfg.degree_cut;
    auto flag = [](bool got, bool want, const std::string& what) {
        Outcome o;
        o.lhs = got ? 1 : 0;
        o.rhs = want ? 1 : 0;
        if (!want) o.add_note("negative control: " + what + " must be rejected");
        return o;
    };
    for (int n = 1; n <= 3; ++n)
        jobs.push_back({{}, "hall-littlewood generating series, n=" + std::to_string(n) + ", degree<=" + std::to_string(cut),
                        [=] { return flag(check_hl_generating_series(n, cut), true, ""); }});
    for (int n = 1; n <= 2; ++n)
        jobs.push_back({{}, "alternating ε-identity, n=" + std::to_string(n) + ", degree<=" + std::to_string(cut),
                        [=] { return flag(check_eps_generating_identity(n, cut), true, ""); }});
    jobs.push_back({{}, "mutated-sign ε-identity, n=2", [=] {
                        return flag(check_eps_generating_identity(2, cut, false), false, "the identity without (-1)^i");
                    }});
    const int ucut = std::min(4, cut);
    for (int n = 1; n <= 2; ++n) {
        long long q = c.q;
        jobs.push_back({{}, "unit image product formula, n=" + std::to_string(n) + ", degree<=" + std::to_string(ucut),
                        [=] { return flag(sf_unit_image(n, q, ucut).matches, true, ""); }});
        jobs.push_back({{}, "untwisted unit image, n=" + std::to_string(n), [=] {
                            return flag(sf_unit_image(n, q, ucut, false).matches, false, "1_gl in place of η 1_gl");
                        }});
    }
    std::vector<Signature> sigs;
    for (int d = 0; d <= 3; ++d)
        for (const auto& l : partitions(2, d)) sigs.push_back(l);
    for (const auto& lam : sigs)
        for (const auto& mu : sigs) {
            std::ostringstream lab;
            lab << "convolution (" << lam[0] << "," << lam[1] << ")*(" << mu[0] << "," << mu[1] << "), n=2";
            long long q = c.q;
            jobs.push_back({{}, lab.str(), [=] {
                                Outcome o;
                                HeckeElement f = HeckeElement::basis(Group::GL_F, q, lam);
                                HeckeElement g = HeckeElement::basis(Group::GL_F, q, mu);
                                HeckeElement h = hecke_convolve(f, g);
                                o.expect_true("satake is multiplicative", satake(h) == satake(f) * satake(g));
                                for (const auto& [nu, v] : h.c)
                                    o.expect_true("support off |λ|+|μ| at (" + std::to_string(nu[0]) + "," +
                                                      std::to_string(nu[1]) + ")",
                                                  size_of(nu) == size_of(lam) + size_of(mu));
                                for (const auto& nu : partitions(2, size_of(lam) + size_of(mu))) {
                                    auto it = h.c.find(nu);
                                    Qh got = it == h.c.end() ? Qh::rat(0, q) : it->second;
                                    Rat want = coset_convolution(lam, mu, nu, q);
                                    o.expect_true("irrational structure constant", got.b == 0);
                                    o.expect("coefficient at (" + std::to_string(nu[0]) + "," + std::to_string(nu[1]) + ")",
                                             got.a, want);
                                    o.lhs += got.a;
                                    o.rhs += want;
                                }
                                return o;
                            }});
        }
    return jobs;
}

// ---- CAYLEY_suite ----

std::vector<Job> cayley_suite(const Ctx& c)
{
    const FieldConfig& W = c.W;
    const int n = c.n, dg = sample_digits(c.cfg);
    std::mt19937_64 rng(*c.cfg.seed ^ 0xCA7u);
    std::vector<Job> jobs;

    MatF e1 = MatF::zero(1, n, W);
    e1(0, 0) = make_scalar<Padic>(W, 1);
    int made = 0;
    while (made < 50) {
        MatF X = rnd_mat(rng, W, n, 0, 2, dg), Y = rnd_mat(rng, W, n, 0, 2, dg);
        MatF h1 = rnd_gl(rng, W, n, -1, dg), h2 = rnd_gl(rng, W, n, -1, dg);
        MatF Z = lie_block(X, Y);
        int nu = made % 2 == 0 ? 1 : -1;
        try {
            if (!is_strongly_regular(OrbitPoint::linear_lie(X, Y, e1, W)))
                continue;
            cayley(nu, Z);
        } catch (const Error&) {
            continue;
        }
        ++made;
        jobs.push_back({{}, "equivariance and round trip #" + std::to_string(made) + ", ν=" + std::to_string(nu),
                        [=] {
                            Outcome o;
                            MatF H = MatF::zero(2 * n, 2 * n, W);
                            H.set_block(0, 0, h1);
                            H.set_block(n, n, h2);
                            MatF Hi = H.inverse();
                            MatF y = cayley(nu, Z);
                            bool eq = cayley(nu, MatF(H * Z * Hi)) == MatF(H * y * Hi);
                            bool rt = cayley_inv(nu, y) == Z;
                            o.expect_true("equivariance", eq);
                            o.expect_true("round trip", rt);
                            o.lhs = (eq && rt) ? 1 : 0;
                            o.rhs = 1;
                            return o;
                        }});
    }

    made = 0;
    while (made < 20) {
        MatF X = rnd_mat(rng, W, n, 0, 2, dg), Y = rnd_mat(rng, W, n, 0, 2, dg);
        MatF w = MatF::zero(1, n, W);
        for (int j = 0; j < n; ++j) w(0, j) = sample_coeff(rng, W.p, 0, 1, dg);
        MatF Z = lie_block(X, Y);
        int nu = made % 2 == 0 ? 1 : -1;
        try {
            if (!is_strongly_regular(OrbitPoint::linear_lie(X, Y, w, W))) continue;
            if (!in_heart_locus(Z, nu, true)) continue;
            cayley(nu, Z);
        } catch (const Error&) {
            continue;
        }
        ++made;
        jobs.push_back({{}, "heart-locus transfer factor #" + std::to_string(made) + ", ν=" + std::to_string(nu),
                        [=] {
                            Outcome o;
                            MatF y = cayley(nu, Z);
                            MatF IXY = MatF::identity(n, W) - X * Y;
                            for (bool tw : {true, false}) {
                                int l = transfer_factor_lie_linear({tw}, X, Y, w);
                                int r = (tw ? eta(IXY.det()) : 1) * transfer_factor_group({tw}, y, w);
                                if (tw) {
                                    o.lhs = l;
                                    o.rhs = r;
                                } else {
                                    o.expect("untwisted η_2", l, r);
                                }
                            }
                            return o;
                        }});
    }

    for (int i = 0; i < 20; ++i) {
        int k = 1 + i % 2;
        MatF Z = lie_block(rnd_mat(rng, W, n, k, k + 2, dg), rnd_mat(rng, W, n, k, k + 2, dg));
        MatF Z2 = lie_block(rnd_mat(rng, W, n, k - 1, k - 1, dg), rnd_mat(rng, W, n, k, k + 2, dg));
        jobs.push_back({{}, "congruence image #" + std::to_string(i + 1) + ", k=" + std::to_string(k), [=] {
                            Outcome o;
                            MatF I = MatF::identity(2 * n, W);
                            bool in = MatF(cayley(-1, Z) - I).entries_at_least(k);
                            bool out = true;
                            try {
                                out = !MatF(cayley(-1, Z2) - I).entries_at_least(k);
                            } catch (const OnSingularDivisor&) {
                            }
                            o.expect_true("a point of ϖ^k gl(O) lands outside the congruence set", in);
                            o.expect_true("a point outside ϖ^k gl(O) lands inside the congruence set", out);
                            o.lhs = (in && out) ? 1 : 0;
                            o.rhs = 1;
                            return o;
                        }});
    }
    return jobs;
}

// ---- INV_suite ----

std::vector<Job> inv_suite(const Ctx& c)
{
    std::vector<Job> jobs;
    const int n = c.n, dg = sample_digits(c.cfg);
    const FieldConfig W = c.W;
    const long long q = c.q;
    const int vm = c.cfg.v_max, m = c.cfg.m;
    std::mt19937_64 rng(*c.cfg.seed ^ 0x1A7u);
    int idx = 0;
    for (const auto& t : c.tuples) {
        const bool orc = c.cfg.oracle && idx < 5;
        ++idx;
        // group elements are drawn here so the stream does not depend on scheduling
        MatF h = rnd_gl(rng, W, n, 0, dg), h2 = rnd_gl(rng, W, n, 0, dg);
        MatF w2 = MatF::zero(1, n, W);
        for (int j = 0; j < n; ++j) w2(0, j) = sample_coeff(rng, W.p, -1, 2, dg);
        MatE u1 = rnd_unitary(rng, W, n, dg), u2 = rnd_unitary(rng, W, n, dg);
        MatE g = rnd_glE(rng, W, n, dg);
        auto inv = inv_strings(t.inv);

        jobs.push_back({inv, "mirabolic", [=, &t] {
                            Outcome o;
                            const OrbitPoint& pt = need(t, Space::MirabolicGL);
                            HeckeElement g1 = HeckeElement::basis(Group::GL_F, q, sig(n, 1));
                            HeckeElement g2 = HeckeElement::basis(Group::GL_F, q, sig(n, 2));
                            HeckeElement phi = HeckeElement::unit(Group::GL_F, n, q) + g1;
                            auto val = [&](const HeckeElement& f, const MatF& z, const MatF& w) {
                                return mirabolic_orbital(f, 0, z, w, vm).value;
                            };
                            o.lhs = val(phi, pt.z, pt.w);
                            o.rhs = val(phi, MatF(h.inverse() * pt.z * h), MatF(pt.w * h));
                            bool sr = false;
                            try {
                                sr = is_strongly_regular(OrbitPoint::mirabolic(pt.z, w2, W));
                            } catch (const PrecisionExhausted&) {
                            }
                            if (sr) o.expect("another cyclic vector", val(phi, pt.z, w2), o.lhs);
                            o.expect("linearity", val(Qh::rat(Rat(5), q) * g1 + g2, pt.z, pt.w),
                                     Rat(5) * val(g1, pt.z, pt.w) + val(g2, pt.z, pt.w));
                            if (orc) o.expect("oracle", oracle_mirabolic(phi, 0, pt.z, pt.w, vm, m).value, o.lhs);
                            return o;
                        }});

        jobs.push_back({inv, "lie_linear", [=, &t] {
                            Outcome o;
                            const OrbitPoint& pt = need(t, Space::LinearLie);
                            MatF X2 = h * pt.X * h2.inverse(), Y2 = h2 * pt.Y * h.inverse(), wm = pt.w * h2.inverse();
                            bool sr = false;
                            try {
                                sr = is_strongly_regular(OrbitPoint::linear_lie(pt.X, pt.Y, w2, W));
                            } catch (const PrecisionExhausted&) {
                            }
                            for (bool tw : {true, false}) {
                                std::string e = tw ? "(η,η)" : "(η,1)";
                                Rat base = lie_linear_orbital({tw}, 0, pt.X, pt.Y, pt.w, vm).value;
                                Rat moved = lie_linear_orbital({tw}, 0, X2, Y2, wm, vm).value;
                                if (tw) {
                                    o.lhs = base;
                                    o.rhs = moved;
                                } else {
                                    o.expect("orbit invariance " + e, moved, base);
                                }
                                if (sr)
                                    o.expect("another cyclic vector " + e,
                                             lie_linear_orbital({tw}, 0, pt.X, pt.Y, w2, vm).value, base);
                                TestFunction f;
                                f.space = Space::LinearLie;
                                f.n = n;
                                f.q = q;
                                f.balls = {{0, Rat(2)}, {1, Rat(-3)}};
                                Rat b1 = lie_linear_orbital({tw}, 1, pt.X, pt.Y, pt.w, vm).value;
                                o.expect("linearity " + e, evaluate(f, pt, vm, {tw}), Rat(2) * base - Rat(3) * b1);
                                if (orc)
                                    o.expect("oracle " + e, oracle_lie_linear({tw}, 0, pt.X, pt.Y, pt.w, vm, m).value,
                                             base);
                            }
                            return o;
                        }});

        jobs.push_back({inv, "unitary_stable", [=, &t] {
                            Outcome o;
                            const OrbitPoint& pt = need(t, Space::HermPoint);
                            MatE y = u1 * pt.x1 * u1.star();
                            HermModuleElement a = HermModuleElement::unit_ball(n) + HermModuleElement::orbit(sig(n, 1));
                            HermModuleElement b = HermModuleElement::orbit(sig(n, 2));
                            o.lhs = unitary_stable(a, pt.x1, W);
                            o.rhs = unitary_stable(a, y, W);
                            o.expect("linearity", unitary_stable(Rat(2) * a + Rat(-3) * b, pt.x1, W),
                                     Rat(2) * o.lhs - Rat(3) * unitary_stable(b, pt.x1, W));
                            if (orc)
                                o.expect("oracle", brute_force_oracle(TestFunction::herm_point(a, q), pt, m, vm), o.lhs);
                            return o;
                        }});

        jobs.push_back({inv, "two_var_stable", [=, &t] {
                            Outcome o;
                            const OrbitPoint& pt = need(t, Space::HermPair);
                            MatE gi = g.inverse();
                            MatE a1 = g * pt.x1 * g.star(), a2 = gi.star() * pt.x2 * gi;
                            HermModuleElement f0 = HermModuleElement::unit_ball(n), f1 = HermModuleElement::det_slice(n, 1);
                            o.lhs = two_var_stable_ball(0, pt.x1, pt.x2, W);
                            o.rhs = two_var_stable_ball(0, a1, a2, W);
                            o.expect("orbit invariance Φ_0⊗Φ_1", two_var_stable(f0, f1, a1, a2, W),
                                     two_var_stable(f0, f1, pt.x1, pt.x2, W));
                            o.expect("linearity", two_var_stable(Rat(2) * f0 + f1, f1, pt.x1, pt.x2, W),
                                     Rat(2) * two_var_stable(f0, f1, pt.x1, pt.x2, W) +
                                         two_var_stable(f1, f1, pt.x1, pt.x2, W));
                            if (orc)
                                o.expect("oracle",
                                         brute_force_oracle(TestFunction::unit_ball(Space::HermPair, n, q, 0), pt, m, vm),
                                         o.lhs);
                            return o;
                        }});

        jobs.push_back({inv, "epsilon_orbital", [=, &t] {
                            Outcome o;
                            const OrbitPoint& pt = need(t, Space::HermPair);
                            MatE gi = g.inverse();
                            MatE a1 = g * pt.x1 * g.star(), a2 = gi.star() * pt.x2 * gi;
                            HermModuleElement f0 = HermModuleElement::unit_ball(n), f1 = HermModuleElement::det_slice(n, 1);
                            o.lhs = epsilon_orbital_ball(0, pt.x1, pt.x2, W);
                            o.rhs = epsilon_orbital_ball(0, a1, a2, W);
                            o.expect("linearity", epsilon_orbital(Rat(2) * f0 + f1, f1, pt.x1, pt.x2, W),
                                     Rat(2) * epsilon_orbital(f0, f1, pt.x1, pt.x2, W) +
                                         epsilon_orbital(f1, f1, pt.x1, pt.x2, W));
                            if (orc) o.expect("oracle", oracle_epsilon_ball(0, pt.x1, pt.x2, W, m), o.lhs);
                            return o;
                        }});

        jobs.push_back({inv, "split_inert_stable", [=, &t] {
                            Outcome o;
                            if (auto it = t.search_failed.find(Space::SplitInertLie); it != t.search_failed.end())
                                throw RepresentativeSearchFailed(it->second);
                            const OrbitPoint* pt = t.point(Space::SplitInertLie);
                            if (!pt) {
                                o.no_match = true;
                                o.add_note("no split-inert point: " + t.reps.at(Space::SplitInertLie).no_match_proof);
                                return o;
                            }
                            o.lhs = split_inert_stable(0, pt->x1, W);
                            o.rhs = split_inert_stable(0, MatE(u1 * pt->x1 * u2.star()), W);
                            TestFunction f = TestFunction::unit_ball(Space::SplitInertLie, n, q, 0, 2);
                            f.balls[1] = 1;
                            o.expect("linearity", evaluate(f, *pt, vm), Rat(2) * o.lhs + split_inert_stable(1, pt->x1, W));
                            if (orc)
                                o.expect("oracle",
                                         brute_force_oracle(TestFunction::unit_ball(Space::SplitInertLie, n, q, 0), *pt, m, vm),
                                         o.lhs);
                            return o;
                        }});
    }
    return jobs;
}

std::optional<std::pair<std::string, int>> lie_name(const std::string& name)
{
    for (const char* base : {"FL_si_lie", "FL_ii_lie", "FL_eps_lie"})
        for (int k : {0, 1})
            if (name == std::string(base) + "(" + std::to_string(k) + ")") return std::make_pair(std::string(base), k);
    return std::nullopt;
}

} // namespace

// ---- config ----

CampaignConfig CampaignConfig::parse(const std::string& text)
{
    CampaignConfig c;
    int p = c.field.p, N = c.field.N;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "p") p = to_int(key, val);
        else if (key == "N") N = to_int(key, val);
        else if (key == "n") c.n = to_int(key, val);
        else if (key == "count") c.count = to_int(key, val);
        else if (key == "v_lo") c.v_lo = to_int(key, val);
        else if (key == "v_hi") c.v_hi = to_int(key, val);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_ll(key, val));
        else if (key == "v_max") c.v_max = to_int(key, val);
        else if (key == "m") c.m = to_int(key, val);
        else if (key == "degree_cut") c.degree_cut = to_int(key, val);
        else if (key == "oracle") c.oracle = to_bool(key, val);
        else if (key == "threads") c.threads = to_int(key, val);
        else if (key == "out") c.out = val;
        else if (key == "checks") {
            std::istringstream cs(val);
            std::string item;
            while (std::getline(cs, item, ','))
                if (!trim(item).empty()) c.checks.push_back(trim(item));
        } else
            throw InvalidConfig("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    c.field = FieldConfig::make(p, N);
    c.validate();
    return c;
}

CampaignConfig CampaignConfig::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw InvalidConfig("cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void CampaignConfig::validate() const
{
    field.validate();
    if (n != 1 && n != 2) throw InvalidConfig("n must be 1 or 2");
    if (count < 0) throw InvalidConfig("count must be nonnegative");
    if (v_lo > v_hi) throw InvalidConfig("empty valuation window");
    if (v_max <= 0 || m <= 0 || degree_cut <= 0) throw InvalidConfig("v_max, m and degree_cut must be positive");
    if (threads < 0) throw InvalidConfig("threads must be nonnegative");
    if (!seed) throw InvalidConfig("seed is mandatory");
}

FieldConfig CampaignConfig::working_field() const { return FieldConfig::make(field.p, precision_cap(field.p)); }

// ---- sampling ----

const OrbitPoint* MatchedTuple::point(Space s) const
{
    auto it = reps.find(s);
    if (it == reps.end() || !it->second.matched()) return nullptr;
    return &*it->second.point;
}

std::vector<MatchedTuple> sample_matching_orbits(const CampaignConfig& cfg)
{
    cfg.validate();
    const FieldConfig W = cfg.working_field();
    const int p = W.p, dg = sample_digits(cfg);
    std::mt19937_64 rng(*cfg.seed);
    std::vector<MatchedTuple> out;
    bool have_split = false, have_field = false;
    while (static_cast<int>(out.size()) < cfg.count) {
        std::vector<Padic> c{sample_coeff(rng, p, cfg.v_lo, cfg.v_hi, dg)};
        for (int i = 1; i < cfg.n; ++i) c.push_back(sample_coeff(rng, p, std::max(0, cfg.v_lo), cfg.v_hi, dg));
        c.push_back(Padic::from_int(p, 1, precision_cap(p)));
        bool split;
        try {
            split = static_cast<int>(etale_algebra(c).factors.size()) == cfg.n;
        } catch (const Inseparable&) {
            continue;
        }
        if (cfg.n == 2 && cfg.count >= 2) {
            int left = cfg.count - static_cast<int>(out.size());
            int missing = (have_split ? 0 : 1) + (have_field ? 0 : 1);
            if (left <= missing && (split ? have_split : have_field)) continue;
        }
        (split ? have_split : have_field) = true;
        MatchedTuple t;
        t.inv = OrbitInvariant{c};
        t.split = split;
        for (Space s : {Space::MirabolicGL, Space::LinearLie, Space::HermPoint, Space::HermPair, Space::SplitInertLie})
            try {
                t.reps[s] = construct_representative(s, t.inv, W);
            } catch (const RepresentativeSearchFailed& e) {
                t.search_failed[s] = e.what();
            } catch (const PrecisionExhausted& e) {
                t.search_failed[s] = e.what();
            }
        out.push_back(std::move(t));
    }
    return out;
}

// ---- checks ----

std::string status_name(CaseStatus s)
{
    switch (s) {
    case CaseStatus::Pass: return "pass";
    case CaseStatus::Fail: return "fail";
    case CaseStatus::NoMatchProved: return "no_match_proved";
    case CaseStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

CheckSummary CheckReport::summary() const
{
    CheckSummary s;
    for (const auto& c : cases) {
        ++s.run;
        switch (c.status) {
        case CaseStatus::Pass: ++s.passed; break;
        case CaseStatus::Fail: ++s.failed; break;
        case CaseStatus::NoMatchProved: ++s.no_match_proved; break;
        case CaseStatus::Inconclusive: ++s.inconclusive; break;
        }
    }
    return s;
}

std::vector<std::string> list_checks()
{
    return {"FL_unit",      "FL_det_slice", "FL_two_var",    "FL_one_var_via_product", "FL_si_lie(0)",
            "FL_si_lie(1)", "FL_ii_lie(0)", "FL_ii_lie(1)",  "FL_eps_lie(0)",          "FL_eps_lie(1)",
            "SYM_suite",    "CAYLEY_suite", "INV_suite"};
}

CheckReport run_check(const std::string& name, const CampaignConfig& cfg)
{
    const auto names = list_checks();
    if (std::find(names.begin(), names.end(), name) == names.end()) throw UnknownCheck(name);
    cfg.validate();
    Ctx c{cfg, cfg.working_field(), cfg.n, cfg.field.p, {}};
    const bool sampled = name.rfind("FL_", 0) == 0 || name == "INV_suite";
    if (sampled) {
        CampaignConfig sc = cfg;
        if (name == "INV_suite") sc.count = std::max(cfg.count, 20);
        c.tuples = sample_matching_orbits(sc);
    }
    std::vector<Job> jobs;
    if (name == "FL_unit") jobs = fl_unit(c);
    else if (name == "FL_det_slice") jobs = fl_det_slice(c);
    else if (name == "FL_two_var") jobs = fl_two_var(c);
    else if (name == "FL_one_var_via_product") jobs = fl_one_var(c);
    else if (name == "SYM_suite") jobs = sym_suite(c);
    else if (name == "CAYLEY_suite") jobs = cayley_suite(c);
    else if (name == "INV_suite") jobs = inv_suite(c);
    else {
        auto [base, k] = *lie_name(name);
        LieKind kind = base == "FL_si_lie" ? LieKind::SplitInert : base == "FL_ii_lie" ? LieKind::InertInert : LieKind::Epsilon;
        jobs = fl_lie(c, kind, k);
    }
    return {name, run_jobs(jobs, cfg.threads)};
}

// ---- report ----

std::string report_json(const CampaignConfig& cfg, const std::vector<CheckReport>& reports, bool timing)
{
    using nlohmann::ordered_json;
    ordered_json meta;
    meta["p"] = cfg.field.p;
    meta["n"] = cfg.n;
    meta["seed"] = cfg.seed ? *cfg.seed : 0;
    meta["precision"] = cfg.field.N;
    meta["versions"] = {{"hfl", kVersion},
                        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    meta["windows"] = {{"v_lo", cfg.v_lo}, {"v_hi", cfg.v_hi}, {"v_max", cfg.v_max}, {"m", cfg.m},
                       {"degree_cut", cfg.degree_cut}, {"count", cfg.count}};
    ordered_json checks = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json cases = ordered_json::array();
        for (const auto& c : r.cases) {
            ordered_json j;
            j["invariant"] = c.invariant;
            j["label"] = c.label;
            j["lhs"] = rat_str(c.lhs);
            j["rhs"] = rat_str(c.rhs);
            j["equal"] = c.equal;
            j["status"] = status_name(c.status);
            j["note"] = c.note;
            j["millis"] = timing ? c.millis : 0;
            cases.push_back(std::move(j));
        }
        CheckSummary s = r.summary();
        ordered_json sum = {{"run", s.run},       {"passed", s.passed},
                            {"failed", s.failed}, {"no_match_proved", s.no_match_proved},
                            {"inconclusive", s.inconclusive}};
        checks.push_back({{"name", r.name}, {"cases", std::move(cases)}, {"summary", std::move(sum)}});
    }
    ordered_json root;
    root["meta"] = std::move(meta);
    root["checks"] = std::move(checks);
    return root.dump(2) + "\n";
}

void emit_report(const CampaignConfig& cfg, const std::vector<CheckReport>& reports, const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << report_json(cfg, reports);
    if (!f) throw Error("write to " + path + " failed");
}

int exit_status(const std::vector<CheckReport>& reports)
{
    bool inconclusive = false;
    for (const auto& r : reports) {
        CheckSummary s = r.summary();
        if (s.failed > 0) return 1;
        if (s.inconclusive > 0) inconclusive = true;
    }
    return inconclusive ? 2 : 0;
}

} // namespace hfl
