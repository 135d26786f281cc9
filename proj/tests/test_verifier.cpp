#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hfl/verifier.hpp"

#include "json.hpp"

#include <set>

using namespace hfl;

namespace {

CampaignConfig cfg_of(const std::string& text) { return CampaignConfig::parse(text); }

CampaignConfig small(int n, int seed, int count, int vlo, int vhi, int cut = 8)
{
    return cfg_of("n = " + std::to_string(n) + "\nseed = " + std::to_string(seed) + "\ncount = " +
                  std::to_string(count) + "\nv_lo = " + std::to_string(vlo) + "\nv_hi = " + std::to_string(vhi) +
                  "\ndegree_cut = " + std::to_string(cut) + "\n");
}

CaseRecord record(CaseStatus s)
{
    CaseRecord r;
    r.status = s;
    r.lhs = r.rhs = 1;
    r.equal = true;
    return r;
}

} // namespace

TEST_CASE("config parsing")
{
    CampaignConfig c = cfg_of("# campaign\np = 5\nN = 10\nn = 2\nseed = 42  # fixed\nchecks = FL_unit, SYM_suite\n"
                              "v_lo = -1\nv_hi = 3\noracle = false\nout = r.json\n");
    CHECK(c.field.p == 5);
    CHECK(c.field.N == 10);
    CHECK(c.n == 2);
    CHECK(*c.seed == 42);
    CHECK(c.checks == std::vector<std::string>{"FL_unit", "SYM_suite"});
    CHECK(c.v_lo == -1);
    CHECK(c.v_hi == 3);
    CHECK_FALSE(c.oracle);
    CHECK(c.out == "r.json");
    CHECK(c.v_max == 10);
    CHECK(c.m == 2);
    CHECK(c.degree_cut == 8);
    CHECK(c.working_field().N == precision_cap(5));

    CHECK_THROWS_AS(cfg_of("n = 1\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed = 1\nn = 3\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed = 1\ncolour = red\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed = 1\nm = 0\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed = 1\nv_max = x\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed = 1\nv_lo = 3\nv_hi = 1\n"), InvalidConfig);
    CHECK_THROWS_AS(cfg_of("seed 1\n"), InvalidConfig);
    CHECK_THROWS_AS(CampaignConfig::load("/nonexistent/campaign.cfg"), InvalidConfig);
}

TEST_CASE("sampling, n = 1")
{
    CampaignConfig c = small(1, 3, 10, -2, 4);
    auto ts = sample_matching_orbits(c);
    REQUIRE(ts.size() == 10);
    for (const auto& t : ts) {
        CHECK(t.search_failed.empty());
        CHECK(t.point(Space::MirabolicGL) != nullptr);
        CHECK(t.point(Space::HermPair) != nullptr);
        const auto& si = t.reps.at(Space::SplitInertLie);
        CHECK((si.matched() || !si.no_match_proof.empty()));
        int v = t.inv.c[0].val();
        CHECK(v >= -2);
        CHECK(v <= 4);
        CHECK(invariant_poly(*t.point(Space::HermPair)) == t.inv);
        CHECK(si.matched() == (v % 2 == 0));
    }
    auto again = sample_matching_orbits(c);
    for (size_t i = 0; i < ts.size(); ++i) CHECK(again[i].inv.str() == ts[i].inv.str());
    CHECK(sample_matching_orbits(small(1, 4, 10, -2, 4))[0].inv.str() != ts[0].inv.str());
}

TEST_CASE("sampling, n = 2 covers both centralizer strata")
{
    for (int seed : {1, 2, 3}) {
        auto ts = sample_matching_orbits(small(2, seed, 5, 0, 3));
        REQUIRE(ts.size() == 5);
        std::set<bool> strata;
        for (const auto& t : ts) {
            strata.insert(t.split);
            CHECK(static_cast<int>(etale_algebra(t.inv.c).factors.size()) == (t.split ? 2 : 1));
        }
        CHECK(strata.size() == 2);
    }
}

TEST_CASE("check catalog")
{
    auto names = list_checks();
    CHECK(names.size() == 13);
    CHECK_THROWS_AS(run_check("FL_nope", small(1, 1, 2, 0, 2)), UnknownCheck);
    CHECK_THROWS_AS(run_check("FL_si_lie(2)", small(1, 1, 2, 0, 2)), UnknownCheck);
}

TEST_CASE("FL_det_slice, n = 1 matches the closed-form table")
{
    CampaignConfig c = small(1, 5, 10, -2, 8, 6);
    auto ts = sample_matching_orbits(c);
    CheckReport r = run_check("FL_det_slice", c);
    REQUIRE(r.cases.size() == ts.size() * 7);
    for (size_t i = 0; i < r.cases.size(); ++i) {
        const auto& cs = r.cases[i];
        int v = ts[i / 7].inv.c[0].val();
        int d = static_cast<int>(i % 7);
        CHECK(cs.status == CaseStatus::Pass);
        CHECK(cs.lhs == Rat(v == d ? 1 : 0));
    }
}

TEST_CASE("FL_eps_lie(0), n = 1 parity pattern")
{
    CampaignConfig c = small(1, 6, 12, -2, 6);
    auto ts = sample_matching_orbits(c);
    CheckReport r = run_check("FL_eps_lie(0)", c);
    REQUIRE(r.cases.size() == ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        int v = ts[i].inv.c[0].val();
        bool even = v % 2 == 0;
        CHECK(r.cases[i].lhs == Rat(even && v >= 0 ? 1 : 0));
        CHECK(r.cases[i].status == (even ? CaseStatus::Pass : CaseStatus::NoMatchProved));
    }
}

TEST_CASE("property: every sampled invariant appears in the report")
{
    CampaignConfig c = small(2, 8, 6, 0, 3);
    auto ts = sample_matching_orbits(c);
    for (const char* name : {"FL_unit", "FL_si_lie(0)", "FL_ii_lie(0)"}) {
        CheckReport r = run_check(name, c);
        REQUIRE(r.cases.size() == ts.size());
        for (size_t i = 0; i < ts.size(); ++i) {
            CHECK(r.cases[i].invariant.size() == ts[i].inv.c.size());
            CHECK(r.cases[i].invariant[0] == ts[i].inv.c[0].str());
            CHECK(r.cases[i].status != CaseStatus::Inconclusive);
        }
    }
}

TEST_CASE("SYM_suite records the negative controls as rejected")
{
    CheckReport r = run_check("SYM_suite", small(2, 1, 0, 0, 0));
    int controls = 0;
    for (const auto& c : r.cases) {
        CHECK(c.status == CaseStatus::Pass);
        if (c.note.find("negative control") != std::string::npos) {
            ++controls;
            CHECK(c.lhs == 0);
        }
    }
    CHECK(controls == 3);
}

TEST_CASE("report format and exit status")
{
    CampaignConfig c = small(1, 9, 0, 0, 0);
    auto empty = nlohmann::json::parse(report_json(c, {}));
    CHECK(empty["checks"].empty());
    CHECK(empty["meta"]["seed"] == 9);
    CHECK(exit_status({}) == 0);

    CheckReport one{"X", {record(CaseStatus::Pass)}};
    CHECK(one.summary().run == 1);
    CHECK(one.summary().passed == 1);
    auto j = nlohmann::json::parse(report_json(c, {one}));
    CHECK(j["checks"][0]["summary"]["run"] == 1);
    CHECK(j["checks"][0]["summary"]["passed"] == 1);
    CHECK(j["checks"][0]["cases"][0]["lhs"] == "1/1");
    CHECK(j["checks"][0]["cases"][0]["status"] == "pass");
    CHECK(exit_status({one}) == 0);

    CheckReport inc{"Y", {record(CaseStatus::Inconclusive), record(CaseStatus::NoMatchProved)}};
    CHECK(inc.summary().inconclusive == 1);
    CHECK(inc.summary().no_match_proved == 1);
    CHECK(inc.summary().passed == 0);
    CHECK(exit_status({one, inc}) == 2);
    CheckReport bad{"Z", {record(CaseStatus::Fail)}};
    CHECK(exit_status({inc, bad}) == 1);

    CHECK_THROWS_AS(emit_report(c, {one}, "/nonexistent/dir/report.json"), Error);
}

TEST_CASE("property: reports are deterministic apart from timing")
{
    CampaignConfig c = small(2, 10, 4, 0, 3);
    std::vector<CheckReport> a{run_check("FL_unit", c), run_check("INV_suite", small(1, 10, 4, -1, 4))};
    std::vector<CheckReport> b{run_check("FL_unit", c), run_check("INV_suite", small(1, 10, 4, -1, 4))};
    CHECK(report_json(c, a, false) == report_json(c, b, false));
    c.threads = 3;
    std::vector<CheckReport> d{run_check("FL_unit", c), run_check("INV_suite", small(1, 10, 4, -1, 4))};
    CHECK(report_json(c, a, false) == report_json(c, d, false));
}
