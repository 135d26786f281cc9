#pragma once

#include "hfl/orbital.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfl {

// Flat key = value text, '#' starts a comment. Keys:
//   p N n checks count v_lo v_hi seed v_max m degree_cut oracle threads out
// checks is a comma separated list of catalog names.
struct CampaignConfig {
    FieldConfig field = FieldConfig::make(3, 12);
    int n = 1;
    std::vector<std::string> checks;
    int count = 10;
    int v_lo = -2, v_hi = 4; // valuation window of the constant coefficient
    std::optional<std::uint64_t> seed;
    int v_max = 10, m = 2, degree_cut = 8;
    bool oracle = true; // also compare the engines with the brute-force oracles
    int threads = 0;    // 0 picks the hardware concurrency
    std::string out;

    static CampaignConfig parse(const std::string& text);
    static CampaignConfig load(const std::string& path);
    // throws InvalidConfig
    void validate() const;
    // sampled coefficients are exact, so every computation runs at the word cap
    FieldConfig working_field() const;
};

// Representatives of one sampled invariant on every orbit space.
struct MatchedTuple {
    OrbitInvariant inv;
    bool split = true; // centralizer stratum: split torus vs quadratic field
    std::map<Space, Construction> reps;
    std::map<Space, std::string> search_failed;

    const OrbitPoint* point(Space s) const;
};

std::vector<MatchedTuple> sample_matching_orbits(const CampaignConfig& cfg);

enum class CaseStatus { Pass, Fail, NoMatchProved, Inconclusive };
std::string status_name(CaseStatus s);

struct CaseRecord {
    std::vector<std::string> invariant;
    std::string label;
    Rat lhs = 0, rhs = 0;
    bool equal = false;
    CaseStatus status = CaseStatus::Inconclusive;
    std::string note;
    long long millis = 0;
};

struct CheckSummary {
    int run = 0, passed = 0, failed = 0, no_match_proved = 0, inconclusive = 0;
};

struct CheckReport {
    std::string name;
    std::vector<CaseRecord> cases;

    CheckSummary summary() const;
};

// catalog names; FL_*_lie take the ball index as FL_si_lie(0)
std::vector<std::string> list_checks();
// throws UnknownCheck
CheckReport run_check(const std::string& name, const CampaignConfig& cfg);

std::string report_json(const CampaignConfig& cfg, const std::vector<CheckReport>& reports, bool timing = true);
// throws Error on IO failure
void emit_report(const CampaignConfig& cfg, const std::vector<CheckReport>& reports, const std::string& path);
// 0 all pass, 1 any failure, 2 inconclusive cases but no failure
int exit_status(const std::vector<CheckReport>& reports);

} // namespace hfl
