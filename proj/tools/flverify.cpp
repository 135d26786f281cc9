#include "hfl/verifier.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace hfl;

int main(int argc, char** argv)
{
    CLI::App app{"Run fundamental-lemma and identity checks on seeded orbit samples"};
    std::string config_path, out;
    std::vector<std::string> checks;
    std::optional<int> p, n;
    std::optional<std::uint64_t> seed;
    bool list = false;
    app.add_option("--config", config_path, "campaign file (key = value lines)");
    app.add_option("--check", checks, "check name, repeatable");
    app.add_option("--p", p, "residue characteristic");
    app.add_option("--n", n, "rank, 1 or 2");
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--out", out, "report path (default: stdout)");
    app.add_flag("--list-checks", list, "print the check catalog and exit");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& c : list_checks()) std::cout << c << "\n";
        return 0;
    }
    try {
        CampaignConfig cfg;
        if (!config_path.empty()) cfg = CampaignConfig::load(config_path);
        if (p) cfg.field = FieldConfig::make(*p, cfg.field.N);
        if (n) cfg.n = *n;
        if (seed) cfg.seed = *seed;
        if (!checks.empty()) cfg.checks = checks;
        if (!out.empty()) cfg.out = out;
        if (cfg.checks.empty()) cfg.checks = list_checks();
        cfg.validate();

        std::vector<CheckReport> reports;
        for (const auto& name : cfg.checks) {
            reports.push_back(run_check(name, cfg));
            CheckSummary s = reports.back().summary();
            std::cerr << name << ": run " << s.run << ", passed " << s.passed << ", no match " << s.no_match_proved
                      << ", failed " << s.failed << ", inconclusive " << s.inconclusive << "\n";
        }
        if (cfg.out.empty())
            std::cout << report_json(cfg, reports);
        else
            emit_report(cfg, reports, cfg.out);
        return exit_status(reports);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
