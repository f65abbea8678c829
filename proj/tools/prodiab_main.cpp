#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "prodiab/error.hpp"
#include "prodiab/harness/scenario.hpp"
#include "prodiab/simd/kernels.hpp"

using namespace prodiab;
using namespace prodiab::harness;

namespace {

ScenarioConfig load(const std::string& path, const std::vector<std::string>& overrides, const std::string& out,
                    const std::string& reps) {
    Config c = Config::load(path);
    for (const auto& o : overrides) c.apply_override(o);
    if (!out.empty()) c.set("output.dir", out);
    if (!reps.empty()) c.set("representations", reps);
    return ScenarioConfig::from_config(c);
}

void print_eps(const std::string& label, const EpsilonReport& e) {
    std::printf("epsilon [%s]: worst_eps %s%s\n", label.c_str(), format_number(e.worst_eps).c_str(),
                e.warning ? " (warning: above 0.3)" : "");
    for (const auto& [k, v] : e.eps_sq_candidates) std::printf("  eps^2 %s = %s\n", k.c_str(), format_number(v).c_str());
    for (const auto& [k, v] : e.eps_candidates) std::printf("  eps   %s = %s\n", k.c_str(), format_number(v).c_str());
}

void print_summary(const ScenarioResult& res) {
    for (const auto& r : res.reports) {
        std::printf("[%s] worst_eps %s%s, leak %s\n", r.family.c_str(), format_number(r.eps.worst_eps).c_str(),
                    r.eps.warning ? " (warning)" : "", format_number(r.leak_max).c_str());
        for (const auto& p : r.pairs)
            std::printf("  %-16s vs %-16s max_abs %-12s l2 %s\n", p.a.c_str(), p.b.c_str(),
                        format_number(p.max_abs).c_str(), format_number(p.l2).c_str());
    }
    for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prodiab: adiabatic and prodiabatic elimination comparisons"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(PRODIAB_VERSION));

    std::string path, out, reps;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "run a scenario config and write curves and a report");
    run->add_option("config", path, "scenario config file")->required();
    run->add_option("--out", out, "output directory (overrides output.dir)");
    run->add_option("--reps", reps, "comma separated representations (exact, adb, pdb, pdb-lme)");
    run->add_option("--override", overrides, "key=value, may repeat");

    auto* validate = app.add_subcommand("validate", "parse and check a config without running it");
    validate->add_option("config", path, "scenario config file")->required();
    validate->add_option("--override", overrides, "key=value, may repeat");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const ScenarioConfig cfg = load(path, overrides, out, reps);
        if (validate->parsed()) {
            std::printf("config ok: scenario %s\n", cfg.name.c_str());
            for (const auto& [k, v] : cfg.resolved) std::printf("  %s = %s\n", k.c_str(), v.c_str());
            if (cfg.kind == ScenarioKind::stirap) {
                print_eps("stirap", epsilon_report(cfg.lambda));
            } else if (cfg.kind == ScenarioKind::jc_g2) {
                print_eps("jc", epsilon_report(cfg.jc));
            } else {
                for (double f : cfg.drives) {
                    JCParams p = cfg.jc;
                    p.f = f;
                    print_eps("f/kappa = " + format_number(f), epsilon_report(p));
                }
            }
            return 0;
        }
        std::fprintf(stderr, "kernels: %s, threads: %u\n", simd::backend_name(simd::active_backend()),
                     worker_threads());
        const ScenarioResult res = run_scenario(cfg, true);
        print_summary(res);
        if (res.exit_code == 4) std::fprintf(stderr, "error: Fock-space leak persists after escalation\n");
        return res.exit_code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ModelInapplicable& e) {
        std::fprintf(stderr, "model inapplicable: %s\n", e.what());
        return 3;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
