#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "plapsys/commands.hpp"
#include "plapsys/error.hpp"

using namespace plapsys;

namespace {

void print_checks(const RunReport& r) {
    for (const auto& c : r.checks)
        std::printf("%-4s %-40s value=%.6g tol=%.3g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.tolerance);
    for (const auto& e : r.errors) std::printf("ERROR %s\n", e.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plapsys: coupled critical p-Laplacian system experiments"};
    app.require_subcommand(1);
    std::string config_path, out_dir, variant = "derived_Np";
    int parallel = 1;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "config file (key = value with [section] headers)")->required();
    app.add_option("--out", out_dir, "output directory for report.json and CSV files");
    app.add_option("--parallel", parallel, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--variant", variant, "constant variant")->check(CLI::IsMember({"derived_Np", "literal_paper"}));
    app.add_option("--seed", seed, "override the random seed");

    auto* sob = app.add_subcommand("sobolev", "Sobolev constant, norm identity and instanton residuals");
    std::string action, target;
    auto* cpl = app.add_subcommand("coupling", "algebraic system: solve, enumerate, certify, continue");
    cpl->add_option("action", action)->required()->check(CLI::IsMember({"solve", "enumerate", "certify", "continue"}));
    auto* ver = app.add_subcommand("verify", "run a verification target");
    ver->add_option("target", target)
        ->required()
        ->check(CLI::IsMember({"theorem1", "theorem2", "theorem4", "prop1_sec5", "eq011", "lemma_l4", "mp_level"}));
    auto* swp = app.add_subcommand("sweep", "coupling solve over a parameter ladder");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    RunOptions o;
    o.out_dir = out_dir;
    o.parallel = parallel;
    o.variant = parse_variant(variant);
    o.seed = seed;

    std::string command = sob->parsed() ? "sobolev"
                          : cpl->parsed() ? "coupling " + action
                          : ver->parsed() ? "verify " + target
                                          : "sweep";
    std::optional<Config> cfg;
    try {
        cfg = Config::load(config_path);
        if (swp->parsed()) {
            if (!app.get_option("--parallel")->count()) o.parallel = cfg->get_int("sweep", "parallel", 1);
            const SweepOutcome s = cmd_sweep(*cfg, o);
            if (!o.out_dir.empty()) write_sweep(s, o.out_dir);
            std::fputs(s.table.str().c_str(), stdout);
            return s.any_failed ? kExitCheckFailed : kExitPass;
        }
        const CommandResult r = sob->parsed()   ? cmd_sobolev(*cfg, o)
                                : cpl->parsed() ? cmd_coupling(*cfg, action, o)
                                                : cmd_verify(*cfg, target, o);
        if (!o.out_dir.empty()) write_outputs(r, o.out_dir);
        print_checks(r.report);
        return r.report.passed() ? kExitPass : kExitCheckFailed;
    } catch (const std::exception& e) {
        const int rc = exit_code_for(e);
        std::fprintf(stderr, "error: %s\nhint: %s\n", e.what(), hint_for(e).c_str());
        if (auto* ce = dynamic_cast<const ConfigError*>(&e); ce && ce->line > 0)
            std::fprintf(stderr, "at line %d\n", ce->line);
        if (!o.out_dir.empty()) {
            try {
                write_outputs(failure_result(command, cfg ? &*cfg : nullptr, e), o.out_dir);
            } catch (const std::exception& w) {
                std::fprintf(stderr, "could not write failure report: %s\n", w.what());
            }
        }
        return rc;
    }
}
