#include <CLI11.hpp>

#include <utility>

#include "dirac/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dirac evolution lab on desk spacetimes with timelike boundary"};
    app.require_subcommand(1);
    dirac::cli::Options opt;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "solve the Cauchy problem, write trajectory.csv"},
        {"check", "run analysis suites, write check.json"},
        {"exact", "closed-form transmission solution, write exact.csv"},
        {"green", "retarded and advanced Green operators applied to the source"},
        {"spectrum", "spectra of the spatial and boundary operators"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--only", opt.only, "run a single check suite");
        sub->add_flag("--quiet", opt.quiet, "suppress progress messages");
        sub->callback([&opt, name] { opt.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dirac::cli::ConfigFailure;
    }
    return dirac::cli::run(opt);
}
