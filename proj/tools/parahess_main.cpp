#include <iostream>

#include <CLI11.hpp>

#include "parahess/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Parabolic complex Hessian equations: solve and certify"};
    app.require_subcommand(1);
    parahess::CliOptions o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "problem configuration (INI)");
        sub->add_option("--preset", o.preset, "bundled problem preset");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "seed for randomized checks");
    };
    auto* solve = app.add_subcommand("solve", "solve and certify a problem");
    common(solve);
    solve->add_option("--scheme", o.scheme, "explicit, perron or both");

    auto* verify = app.add_subcommand("verify", "run checks on a field CSV");
    common(verify);
    verify->add_option("--field", o.field, "field CSV to verify")->required();
    verify->add_option("--checks", o.checks, "comma-separated checks (default all)");
    verify->add_option("--tol", o.tol, "check tolerance (default solver.tol_certificate)");

    auto* conv = app.add_subcommand("convergence", "refinement study against the exact solution");
    common(conv);
    conv->add_option("--scheme", o.scheme, "explicit, perron or both");
    conv->add_option("--levels", o.levels, "number of refinement levels (>= 2)");

    auto* self = app.add_subcommand("selftest", "run the invariant suites");
    self->add_option("--seed", o.seed, "seed");
    self->add_option("--fixture", o.fixture, "adversarial fixture (bad_f)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : parahess::kExitConfig;
    }

    if (solve->parsed()) return parahess::cmd_solve(o, std::cout, std::cerr);
    if (verify->parsed()) return parahess::cmd_verify(o, std::cout, std::cerr);
    if (conv->parsed()) return parahess::cmd_convergence(o, std::cout, std::cerr);
    return parahess::cmd_selftest(o, std::cout, std::cerr);
}
