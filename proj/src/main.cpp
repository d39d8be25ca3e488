#include <string>

#include "CLI11.hpp"
#include "qsl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qgevrey: Borel-Laplace-Fourier summation laboratory"};
    app.require_subcommand(1);

    std::string scenario, out = "out", stage = "q", pair = "all";
    qsl::CliOverrides ov;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "scenario JSON file")->required();
        cmd->add_option("--out", out, "output directory");
    };
    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--tol", ov.tol, "fixed-point tolerance override");
        cmd->add_option("--jmax", ov.j_max, "Neumann term cap override");
        cmd->add_option("--nmax", ov.n_max, "formal-series order override");
        cmd->add_option("--seed", ov.seed, "seed override");
    };

    CLI::App* validate = app.add_subcommand("validate", "run the scenario validation checks");
    add_common(validate);

    CLI::App* solve = app.add_subcommand("solve", "run a solver stage and write its artifacts");
    add_common(solve);
    add_overrides(solve);
    solve->add_option("--stage", stage, "q | borel")->required();

    CLI::App* flat = app.add_subcommand("flatness", "measure cocycle differences and fit models");
    add_common(flat);
    add_overrides(flat);
    flat->add_option("--pair", pair, "q-cross-p | same-p | cross-p | all");

    CLI::App* formal = app.add_subcommand("formal", "compute formal-series coefficient tables");
    add_common(formal);
    add_overrides(formal);

    CLI::App* report = app.add_subcommand("report", "aggregate the fast checks into one verdict");
    add_common(report);
    add_overrides(report);

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return qsl::cmd_validate(scenario, out);
    if (solve->parsed()) return qsl::cmd_solve(scenario, stage, out, ov);
    if (flat->parsed()) return qsl::cmd_flatness(scenario, pair, out, ov);
    if (formal->parsed()) return qsl::cmd_formal(scenario, out, ov);
    if (report->parsed()) return qsl::cmd_report(scenario, out, ov);
    return 2;
}
