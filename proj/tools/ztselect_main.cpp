// Batch front-end: single-instance eigendata, grid sweeps, the verification
// suite, and subaction reports. Machine-readable CSV/JSON output.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ztselect/cli_core.hpp"

namespace {

using ztselect::cli::OutputFormat;
using ztselect::cli::RunConfig;

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& format) {
    cmd->add_option("--gamma-slope", cfg.gamma_slope, "slope at 1^inf (default 3)");
    cmd->add_option("--depth", cfg.depth, "ring truncation depth (default: auto)");
    cmd->add_option("--tol", cfg.tol, "relative tolerance for the pressure solve");
    cmd->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,-o", cfg.output_path, "output file (default: stdout)");
    cmd->add_option("--threads", cfg.thread_cap,
                    "thread cap for sweeps (default: ZTSELECT_THREADS or all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transfer-operator eigendata and zero-temperature selection on the 3-shift"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.thread_cap = ztselect::cli::thread_cap_from_env();
    std::string format = "csv";
    double alpha_single = 1.0, beta_single = 0.0;
    std::vector<double> alpha_grid, beta_grid;

    CLI::App* eig = app.add_subcommand("eig", "eigendata for one (alpha, gamma, beta)");
    eig->add_option("--alpha", alpha_single, "potential level on [2]")->required();
    eig->add_option("--beta", beta_single, "inverse temperature")->required();
    add_common(eig, cfg, format);

    CLI::App* sweep = app.add_subcommand("sweep", "one row per (alpha, beta) grid point");
    sweep->add_option("--alphas", alpha_grid, "alpha grid (strictly increasing)")
        ->required()
        ->delimiter(',');
    sweep->add_option("--betas", beta_grid, "beta grid (strictly increasing)")
        ->required()
        ->delimiter(',');
    add_common(sweep, cfg, format);

    CLI::App* verify = app.add_subcommand("verify", "cross-oracle and identity suite");
    add_common(verify, cfg, format);
    verify->add_flag("--inject-perturbation", cfg.inject_perturbation,
                     "test hook: perturb an eigenvector entry; the suite must fail")
        ->group("");  // hidden

    CLI::App* subaction = app.add_subcommand("subaction", "V solution and calibration report");
    subaction->add_option("--alphas", alpha_grid, "alpha grid")->required()->delimiter(',');
    subaction->add_option("--betas", beta_grid, "beta grid for the H-comparison table")
        ->delimiter(',');
    add_common(subaction, cfg, format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    cfg.format = (format == "json") ? OutputFormat::Json : OutputFormat::Csv;

    try {
        if (app.got_subcommand(eig)) {
            cfg.command = "eig";
            cfg.alpha_grid = {alpha_single};
            cfg.beta_grid = {beta_single};
            return ztselect::cli::cmd_eig(cfg, std::cout, std::cerr);
        }
        if (app.got_subcommand(sweep)) {
            cfg.command = "sweep";
            cfg.alpha_grid = alpha_grid;
            cfg.beta_grid = beta_grid;
            return ztselect::cli::cmd_sweep(cfg, std::cout, std::cerr);
        }
        if (app.got_subcommand(verify)) {
            cfg.command = "verify";
            cfg.alpha_grid = {1.0};
            cfg.beta_grid = {0.0};
            return ztselect::cli::cmd_verify(cfg, std::cout, std::cerr);
        }
        cfg.command = "subaction";
        cfg.alpha_grid = alpha_grid;
        cfg.beta_grid = beta_grid.empty() ? std::vector<double>{10.0, 20.0, 40.0, 80.0}
                                          : beta_grid;
        return ztselect::cli::cmd_subaction(cfg, std::cout, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
