#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ztselect/gibbs.hpp"

namespace ztselect::cli {

enum class OutputFormat { Csv, Json };

struct RunConfig {
    std::string command;
    std::vector<double> alpha_grid;
    double gamma_slope = 3.0;
    std::vector<double> beta_grid;
    int depth = -1;  // <=0: auto (xferop::default_depth per point)
    double tol = 1e-10;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;  // empty: stdout
    int thread_cap = 0;       // <=0: hardware concurrency; env ZTSELECT_THREADS
    bool inject_perturbation = false;  // verify-only test hook

    void validate() const;
};

/// Fixed sweep schema; the CSV header carries exactly these names.
extern const char* const kSweepColumns[19];

/// Deterministic float formatting: 17 significant digits, C locale.
std::string format_double(double v);

struct SweepRow {
    gibbs::SelectionRecord rec;
    double log_P_over_beta = 0.0;  // NaN at beta = 0
    double p_e2beta = 0.0;
};

SweepRow compute_row(double alpha, double gamma_slope, double beta, int depth, double tol);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const RunConfig& cfg, const std::vector<SweepRow>& rows);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The cross-oracle / identity / inequality suite behind `verify`.
std::vector<CheckResult> run_verification(const RunConfig& cfg);

int cmd_eig(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_subaction(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Thread cap from ZTSELECT_THREADS (invalid or unset: 0 = all cores).
int thread_cap_from_env();

}  // namespace ztselect::cli
