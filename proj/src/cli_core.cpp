#include "ztselect/cli_core.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ztselect/ergopt.hpp"

namespace ztselect::cli {

namespace cf = closedform;
using nlohmann::json;

const char* const kSweepColumns[19] = {
    "alpha",      "gamma_slope",     "beta",          "depth",        "P",
    "log_P_over_beta", "P_e2beta",   "x_ratio",       "nu_cyl_ratio", "nu_star_ratio",
    "mu0",        "mu1",             "mu2",           "mu_ratio",     "target_mu_ratio",
    "target_gamma", "residual_H",    "residual_nu",   "certified"};

void RunConfig::validate() const {
    if (alpha_grid.empty()) throw std::invalid_argument("config: alpha grid is empty");
    for (double a : alpha_grid)
        if (!(std::isfinite(a) && a > 0.0))
            throw std::invalid_argument("config: alpha must be finite and > 0");
    if (!(std::isfinite(gamma_slope) && gamma_slope > 1.0))
        throw std::invalid_argument("config: gamma-slope must be > 1");
    if (beta_grid.empty()) throw std::invalid_argument("config: beta grid is empty");
    for (double b : beta_grid)
        if (!(std::isfinite(b) && b >= 0.0))
            throw std::invalid_argument("config: beta must be finite and >= 0");
    for (std::size_t i = 1; i < alpha_grid.size(); ++i)
        if (!(alpha_grid[i] > alpha_grid[i - 1]))
            throw std::invalid_argument("config: alpha grid must be strictly increasing");
    for (std::size_t i = 1; i < beta_grid.size(); ++i)
        if (!(beta_grid[i] > beta_grid[i - 1]))
            throw std::invalid_argument("config: beta grid must be strictly increasing");
    if (!(tol > 0.0 && tol <= 1e-4))
        throw std::invalid_argument("config: tol must lie in (0, 1e-4]");
    if (depth > 0 && depth < xferop::RingVector::min_depth)
        throw std::invalid_argument("config: depth must be >= 3");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

double saturating(const SignedLog& v) { return v.to_double(); }

json json_value(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double target_mu_ratio_value(const cf::AsymptoticTargets& t) {
    switch (t.mu_ratio.kind) {
        case cf::LimitKind::Finite: return t.mu_ratio.value;
        case cf::LimitKind::Infinite: return std::numeric_limits<double>::infinity();
        case cf::LimitKind::NotApplicable: return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SweepRow compute_row(double alpha, double gamma_slope, double beta, int depth, double tol) {
    Params p{alpha, gamma_slope, beta};
    p.validate();
    const int N = depth > 0 ? depth : xferop::default_depth(p);
    SweepRow row{gibbs::compute_record(p, N, tol), 0.0, 0.0};
    row.log_P_over_beta =
        beta > 0.0 ? std::log(row.rec.P) / beta : std::numeric_limits<double>::quiet_NaN();
    row.p_e2beta =
        saturating(SignedLog::from_double(row.rec.P) * SignedLog::from_log(2.0 * beta));
    return row;
}

namespace {

void append_row_fields(std::vector<std::string>& cells, const SweepRow& r) {
    const auto& rec = r.rec;
    cells.push_back(format_double(rec.alpha));
    cells.push_back(format_double(rec.gamma_slope));
    cells.push_back(format_double(rec.beta));
    cells.push_back(std::to_string(rec.depth));
    cells.push_back(format_double(rec.P));
    cells.push_back(format_double(r.log_P_over_beta));
    cells.push_back(format_double(r.p_e2beta));
    cells.push_back(format_double(saturating(rec.x_ratio)));
    cells.push_back(format_double(saturating(rec.nu_cyl_ratio)));
    cells.push_back(format_double(saturating(rec.nu_star_ratio)));
    cells.push_back(format_double(saturating(rec.mu0)));
    cells.push_back(format_double(saturating(rec.mu1)));
    cells.push_back(format_double(saturating(rec.mu2)));
    cells.push_back(format_double(saturating(rec.mu_ratio)));
    cells.push_back(format_double(target_mu_ratio_value(rec.targets)));
    cells.push_back(format_double(rec.targets.gamma_exponent));
    cells.push_back(format_double(rec.residual_H));
    cells.push_back(format_double(rec.residual_nu));
    cells.push_back(rec.certified ? "true" : "false");
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out;
    for (int i = 0; i < 19; ++i) {
        out += kSweepColumns[i];
        out += (i + 1 < 19) ? ',' : '\n';
    }
    for (const SweepRow& r : rows) {
        std::vector<std::string> cells;
        cells.reserve(19);
        append_row_fields(cells, r);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += cells[i];
            out += (i + 1 < cells.size()) ? ',' : '\n';
        }
    }
    return out;
}

namespace {

json config_json(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["alpha_grid"] = cfg.alpha_grid;
    j["gamma_slope"] = cfg.gamma_slope;
    j["beta_grid"] = cfg.beta_grid;
    j["depth"] = cfg.depth;
    j["tol"] = cfg.tol;
    j["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
    j["threads"] = cfg.thread_cap;
    return j;
}

json row_json(const SweepRow& r) {
    const auto& rec = r.rec;
    json j;
    j["alpha"] = rec.alpha;
    j["gamma_slope"] = rec.gamma_slope;
    j["beta"] = rec.beta;
    j["depth"] = rec.depth;
    j["P"] = rec.P;
    j["log_P_over_beta"] = json_value(r.log_P_over_beta);
    j["P_e2beta"] = json_value(r.p_e2beta);
    j["x_ratio"] = json_value(saturating(rec.x_ratio));
    j["nu_cyl_ratio"] = json_value(saturating(rec.nu_cyl_ratio));
    j["nu_star_ratio"] = json_value(saturating(rec.nu_star_ratio));
    j["mu0"] = json_value(saturating(rec.mu0));
    j["mu1"] = json_value(saturating(rec.mu1));
    j["mu2"] = json_value(saturating(rec.mu2));
    j["mu_ratio"] = json_value(saturating(rec.mu_ratio));
    j["mu_ratio_saturated"] = rec.mu_ratio.overflows_double();
    j["mu_ratio_log"] = rec.mu_ratio.is_zero() ? json(nullptr) : json(rec.mu_ratio.log_mag());
    j["target_mu_ratio"] = json_value(target_mu_ratio_value(rec.targets));
    j["target_gamma"] = rec.targets.gamma_exponent;
    j["residual_H"] = rec.residual_H;
    j["residual_nu"] = rec.residual_nu;
    j["certified"] = rec.certified;
    return j;
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output path: " + cfg.output_path);
    f << text;
}

std::vector<SweepRow> compute_rows(const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    if (cfg.depth > 0) {
        // fixed-depth override: serial, depth echoed as given
        for (double a : cfg.alpha_grid)
            for (double b : cfg.beta_grid)
                rows.push_back(compute_row(a, cfg.gamma_slope, b, cfg.depth, cfg.tol));
        return rows;
    }
    // Rows are pure per grid point; compute them concurrently and emit in
    // grid order so output is byte-identical for any thread count.
    std::vector<gibbs::SelectionRecord> recs = gibbs::selection_report(
        cfg.alpha_grid, cfg.beta_grid, cfg.gamma_slope, cfg.thread_cap, cfg.tol);
    rows.reserve(recs.size());
    for (const auto& rec : recs) {
        SweepRow r{rec, 0.0, 0.0};
        r.log_P_over_beta = rec.beta > 0.0 ? std::log(rec.P) / rec.beta
                                           : std::numeric_limits<double>::quiet_NaN();
        r.p_e2beta = saturating(SignedLog::from_double(rec.P) *
                                SignedLog::from_log(2.0 * rec.beta));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

std::string sweep_json(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
    json j;
    j["config"] = config_json(cfg);
    j["rows"] = json::array();
    for (const SweepRow& r : rows) j["rows"].push_back(row_json(r));
    j["checks"] = json::array();
    return j.dump(2) + "\n";
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<SweepRow> rows = compute_rows(cfg);
        write_output(cfg,
                     cfg.format == OutputFormat::Csv ? sweep_csv(rows) : sweep_json(cfg, rows),
                     out);
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

int cmd_eig(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        if (cfg.alpha_grid.size() != 1 || cfg.beta_grid.size() != 1)
            throw std::invalid_argument("eig: exactly one alpha and one beta required");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        const double alpha = cfg.alpha_grid[0], beta = cfg.beta_grid[0];
        SweepRow row = compute_row(alpha, cfg.gamma_slope, beta, cfg.depth, cfg.tol);
        if (cfg.format == OutputFormat::Csv) {
            write_output(cfg, sweep_csv({row}), out);
            return 0;
        }
        Params p{alpha, cfg.gamma_slope, beta};
        const int N = cfg.depth > 0 ? cfg.depth : xferop::default_depth(p);
        gibbs::ClosedFormEigen eig = gibbs::closed_form_eigendata(p, N, cfg.tol);
        json j;
        j["config"] = config_json(cfg);
        json r = row_json(row);
        json hv, nv;
        auto put = [&](const char* key, const SignedLog& h, const SignedLog& n) {
            hv[key] = json_value(h.to_double());
            nv[key] = json_value(n.to_double());
        };
        put("fix0", eig.H.fix0(), eig.nu.fix0());
        put("fix1", eig.H.fix1(), eig.nu.fix1());
        put("two_head", eig.H.two_head(), eig.nu.two_head());
        for (int n = 1; n <= std::min(8, N); ++n) {
            const std::string k0 = "zero_run_" + std::to_string(n);
            const std::string k1 = "one_run_" + std::to_string(n);
            hv[k0] = json_value(eig.H.zero_run(n).to_double());
            hv[k1] = json_value(eig.H.one_run(n).to_double());
            nv[k0] = json_value(eig.nu.zero_run(n).to_double());
            nv[k1] = json_value(eig.nu.one_run(n).to_double());
        }
        r["H"] = hv;
        r["nu"] = nv;
        r["nu_mass_defect"] = eig.nu_mass_defect;
        j["rows"] = json::array({r});
        j["checks"] = json::array();
        write_output(cfg, j.dump(2) + "\n", out);
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

// ---------------------------------------------------------------------------
// verification suite
// ---------------------------------------------------------------------------

namespace {

struct CheckRunner {
    std::vector<CheckResult> results;

    void add(const std::string& name, bool pass, std::string detail) {
        results.push_back({name, pass, std::move(detail)});
    }

    template <typename Fn>
    void run(const std::string& name, Fn&& fn) {
        try {
            fn(*this, name);
        } catch (const std::exception& e) {
            add(name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) { return format_double(v); }

void check_beta0(CheckRunner& cr, const std::string& name) {
    Params p{1.0, 3.0, 0.0};
    const double P = cf::solve_pressure(p);
    const double ln3 = std::log(3.0);
    bool pass = std::abs(P - ln3) <= 1e-12;
    xferop::TruncatedOperator op(p, 16);
    xferop::PowerResult pw = xferop::leading_pair_power(op);
    pass = pass && std::abs(pw.P - ln3) <= 1e-12;
    xferop::RingVector H = xferop::eigenfunction_given_P(op, pw.P);
    xferop::RingVector nu = xferop::eigenmeasure_given_P(op, pw.P);
    double worst_h = 0.0;
    for (int i = 0; i < H.size(); ++i)
        worst_h = std::max(worst_h, std::abs(H[i].to_double() - 1.0));
    double worst_nu = 0.0;
    for (int n = 1; n <= 12; ++n) {
        const double expect = std::pow(1.0 / 3.0, n) * (2.0 / 3.0);
        worst_nu = std::max(worst_nu, std::abs(nu.zero_run(n).to_double() - expect));
        worst_nu = std::max(worst_nu, std::abs(nu.one_run(n).to_double() - expect));
    }
    pass = pass && worst_h <= 1e-12 && worst_nu <= 1e-12;
    cr.add(name, pass,
           "P-ln3=" + fmt(P - ln3) + " maxH-1=" + fmt(worst_h) + " maxNuErr=" + fmt(worst_nu));
}

void check_cross_oracle(CheckRunner& cr, const std::string& name, bool perturb) {
    double worst_p = 0.0, worst_h = 0.0, worst_nu = 0.0;
    for (double g : {2.0, 3.0, 5.0}) {
        for (double a : {0.5, 1.0, 2.0}) {
            for (double b : {1.0, 2.0}) {
                Params p{a, g, b};
                const int N = xferop::default_depth(p);
                xferop::TruncatedOperator op(p, N);
                xferop::PowerResult pw = xferop::leading_pair_power(op);
                const double Ps = cf::solve_pressure(p);
                worst_p = std::max(worst_p, std::abs(pw.P - Ps) / Ps);
                xferop::RingVector H = xferop::eigenfunction_given_P(op, pw.P);
                if (perturb) H.zero_run(1) *= SignedLog::from_double(2.0);
                xferop::RingVector nu = xferop::eigenmeasure_given_P(op, pw.P);
                const SignedLog x = cf::fixed_point_ratio(Ps, p).x;
                for (int n = 1; n <= 10; ++n) {
                    cf::HPair h = cf::h_ring_values(n, Ps, p, x);
                    worst_h = std::max(worst_h, rel_diff(h.h0, H.zero_run(n)));
                    worst_h = std::max(worst_h, rel_diff(h.h1, H.one_run(n)));
                    worst_nu = std::max(worst_nu,
                                        rel_diff(cf::nu_zero_run(n, Ps, p), nu.zero_run(n)));
                    worst_nu = std::max(worst_nu,
                                        rel_diff(cf::nu_one_run(n, Ps, p), nu.one_run(n)));
                }
                worst_h = std::max(worst_h, rel_diff(x * SignedLog::from_log(-b), H.fix0()));
                worst_nu = std::max(worst_nu, rel_diff(cf::nu_masses(Ps, p).nu2, nu.two_head()));
            }
        }
    }
    const bool pass = worst_p <= 1e-8 && worst_h <= 1e-6 && worst_nu <= 1e-6;
    cr.add(name, pass,
           "relP=" + fmt(worst_p) + " relH=" + fmt(worst_h) + " relNu=" + fmt(worst_nu));
}

void check_secular_residual(CheckRunner& cr, const std::string& name) {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {10.0, 40.0, 60.0}) {
            Params p{a, 3.0, b};
            gibbs::ClosedFormEigen eig =
                gibbs::closed_form_eigendata(p, xferop::default_depth(p));
            worst = std::max({worst, eig.residual_H, eig.residual_nu});
        }
    }
    cr.add(name, worst <= 1e-8, "maxResidual=" + fmt(worst));
}

void check_ring_ratio_identity(CheckRunner& cr, const std::string& name) {
    double worst = 0.0;
    for (double b : {7.0, 60.0}) {
        Params p{1.0, 3.0, b};
        const double P = cf::solve_pressure(p);
        for (int n = 1; n <= 10; ++n) {
            SignedLog direct = cf::nu_zero_run(n, P, p) / cf::nu_one_run(n, P, p);
            worst = std::max(worst, rel_diff(direct, cf::nu_ring_ratio(n, P, p)));
        }
    }
    cr.add(name, worst <= 1e-12, "maxRel=" + fmt(worst));
}

void check_fixed_point_quadratic(CheckRunner& cr, const std::string& name) {
    double worst_res = 0.0, worst_id = 0.0;
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {2.0, 30.0, 60.0}) {
            Params p{a, 3.0, b};
            const double P = cf::solve_pressure(p);
            cf::FixedPointRatio fr = cf::fixed_point_ratio(P, p);
            worst_res = std::max(worst_res, fr.quadratic_residual);
            worst_id = std::max(worst_id,
                                rel_diff(fr.x, cf::fixed_point_ratio_secular(P, p)));
        }
    cr.add(name, worst_res <= 1e-12 && worst_id <= 1e-10,
           "quadResidual=" + fmt(worst_res) + " secularId=" + fmt(worst_id));
}

void check_f_split(CheckRunner& cr, const std::string& name) {
    double worst = 0.0;
    for (double Z : {0.1, 0.5, 1.0})
        for (double th : {0.0, 1.0, 10.0}) {
            std::vector<SignedLog> terms;
            terms.reserve(10000);
            for (int k = 0; k < 10000; ++k)
                terms.push_back(
                    SignedLog::from_log(-k * Z + th * std::ldexp(1.0, -(k + 1))));
            SignedLog direct = SignedLog::sum(terms);
            worst = std::max(worst, rel_diff(direct, cf::F(Z, th).value));
        }
    cr.add(name, worst <= 1e-12, "maxRel=" + fmt(worst));
}

void check_tail_bound(CheckRunner& cr, const std::string& name) {
    bool pass = true;
    double worst_ratio = 0.0;
    for (double b = 2.0; b <= 60.0; b += 2.0) {
        Params p{1.0, 3.0, b};
        const double P = cf::solve_pressure(p);
        // |F(P,b) - 1/P| = (e^{-P}-1+P)/(P(1-e^{-P})) + sum e^{-kP} expm1(b/2^{k+1});
        // the head tends to 1/2 and needs its series form once P is tiny.
        const SignedLog head =
            (P < 1e-6) ? SignedLog::from_double(0.5 * (1.0 + P / 6.0))
                       : SignedLog::from_double(std::expm1(-P) + P) /
                             (SignedLog::from_double(P) *
                              SignedLog::from_double(-std::expm1(-P)));
        const SignedLog corr = cf::F_correction(P, b);
        const SignedLog diff = head + corr;
        const double ln2 = 0.6931471805599453;
        const SignedLog geo = SignedLog::from_double(P / ln2) /
                              SignedLog::from_double(1.0 - P / ln2);
        const SignedLog bound = SignedLog::from_double(b / (2.0 * ln2)) *
                                SignedLog::from_log(b / 2.0) *
                                (SignedLog::from_double(2.0) + geo);
        pass = pass && (diff <= bound);
        worst_ratio = std::max(worst_ratio, (diff / bound).to_double());
    }
    cr.add(name, pass, "maxDiffOverBound=" + fmt(worst_ratio));
}

void check_correction_lemma(CheckRunner& cr, const std::string& name) {
    bool pass = true;
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {gibbs::correction_beta0, 10.0, 30.0, 60.0}) {
            if (b < gibbs::correction_beta0) continue;
            Params p{a, 3.0, b};
            const double P = cf::solve_pressure(p);
            const SignedLog x = cf::fixed_point_ratio(P, p).x;
            const double cap = std::exp(-b / 8.0);
            for (int n = 3; n <= 10; ++n) {
                cf::HPair h = cf::h_ring_values(n, P, p, x);
                const SignedLog lhs = SignedLog::from_log(b * (1.0 - std::ldexp(1.0, -(n - 1)))) *
                                      h.h0 / (h.h1 * x);
                const double dev = std::abs((lhs - SignedLog::one()).to_double());
                worst = std::max(worst, dev / cap);
                pass = pass && dev <= cap;
            }
        }
    }
    cr.add(name, pass, "maxDevOverCap=" + fmt(worst) + " beta0=" + fmt(gibbs::correction_beta0));
}

void check_calibration(CheckRunner& cr, const std::string& name) {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
        Params p{a, 3.0, 1.0};
        worst = std::max(worst, ergopt::verify_calibration({0.0, -1.0}, p, 20));          // u0
        worst = std::max(worst, ergopt::verify_calibration({-p.gamma_slope, 0.0}, p, 20));  // u1
        ergopt::VSolution v = ergopt::solve_V(a, 3.0);
        worst = std::max(worst, ergopt::verify_calibration({0.0, v.delta_v}, p, 20));
    }
    cr.add(name, worst <= 1e-12, "maxViolation=" + fmt(worst));
}

void check_peierls(CheckRunner& cr, const std::string& name) {
    Params p{1.0, 3.0, 1.0};
    bool pass = true;
    for (const char* s : {"01", "10", "2", "0012", "112", "201", "120", "21", "102"}) {
        ringspace::Word w = ringspace::Word::parse(s);
        pass = pass && ergopt::peierls_from_fixed(ringspace::Ring::fix0(), w, p) < 0.0;
        pass = pass && ergopt::peierls_from_fixed(ringspace::Ring::fix1(), w, p) < 0.0;
    }
    cr.add(name, pass, pass ? "all sampled barriers negative" : "nonnegative barrier found");
}

void check_sandwich(CheckRunner& cr, const std::string& name) {
    gibbs::SandwichReport rep = gibbs::sandwich_check(Params{2.0, 3.0, 0.0}, 50.0, 40);
    const bool pass = rep.applicable && rep.holds && rep.margin_low > 0 && rep.margin_high > 0;
    cr.add(name, pass,
           "marginLow=" + fmt(rep.margin_low) + " marginHigh=" + fmt(rep.margin_high));
}

void check_monotone_pressure(CheckRunner& cr, const std::string& name) {
    bool pass = true;
    for (double a : {0.5, 1.0, 2.0}) {
        double prev = std::log(3.0) + 1.0;
        for (double b : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
            Params p{a, 3.0, b};
            const double P = cf::solve_pressure(p);
            pass = pass && P < prev && P > 0.0 && P <= std::log(3.0) + 1e-15;
            prev = P;
        }
    }
    cr.add(name, pass, pass ? "P strictly decreasing, in (0, ln 3]" : "monotonicity violated");
}

void check_mass_partition(CheckRunner& cr, const std::string& name) {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {0.0, 2.0, 30.0, 60.0}) {
            Params p{a, 3.0, b};
            gibbs::ClosedFormEigen eig =
                gibbs::closed_form_eigendata(p, xferop::default_depth(p));
            worst = std::max(worst, eig.nu_mass_defect);
        }
    cr.add(name, worst <= 1e-10, "maxMassDefect=" + fmt(worst));
}

}  // namespace

std::vector<CheckResult> run_verification(const RunConfig& cfg) {
    CheckRunner cr;
    cr.run("beta0_ground_truth", [](CheckRunner& c, const std::string& n) { check_beta0(c, n); });
    const bool perturb = cfg.inject_perturbation;
    cr.run("cross_oracle", [perturb](CheckRunner& c, const std::string& n) {
        check_cross_oracle(c, n, perturb);
    });
    cr.run("secular_residual",
           [](CheckRunner& c, const std::string& n) { check_secular_residual(c, n); });
    cr.run("ring_ratio_identity",
           [](CheckRunner& c, const std::string& n) { check_ring_ratio_identity(c, n); });
    cr.run("fixed_point_quadratic",
           [](CheckRunner& c, const std::string& n) { check_fixed_point_quadratic(c, n); });
    cr.run("f_split_identity", [](CheckRunner& c, const std::string& n) { check_f_split(c, n); });
    cr.run("tail_bound_lemma", [](CheckRunner& c, const std::string& n) { check_tail_bound(c, n); });
    cr.run("correction_lemma",
           [](CheckRunner& c, const std::string& n) { check_correction_lemma(c, n); });
    cr.run("calibration_exact",
           [](CheckRunner& c, const std::string& n) { check_calibration(c, n); });
    cr.run("peierls_negative", [](CheckRunner& c, const std::string& n) { check_peierls(c, n); });
    cr.run("sandwich_alpha2", [](CheckRunner& c, const std::string& n) { check_sandwich(c, n); });
    cr.run("monotone_pressure",
           [](CheckRunner& c, const std::string& n) { check_monotone_pressure(c, n); });
    cr.run("mass_partition",
           [](CheckRunner& c, const std::string& n) { check_mass_partition(c, n); });
    return cr.results;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        std::vector<CheckResult> checks = run_verification(cfg);
        bool all = true;
        std::ostringstream table;
        for (const CheckResult& c : checks) {
            all = all && c.pass;
            table << (c.pass ? "PASS  " : "FAIL  ") << c.name;
            for (std::size_t i = c.name.size(); i < 26; ++i) table << ' ';
            table << ' ' << c.detail << '\n';
        }
        if (cfg.format == OutputFormat::Json) {
            json j;
            j["config"] = config_json(cfg);
            j["rows"] = json::array();
            j["checks"] = json::array();
            for (const CheckResult& c : checks)
                j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
            write_output(cfg, j.dump(2) + "\n", out);
        } else {
            write_output(cfg, table.str(), out);
        }
        return all ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

int cmd_subaction(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<double> betas = cfg.beta_grid;
        if (betas.size() == 1 && betas[0] == 0.0) betas = {10.0, 20.0, 40.0, 80.0};
        std::ostringstream text;
        json rows = json::array();
        for (double a : cfg.alpha_grid) {
            ergopt::VSolution v = ergopt::solve_V(a, cfg.gamma_slope);
            Params p{a, cfg.gamma_slope, betas.front()};
            const double viol = ergopt::verify_calibration({0.0, v.delta_v}, p, 20);
            text << "alpha=" << format_double(a) << " delta_v=" << format_double(v.delta_v)
                 << " gamma=" << format_double(v.gamma)
                 << " certified=" << (v.certified ? "true" : "false")
                 << " calibration_violation=" << format_double(viol) << "\n";
            auto table = ergopt::compare_V_to_H(p, betas);
            for (const auto& row : table) {
                text << "  beta=" << format_double(row.beta)
                     << " sup_dist=" << format_double(row.sup_distance)
                     << " delta_v_est=" << format_double(row.delta_v_estimate) << "\n";
                rows.push_back({{"alpha", a},
                                {"beta", row.beta},
                                {"sup_distance", row.sup_distance},
                                {"delta_v_estimate", row.delta_v_estimate},
                                {"delta_v", v.delta_v},
                                {"gamma", v.gamma},
                                {"certified", v.certified},
                                {"calibration_violation", viol}});
            }
        }
        if (cfg.format == OutputFormat::Json) {
            json j;
            j["config"] = config_json(cfg);
            j["rows"] = rows;
            j["checks"] = json::array();
            write_output(cfg, j.dump(2) + "\n", out);
        } else {
            write_output(cfg, text.str(), out);
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}

int thread_cap_from_env() {
    const char* s = std::getenv("ZTSELECT_THREADS");
    if (!s) return 0;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v <= 0 || v > 4096) return 0;
    return static_cast<int>(v);
}

}  // namespace ztselect::cli
