#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "ztselect/cli_core.hpp"

using namespace ztselect;
using namespace ztselect::cli;

namespace {
RunConfig base_config() {
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.alpha_grid = {0.5, 1.0, 2.0};
    cfg.beta_grid = {1.0, 2.0, 4.0};
    cfg.tol = 1e-10;
    return cfg;
}
}  // namespace

TEST_CASE("config validation") {
    RunConfig cfg = base_config();
    CHECK_NOTHROW(cfg.validate());

    cfg.gamma_slope = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.beta_grid = {2.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.tol = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.alpha_grid = {-1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("float formatting is locale-free with 17 significant digits") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(1.0986122886681098) == "1.0986122886681098");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("sweep csv: header, shape, determinism across thread counts") {
    RunConfig cfg = base_config();
    std::ostringstream out1, err1;
    cfg.thread_cap = 1;
    REQUIRE(cmd_sweep(cfg, out1, err1) == 0);

    std::ostringstream out8, err8;
    cfg.thread_cap = 8;
    REQUIRE(cmd_sweep(cfg, out8, err8) == 0);
    CHECK(out1.str() == out8.str());

    std::istringstream lines(out1.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "alpha,gamma_slope,beta,depth,P,log_P_over_beta,P_e2beta,x_ratio,nu_cyl_ratio,"
          "nu_star_ratio,mu0,mu1,mu2,mu_ratio,target_mu_ratio,target_gamma,residual_H,"
          "residual_nu,certified");
    int rows = 0;
    for (std::string line; std::getline(lines, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 9);
}

TEST_CASE("eig csv row reproduces the sweep row byte for byte") {
    RunConfig sweep_cfg = base_config();
    sweep_cfg.alpha_grid = {1.0};
    sweep_cfg.beta_grid = {2.0};
    std::ostringstream sweep_out, err;
    REQUIRE(cmd_sweep(sweep_cfg, sweep_out, err) == 0);

    RunConfig eig_cfg = sweep_cfg;
    eig_cfg.command = "eig";
    std::ostringstream eig_out;
    REQUIRE(cmd_eig(eig_cfg, eig_out, err) == 0);
    CHECK(eig_out.str() == sweep_out.str());
}

TEST_CASE("eig at beta=0 reports P = ln 3") {
    RunConfig cfg = base_config();
    cfg.command = "eig";
    cfg.alpha_grid = {1.0};
    cfg.beta_grid = {0.0};
    std::ostringstream out, err;
    REQUIRE(cmd_eig(cfg, out, err) == 0);
    CHECK(out.str().find("1.0986122886681098") != std::string::npos);
}

TEST_CASE("eig json carries ring values and P_e2beta") {
    RunConfig cfg = base_config();
    cfg.command = "eig";
    cfg.alpha_grid = {2.0};
    cfg.beta_grid = {40.0};
    cfg.format = OutputFormat::Json;
    std::ostringstream out, err;
    REQUIRE(cmd_eig(cfg, out, err) == 0);
    auto j = nlohmann::json::parse(out.str());
    REQUIRE(j.contains("rows"));
    REQUIRE(j["rows"].size() == 1);
    const auto& row = j["rows"][0];
    CHECK(row.contains("P_e2beta"));
    CHECK(row["P_e2beta"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
    CHECK(row.contains("H"));
    CHECK(row.contains("nu"));
    CHECK(row["H"].contains("zero_run_1"));
    CHECK(row["certified"].get<bool>());
}

TEST_CASE("sweep json mirrors the csv schema") {
    RunConfig cfg = base_config();
    cfg.alpha_grid = {1.0};
    cfg.beta_grid = {1.0, 2.0};
    cfg.format = OutputFormat::Json;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == 0);
    auto j = nlohmann::json::parse(out.str());
    CHECK(j["config"]["gamma_slope"].get<double>() == 3.0);
    REQUIRE(j["rows"].size() == 2);
    for (const char* key : {"alpha", "beta", "P", "mu_ratio", "target_mu_ratio",
                            "residual_H", "certified"})
        CHECK(j["rows"][0].contains(key));
    CHECK(j.contains("checks"));
}

TEST_CASE("alpha=1 rows carry the golden targets; slope != 3 is uncertified") {
    RunConfig cfg = base_config();
    cfg.alpha_grid = {1.0};
    cfg.beta_grid = {2.0};
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == 0);
    CHECK(out.str().find("2.6180339887498949") != std::string::npos);

    cfg.gamma_slope = 2.5;
    std::ostringstream out2;
    REQUIRE(cmd_sweep(cfg, out2, err) == 0);
    CHECK(out2.str().find("false") != std::string::npos);
}

TEST_CASE("argument errors exit 1") {
    RunConfig cfg = base_config();
    cfg.gamma_slope = 1.0;
    std::ostringstream out, err;
    CHECK(cmd_sweep(cfg, out, err) == 1);
    CHECK(cmd_eig(cfg, out, err) == 1);
    cfg = base_config();
    cfg.command = "eig";
    CHECK(cmd_eig(cfg, out, err) == 1);  // eig needs exactly one (alpha, beta)
}

TEST_CASE("subaction command reports the piecewise solution") {
    RunConfig cfg = base_config();
    cfg.command = "subaction";
    cfg.alpha_grid = {0.5, 1.0, 2.0};
    cfg.beta_grid = {20.0, 40.0};
    std::ostringstream out, err;
    REQUIRE(cmd_subaction(cfg, out, err) == 0);
    const std::string s = out.str();
    CHECK(s.find("delta_v=0.5") != std::string::npos);
    CHECK(s.find("gamma=-1.5") != std::string::npos);
    CHECK(s.find("delta_v=1 ") != std::string::npos);
    CHECK(s.find("gamma=-2 ") != std::string::npos);

    cfg.gamma_slope = 2.5;
    std::ostringstream out2;
    REQUIRE(cmd_subaction(cfg, out2, err) == 0);
    CHECK(out2.str().find("certified=false") != std::string::npos);
}

TEST_CASE("depth override is honored and echoed") {
    RunConfig cfg = base_config();
    cfg.alpha_grid = {1.0};
    cfg.beta_grid = {1.0};
    cfg.depth = 12;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(cfg, out, err) == 0);
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(row.find(",12,") != std::string::npos);
}

TEST_CASE("thread cap env parsing") {
    CHECK(thread_cap_from_env() >= 0);  // unset or valid either way
}
