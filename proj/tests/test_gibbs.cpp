#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ztselect/gibbs.hpp"

using namespace ztselect;
using namespace ztselect::gibbs;
using ringspace::Symbol;
using ringspace::Word;
namespace cf = ztselect::closedform;

TEST_CASE("closed-form eigendata satisfies the truncated operator") {
    for (double a : {0.5, 1.0, 2.0}) {
        for (double b : {2.0, 20.0, 60.0}) {
            Params p{a, 3.0, b};
            ClosedFormEigen eig = closed_form_eigendata(p, xferop::default_depth(p));
            CHECK(eig.residual_H <= 1e-8);
            CHECK(eig.residual_nu <= 1e-8);
            CHECK(eig.nu_mass_defect <= 1e-10);
            CHECK(eig.H.all_positive());
        }
    }
}

TEST_CASE("gibbs masses at beta=0 are Bernoulli(1/3)") {
    GibbsRingMasses g = gibbs_masses(Params{1.0, 3.0, 0.0}, 24);
    CHECK(g.mu0.to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(g.mu1.to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(g.mu2.to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    xferop::RingVector layout(24);
    for (int n = 1; n <= 12; ++n) {
        const double expect = std::pow(1.0 / 3.0, n) * (2.0 / 3.0);
        CHECK(g.mass[layout.index_zero_run(n)].to_double() ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(selection_ratio(g).to_double() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("total gibbs mass is one and mu[2] decays") {
    double prev_mu2 = 1.0;
    for (double b : {0.0, 5.0, 15.0, 30.0, 60.0}) {
        Params p{1.0, 3.0, b};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        SignedLog total = SignedLog::sum(g.mass);
        CHECK(rel_diff(total, SignedLog::one()) < 1e-10);
        const double mu2 = g.mu2.to_double();
        CHECK(mu2 < prev_mu2);
        prev_mu2 = mu2;
        for (const SignedLog& m : g.mass) CHECK(m.sign() >= 0);
    }
}

TEST_CASE("selection ratio from the series equals the closed product form") {
    for (double a : {0.5, 1.0, 2.0})
        for (double g : {2.0, 3.0, 5.0})
            for (double b : {2.0, 30.0, 60.0}) {
                Params p{a, g, b};
                const double P = cf::solve_pressure(p, 1e-13);
                GibbsRingMasses gm = gibbs_masses(p, xferop::default_depth(p), P);
                CHECK(rel_diff(selection_ratio(gm), selection_ratio_closed(P, p)) < 1e-9);
            }
}

TEST_CASE("selection ratio hits the three regimes") {
    {
        Params p{2.0, 3.0, 60.0};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        CHECK(selection_ratio(g).to_double() == doctest::Approx(1.0).epsilon(0.1));
    }
    {
        Params p{1.0, 3.0, 60.0};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        CHECK(selection_ratio(g).to_double() ==
              doctest::Approx(2.6180339887498949).epsilon(0.15));
    }
    {
        Params p{0.5, 3.0, 80.0};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        CHECK(selection_ratio(g).log_mag() / 80.0 == doctest::Approx(1.0).epsilon(0.05));
    }
    // strict regime ordering at beta = 60
    double r05 = selection_ratio(gibbs_masses(Params{0.5, 3.0, 60.0}, 48)).log_mag();
    double r1 = selection_ratio(gibbs_masses(Params{1.0, 3.0, 60.0}, 48)).log_mag();
    double r2 = selection_ratio(gibbs_masses(Params{2.0, 3.0, 60.0}, 48)).log_mag();
    CHECK(r05 > r1);
    CHECK(r1 > r2);
}

TEST_CASE("shift invariance of the gibbs measure on cylinders") {
    // mu([w]) = sum_a mu([a w]) for all words to depth 6
    for (double b : {2.0, 4.0}) {
        Params p{1.0, 3.0, b};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        double worst = 0.0;
        std::vector<Word> level = {Word{}};
        for (int d = 0; d < 6; ++d) {
            std::vector<Word> next;
            for (const Word& w : level) {
                SignedLog lhs = mu_cylinder(w, g);
                SignedLog sum = SignedLog::zero();
                for (int s = 0; s < 3; ++s) {
                    Word aw = w.prepended(static_cast<Symbol>(s));
                    sum += mu_cylinder(aw, g);
                    next.push_back(aw);
                }
                worst = std::max(worst, rel_diff(lhs, sum));
            }
            level = std::move(next);
        }
        CHECK(worst <= 1e-8);
    }
    // and in log-domain at large beta
    {
        Params p{1.0, 3.0, 60.0};
        GibbsRingMasses g = gibbs_masses(p, xferop::default_depth(p));
        double worst = 0.0;
        for (const char* s : {"01", "10", "2", "001", "112", "210"}) {
            Word w = Word::parse(s);
            SignedLog sum = SignedLog::zero();
            for (int a = 0; a < 3; ++a) sum += mu_cylinder(w.prepended(static_cast<Symbol>(a)), g);
            worst = std::max(worst, rel_diff(mu_cylinder(w, g), sum));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("nu cylinder masses agree with the ring decomposition") {
    Params p{0.8, 3.0, 3.0};
    const double P = cf::solve_pressure(p, 1e-13);
    // [0] = union of all zero-runs
    CHECK(rel_diff(nu_cylinder(Word::parse("0"), P, p), cf::nu_masses(P, p).nu0) < 1e-12);
    CHECK(rel_diff(nu_cylinder(Word::parse("2"), P, p), cf::nu_masses(P, p).nu2) < 1e-12);
    // [01] = [0*_0] minus [02]: check additivity across the three symbols
    SignedLog total = nu_cylinder(Word::parse("01"), P, p) +
                      nu_cylinder(Word::parse("02"), P, p);
    CHECK(rel_diff(total, cf::nu_zero_run(1, P, p)) < 1e-12);
}

TEST_CASE("sandwich check holds above beta0 and reports n/a below") {
    SandwichReport below = sandwich_check(Params{2.0, 3.0, 0.0}, 1.0, 40);
    CHECK_FALSE(below.applicable);

    SandwichReport rep = sandwich_check(Params{2.0, 3.0, 0.0}, 50.0, 40);
    CHECK(rep.applicable);
    CHECK(rep.holds);
    CHECK(rep.margin_low > 0.0);
    CHECK(rep.margin_high > 0.0);
    CHECK(rep.full_ratio_within);
    CHECK(rep.small_share_0 < 1e-6);  // the n in {1,2} rings carry almost no mass
    CHECK(rep.small_share_1 < 1e-6);

    // correction factor shrinks with beta
    SandwichReport rep2 = sandwich_check(Params{2.0, 3.0, 0.0}, 60.0, 40);
    CHECK(rep2.correction < rep.correction);

    // holds in every regime wherever applicable
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {5.0, 20.0, 50.0}) {
            SandwichReport r = sandwich_check(Params{a, 3.0, 0.0}, b, 40);
            CHECK(r.applicable);
            CHECK(r.holds);
        }
}

TEST_CASE("extrapolation modes") {
    std::vector<double> constant = {2.0, 2.0, 2.0};
    auto e = extrapolate(constant, ExtrapolationMode::Aitken);
    CHECK(e.estimate == 2.0);
    CHECK(e.uncertainty == 0.0);

    std::vector<double> geo;
    for (int k = 1; k <= 6; ++k) geo.push_back(1.0 + std::ldexp(1.0, -k));
    e = extrapolate(geo, ExtrapolationMode::Aitken);
    CHECK(e.estimate == doctest::Approx(1.0).epsilon(1e-6));

    e = extrapolate(geo, ExtrapolationMode::Last);
    CHECK(e.estimate == geo.back());
    CHECK(e.uncertainty == doctest::Approx(std::ldexp(1.0, -6)));

    std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(extrapolate(bad, ExtrapolationMode::Aitken), std::invalid_argument);
}

TEST_CASE("selection report: grid shape, targets, residual contract") {
    std::vector<double> alphas = {0.5, 1.0, 2.0};
    std::vector<double> betas = {10.0, 20.0, 40.0};
    auto recs = selection_report(alphas, betas, 3.0);
    REQUIRE(recs.size() == 9);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        CHECK(r.alpha == alphas[i / 3]);
        CHECK(r.beta == betas[i % 3]);
        CHECK(r.residual_H <= 1e-8);
        CHECK(r.residual_nu <= 1e-8);
        CHECK(r.certified);
        CHECK(r.mu_ratio.is_positive());
    }
    CHECK(recs[3].targets.mu_ratio.value == doctest::Approx(2.6180339887498949));
    CHECK(recs[3].targets.x_ratio.value == doctest::Approx(1.6180339887498949));
    CHECK(recs[0].targets.gamma_exponent == -1.5);

    // single-threaded result is identical
    auto serial = selection_report(alphas, betas, 3.0, 1);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(serial[i].P == recs[i].P);
        CHECK(serial[i].mu_ratio == recs[i].mu_ratio);
    }
}

TEST_CASE("gamma robustness of the selection ratio at beta=60") {
    // the alpha=2 band around 1 transfers to slope 2
    GibbsRingMasses g2 = gibbs_masses(Params{2.0, 2.0, 60.0}, 49);
    CHECK(selection_ratio(g2).to_double() == doctest::Approx(1.0).epsilon(0.1));
    // slope 5 sits exactly on its critical line alpha = (G-1)/2 and selects
    // the golden-mean-squared combination instead
    GibbsRingMasses g5 = gibbs_masses(Params{2.0, 5.0, 60.0}, 49);
    CHECK(selection_ratio(g5).to_double() ==
          doctest::Approx(2.6180339887498949).epsilon(0.1));
}
