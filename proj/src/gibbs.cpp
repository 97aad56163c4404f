#include "ztselect/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace ztselect::gibbs {

namespace cf = closedform;
using ringspace::Ring;
using ringspace::RingKind;
using ringspace::Symbol;
using ringspace::Word;

ClosedFormEigen closed_form_eigendata(const Params& p, int depth, double tol) {
    p.validate();
    xferop::TruncatedOperator op(p, depth);
    const int N = depth;
    const double beta = p.beta;

    const double P = cf::solve_pressure(p, tol);
    const SignedLog x = cf::fixed_point_ratio(P, p).x;

    xferop::RingVector H = op.make_vector();
    H.fix1() = SignedLog::one();
    H.fix0() = x * SignedLog::from_log(-beta);
    H.two_head() = cf::h_two_value(P, p, x);
    for (int n = 1; n <= N; ++n) {
        cf::HPair h = cf::h_ring_values(n, P, p, x);
        H.zero_run(n) = h.h0;
        H.one_run(n) = h.h1;
    }
    {
        // tails: ring values one level deeper, so the depth-N rows close exactly
        cf::HPair deep = cf::h_ring_values(N + 1, P, p, x);
        H.tail0() = deep.h0;
        H.tail1() = deep.h1;
    }

    cf::NuMasses nm = cf::nu_masses(P, p);
    xferop::RingVector nu = op.make_vector();
    nu.two_head() = nm.nu2;
    for (int n = 1; n <= N; ++n) {
        nu.zero_run(n) = cf::nu_zero_run(n, P, p);
        nu.one_run(n) = cf::nu_one_run(n, P, p);
    }
    // True run-tail masses, not the operator's self-loop closure: the single
    // midpoint loop understates the deep mass once beta/2^{N+2} outweighs P,
    // while the exact tail sums close every column of the left action.
    nu.tail0() = cf::nu_run_tail_sum(0, N + 1, P, p);
    nu.tail1() = cf::nu_run_tail_sum(1, N + 1, P, p);

    std::vector<SignedLog> all;
    all.reserve(nu.size());
    for (int i = 0; i < nu.size(); ++i) all.push_back(nu[i]);
    const SignedLog total = SignedLog::sum(all);
    ClosedFormEigen out{P, x, std::move(H), std::move(nu), 0.0, 0.0, 0.0};
    out.nu_mass_defect = std::abs((total - SignedLog::one()).to_double());
    for (int i = 0; i < out.nu.size(); ++i) out.nu[i] = out.nu[i] / total;

    out.residual_H = xferop::residual(op, P, out.H, xferop::Side::Right);
    out.residual_nu = xferop::residual(op, P, out.nu, xferop::Side::Left);
    return out;
}

namespace {

// sum_{n=from}^{depth} H(a^n*_a) nu(a^n*_a) + H(a^inf) * sum_{m>depth} nu,
// the tail using the fixed-point eigenfunction value.
SignedLog mu_side_series(int a, int from, int depth, double P, const Params& p,
                         const SignedLog& x) {
    const cf::NuMasses nm = cf::nu_masses(P, p);
    const double slope = (a == 0) ? 1.0 : p.gamma_slope;
    const SignedLog star = (a == 0) ? nm.nu0_star : nm.nu1_star;
    std::vector<SignedLog> terms;
    terms.reserve(depth - from + 2);
    for (int n = from; n <= depth; ++n) {
        cf::HPair h = cf::h_ring_values(n, P, p, x);
        const SignedLog hn = (a == 0) ? h.h0 : h.h1;
        const double expo = -(n - 1) * P - slope * p.beta * (0.5 - std::ldexp(1.0, -n));
        terms.push_back(hn * SignedLog::from_log(expo) * star);
    }
    const SignedLog h_fix = (a == 0) ? x * SignedLog::from_log(-p.beta) : SignedLog::one();
    terms.push_back(h_fix * cf::nu_run_tail_sum(a, depth + 1, P, p));
    return SignedLog::sum(terms);
}

}  // namespace

GibbsRingMasses gibbs_masses(const Params& p, int depth) {
    return gibbs_masses(p, depth, cf::solve_pressure(p));
}

GibbsRingMasses gibbs_masses(const Params& p, int depth, double P, double tol) {
    p.validate();
    (void)tol;
    const int N = depth;
    const SignedLog x = cf::fixed_point_ratio(P, p).x;
    xferop::RingVector layout(depth);

    // H and nu per state, with H(tail) ~ H(fixed point) for the mu assembly.
    std::vector<SignedLog> h(layout.size()), nu(layout.size());
    const SignedLog h_fix0 = x * SignedLog::from_log(-p.beta);
    h[layout.index_fix0()] = h_fix0;
    h[layout.index_fix1()] = SignedLog::one();
    h[layout.index_two_head()] = cf::h_two_value(P, p, x);
    h[layout.index_tail0()] = h_fix0;
    h[layout.index_tail1()] = SignedLog::one();
    nu[layout.index_two_head()] = cf::nu_masses(P, p).nu2;
    for (int n = 1; n <= N; ++n) {
        cf::HPair hp = cf::h_ring_values(n, P, p, x);
        h[layout.index_zero_run(n)] = hp.h0;
        h[layout.index_one_run(n)] = hp.h1;
        nu[layout.index_zero_run(n)] = cf::nu_zero_run(n, P, p);
        nu[layout.index_one_run(n)] = cf::nu_one_run(n, P, p);
    }
    nu[layout.index_tail0()] = cf::nu_run_tail_sum(0, N + 1, P, p);
    nu[layout.index_tail1()] = cf::nu_run_tail_sum(1, N + 1, P, p);

    GibbsRingMasses g{p, depth, P, x, {}, SignedLog::zero(), SignedLog::zero(),
                      SignedLog::zero(), SignedLog::zero(), 0.0};
    std::vector<SignedLog> hn(layout.size());
    for (std::size_t i = 0; i < hn.size(); ++i) hn[i] = h[i] * nu[i];
    g.Z = SignedLog::sum(hn);
    if (!(g.Z > SignedLog::zero())) throw NumericError("gibbs_masses: nonpositive normalizer");
    g.mass.resize(hn.size());
    for (std::size_t i = 0; i < hn.size(); ++i) g.mass[i] = hn[i] / g.Z;

    std::vector<SignedLog> side0, side1;
    for (int n = 1; n <= N; ++n) {
        side0.push_back(g.mass[layout.index_zero_run(n)]);
        side1.push_back(g.mass[layout.index_one_run(n)]);
    }
    side0.push_back(g.mass[layout.index_tail0()]);
    side1.push_back(g.mass[layout.index_tail1()]);
    g.mu0 = SignedLog::sum(side0);
    g.mu1 = SignedLog::sum(side1);
    g.mu2 = g.mass[layout.index_two_head()];

    // H(0^{N+1}*_0)/H(0^inf) = e^{-beta/2^{N+1}} (1 + (1-e^{-P}) S); the
    // substituted tail value is within ~2 G beta/2^{N+1} of every true one.
    g.tail_h_rel_err = 2.0 * p.gamma_slope * p.beta * std::ldexp(1.0, -(N + 1));
    return g;
}

SignedLog selection_ratio(const GibbsRingMasses& g) {
    if (!(g.mu1 > SignedLog::zero())) throw NumericError("selection_ratio: mu[1] vanished");
    return g.mu0 / g.mu1;
}

SignedLog selection_ratio_closed(double P, const Params& p) {
    const SignedLog x = cf::fixed_point_ratio(P, p).x;
    const SignedLog star = cf::nu_ratio_star(P, p);
    const SignedLog scale = SignedLog::from_log((p.gamma_slope - 3.0) * p.beta / 2.0);
    return x * star * scale * cf::F_index_weighted(P, p.beta) /
           cf::F_index_weighted(P, p.gamma_slope * p.beta);
}

SignedLog nu_cylinder(const Word& w, double P, const Params& p) {
    p.validate();
    if (w.empty()) return SignedLog::one();
    const cf::NuMasses nm = cf::nu_masses(P, p);

    const Symbol head = w[0];
    bool all_same = true;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] != head) { all_same = false; break; }

    if (head == Symbol::S2) {
        if (w.size() == 1) return nm.nu2;
        return SignedLog::from_log(-P - p.alpha * p.beta) * nu_cylinder(w.shifted(), P, p);
    }
    if (all_same) {
        // [a^L] = union of all runs of depth >= L (the fixed point is null)
        return cf::nu_run_tail_sum(head == Symbol::S0 ? 0 : 1, static_cast<int>(w.size()), P, p);
    }
    const ringspace::RingClass rc = ringspace::ring_of(w);
    const double a_val = ringspace::potential(rc.ring, p);
    return SignedLog::from_log(-P + p.beta * a_val) * nu_cylinder(w.shifted(), P, p);
}

SignedLog mu_cylinder(const Word& w, const GibbsRingMasses& g) {
    if (w.empty()) return SignedLog::one();
    const Params& p = g.params;
    const double P = g.P;

    const Symbol head = w[0];
    bool all_same = true;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] != head) { all_same = false; break; }

    if (all_same && head != Symbol::S2) {
        const int L = static_cast<int>(w.size());
        const int a = (head == Symbol::S0) ? 0 : 1;
        return mu_side_series(a, L, g.depth, P, p, g.x) / g.Z;
    }
    const ringspace::RingClass rc = ringspace::ring_of(w);
    SignedLog h;
    switch (rc.ring.kind) {
        case RingKind::TwoHead: h = cf::h_two_value(P, p, g.x); break;
        case RingKind::ZeroRun: h = cf::h_ring_values(rc.ring.run, P, p, g.x).h0; break;
        case RingKind::OneRun: h = cf::h_ring_values(rc.ring.run, P, p, g.x).h1; break;
        default: throw std::logic_error("mu_cylinder: unreachable");
    }
    return h * nu_cylinder(w, P, p) / g.Z;
}

SandwichReport sandwich_check(const Params& p, double beta, int n_max) {
    p.validate();
    if (n_max < 4) throw std::invalid_argument("sandwich_check: n_max must be >= 4");
    Params pb{p.alpha, p.gamma_slope, beta};
    SandwichReport rep;
    rep.correction = std::exp(-beta / 8.0);
    if (beta < correction_beta0) return rep;  // hypothesis not met: not applicable
    rep.applicable = true;

    const double P = cf::solve_pressure(pb);
    const SignedLog x = cf::fixed_point_ratio(P, pb).x;
    const SignedLog center = x * cf::nu_ratio_star(P, pb);
    const SignedLog lower = center * SignedLog::from_double(1.0 - rep.correction);
    const SignedLog upper = center * SignedLog::from_double(1.0 + rep.correction);

    const SignedLog num3 = mu_side_series(0, 3, n_max, P, pb, x);
    const SignedLog den3 = mu_side_series(1, 3, n_max, P, pb, x);
    const SignedLog partial = num3 / den3;
    rep.holds = (lower <= partial) && (partial <= upper);
    rep.margin_low = ((partial - lower) / center).to_double();
    rep.margin_high = ((upper - partial) / center).to_double();

    const SignedLog num_all = mu_side_series(0, 1, n_max, P, pb, x);
    const SignedLog den_all = mu_side_series(1, 1, n_max, P, pb, x);
    const SignedLog full = num_all / den_all;
    rep.full_ratio_within = (lower <= full) && (full <= upper);
    rep.small_share_0 = ((num_all - num3) / num_all).to_double();
    rep.small_share_1 = ((den_all - den3) / den_all).to_double();
    return rep;
}

Extrapolation extrapolate(std::span<const double> values, ExtrapolationMode mode) {
    if (values.empty()) throw std::invalid_argument("extrapolate: empty sequence");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("extrapolate: sequence must be finite (no tagged limits)");
    const std::size_t n = values.size();
    if (mode == ExtrapolationMode::Last || n < 3) {
        const double last = values[n - 1];
        const double unc = (n >= 2) ? std::abs(last - values[n - 2]) : 0.0;
        return {last, unc};
    }
    const double x0 = values[n - 3], x1 = values[n - 2], x2 = values[n - 1];
    const double d1 = x1 - x0, d2 = x2 - x1;
    const double den = d2 - d1;
    if (den == 0.0 || std::abs(d2 * d2 / den) > 1e12 * (std::abs(x2) + 1.0))
        return {x2, std::abs(d2)};
    return {x2 - d2 * d2 / den, std::abs(d2 * d2 / den) + std::abs(d2) * 1e-12};
}

SelectionRecord compute_record(const Params& p, int depth, double tol) {
    p.validate();
    SelectionRecord r;
    r.alpha = p.alpha;
    r.gamma_slope = p.gamma_slope;
    r.beta = p.beta;
    r.depth = depth;
    r.P = cf::solve_pressure(p, tol);
    GibbsRingMasses g = gibbs_masses(p, depth, r.P, tol);
    r.mu_ratio = selection_ratio(g);
    r.x_ratio = g.x;
    r.nu_star_ratio = cf::nu_ratio_star(r.P, p);
    r.nu_cyl_ratio = cf::nu_ratio_cyl(r.P, p);
    r.mu0 = g.mu0;
    r.mu1 = g.mu1;
    r.mu2 = g.mu2;
    r.targets = cf::limit_targets(p.alpha);
    ClosedFormEigen eig = closed_form_eigendata(p, depth, tol);
    r.residual_H = eig.residual_H;
    r.residual_nu = eig.residual_nu;
    r.certified = (p.gamma_slope == 3.0);
    return r;
}

std::vector<SelectionRecord> selection_report(std::span<const double> alpha_grid,
                                              std::span<const double> beta_grid,
                                              double gamma_slope, int thread_cap, double tol) {
    if (alpha_grid.empty() || beta_grid.empty())
        throw std::invalid_argument("selection_report: grids must be nonempty");
    const std::size_t total = alpha_grid.size() * beta_grid.size();
    std::vector<SelectionRecord> out(total);

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned workers = (thread_cap > 0) ? static_cast<unsigned>(thread_cap) : hw;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(total));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                const double alpha = alpha_grid[i / beta_grid.size()];
                const double beta = beta_grid[i % beta_grid.size()];
                Params p{alpha, gamma_slope, beta};
                out[i] = compute_record(p, xferop::default_depth(p), tol);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace ztselect::gibbs
