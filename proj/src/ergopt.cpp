#include "ztselect/ergopt.hpp"

#include <algorithm>
#include <cmath>

#include "ztselect/closedform.hpp"

namespace ztselect::ergopt {

using ringspace::Ring;
using ringspace::RingKind;
using ringspace::Symbol;
using ringspace::Word;

double Subaction::on_ring(const Ring& r, double gamma_slope) const {
    switch (r.kind) {
        case RingKind::Fix0: return c0;
        case RingKind::Fix1: return c1;
        case RingKind::TwoHead: return std::max(c0 - 1.0, c1 - gamma_slope);
        case RingKind::ZeroRun:
            return std::max(c0 - std::ldexp(1.0, -r.run), c1 - gamma_slope);
        case RingKind::OneRun:
            return std::max(c0 - 1.0, c1 - gamma_slope * std::ldexp(1.0, -r.run));
        default:
            throw std::invalid_argument("Subaction: tail aggregates have no single value");
    }
}

double subaction_u0(const Word& w, const Params& p) {
    p.validate();
    if (w.empty()) throw std::invalid_argument("subaction_u0: empty word");
    return -ringspace::dist_to_fixed(w, Symbol::S0);
}

double subaction_u1(const Word& w, const Params& p) {
    p.validate();
    if (w.empty()) throw std::invalid_argument("subaction_u1: empty word");
    return -p.gamma_slope * ringspace::dist_to_fixed(w, Symbol::S1);
}

double peierls_from_fixed(const Ring& fixed_point, const Word& w, const Params& p) {
    if (fixed_point.kind == RingKind::Fix0) return subaction_u0(w, p);
    if (fixed_point.kind == RingKind::Fix1) return subaction_u1(w, p);
    throw std::invalid_argument("peierls_from_fixed: base point must be 0^inf or 1^inf");
}

MaximizingCertificate maximizing_value(const Params& p, int depth_grid) {
    p.validate();
    MaximizingCertificate cert;
    cert.value = 0.0;
    bool nonpositive = ringspace::potential(Ring::two_head(), p) < 0.0;
    for (int n = 1; n <= depth_grid; ++n) {
        nonpositive = nonpositive && ringspace::potential(Ring::zero_run(n), p) < 0.0 &&
                      ringspace::potential(Ring::one_run(n), p) < 0.0;
    }
    cert.potential_nonpositive = nonpositive;
    cert.zero_only_at_fixed_points = ringspace::potential(Ring::fix0(), p) == 0.0 &&
                                     ringspace::potential(Ring::fix1(), p) == 0.0 && nonpositive;
    cert.maximizing_supports = {Ring::fix0(), Ring::fix1()};
    return cert;
}

VSolution solve_V(double alpha, double gamma_slope) {
    if (!(alpha > 0.0)) throw std::invalid_argument("solve_V: alpha must be > 0");
    if (!(gamma_slope > 1.0)) throw std::invalid_argument("solve_V: gamma_slope must be > 1");
    VSolution v;
    if (gamma_slope == 3.0) {
        v.delta_v = std::min(alpha, 1.0);
        v.gamma = (alpha >= 1.0) ? -2.0 : -(1.0 + alpha);
        v.certified = true;
        return v;
    }
    // Uncertified slope: estimate both exponents at beta = 80.
    const double beta = 80.0;
    Params p{alpha, gamma_slope, beta};
    const double P = closedform::solve_pressure(p);
    const SignedLog x = closedform::fixed_point_ratio(P, p).x;
    // delta_v = (1/beta) log(H(1^inf)/H(0^inf)) = 1 - log(x)/beta
    v.delta_v = 1.0 - x.log_mag() / beta;
    v.gamma = std::log(P) / beta;
    v.certified = false;
    return v;
}

double verify_calibration(const Subaction& s, const Params& p, int depth) {
    p.validate();
    if (depth < 1) throw std::invalid_argument("verify_calibration: depth must be >= 1");
    std::vector<Ring> rings = {Ring::fix0(), Ring::fix1(), Ring::two_head()};
    for (int n = 1; n <= depth; ++n) {
        rings.push_back(Ring::zero_run(n));
        rings.push_back(Ring::one_run(n));
    }
    double worst = 0.0;
    for (const Ring& r : rings) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& br : ringspace::preimage_rings(r, p))
            best = std::max(best, br.potential_value + s.on_ring(br.ring, p.gamma_slope));
        worst = std::max(worst, std::abs(s.on_ring(r, p.gamma_slope) - best));
    }
    return worst;
}

std::vector<VHRow> compare_V_to_H(const Params& p, const std::vector<double>& beta_grid,
                                  int depth) {
    p.validate();
    if (beta_grid.empty()) throw std::invalid_argument("compare_V_to_H: empty beta grid");
    VSolution vs = solve_V(p.alpha, p.gamma_slope);
    Subaction V{0.0, vs.delta_v};  // normalized to V(0^inf) = 0

    std::vector<VHRow> out;
    out.reserve(beta_grid.size());
    for (double beta : beta_grid) {
        if (!(beta > 0.0)) throw std::invalid_argument("compare_V_to_H: beta must be > 0");
        Params pb{p.alpha, p.gamma_slope, beta};
        const double P = closedform::solve_pressure(pb);
        const SignedLog x = closedform::fixed_point_ratio(P, pb).x;

        VHRow row;
        row.beta = beta;
        row.delta_v_estimate = 1.0 - x.log_mag() / beta;
        // (1/beta) log(H(r)/H(1^inf)) vs V(r) - c1
        double sup = std::abs((x.log_mag() - beta) / beta - (V.c0 - V.c1));  // r = Fix0
        auto check = [&](const Ring& r, const SignedLog& h) {
            const double lhs = h.log_mag() / beta;
            sup = std::max(sup, std::abs(lhs - (V.on_ring(r, p.gamma_slope) - V.c1)));
        };
        check(Ring::two_head(), closedform::h_two_value(P, pb, x));
        for (int n = 1; n <= depth; ++n) {
            auto h = closedform::h_ring_values(n, P, pb, x);
            check(Ring::zero_run(n), h.h0);
            check(Ring::one_run(n), h.h1);
        }
        row.sup_distance = sup;
        out.push_back(row);
    }
    return out;
}

}  // namespace ztselect::ergopt
