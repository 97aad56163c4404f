#pragma once

#include <vector>

#include "ztselect/params.hpp"
#include "ztselect/ringspace.hpp"

namespace ztselect::ergopt {

/// Calibrated subaction in two-constant form:
///   V(x) = max(c0 - d(x,0^inf), c1 - gamma_slope * d(x,1^inf)).
/// Any calibrated subaction here is determined by its values at the two
/// fixed points, which is exactly (c0, c1).
struct Subaction {
    double c0 = 0.0;
    double c1 = 0.0;

    /// Value on a non-tail ring (V is constant on rings).
    double on_ring(const ringspace::Ring& r, double gamma_slope) const;
};

/// u0(x) = -d(x, 0^inf); equals Subaction{0, -1}.
double subaction_u0(const ringspace::Word& w, const Params& p);
/// u1(x) = -gamma_slope * d(x, 1^inf); equals Subaction{-gamma_slope, 0}.
double subaction_u1(const ringspace::Word& w, const Params& p);

/// Peierls barrier from a fixed point: h(0^inf, w) = u0(w), h(1^inf, w) = u1(w).
/// Other base points are out of scope and rejected.
double peierls_from_fixed(const ringspace::Ring& fixed_point, const ringspace::Word& w,
                          const Params& p);

struct MaximizingCertificate {
    double value = 0.0;  // m(A)
    bool potential_nonpositive = false;
    bool zero_only_at_fixed_points = false;
    std::vector<ringspace::Ring> maximizing_supports;  // {Fix0, Fix1}
};

/// m(A) = 0 with certificate: A <= 0 on a ring grid and A = 0 exactly at the
/// two fixed points; the maximizing measures are the two Dirac deltas.
MaximizingCertificate maximizing_value(const Params& p, int depth_grid = 40);

struct VSolution {
    double delta_v = 0.0;  // V(1^inf) - V(0^inf)
    double gamma = 0.0;    // lim (1/beta) log P
    bool certified = true; // false when estimated numerically (gamma_slope != 3)
};

/// gamma_slope == 3 (certified): delta_v = min(alpha, 1),
/// gamma = -2 for alpha >= 1 and -(1+alpha) for alpha < 1. Other slopes:
/// numeric estimates at beta = 80, flagged uncertified.
VSolution solve_V(double alpha, double gamma_slope = 3.0);

/// Max over all rings to the given depth of
///   |V(r) - max over preimage branches (A + V)|  (m(A) = 0).
double verify_calibration(const Subaction& s, const Params& p, int depth);

struct VHRow {
    double beta = 0.0;
    double sup_distance = 0.0;  // sup over rings of |(1/b) log(H/H(1^inf)) - (V - c1)|
    double delta_v_estimate = 0.0;
};

/// For each beta, the sup-distance between the normalized eigenfunction
/// exponents and the Proposition subaction, plus the running delta_v estimate.
std::vector<VHRow> compare_V_to_H(const Params& p, const std::vector<double>& beta_grid,
                                  int depth = 12);

}  // namespace ztselect::ergopt
