#pragma once

#include "ztselect/params.hpp"
#include "ztselect/signed_log.hpp"

namespace ztselect::closedform {

/// F(Z,theta) = sum_{k>=0} e^{-kZ} e^{theta/2^{k+1}} with a truncation
/// certificate. The sum is evaluated as
///   1/(1-e^{-Z}) + sum_k e^{-kZ} expm1(theta/2^{k+1}),
/// which is algebraically the definition and converges in
/// O(log theta + log 1/eps) terms even when Z is of order e^{-2 beta}.
struct FValue {
    SignedLog value;
    double truncation_error = 0.0;  // relative bound on the dropped tail
    int terms_used = 0;
};

FValue F(double Z, double theta, double eps = 1e-15);

/// Partial sum F_n = sum_{k=0}^{n}; F_{-1} = 0 by convention.
SignedLog F_partial(int n, double Z, double theta);

/// Tail R_m = sum_{k>=m} e^{-kZ} e^{theta/2^{k+1}} = e^{-mZ} F(Z, theta/2^m).
SignedLog F_tail(int m, double Z, double theta, double eps = 1e-15);

/// F(Z,theta_hi) - F(Z,theta_lo) as an all-positive series (theta_hi >=
/// theta_lo); avoids the cancellation of the shared geometric part.
SignedLog F_diff(double Z, double theta_lo, double theta_hi, double eps = 1e-15);

/// The correction series alone: sum_k e^{-kZ} expm1(theta/2^{k+1}); equals
/// F(Z,theta) - 1/(1-e^{-Z}) without the cancellation.
SignedLog F_correction(double Z, double theta, double eps = 1e-15);

/// sum_{k>=0} (k+1) e^{-kZ} e^{theta/2^{k+1}}; shows up when ring series are
/// summed over all depths at once.
SignedLog F_index_weighted(double Z, double theta, double eps = 1e-15);

/// The three conformal-mass building blocks at pressure P:
///   u = e^{-P-beta} F(P,beta), v = e^{-P-G beta} F(P,G beta),
///   w = e^{-P-alpha beta}.
struct SecularTerms {
    SignedLog u, v, w;
    SignedLog mass_sum;     // w(1+u)(1+v) + uv; equals 1 exactly at the pressure
    SignedLog denominator;  // 1 - uv; must be positive at the pressure
};

SecularTerms secular_terms(double P, const Params& p);

/// Pressure P(beta): the unique root of w(1+u)(1+v) + uv = 1 on
/// (0, ln 3]. Every term is decreasing in P, so a sign-changing bracket is
/// guaranteed and bisection is safe; the lower endpoint is expanded down to
/// e^{-(2+G) beta} if needed. Relative accuracy tol.
double solve_pressure(const Params& p, double tol = 1e-12);

/// nu[0]/nu[1] = e^{(G-1) beta} F(P,b)(1+v) / (F(P,Gb)(1+u)).
SignedLog nu_ratio_cyl(double P, const Params& p);

/// nu[0*_0]/nu[1*_1] = e^{(G-1) beta/2} (1+v)/(1+u).
SignedLog nu_ratio_star(double P, const Params& p);

/// nu[0^n*_0]/nu[1^n*_1] = e^{(G-1) beta (1 - 1/2^{n-1})/2} * star ratio.
SignedLog nu_ring_ratio(int n, double P, const Params& p);

/// Cylinder masses of the eigenmeasure, total mass 1 at the pressure:
///   nu[2] = e^{-P-alpha beta},
///   nu[0] = u(1+v)/M, nu[1] = v(1+u)/M with M = 1+u+v+uv,
///   nu[0*_0] = e^{-P-beta/2}(1+v)/M, symmetric for [1*_1].
struct NuMasses {
    SignedLog nu0, nu1, nu2;
    SignedLog nu0_star, nu1_star;
};

NuMasses nu_masses(double P, const Params& p);

/// nu[0^n *_0] and nu[1^n *_1] (n >= 1).
SignedLog nu_zero_run(int n, double P, const Params& p);
SignedLog nu_one_run(int n, double P, const Params& p);
/// sum_{m >= from_depth} nu[a^m *_a]  (a = 0 or 1).
SignedLog nu_run_tail_sum(int a, int from_depth, double P, const Params& p);

/// x = e^beta H(0^inf)/H(1^inf), from the quadratic x = (a+bx)/(dx+c) with
/// a = d = e^P,
///   b = -[F(P,b)(1+q) e^{-2b} + e^{-(1+alpha)b}],
///   c = -[F(P,Gb)(1+q) e^{-(G-1)b} + e^{(1-alpha)b}],  q = e^{-P-alpha b}.
/// b - c is assembled from the positive difference series F_diff, and the
/// positive quadratic root is rationalized, so the evaluation carries no
/// catastrophic cancellation at any beta.
struct FixedPointRatio {
    SignedLog x;
    double quadratic_residual = 0.0;  // |dx^2-(b-c)x-a| / (dx^2+|b-c|x+a)
};

FixedPointRatio fixed_point_ratio(double P, const Params& p);

/// At the exact pressure the quadratic degenerates and
///   x = e^P / [ (1+q) e^{-2 beta} F(P,beta) + e^{-(1+alpha) beta} ].
/// Used as an internal consistency check against fixed_point_ratio.
SignedLog fixed_point_ratio_secular(double P, const Params& p);

struct HPair {
    SignedLog h0;  // H(0^n *_0)
    SignedLog h1;  // H(1^n *_1)
};

/// H(0*_0), H(1*_1) under the normalization H(1^inf) = 1, H(0^inf) = x e^{-beta}.
HPair h_star_values(double P, const Params& p, const SignedLog& x);

/// H(0^n*_0), H(1^n*_1) for n >= 1. Evaluated in the root-exact tail form
///   H(0^n*_0) = e^{(n-1)P - b/2^n} C (1+q) e^{-b} x R_{n-1}(b),
///   H(1^n*_1) = e^{(n-1)P - Gb/2^n} C (1+q) R_{n-1}(Gb),
/// with C = (e^P-1)/(e^P+e^{-alpha b}) and R_m(th) = e^{-mP} F(P, th/2^m);
/// identical to the displayed partial-sum forms whenever P is the pressure,
/// but built from positive terms only.
HPair h_ring_values(int n, double P, const Params& p, const SignedLog& x);

/// The displayed partial-sum forms (with F_{n-2}); they subtract terms that
/// agree to e^{-c beta} at large beta, so they are only trustworthy at
/// moderate beta. Kept for cross-validation against h_ring_values.
HPair h_ring_values_direct(int n, double P, const Params& p, const SignedLog& x);

/// H([2]) = (e^P-1)(H0+H1)/(e^P+e^{-alpha beta}).
SignedLog h_two_value(double P, const Params& p, const SignedLog& x);

enum class LimitKind { Finite, Infinite, NotApplicable };

struct LimitTarget {
    LimitKind kind = LimitKind::Finite;
    double value = 0.0;  // finite limit when kind == Finite
    double rate = 0.0;   // exponential rate (1/beta) log(...) when Infinite
};

/// beta -> inf targets for the reference slope gamma_slope = 3:
///   alpha > 1: (1, 1, 1, 1), gamma = -2
///   alpha = 1: (rho^2, rho, rho, rho), gamma = -2, rho = (1+sqrt 5)/2
///   alpha < 1: (inf, inf, inf, n/a), gamma = -(1+alpha)
struct AsymptoticTargets {
    double alpha = 1.0;
    LimitTarget mu_ratio;       // mu[0]/mu[1]
    LimitTarget x_ratio;        // e^beta H(0^inf)/H(1^inf)
    LimitTarget nu_star_ratio;  // nu[0*_0]/nu[1*_1]
    LimitTarget p_e2beta;       // P e^{2 beta}
    double gamma_exponent = 0.0;
};

AsymptoticTargets limit_targets(double alpha);

inline constexpr double golden_rho = 1.6180339887498949;  // (1+sqrt 5)/2

}  // namespace ztselect::closedform
