#include "ztselect/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ztselect::closedform {

namespace {

constexpr double kLn3 = 1.0986122886681098;
constexpr int kMaxSeriesTerms = 20000;

// 1/(1 - e^{-Z}) as SignedLog, stable for tiny Z.
SignedLog geometric_sum(double Z) {
    return SignedLog::from_log(-std::log(-std::expm1(-Z)));
}

}  // namespace

FValue F(double Z, double theta, double eps) {
    if (!(Z > 0.0)) throw std::invalid_argument("F: Z must be > 0");
    if (theta < 0.0) throw std::invalid_argument("F: theta must be >= 0");
    if (!(eps > 0.0)) throw std::invalid_argument("F: eps must be > 0");

    FValue out;
    out.value = geometric_sum(Z);
    if (theta == 0.0) {
        out.terms_used = 0;
        return out;
    }
    std::vector<SignedLog> terms;
    SignedLog running = out.value;  // cheap sequential tracker for the stop test
    int k = 0;
    double last_rel = 0.0;
    for (; k < kMaxSeriesTerms; ++k) {
        const double y = theta * std::ldexp(1.0, -(k + 1));
        if (y <= 0.0) break;
        SignedLog term = SignedLog::from_log(-k * Z + log_expm1(y));
        terms.push_back(term);
        running += term;
        last_rel = (term / running).to_double();
        // halving regime: terms drop by ~ e^{-Z}/2 per step
        if (y <= 0.5 && last_rel < eps) {
            ++k;
            break;
        }
    }
    if (k >= kMaxSeriesTerms) throw NumericError("F: series did not converge");
    out.value = out.value + SignedLog::sum(terms);
    out.terms_used = k;
    out.truncation_error = 2.0 * last_rel;  // tail ratio is below e^{-Z}/2 + slack
    return out;
}

SignedLog F_partial(int n, double Z, double theta) {
    if (n < -1) throw std::invalid_argument("F_partial: n must be >= -1");
    if (!(Z > 0.0)) throw std::invalid_argument("F_partial: Z must be > 0");
    if (n == -1) return SignedLog::zero();
    std::vector<SignedLog> terms;
    terms.reserve(n + 1);
    for (int k = 0; k <= n; ++k)
        terms.push_back(SignedLog::from_log(-k * Z + theta * std::ldexp(1.0, -(k + 1))));
    return SignedLog::sum(terms);
}

SignedLog F_tail(int m, double Z, double theta, double eps) {
    if (m < 0) throw std::invalid_argument("F_tail: m must be >= 0");
    return SignedLog::from_log(-m * Z) * F(Z, theta * std::ldexp(1.0, -m), eps).value;
}

SignedLog F_diff(double Z, double theta_lo, double theta_hi, double eps) {
    if (!(Z > 0.0)) throw std::invalid_argument("F_diff: Z must be > 0");
    if (theta_hi < theta_lo) throw std::invalid_argument("F_diff: needs theta_hi >= theta_lo");
    if (theta_hi == theta_lo) return SignedLog::zero();
    // sum_k e^{-kZ} e^{lo/2^{k+1}} expm1((hi-lo)/2^{k+1}), all positive
    const double d = theta_hi - theta_lo;
    std::vector<SignedLog> terms;
    SignedLog running = SignedLog::zero();
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        const double half = std::ldexp(1.0, -(k + 1));
        const double y = d * half;
        if (y <= 0.0) break;
        SignedLog term = SignedLog::from_log(-k * Z + theta_lo * half + log_expm1(y));
        terms.push_back(term);
        running += term;
        if (y <= 0.5 && theta_lo * half <= 0.5 && (term / running).to_double() < eps)
            return SignedLog::sum(terms);
    }
    throw NumericError("F_diff: series did not converge");
}

SignedLog F_correction(double Z, double theta, double eps) {
    return F_diff(Z, 0.0, theta, eps);
}

SignedLog F_index_weighted(double Z, double theta, double eps) {
    if (!(Z > 0.0)) throw std::invalid_argument("F_index_weighted: Z must be > 0");
    // geometric part: sum (k+1) e^{-kZ} = (1-e^{-Z})^{-2}
    SignedLog geo = SignedLog::pow(geometric_sum(Z), 2.0);
    if (theta == 0.0) return geo;
    std::vector<SignedLog> terms;
    SignedLog running = geo;
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        const double y = theta * std::ldexp(1.0, -(k + 1));
        if (y <= 0.0) break;
        SignedLog term =
            SignedLog::from_log(std::log(static_cast<double>(k + 1)) - k * Z + log_expm1(y));
        terms.push_back(term);
        running += term;
        if (y <= 0.5 && (term / running).to_double() < eps)
            return geo + SignedLog::sum(terms);
    }
    throw NumericError("F_index_weighted: series did not converge");
}

SecularTerms secular_terms(double P, const Params& p) {
    p.validate();
    if (!(P > 0.0)) throw std::invalid_argument("secular_terms: P must be > 0");
    const double b = p.beta, G = p.gamma_slope;
    SecularTerms t;
    t.u = SignedLog::from_log(-P - b) * F(P, b).value;
    t.v = SignedLog::from_log(-P - G * b) * F(P, G * b).value;
    t.w = SignedLog::from_log(-P - p.alpha * b);
    const SignedLog one = SignedLog::one();
    t.mass_sum = t.w * (one + t.u) * (one + t.v) + t.u * t.v;
    t.denominator = one - t.u * t.v;
    return t;
}

namespace {

// Sign of mass_sum - 1 straight from the log magnitude; exact near the root.
int secular_sign(double P, const Params& p) {
    SecularTerms t = secular_terms(P, p);
    const double lm = t.mass_sum.log_mag();
    return (lm > 0.0) ? +1 : (lm < 0.0 ? -1 : 0);
}

}  // namespace

double solve_pressure(const Params& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("solve_pressure: tol must be > 0");

    double hi = kLn3;
    {
        SecularTerms at_hi = secular_terms(hi, p);
        const double lm = at_hi.mass_sum.log_mag();
        // beta = 0 has its root exactly at ln 3; accept the endpoint when the
        // mass identity already holds there to roundoff.
        if (std::abs(lm) <= 1e-13) return hi;
        if (lm > 0.0)
            throw NumericError("solve_pressure: no sign change in bracket (mass > 1 at ln 3)");
    }

    const double floor = std::exp(-(2.0 + p.gamma_slope) * p.beta);
    double lo = hi / 4.0;
    for (int step = 0;; ++step) {
        if (secular_sign(lo, p) > 0) break;
        if (lo <= floor || step > 400)
            throw NumericError("solve_pressure: could not bracket the root above e^{-(2+G)beta}");
        lo = std::max(lo / 256.0, floor);
    }

    // Geometric bisection while the bracket spans orders of magnitude.
    for (int it = 0; it < 4000; ++it) {
        if (hi - lo <= tol * lo) break;
        const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (secular_sign(mid, p) > 0)
            lo = mid;
        else
            hi = mid;
    }
    const double P = 0.5 * (lo + hi);

    // The displayed secular form has 1 - uv in a denominator; at the root it
    // equals e^{-P-alpha beta} (1+u)(1+v) > 0. The computed log(uv) moves by
    // ~2 tol under the bracket width, so reject only a resolvable violation.
    SecularTerms t = secular_terms(P, p);
    if ((t.u * t.v).log_mag() > std::max(1e-6, 1e3 * tol))
        throw NumericError("solve_pressure: nonpositive denominator 1 - uv at the root");
    return P;
}

SignedLog nu_ratio_cyl(double P, const Params& p) {
    SecularTerms t = secular_terms(P, p);
    const double b = p.beta, G = p.gamma_slope;
    const SignedLog one = SignedLog::one();
    return SignedLog::from_log((G - 1.0) * b) * F(P, b).value * (one + t.v) /
           (F(P, G * b).value * (one + t.u));
}

SignedLog nu_ratio_star(double P, const Params& p) {
    SecularTerms t = secular_terms(P, p);
    const SignedLog one = SignedLog::one();
    return SignedLog::from_log((p.gamma_slope - 1.0) * p.beta / 2.0) * (one + t.v) / (one + t.u);
}

SignedLog nu_ring_ratio(int n, double P, const Params& p) {
    if (n < 1) throw std::invalid_argument("nu_ring_ratio: n must be >= 1");
    const double expo =
        (p.gamma_slope - 1.0) * p.beta * (0.5 - std::ldexp(1.0, -n));
    return SignedLog::from_log(expo) * nu_ratio_star(P, p);
}

NuMasses nu_masses(double P, const Params& p) {
    SecularTerms t = secular_terms(P, p);
    const SignedLog one = SignedLog::one();
    // 1/(1-uv) = e^{P+alpha beta}/M at the root, M = 1+u+v+uv; the right-hand
    // side is a sum of positive terms and stays accurate at every beta.
    const SignedLog M = one + t.u + t.v + t.u * t.v;
    NuMasses m;
    m.nu2 = t.w;
    m.nu0 = t.u * (one + t.v) / M;
    m.nu1 = t.v * (one + t.u) / M;
    m.nu0_star = SignedLog::from_log(-P - p.beta / 2.0) * (one + t.v) / M;
    m.nu1_star = SignedLog::from_log(-P - p.gamma_slope * p.beta / 2.0) * (one + t.u) / M;
    return m;
}

SignedLog nu_zero_run(int n, double P, const Params& p) {
    if (n < 1) throw std::invalid_argument("nu_zero_run: n must be >= 1");
    NuMasses m = nu_masses(P, p);
    const double expo = -(n - 1) * P - p.beta * (0.5 - std::ldexp(1.0, -n));
    return SignedLog::from_log(expo) * m.nu0_star;
}

SignedLog nu_one_run(int n, double P, const Params& p) {
    if (n < 1) throw std::invalid_argument("nu_one_run: n must be >= 1");
    NuMasses m = nu_masses(P, p);
    const double expo = -(n - 1) * P - p.gamma_slope * p.beta * (0.5 - std::ldexp(1.0, -n));
    return SignedLog::from_log(expo) * m.nu1_star;
}

SignedLog nu_run_tail_sum(int a, int from_depth, double P, const Params& p) {
    if (a != 0 && a != 1) throw std::invalid_argument("nu_run_tail_sum: a must be 0 or 1");
    if (from_depth < 1) throw std::invalid_argument("nu_run_tail_sum: from_depth must be >= 1");
    // sum_{m>=L} nu[a^m *_a] = nu[a *_a] e^{-slope beta/2} R_{L-1}(slope beta)
    NuMasses m = nu_masses(P, p);
    const double slope = (a == 0) ? 1.0 : p.gamma_slope;
    const SignedLog star = (a == 0) ? m.nu0_star : m.nu1_star;
    return star * SignedLog::from_log(-slope * p.beta / 2.0) *
           F_tail(from_depth - 1, P, slope * p.beta);
}

FixedPointRatio fixed_point_ratio(double P, const Params& p) {
    p.validate();
    if (!(P > 0.0)) throw std::invalid_argument("fixed_point_ratio: P must be > 0");
    const double b = p.beta, G = p.gamma_slope, a = p.alpha;
    const SignedLog one = SignedLog::one();
    const SignedLog q = SignedLog::from_log(-P - a * b);
    const SignedLog eP = SignedLog::from_log(P);
    // x solves x (e^P x + c) = e^{(3-G) b} (e^P + b x) with
    //   b = -[F(P,b)(1+q) e^{-2b} + e^{-(1+a)b}],
    //   c = -[F(P,Gb)(1+q) e^{-(G-1)b} + e^{(1-a)b}]
    // (at the reference slope G = 3 the scale factor is 1), i.e.
    //   e^P x^2 - B x - A = 0,  A = e^{(3-G)b} e^P,  B = e^{(3-G)b} b - c.
    // Assembling B from the positive difference series keeps it exact:
    //   B = (1+q) e^{-(G-1)b} (F(P,Gb)-F(P,b)) + e^{(1-a)b} - e^{(2-G-a)b}.
    const SignedLog B = F_diff(P, b, G * b) * (one + q) * SignedLog::from_log(-(G - 1.0) * b) +
                        (SignedLog::from_log((1.0 - a) * b) -
                         SignedLog::from_log((2.0 - G - a) * b));
    const SignedLog A = SignedLog::from_log((3.0 - G) * b + P);
    const SignedLog disc = SignedLog::sqrt(B * B + SignedLog::from_double(4.0) * A * eP);
    SignedLog x;
    if (!(B < SignedLog::zero())) {
        x = (B + disc) / (SignedLog::from_double(2.0) * eP);
    } else {
        // rationalized positive root: 2A / (sqrt(B^2+4 A e^P) + |B|)
        x = SignedLog::from_double(2.0) * A / (disc + B.abs());
    }
    FixedPointRatio out;
    out.x = x;
    SignedLog lhs = eP * x * x;
    SignedLog rhs = B * x + A;
    out.quadratic_residual = ((lhs - rhs).abs() / (lhs + B.abs() * x + A)).to_double();
    return out;
}

SignedLog fixed_point_ratio_secular(double P, const Params& p) {
    p.validate();
    const SignedLog one = SignedLog::one();
    const SignedLog q = SignedLog::from_log(-P - p.alpha * p.beta);
    SignedLog denom = F(P, p.beta).value * (one + q) * SignedLog::from_log(-2.0 * p.beta) +
                      SignedLog::from_log(-(1.0 + p.alpha) * p.beta);
    return SignedLog::from_log(P) / denom;
}

namespace {

// C = (e^P-1)/(e^P+e^{-alpha beta})
SignedLog eigen_prefactor(double P, const Params& p) {
    return SignedLog::from_log(log_expm1(P)) /
           (SignedLog::from_log(P) + SignedLog::from_log(-p.alpha * p.beta));
}

}  // namespace

HPair h_star_values(double P, const Params& p, const SignedLog& x) {
    return h_ring_values(1, P, p, x);
}

HPair h_ring_values(int n, double P, const Params& p, const SignedLog& x) {
    p.validate();
    if (n < 1) throw std::invalid_argument("h_ring_values: n must be >= 1");
    if (!(x > SignedLog::zero())) throw std::invalid_argument("h_ring_values: x must be > 0");
    const double b = p.beta, G = p.gamma_slope;
    const SignedLog C = eigen_prefactor(P, p);
    const SignedLog one_q = SignedLog::one() + SignedLog::from_log(-P - p.alpha * b);
    // sanity: the 0-side displayed bracket e^P H(1^inf) - e^{-alpha b} H(0^inf)
    // must be positive (H0 = x e^{-b}, H1 = 1)
    SignedLog bracket0 =
        SignedLog::from_log(P) - SignedLog::from_log(-p.alpha * b - b) * x;
    if (!(bracket0 > SignedLog::zero()))
        throw NumericError("h_ring_values: nonpositive bracket; P inconsistent with x");
    HPair out;
    out.h0 = SignedLog::from_log((n - 1) * P - b * std::ldexp(1.0, -n) - b) * C * one_q * x *
             F_tail(n - 1, P, b);
    out.h1 = SignedLog::from_log((n - 1) * P - G * b * std::ldexp(1.0, -n)) * C * one_q *
             F_tail(n - 1, P, G * b);
    return out;
}

HPair h_ring_values_direct(int n, double P, const Params& p, const SignedLog& x) {
    p.validate();
    if (n < 1) throw std::invalid_argument("h_ring_values_direct: n must be >= 1");
    const double b = p.beta, G = p.gamma_slope, a = p.alpha;
    const SignedLog C = eigen_prefactor(P, p);
    const SignedLog one_q = SignedLog::one() + SignedLog::from_log(-P - a * b);
    const SignedLog h0_inf = x * SignedLog::from_log(-b);
    const SignedLog h1_inf = SignedLog::one();
    SignedLog br0 = SignedLog::from_log(P + b) * h1_inf -
                    (F_partial(n - 2, P, b) * one_q + SignedLog::from_log((1.0 - a) * b)) * h0_inf;
    SignedLog br1 = SignedLog::from_log(P + G * b) * h0_inf -
                    (F_partial(n - 2, P, G * b) * one_q + SignedLog::from_log((G - a) * b)) * h1_inf;
    HPair out;
    out.h0 = SignedLog::from_log((n - 1) * P - b * std::ldexp(1.0, -n)) * C * br0;
    out.h1 = SignedLog::from_log((n - 1) * P - G * b * std::ldexp(1.0, -n)) * C * br1;
    return out;
}

SignedLog h_two_value(double P, const Params& p, const SignedLog& x) {
    const SignedLog h0_inf = x * SignedLog::from_log(-p.beta);
    return eigen_prefactor(P, p) * (h0_inf + SignedLog::one());
}

AsymptoticTargets limit_targets(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("limit_targets: alpha must be > 0");
    AsymptoticTargets t;
    t.alpha = alpha;
    const double rho = golden_rho;
    if (alpha > 1.0) {
        t.mu_ratio = {LimitKind::Finite, 1.0, 0.0};
        t.x_ratio = {LimitKind::Finite, 1.0, 0.0};
        t.nu_star_ratio = {LimitKind::Finite, 1.0, 0.0};
        t.p_e2beta = {LimitKind::Finite, 1.0, 0.0};
        t.gamma_exponent = -2.0;
    } else if (alpha == 1.0) {
        t.mu_ratio = {LimitKind::Finite, rho * rho, 0.0};
        t.x_ratio = {LimitKind::Finite, rho, 0.0};
        t.nu_star_ratio = {LimitKind::Finite, rho, 0.0};
        t.p_e2beta = {LimitKind::Finite, rho, 0.0};
        t.gamma_exponent = -2.0;
    } else {
        t.mu_ratio = {LimitKind::Infinite, 0.0, 2.0 - 2.0 * alpha};
        t.x_ratio = {LimitKind::Infinite, 0.0, 1.0 - alpha};
        t.nu_star_ratio = {LimitKind::Infinite, 0.0, 1.0 - alpha};
        t.p_e2beta = {LimitKind::NotApplicable, 0.0, 0.0};
        t.gamma_exponent = -(1.0 + alpha);
    }
    return t;
}

}  // namespace ztselect::closedform
