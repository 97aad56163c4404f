#include "ztselect/xferop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ztselect::xferop {

using ringspace::Ring;
using ringspace::RingKind;

RingVector::RingVector(int depth) : depth_(depth) {
    if (depth < min_depth) throw std::invalid_argument("RingVector: depth must be >= 3");
    v_.assign(2 * depth + 5, SignedLog::zero());
}

int RingVector::index_zero_run(int n) const {
    if (n < 1 || n > depth_) throw std::out_of_range("RingVector: zero_run index");
    return n;
}

int RingVector::index_one_run(int n) const {
    if (n < 1 || n > depth_) throw std::out_of_range("RingVector: one_run index");
    return depth_ + 2 + n;
}

Ring RingVector::ring_at(int i) const {
    if (i == index_fix0()) return Ring::fix0();
    if (i >= 1 && i <= depth_) return Ring::zero_run(i);
    if (i == index_tail0()) return Ring::tail0(depth_);
    if (i == index_fix1()) return Ring::fix1();
    if (i > depth_ + 2 && i <= 2 * depth_ + 2) return Ring::one_run(i - depth_ - 2);
    if (i == index_tail1()) return Ring::tail1(depth_);
    if (i == index_two_head()) return Ring::two_head();
    throw std::out_of_range("RingVector: state index");
}

int RingVector::index_of(const Ring& r) const {
    switch (r.kind) {
        case RingKind::Fix0: return index_fix0();
        case RingKind::Fix1: return index_fix1();
        case RingKind::TwoHead: return index_two_head();
        case RingKind::Tail0: return index_tail0();
        case RingKind::Tail1: return index_tail1();
        case RingKind::ZeroRun: return r.run <= depth_ ? index_zero_run(r.run) : index_tail0();
        case RingKind::OneRun: return r.run <= depth_ ? index_one_run(r.run) : index_tail1();
    }
    throw std::logic_error("RingVector::index_of: unreachable");
}

bool RingVector::all_positive() const noexcept {
    return std::all_of(v_.begin(), v_.end(), [](const SignedLog& x) { return x.is_positive(); });
}

TruncatedOperator::TruncatedOperator(const Params& p, int depth) : params_(p), depth_(depth) {
    p.validate();
    if (depth < RingVector::min_depth)
        throw std::invalid_argument("TruncatedOperator: depth must be >= 3");
    RingVector layout(depth);
    rows_.resize(layout.size());

    const double beta = p.beta;
    auto weight = [beta](double potential_value) {
        return SignedLog::from_log(beta * potential_value);
    };

    for (int s = 0; s < layout.size(); ++s) {
        const Ring r = layout.ring_at(s);
        if (!r.is_tail()) {
            auto branches = ringspace::preimage_rings(r, p);
            for (int j = 0; j < 3; ++j)
                rows_[s][j] = Branch{layout.index_of(branches[j].ring),
                                     weight(branches[j].potential_value)};
            continue;
        }
        // Tail rows: self-loop with the midpoint weight, the two exits as on
        // any deep ring of the same side.
        const Params& q = params_;
        const double half_deep = std::ldexp(1.0, -(depth + 2));
        const Ring z1 = Ring::zero_run(1);
        const Ring o1 = Ring::one_run(1);
        const Ring two = Ring::two_head();
        if (r.kind == RingKind::Tail0) {
            rows_[s][0] = Branch{s, weight(-half_deep)};
            rows_[s][1] = Branch{layout.index_of(o1), weight(ringspace::potential(o1, q))};
            rows_[s][2] = Branch{layout.index_of(two), weight(ringspace::potential(two, q))};
        } else {
            rows_[s][0] = Branch{layout.index_of(z1), weight(ringspace::potential(z1, q))};
            rows_[s][1] = Branch{s, weight(-q.gamma_slope * half_deep)};
            rows_[s][2] = Branch{layout.index_of(two), weight(ringspace::potential(two, q))};
        }
    }
}

SignedLog TruncatedOperator::row_apply(int state, const RingVector& v) const {
    const auto& r = rows_[state];
    return r[0].weight * v[r[0].target] + r[1].weight * v[r[1].target] +
           r[2].weight * v[r[2].target];
}

SignedLog TruncatedOperator::diagonal_weight(int state) const {
    for (const Branch& b : rows_[state])
        if (b.target == state) return b.weight;
    return SignedLog::zero();
}

TruncatedOperator build_operator(const Params& p, int depth) {
    return TruncatedOperator(p, depth);
}

int default_depth(const Params& p) {
    p.validate();
    const double gb = p.gamma_slope * p.beta;
    int n = 48;
    if (gb > 1.0) n = std::max(48, static_cast<int>(std::ceil(std::log2(gb))) + 40);
    return n;
}

double truncation_bound(const Params& p, int depth) {
    p.validate();
    if (depth < RingVector::min_depth)
        throw std::invalid_argument("truncation_bound: depth must be >= 3");
    return std::expm1(p.gamma_slope * p.beta * std::ldexp(1.0, -(depth + 1)));
}

namespace {

// e^P - e^{-c}, c >= 0, as SignedLog; stable when both sides are near 1.
SignedLog exp_gap(double P, double c) {
    return SignedLog::from_log(-c + log_expm1(P + c));
}

}  // namespace

PowerResult leading_pair_power(const TruncatedOperator& op, double tol, int max_iter,
                               double small_beta_cap) {
    const Params& p = op.params();
    if (p.beta > small_beta_cap)
        throw NumericError(
            "leading_pair_power: beta above the small-beta cap; the spectral gap collapses "
            "like e^{-2 beta}, use the secular-equation solver instead");
    if (!(tol > 0.0)) throw std::invalid_argument("leading_pair_power: tol must be > 0");

    RingVector layout = op.make_vector();
    const int n = layout.size();
    const int fix0 = layout.index_fix0();
    const int fix1 = layout.index_fix1();

    // The fixed-point columns hold exact eigenvalue-1 copies that no other
    // row references; iterate on the complementary block where the operator
    // is irreducible and the Collatz-Wielandt ratios converge.
    std::vector<int> active;
    active.reserve(n - 2);
    for (int i = 0; i < n; ++i)
        if (i != fix0 && i != fix1) active.push_back(i);

    std::vector<double> w0(n), w1(n), w2(n);
    std::vector<int> t0(n), t1(n), t2(n);
    for (int i : active) {
        const auto& row = op.row(i);
        w0[i] = row[0].weight.to_double();
        t0[i] = row[0].target;
        w1[i] = row[1].weight.to_double();
        t1[i] = row[1].target;
        w2[i] = row[2].weight.to_double();
        t2[i] = row[2].target;
    }

    std::vector<double> v(n, 0.0), nv(n, 0.0);
    for (int i : active) v[i] = 1.0;

    double lambda_lo = 0.0, lambda_hi = 0.0, lambda_mid = 0.0;
    double prev_log_lambda = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double vmax = 0.0;
        for (int i : active) {
            const double r = w0[i] * v[t0[i]] + w1[i] * v[t1[i]] + w2[i] * v[t2[i]];
            nv[i] = r;
            const double ratio = r / v[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            vmax = std::max(vmax, r);
        }
        for (int i : active) v[i] = nv[i] / vmax;
        lambda_lo = lo;
        lambda_hi = hi;
        lambda_mid = 0.5 * (lo + hi);
        const double log_lambda = std::log(lambda_mid);
        const double p_hat = std::max(log_lambda, 1e-300);
        const double width = (hi - lo) / lambda_mid;
        if (it > 0 && width <= tol * p_hat &&
            std::abs(log_lambda - prev_log_lambda) <= tol * p_hat)
            break;
        prev_log_lambda = log_lambda;
    }
    if (it >= max_iter)
        throw NumericError("leading_pair_power: no convergence in " + std::to_string(max_iter) +
                           " iterations (gap too small); use solve_pressure");

    PowerResult out{std::log(lambda_mid), op.make_vector(), it + 1,
                    (lambda_hi - lambda_lo) / lambda_mid};

    // Recover the fixed-point entries from their own rows:
    // (e^P - 1) H(fix) = off-diagonal part of the row.
    const SignedLog expm1P = SignedLog::from_log(log_expm1(out.P));
    RingVector& H = out.H;
    for (int i : active) H[i] = SignedLog::from_double(v[i]);
    for (int fix : {fix0, fix1}) {
        SignedLog acc = SignedLog::zero();
        for (const Branch& b : op.row(fix))
            if (b.target != fix) acc += b.weight * H[b.target];
        H[fix] = acc / expm1P;
    }
    const SignedLog norm = H[fix1];
    for (int i = 0; i < n; ++i) H[i] = H[i] / norm;
    return out;
}

RingVector eigenfunction_given_P(const TruncatedOperator& op, double P) {
    if (!(P > 0.0 && P <= 1.0986122886681100))
        throw std::invalid_argument("eigenfunction_given_P: P must lie in (0, ln 3]");
    const Params& p = op.params();
    const int N = op.depth();
    const double beta = p.beta, G = p.gamma_slope;

    // Chains solved from the tails inward (contracting direction). Zero-side
    // values are proportional to H(0^inf) =: h0; one-side values are plain
    // numbers under H(1^inf) = 1.
    const SignedLog expm1P = SignedLog::from_log(log_expm1(P));
    const SignedLog inv_eP = SignedLog::from_log(-P);

    std::vector<SignedLog> zeta(N + 2);  // zeta[n] = H(ZeroRun(n))/h0, zeta[N+1] = tail
    zeta[N + 1] = expm1P / exp_gap(P, beta * std::ldexp(1.0, -(N + 2)));
    for (int n = N; n >= 1; --n) {
        const SignedLog deep = SignedLog::from_log(-beta * std::ldexp(1.0, -(n + 1)));
        zeta[n] = inv_eP * (deep * zeta[n + 1] + expm1P);
    }
    std::vector<SignedLog> omega(N + 2);  // omega[n] = H(OneRun(n)), omega[N+1] = tail
    omega[N + 1] = expm1P / exp_gap(P, G * beta * std::ldexp(1.0, -(N + 2)));
    for (int n = N; n >= 1; --n) {
        const SignedLog deep = SignedLog::from_log(-G * beta * std::ldexp(1.0, -(n + 1)));
        omega[n] = inv_eP * (deep * omega[n + 1] + expm1P);
    }

    // Fixed-point rows (all additions):
    //   h0 [expm1(P) + e^{-b/2} zeta_1] = expm1(P) + e^{-Gb/2} omega_1
    const SignedLog half0 = SignedLog::from_log(-beta / 2.0);
    const SignedLog half1 = SignedLog::from_log(-G * beta / 2.0);
    const SignedLog h0 = (expm1P + half1 * omega[1]) / (expm1P + half0 * zeta[1]);
    // Sum of the three core rows: (e^P + e^{-ab}) H2 = expm1(P)(1 + h0).
    const SignedLog h_two = expm1P * (SignedLog::one() + h0) /
                            (SignedLog::from_log(P) + SignedLog::from_log(-p.alpha * beta));

    RingVector H = op.make_vector();
    H.fix1() = SignedLog::one();
    H.fix0() = h0;
    H.two_head() = h_two;
    H.tail0() = zeta[N + 1] * h0;
    H.tail1() = omega[N + 1];
    for (int n = 1; n <= N; ++n) {
        H.zero_run(n) = zeta[n] * h0;
        H.one_run(n) = omega[n];
    }

    // The elimination used two independent combinations of the three core
    // rows; the leftover one (the TwoHead row) must close if P is an
    // eigenvalue of the truncated system.
    {
        const SignedLog lhs = exp_gap(P, p.alpha * beta) * h_two;
        const SignedLog rhs = half0 * H.zero_run(1) + half1 * H.one_run(1);
        const double mismatch = rel_diff(lhs, rhs);
        if (!(mismatch < 0.05))
            throw NumericError("eigenfunction_given_P: P is not an eigenvalue (row residual " +
                               std::to_string(mismatch) + ")");
    }
    return H;
}

RingVector eigenmeasure_given_P(const TruncatedOperator& op, double P) {
    if (!(P > 0.0 && P <= 1.0986122886681100))
        throw std::invalid_argument("eigenmeasure_given_P: P must lie in (0, ln 3]");
    const Params& p = op.params();
    const int N = op.depth();
    const double beta = p.beta, G = p.gamma_slope;

    // Conformal chain factors: nu(Run(n)) = chain[n] * nu(Run(1)), tail
    // closure nu(Tail) = chain-tail * nu(Run(1)). K = sum of all factors.
    auto side_factors = [&](double slope) {
        std::vector<SignedLog> chain(N + 2);
        chain[1] = SignedLog::one();
        for (int n = 2; n <= N; ++n)
            chain[n] = chain[n - 1] *
                       SignedLog::from_log(-P - slope * beta * std::ldexp(1.0, -n));
        const SignedLog deep =
            SignedLog::from_log(-P - slope * beta * std::ldexp(1.0, -(N + 1)));
        const SignedLog self =
            SignedLog::from_log(-P - slope * beta * std::ldexp(1.0, -(N + 2)));
        const SignedLog closure_denom = SignedLog::one() - self;
        if (!(closure_denom > SignedLog::zero()))
            throw NumericError("eigenmeasure_given_P: tail closure divergence");
        chain[N + 1] = chain[N] * deep / closure_denom;
        return chain;
    };
    const auto chain0 = side_factors(1.0);
    const auto chain1 = side_factors(G);
    SignedLog K0 = SignedLog::sum(std::span<const SignedLog>(chain0).subspan(1));
    SignedLog K1 = SignedLog::sum(std::span<const SignedLog>(chain1).subspan(1));

    // m0 = g0 (m1 + m2), m1 = g1 (m0 + m2); take m2 = 1 and normalize after.
    const SignedLog g0 = K0 * SignedLog::from_log(-P - beta / 2.0);
    const SignedLog g1 = K1 * SignedLog::from_log(-P - G * beta / 2.0);
    const SignedLog one = SignedLog::one();
    const SignedLog denom = one - g0 * g1;
    if (!(denom > SignedLog::zero()))
        throw NumericError("eigenmeasure_given_P: singular mass system (1 - g0 g1 <= 0)");
    const SignedLog m0 = g0 * (one + g1) / denom;
    const SignedLog m1 = g1 * (one + m0);
    const SignedLog total = m0 + m1 + one;

    const SignedLog nu_z1 = SignedLog::from_log(-P - beta / 2.0) * (m1 + one) / total;
    const SignedLog nu_o1 = SignedLog::from_log(-P - G * beta / 2.0) * (m0 + one) / total;

    RingVector nu = op.make_vector();
    nu.fix0() = SignedLog::zero();
    nu.fix1() = SignedLog::zero();
    nu.two_head() = one / total;
    for (int n = 1; n <= N; ++n) {
        nu.zero_run(n) = chain0[n] * nu_z1;
        nu.one_run(n) = chain1[n] * nu_o1;
    }
    nu.tail0() = chain0[N + 1] * nu_z1;
    nu.tail1() = chain1[N + 1] * nu_o1;
    return nu;
}

double residual(const TruncatedOperator& op, double P, const RingVector& v, Side side) {
    if (v.depth() != op.depth()) throw std::invalid_argument("residual: depth mismatch");
    const int n = v.size();
    const SignedLog eP = SignedLog::from_log(P);
    double worst = 0.0;

    if (side == Side::Right) {
        for (int s = 0; s < n; ++s) {
            SignedLog off = SignedLog::zero();
            SignedLog diag = SignedLog::zero();
            for (const Branch& b : op.row(s)) {
                if (b.target == s)
                    diag = b.weight;
                else
                    off += b.weight * v[b.target];
            }
            SignedLog lhs = diag.is_zero()
                                ? eP * v[s]
                                : exp_gap(P, -diag.log_mag()) * v[s];
            if (v[s].is_zero()) {
                worst = std::max(worst, (off / eP).to_double());
                continue;
            }
            worst = std::max(worst, ((lhs - off).abs() / (eP * v[s]).abs()).to_double());
        }
        return worst;
    }

    // Left side: column apply. Accumulate incoming mass per state.
    std::vector<SignedLog> incoming(n, SignedLog::zero());
    std::vector<SignedLog> diag(n, SignedLog::zero());
    for (int s = 0; s < n; ++s) {
        for (const Branch& b : op.row(s)) {
            if (b.target == s)
                diag[s] = b.weight;
            else
                incoming[b.target] += b.weight * v[s];
        }
    }
    for (int s = 0; s < n; ++s) {
        SignedLog lhs = diag[s].is_zero()
                            ? eP * v[s]
                            : exp_gap(P, -diag[s].log_mag()) * v[s];
        if (v[s].is_zero()) {
            worst = std::max(worst, (incoming[s] / eP).to_double());
            continue;
        }
        worst = std::max(worst, ((lhs - incoming[s]).abs() / (eP * v[s]).abs()).to_double());
    }
    return worst;
}

EigenTriple solve_eigen_power(const TruncatedOperator& op, double tol) {
    PowerResult pr = leading_pair_power(op, tol);
    EigenTriple out{pr.P, eigenfunction_given_P(op, pr.P), eigenmeasure_given_P(op, pr.P), 0.0,
                    0.0};
    out.residual_H = residual(op, pr.P, out.H, Side::Right);
    out.residual_nu = residual(op, pr.P, out.nu, Side::Left);
    return out;
}

}  // namespace ztselect::xferop
