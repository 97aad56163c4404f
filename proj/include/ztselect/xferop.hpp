#pragma once

#include <array>
#include <vector>

#include "ztselect/params.hpp"
#include "ztselect/ringspace.hpp"
#include "ztselect/signed_log.hpp"

namespace ztselect::xferop {

/// Values indexed by the truncated ring basis. Layout (size 2N+5):
///   [Fix0, ZeroRun(1..N), Tail0, Fix1, OneRun(1..N), Tail1, TwoHead]
class RingVector {
public:
    static constexpr int min_depth = 3;

    explicit RingVector(int depth);

    int depth() const noexcept { return depth_; }
    int size() const noexcept { return static_cast<int>(v_.size()); }

    SignedLog& operator[](int i) { return v_[i]; }
    const SignedLog& operator[](int i) const { return v_[i]; }

    int index_fix0() const noexcept { return 0; }
    int index_zero_run(int n) const;  // 1 <= n <= depth
    int index_tail0() const noexcept { return depth_ + 1; }
    int index_fix1() const noexcept { return depth_ + 2; }
    int index_one_run(int n) const;
    int index_tail1() const noexcept { return 2 * depth_ + 3; }
    int index_two_head() const noexcept { return 2 * depth_ + 4; }

    SignedLog& fix0() { return v_[index_fix0()]; }
    SignedLog& zero_run(int n) { return v_[index_zero_run(n)]; }
    SignedLog& tail0() { return v_[index_tail0()]; }
    SignedLog& fix1() { return v_[index_fix1()]; }
    SignedLog& one_run(int n) { return v_[index_one_run(n)]; }
    SignedLog& tail1() { return v_[index_tail1()]; }
    SignedLog& two_head() { return v_[index_two_head()]; }
    const SignedLog& fix0() const { return v_[index_fix0()]; }
    const SignedLog& zero_run(int n) const { return v_[index_zero_run(n)]; }
    const SignedLog& tail0() const { return v_[index_tail0()]; }
    const SignedLog& fix1() const { return v_[index_fix1()]; }
    const SignedLog& one_run(int n) const { return v_[index_one_run(n)]; }
    const SignedLog& tail1() const { return v_[index_tail1()]; }
    const SignedLog& two_head() const { return v_[index_two_head()]; }

    /// Ring state the given flat index represents.
    ringspace::Ring ring_at(int i) const;
    /// Flat index of a ring; runs deeper than depth map to the tails.
    int index_of(const ringspace::Ring& r) const;

    bool all_positive() const noexcept;

private:
    int depth_;
    std::vector<SignedLog> v_;
};

/// One matrix row: the three preimage branches of a state, weight = e^{beta A}.
struct Branch {
    int target = 0;
    SignedLog weight;
};

/// Finite section of the transfer operator on the ring basis. Rows follow
/// ringspace::preimage_rings; the deep branch of ZeroRun(N) lands in Tail0
/// with weight e^{-beta/2^{N+1}}, and the Tail0 row loops on itself with the
/// midpoint weight e^{-beta/2^{N+2}} (symmetric on the 1 side with slope G).
class TruncatedOperator {
public:
    TruncatedOperator(const Params& p, int depth);

    const Params& params() const noexcept { return params_; }
    int depth() const noexcept { return depth_; }
    int size() const noexcept { return static_cast<int>(rows_.size()); }
    const std::array<Branch, 3>& row(int state) const { return rows_[state]; }

    /// Sum of the row's branch weights times v at the branch targets.
    SignedLog row_apply(int state, const RingVector& v) const;

    /// Weight of the self-loop of a state; zero when the row has none.
    SignedLog diagonal_weight(int state) const;

    /// Template vector with the right layout.
    RingVector make_vector() const { return RingVector(depth_); }

private:
    Params params_;
    int depth_;
    std::vector<std::array<Branch, 3>> rows_;
};

TruncatedOperator build_operator(const Params& p, int depth);

/// N = max(48, ceil(log2(G beta)) + 40); keeps truncation_bound at ~1e-10.
int default_depth(const Params& p);

/// expm1(G beta / 2^{N+1}): bound on the relative row-weight error from
/// collapsing rings deeper than N.
double truncation_bound(const Params& p, int depth);

struct PowerResult {
    double P = 0.0;
    RingVector H;
    int iterations = 0;
    double enclosure_width = 0.0;  // certified relative width on P
};

inline constexpr double default_small_beta_cap = 4.0;

/// Leading eigenpair by power iteration with Collatz-Wielandt bounds,
/// restricted to the block without the two fixed-point states (their columns
/// carry exact eigenvalue-1 copies); the fixed-point entries are recovered
/// from their own row equations. Gated to beta <= small_beta_cap: the gap
/// above the tail self-loops collapses like e^{-2 beta}.
PowerResult leading_pair_power(const TruncatedOperator& op, double tol = 1e-11,
                               int max_iter = 5'000'000,
                               double small_beta_cap = default_small_beta_cap);

/// Eigenfunction for a given P by back-substitution along the ring chains,
/// normalized to H(Fix1) = 1.
RingVector eigenfunction_given_P(const TruncatedOperator& op, double P);

/// Eigenmeasure for a given P from the conformal recursions with geometric
/// tail closure, total mass 1; atomless at the fixed points.
RingVector eigenmeasure_given_P(const TruncatedOperator& op, double P);

enum class Side { Right, Left };

/// max over states of |(row or column apply v) - e^P v| / |e^P v|. Diagonal
/// terms are folded into the left side via e^P - e^{-c} = e^{-c} expm1(P+c)
/// so the reported number is meaningful when e^P is within roundoff of 1.
double residual(const TruncatedOperator& op, double P, const RingVector& v, Side side);

struct EigenTriple {
    double P = 0.0;
    RingVector H;
    RingVector nu;
    double residual_H = 0.0;
    double residual_nu = 0.0;
};

/// Power-iteration path: P from leading_pair_power, vectors from the
/// given-P solvers, residuals attached. Small-beta oracle only.
EigenTriple solve_eigen_power(const TruncatedOperator& op, double tol = 1e-11);

}  // namespace ztselect::xferop
