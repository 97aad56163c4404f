#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ztselect/params.hpp"

namespace ztselect::ringspace {

enum class Symbol : uint8_t { S0 = 0, S1 = 1, S2 = 2 };

/// Finite word over {0,1,2}. Length is capped at 64: distances below 2^-64
/// are irrelevant at double precision.
class Word {
public:
    static constexpr std::size_t max_length = 64;

    Word() = default;
    explicit Word(std::vector<Symbol> syms);
    /// Parse from digits, e.g. "0012".
    static Word parse(std::string_view digits);

    std::size_t size() const noexcept { return syms_.size(); }
    bool empty() const noexcept { return syms_.empty(); }
    Symbol operator[](std::size_t i) const { return syms_[i]; }
    const std::vector<Symbol>& symbols() const noexcept { return syms_; }

    /// Word with the first symbol dropped.
    Word shifted() const;
    /// Word with symbol a prepended.
    Word prepended(Symbol a) const;

    std::string str() const;

private:
    std::vector<Symbol> syms_;
};

/// Element of the ring partition plus the two fixed points and the two tail
/// aggregates. ZeroRun(n) is the cylinder of points starting with exactly n
/// zeros, OneRun(n) symmetric, TwoHead is [2]; Tail0(N)/Tail1(N) collect all
/// runs deeper than N (minus the fixed point).
enum class RingKind : uint8_t { Fix0, ZeroRun, TwoHead, OneRun, Fix1, Tail0, Tail1 };

struct Ring {
    RingKind kind = RingKind::TwoHead;
    int run = 0;  // run length for ZeroRun/OneRun, truncation depth for tails

    static Ring fix0() { return {RingKind::Fix0, 0}; }
    static Ring fix1() { return {RingKind::Fix1, 0}; }
    static Ring two_head() { return {RingKind::TwoHead, 0}; }
    static Ring zero_run(int n);
    static Ring one_run(int n);
    static Ring tail0(int depth);
    static Ring tail1(int depth);

    bool is_tail() const noexcept { return kind == RingKind::Tail0 || kind == RingKind::Tail1; }
    bool is_fixed_point() const noexcept { return kind == RingKind::Fix0 || kind == RingKind::Fix1; }

    friend bool operator==(const Ring&, const Ring&) = default;
    std::string str() const;
};

/// Result of classifying a finite word. Constant words are prefixes of both
/// [a^L *_a] and every deeper ring; they are reported as the depth-L run with
/// `unresolved` set instead of erroring, so classification stays total.
struct RingClass {
    Ring ring;
    bool unresolved = false;
};

/// Classify a nonempty word into the ring partition.
RingClass ring_of(const Word& w);

struct Distance {
    double value = 0.0;
    /// Set when the words agree on the full compared range (value 0).
    bool prefix_equal = false;
};

/// d(x,y) = 2^{-min{n : x_n != y_n}}, compared up to the shorter length.
Distance dist(const Word& x, const Word& y);

/// d(w, s^inf) for s in {0,1,2}.
double dist_to_fixed(const Word& w, Symbol s);

/// Potential value on a non-tail ring:
///   ZeroRun(n) -> -1/2^n, OneRun(n) -> -gamma_slope/2^n,
///   TwoHead -> -alpha, fixed points -> 0.
double potential(const Ring& r, const Params& p);

struct PreimageBranch {
    Ring ring;
    double potential_value;
};

/// The three shift preimages of a ring (prepend 0, 1, 2 in that order), each
/// with the ring it lands in and the potential value there.
std::array<PreimageBranch, 3> preimage_rings(const Ring& r, const Params& p);

}  // namespace ztselect::ringspace
