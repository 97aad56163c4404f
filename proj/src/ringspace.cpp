#include "ztselect/ringspace.hpp"

#include <cmath>
#include <stdexcept>

namespace ztselect::ringspace {

Word::Word(std::vector<Symbol> syms) : syms_(std::move(syms)) {
    if (syms_.size() > max_length)
        throw std::invalid_argument("Word: length exceeds maximum of 64");
}

Word Word::parse(std::string_view digits) {
    std::vector<Symbol> s;
    s.reserve(digits.size());
    for (char c : digits) {
        switch (c) {
            case '0': s.push_back(Symbol::S0); break;
            case '1': s.push_back(Symbol::S1); break;
            case '2': s.push_back(Symbol::S2); break;
            default: throw std::invalid_argument("Word::parse: symbols must be 0, 1 or 2");
        }
    }
    return Word(std::move(s));
}

Word Word::shifted() const {
    if (empty()) throw std::invalid_argument("Word::shifted: empty word");
    return Word(std::vector<Symbol>(syms_.begin() + 1, syms_.end()));
}

Word Word::prepended(Symbol a) const {
    std::vector<Symbol> s;
    s.reserve(syms_.size() + 1);
    s.push_back(a);
    s.insert(s.end(), syms_.begin(), syms_.end());
    return Word(std::move(s));
}

std::string Word::str() const {
    std::string out;
    out.reserve(syms_.size());
    for (Symbol s : syms_) out.push_back(static_cast<char>('0' + static_cast<int>(s)));
    return out;
}

Ring Ring::zero_run(int n) {
    if (n < 1) throw std::invalid_argument("Ring::zero_run: run length must be >= 1");
    return {RingKind::ZeroRun, n};
}

Ring Ring::one_run(int n) {
    if (n < 1) throw std::invalid_argument("Ring::one_run: run length must be >= 1");
    return {RingKind::OneRun, n};
}

Ring Ring::tail0(int depth) {
    if (depth < 1) throw std::invalid_argument("Ring::tail0: depth must be >= 1");
    return {RingKind::Tail0, depth};
}

Ring Ring::tail1(int depth) {
    if (depth < 1) throw std::invalid_argument("Ring::tail1: depth must be >= 1");
    return {RingKind::Tail1, depth};
}

std::string Ring::str() const {
    switch (kind) {
        case RingKind::Fix0: return "0^inf";
        case RingKind::Fix1: return "1^inf";
        case RingKind::TwoHead: return "[2]";
        case RingKind::ZeroRun: return "[0^" + std::to_string(run) + "*]";
        case RingKind::OneRun: return "[1^" + std::to_string(run) + "*]";
        case RingKind::Tail0: return "tail0(" + std::to_string(run) + ")";
        case RingKind::Tail1: return "tail1(" + std::to_string(run) + ")";
    }
    return "?";
}

RingClass ring_of(const Word& w) {
    if (w.empty()) throw std::invalid_argument("ring_of: empty word");
    const Symbol head = w[0];
    if (head == Symbol::S2) return {Ring::two_head(), false};
    std::size_t run = 1;
    while (run < w.size() && w[run] == head) ++run;
    const bool unresolved = (run == w.size());
    Ring r = (head == Symbol::S0) ? Ring::zero_run(static_cast<int>(run))
                                  : Ring::one_run(static_cast<int>(run));
    return {r, unresolved};
}

Distance dist(const Word& x, const Word& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("dist: empty word");
    const std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] != y[i]) return {std::ldexp(1.0, -static_cast<int>(i)), false};
    return {0.0, true};
}

double dist_to_fixed(const Word& w, Symbol s) {
    if (w.empty()) throw std::invalid_argument("dist_to_fixed: empty word");
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != s) return std::ldexp(1.0, -static_cast<int>(i));
    return 0.0;  // agrees with s^inf on the whole word
}

double potential(const Ring& r, const Params& p) {
    p.validate();
    switch (r.kind) {
        case RingKind::Fix0:
        case RingKind::Fix1: return 0.0;
        case RingKind::TwoHead: return -p.alpha;
        case RingKind::ZeroRun: return -std::ldexp(1.0, -r.run);
        case RingKind::OneRun: return -p.gamma_slope * std::ldexp(1.0, -r.run);
        case RingKind::Tail0:
        case RingKind::Tail1:
            throw std::invalid_argument("potential: tail aggregates have no single value");
    }
    throw std::logic_error("potential: unreachable");
}

std::array<PreimageBranch, 3> preimage_rings(const Ring& r, const Params& p) {
    p.validate();
    if (r.is_tail())
        throw std::invalid_argument("preimage_rings: tail aggregates are owned by the operator");

    auto val = [&p](const Ring& q) { return potential(q, p); };
    const Ring z1 = Ring::zero_run(1);
    const Ring o1 = Ring::one_run(1);
    const Ring two = Ring::two_head();

    switch (r.kind) {
        case RingKind::Fix0:
            return {{{Ring::fix0(), 0.0}, {o1, val(o1)}, {two, val(two)}}};
        case RingKind::Fix1:
            return {{{z1, val(z1)}, {Ring::fix1(), 0.0}, {two, val(two)}}};
        case RingKind::TwoHead:
            return {{{z1, val(z1)}, {o1, val(o1)}, {two, val(two)}}};
        case RingKind::ZeroRun: {
            const Ring deep = Ring::zero_run(r.run + 1);
            return {{{deep, val(deep)}, {o1, val(o1)}, {two, val(two)}}};
        }
        case RingKind::OneRun: {
            const Ring deep = Ring::one_run(r.run + 1);
            return {{{z1, val(z1)}, {deep, val(deep)}, {two, val(two)}}};
        }
        default:
            throw std::logic_error("preimage_rings: unreachable");
    }
}

}  // namespace ztselect::ringspace
