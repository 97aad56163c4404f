#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ztselect {

/// Signed log-domain scalar: value = sign * exp(log_mag).
///
/// Quantities of order exp(+-c*beta) appear everywhere in this problem and
/// overflow plain doubles near exp(709). SignedLog carries the exponent
/// explicitly, so products/quotients are exact shifts and sums go through a
/// log-sum-exp with an expm1/log1p branch near cancellation. Subtracting two
/// nearby magnitudes is computed from the *difference* of their log
/// magnitudes (exact in floating point for close inputs), which keeps the
/// result accurate down to the roundoff carried by the operands themselves.
class SignedLog {
public:
    constexpr SignedLog() noexcept : sign_(0), log_mag_(0.0) {}

    static constexpr SignedLog zero() noexcept { return SignedLog(); }
    static SignedLog one() noexcept { return SignedLog(+1, 0.0); }

    static SignedLog from_double(double v) {
        if (std::isnan(v)) throw std::invalid_argument("SignedLog: NaN input");
        if (v == 0.0) return zero();
        return v > 0.0 ? SignedLog(+1, std::log(v)) : SignedLog(-1, std::log(-v));
    }

    /// e^{t}, or sign * e^{t}.
    static SignedLog from_log(double t, int sign = +1) {
        if (std::isnan(t)) throw std::invalid_argument("SignedLog: NaN log magnitude");
        if (sign == 0 || t == -std::numeric_limits<double>::infinity()) return zero();
        return SignedLog(sign > 0 ? +1 : -1, t);
    }

    int sign() const noexcept { return sign_; }
    /// ln|value|; meaningless when sign()==0.
    double log_mag() const noexcept { return log_mag_; }
    bool is_zero() const noexcept { return sign_ == 0; }
    bool is_positive() const noexcept { return sign_ > 0; }

    /// Saturates to +-inf outside double range; underflows to 0.
    double to_double() const noexcept {
        if (sign_ == 0) return 0.0;
        double m = std::exp(log_mag_);
        return sign_ > 0 ? m : -m;
    }

    bool overflows_double() const noexcept {
        return sign_ != 0 && log_mag_ > 709.0;
    }

    SignedLog operator-() const noexcept { return SignedLog(-sign_, log_mag_); }

    SignedLog abs() const noexcept { return SignedLog(sign_ == 0 ? 0 : +1, log_mag_); }

    friend SignedLog operator*(const SignedLog& a, const SignedLog& b) noexcept {
        if (a.sign_ == 0 || b.sign_ == 0) return zero();
        return SignedLog(a.sign_ * b.sign_, a.log_mag_ + b.log_mag_);
    }

    friend SignedLog operator/(const SignedLog& a, const SignedLog& b) {
        if (b.sign_ == 0) throw std::domain_error("SignedLog: division by zero");
        if (a.sign_ == 0) return zero();
        return SignedLog(a.sign_ * b.sign_, a.log_mag_ - b.log_mag_);
    }

    friend SignedLog operator+(const SignedLog& a, const SignedLog& b) noexcept {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        const bool a_big = a.log_mag_ >= b.log_mag_;
        const SignedLog& hi = a_big ? a : b;
        const SignedLog& lo = a_big ? b : a;
        const double t = lo.log_mag_ - hi.log_mag_;  // <= 0
        if (a.sign_ == b.sign_) {
            return SignedLog(a.sign_, hi.log_mag_ + std::log1p(std::exp(t)));
        }
        if (t == 0.0) return zero();
        // |hi| - |lo|: switch forms at t = -ln 2; expm1 keeps the near-
        // cancellation branch accurate when t -> 0^-.
        const double m = (t > -0.6931471805599453)
                             ? std::log(-std::expm1(t))
                             : std::log1p(-std::exp(t));
        return SignedLog(hi.sign_, hi.log_mag_ + m);
    }

    friend SignedLog operator-(const SignedLog& a, const SignedLog& b) noexcept {
        return a + (-b);
    }

    SignedLog& operator+=(const SignedLog& o) noexcept { return *this = *this + o; }
    SignedLog& operator-=(const SignedLog& o) noexcept { return *this = *this - o; }
    SignedLog& operator*=(const SignedLog& o) noexcept { return *this = *this * o; }
    SignedLog& operator/=(const SignedLog& o) { return *this = *this / o; }

    /// base^e for nonnegative base.
    static SignedLog pow(const SignedLog& base, double e) {
        if (base.sign_ == 0) {
            if (e <= 0.0) throw std::domain_error("SignedLog: 0^e with e<=0");
            return zero();
        }
        if (base.sign_ < 0) throw std::domain_error("SignedLog: pow of negative value");
        return SignedLog(+1, base.log_mag_ * e);
    }

    static SignedLog sqrt(const SignedLog& v) { return pow(v, 0.5); }

    /// Pairwise reduction; keeps the relative error of long sums near
    /// log2(n) ulps instead of n ulps.
    static SignedLog sum(std::span<const SignedLog> terms) {
        if (terms.empty()) return zero();
        if (terms.size() == 1) return terms[0];
        std::vector<SignedLog> layer(terms.begin(), terms.end());
        while (layer.size() > 1) {
            std::size_t out = 0;
            for (std::size_t i = 0; i + 1 < layer.size(); i += 2)
                layer[out++] = layer[i] + layer[i + 1];
            if (layer.size() % 2 == 1) layer[out++] = layer.back();
            layer.resize(out);
        }
        return layer[0];
    }

    friend bool operator==(const SignedLog& a, const SignedLog& b) noexcept {
        return a.sign_ == b.sign_ && (a.sign_ == 0 || a.log_mag_ == b.log_mag_);
    }

    /// Total order consistent with the real values represented.
    friend bool operator<(const SignedLog& a, const SignedLog& b) noexcept {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
        if (a.sign_ == 0) return false;
        return a.sign_ > 0 ? a.log_mag_ < b.log_mag_ : a.log_mag_ > b.log_mag_;
    }
    friend bool operator>(const SignedLog& a, const SignedLog& b) noexcept { return b < a; }
    friend bool operator<=(const SignedLog& a, const SignedLog& b) noexcept { return !(b < a); }
    friend bool operator>=(const SignedLog& a, const SignedLog& b) noexcept { return !(a < b); }

private:
    constexpr SignedLog(int s, double m) noexcept : sign_(static_cast<int8_t>(s)), log_mag_(m) {}

    int8_t sign_;
    double log_mag_;
};

/// |a-b| / max(|a|,|b|), as a double; 0 when both are zero.
inline double rel_diff(const SignedLog& a, const SignedLog& b) {
    if (a.is_zero() && b.is_zero()) return 0.0;
    SignedLog denom = a.abs() > b.abs() ? a.abs() : b.abs();
    return ((a - b).abs() / denom).to_double();
}

/// ln(e^y - 1), stable across scales of y > 0.
inline double log_expm1(double y) {
    if (y <= 0.0) throw std::domain_error("log_expm1: needs y > 0");
    if (y > 36.0) return y + std::log1p(-std::exp(-y));
    return std::log(std::expm1(y));
}

}  // namespace ztselect
