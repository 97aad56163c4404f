#pragma once

#include <cmath>
#include <stdexcept>

namespace ztselect {

/// One problem instance: potential level alpha on [2], slope gamma_slope at
/// 1^inf (the reference family uses 3), inverse temperature beta.
struct Params {
    double alpha = 1.0;
    double gamma_slope = 3.0;
    double beta = 0.0;

    void validate() const {
        if (!(std::isfinite(alpha) && alpha > 0.0))
            throw std::invalid_argument("Params: alpha must be finite and > 0");
        if (!(std::isfinite(gamma_slope) && gamma_slope > 1.0))
            throw std::invalid_argument("Params: gamma_slope must be finite and > 1");
        if (!(std::isfinite(beta) && beta >= 0.0))
            throw std::invalid_argument("Params: beta must be finite and >= 0");
    }
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ztselect
