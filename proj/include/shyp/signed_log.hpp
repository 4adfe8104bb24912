#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace shyp {

// A real number stored as sign and natural log of its magnitude, so that
// spectra like e^{2k} stay representable far past the double range.
struct SignedLog {
    int sign = 0;  // -1, 0, +1
    double log_abs = -std::numeric_limits<double>::infinity();

    static SignedLog zero() { return {}; }

    static SignedLog from_value(double x) {
        if (x == 0.0) return {};
        return {x > 0 ? 1 : -1, std::log(std::fabs(x))};
    }

    static SignedLog from_log(int sign, double log_abs) {
        if (sign == 0) return {};
        return {sign, log_abs};
    }

    bool is_zero() const { return sign == 0; }

    // exp() of log_abs overflows to +-inf; callers that care check overflows().
    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    bool overflows() const {
        return sign != 0 && log_abs > std::log(std::numeric_limits<double>::max());
    }

    SignedLog operator-() const { return {-sign, log_abs}; }
};

inline SignedLog operator*(SignedLog a, SignedLog b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
}

inline SignedLog operator*(SignedLog a, double c) { return a * SignedLog::from_value(c); }

inline SignedLog operator/(SignedLog a, SignedLog b) {
    if (a.sign == 0) return {};
    if (b.sign == 0) return {a.sign, std::numeric_limits<double>::infinity()};
    return {a.sign * b.sign, a.log_abs - b.log_abs};
}

// a + b without leaving log space.
inline SignedLog operator+(SignedLog a, SignedLog b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.log_abs < b.log_abs) std::swap(a, b);
    const double r = std::exp(b.log_abs - a.log_abs);  // in (0, 1]
    if (a.sign == b.sign) return {a.sign, a.log_abs + std::log1p(r)};
    if (r == 1.0) return {};
    return {a.sign, a.log_abs + std::log1p(-r)};
}

inline SignedLog operator-(SignedLog a, SignedLog b) { return a + (-b); }

}  // namespace shyp
