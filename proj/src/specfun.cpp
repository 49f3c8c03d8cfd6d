#include "keyhole/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace keyhole::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
// Exponents beyond this are carried as logarithms until the final exp.
constexpr double kLogDomainThreshold = 700.0;

void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0)) {
        throw std::domain_error(std::string(what) + " must be non-negative");
    }
}

// e^{-x} I_0(x): power series for moderate x, Hankel expansion for large x
// (every term of the expansion is positive for order zero).
double scaled_i0(double x, const Tolerance& tol) {
    if (x == 0.0) return 1.0;
    if (x <= 30.0) {
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < tol.max_terms; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * kEps * 0.25) break;
        }
        return sum * std::exp(-x);
    }
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (next > term) break;  // asymptotic series starts diverging
        term = next;
        sum += term;
        if (term < sum * kEps * 0.25) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// ratios[k] = I_{k+1}(x) / I_k(x) for k = 0..n-1, by backward recurrence
// started far enough above n that the starting error has died out.
std::vector<double> bessel_ratios(int n, double x) {
    std::vector<double> ratios(static_cast<std::size_t>(n), 0.0);
    if (n == 0 || x == 0.0) return ratios;
    const int start = n + 30 + static_cast<int>(std::ceil(7.0 * std::sqrt(x)));
    double kp1 = start + 1.0;
    double r = x / (kp1 + std::sqrt(kp1 * kp1 + x * x));
    for (int k = start; k >= 1; --k) {
        r = 1.0 / (2.0 * k / x + r);  // r_{k-1}
        if (k - 1 < n) ratios[static_cast<std::size_t>(k - 1)] = r;
    }
    return ratios;
}

double lower_gamma_series(double s, double x, const Tolerance& tol) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < tol.max_terms; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::exp(s * std::log(x) - x + std::log(sum));
}

// Modified Lentz evaluation of the continued fraction for Gamma(s, x).
double upper_gamma_fraction(double s, double x, const Tolerance& tol) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < tol.max_terms; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(s * std::log(x) - x + std::log(h));
}

void require_gamma_args(double s, double x) {
    if (!(s > 0.0)) throw std::domain_error("incomplete gamma: s must be positive");
    require_nonnegative(x, "incomplete gamma argument");
}

// sum_{k >= first} ratio^k e^{-x} I_k(x), x = ab.
double marcum_series(double ratio, double x, int first, const Tolerance& tol) {
    int n = tol.max_terms;
    if (ratio < 1.0) {
        n = std::min(n, static_cast<int>(std::ceil(40.0 / -std::log(ratio))) + 1);
    }
    n = std::min(n, static_cast<int>(std::ceil(9.0 * std::sqrt(x) + 40.0)));
    n = std::max(n, first + 1);
    const std::vector<double> ratios = bessel_ratios(n, x);
    double scaled = scaled_i0(x, tol);
    double power = 1.0;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k >= first) {
            const double term = power * scaled;
            sum += term;
            if (term < tol.abs_tol * 1e-4 && k > first) break;
        }
        power *= ratio;
        scaled *= ratios[static_cast<std::size_t>(k)];
    }
    return sum;
}

}  // namespace

void Tolerance::validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("Tolerance.abs_tol must be positive");
    if (max_terms < 1) throw std::invalid_argument("Tolerance.max_terms must be >= 1");
}

double bessel_i_scaled(int nu, double x, const Tolerance& tol) {
    if (nu < 0) throw std::domain_error("bessel_i: order must be non-negative");
    require_nonnegative(x, "bessel_i argument");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    double value = scaled_i0(x, tol);
    if (nu == 0) return value;
    const std::vector<double> ratios = bessel_ratios(nu, x);
    for (double r : ratios) value *= r;
    return value;
}

double bessel_i(int nu, double x, const Tolerance& tol) {
    const double scaled = bessel_i_scaled(nu, x, tol);
    if (scaled == 0.0) return 0.0;
    const double log_value = x + std::log(scaled);
    if (log_value > std::log(std::numeric_limits<double>::max())) {
        throw std::overflow_error("bessel_i: I_" + std::to_string(nu) + "(" + std::to_string(x) +
                                  ") overflows; use bessel_i_scaled");
    }
    return std::exp(log_value);
}

double lower_incomplete_gamma(double s, double x, const Tolerance& tol) {
    require_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return lower_gamma_series(s, x, tol);
    return std::tgamma(s) - upper_gamma_fraction(s, x, tol);
}

double upper_incomplete_gamma(double s, double x, const Tolerance& tol) {
    require_gamma_args(s, x);
    if (x == 0.0) return std::tgamma(s);
    if (x < s + 1.0) return std::tgamma(s) - lower_gamma_series(s, x, tol);
    if (x > std::numeric_limits<double>::max()) return 0.0;
    return upper_gamma_fraction(s, x, tol);
}

double incomplete_gamma_difference(double s, double x_lo, double x_hi, const Tolerance& tol) {
    require_gamma_args(s, x_lo);
    require_gamma_args(s, x_hi);
    if (std::min(x_lo, x_hi) >= s + 1.0) {
        return upper_incomplete_gamma(s, x_lo, tol) - upper_incomplete_gamma(s, x_hi, tol);
    }
    const double hi = std::isinf(x_hi) ? std::tgamma(s) : lower_incomplete_gamma(s, x_hi, tol);
    const double lo = std::isinf(x_lo) ? std::tgamma(s) : lower_incomplete_gamma(s, x_lo, tol);
    return hi - lo;
}

double marcum_q1(double a, double b, const Tolerance& tol) {
    require_nonnegative(a, "marcum_q1 a");
    require_nonnegative(b, "marcum_q1 b");
    if (b == 0.0) return 1.0;
    if (std::isinf(b)) return 0.0;
    if (std::isinf(a)) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);

    const double x = a * b;
    const double gap = 0.5 * (b - a) * (b - a);
    if (b > a) {
        if (gap > kLogDomainThreshold + 50.0) return 0.0;
        const double sum = marcum_series(a / b, x, 0, tol);
        const double q = std::exp(std::log(sum) - gap);
        return std::min(1.0, std::max(0.0, q));
    }
    if (gap > kLogDomainThreshold + 50.0) return 1.0;
    const double sum = marcum_series(b / a, x, 1, tol);
    const double q = 1.0 - std::exp(std::log(sum) - gap);
    return std::min(1.0, std::max(0.0, q));
}

double marcum_mu(double a) {
    return 2.174 + a * (-0.592 + a * (0.593 + a * (-0.092 + a * 0.005)));
}

double marcum_nu(double a) {
    return -0.840 + a * (0.327 + a * (-0.740 + a * (0.083 + a * -0.004)));
}

double marcum_q1_approx(double a, double b) {
    require_nonnegative(a, "marcum_q1_approx a");
    require_nonnegative(b, "marcum_q1_approx b");
    if (b == 0.0) return 1.0;
    return std::exp(-std::exp(marcum_nu(a)) * std::pow(b, marcum_mu(a)));
}

}  // namespace keyhole::specfun
