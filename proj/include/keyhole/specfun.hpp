#pragma once

// Special functions needed by the Rician connection model: modified Bessel
// functions of integer order, incomplete gamma functions and the Marcum Q_1
// function (exact series plus a two-parameter exponential approximation).

namespace keyhole::specfun {

struct Tolerance {
    double abs_tol = 1e-12;
    int max_terms = 100000;

    void validate() const;
};

/// Arguments above this overflow I_0 in double precision. bessel_i throws
/// std::overflow_error past it; bessel_i_scaled stays finite.
inline constexpr double kBesselOverflowArg = 713.98;

/// e^{-x} I_nu(x), finite for every x >= 0.
double bessel_i_scaled(int nu, double x, const Tolerance& tol = {});

/// I_nu(x). Throws std::overflow_error when the result is not representable,
/// std::domain_error for negative arguments.
double bessel_i(int nu, double x, const Tolerance& tol = {});

/// gamma(s, x) = int_0^x t^{s-1} e^{-t} dt. Throws std::domain_error for s <= 0.
double lower_incomplete_gamma(double s, double x, const Tolerance& tol = {});

/// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt.
double upper_incomplete_gamma(double s, double x, const Tolerance& tol = {});

/// gamma(s, x_hi) - gamma(s, x_lo), evaluated through the upper function when
/// both arguments are in the tail so the difference does not cancel.
double incomplete_gamma_difference(double s, double x_lo, double x_hi,
                                   const Tolerance& tol = {});

/// Exact Marcum Q_1(a, b) in [0, 1].
double marcum_q1(double a, double b, const Tolerance& tol = {});

/// Exponent polynomials of the approximation Q_1(a,b) ~ exp(-e^{nu(a)} b^{mu(a)}).
double marcum_mu(double a);
double marcum_nu(double a);

double marcum_q1_approx(double a, double b);

}  // namespace keyhole::specfun
