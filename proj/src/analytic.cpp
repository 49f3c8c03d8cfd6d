#include "keyhole/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "keyhole/specfun.hpp"

namespace keyhole {

namespace {

constexpr double kPi = std::numbers::pi;

double kappa_of(const ChannelParams& params) {
    return 0.5 * specfun::marcum_mu(std::sqrt(2.0 * params.rice_k)) * params.eta;
}

void require_height(double h) {
    if (!(h > 0.0)) throw std::invalid_argument("height must be positive");
}

void require_reflection(int c) {
    if (c < 1) throw std::invalid_argument("reflection order must be >= 1");
}

// gamma(s, lambda r_hi^kappa) - gamma(s, lambda r_lo^kappa), i.e.
// kappa lambda^s int_{r_lo}^{r_hi} r^{ds} e^{-lambda r^kappa} dr / r.
double radial_gamma_difference(double s, double lambda, double kappa, double r_lo, double r_hi) {
    return specfun::incomplete_gamma_difference(s, lambda * std::pow(r_lo, kappa),
                                                lambda * std::pow(r_hi, kappa));
}

double solid_angle_of(double psi) { return 2.0 * kPi * (1.0 - std::cos(psi)); }

}  // namespace

double los_integral_2d(const ChannelParams& params, double h, double phi) {
    require_height(h);
    if (!(phi > 0.0 && phi < kPi)) throw std::invalid_argument("phi must lie in (0, pi)");
    const double kappa = kappa_of(params);
    const double lambda = lambda_c(params, 0);
    const double s = 2.0 / kappa;
    return phi / (kappa * std::pow(lambda, s)) *
           specfun::lower_incomplete_gamma(s, lambda * std::pow(h, kappa));
}

QuadratureResult reflection_integral_2d(int c, const ChannelParams& params, double h, double phi,
                                        double abs_tol) {
    require_reflection(c);
    require_height(h);
    if (!(phi > 0.0 && phi < kPi / 2)) throw std::invalid_argument("phi must lie in (0, pi/2)");
    const double lambda = lambda_c(params, c);
    if (std::isinf(lambda)) return {};
    const double kappa = kappa_of(params);
    const double s = 2.0 / kappa;
    const double half = 0.5 * phi;
    const double phi_c = std::atan((c - 1.0) / (c + 1.0) * std::tan(half));
    const double outer = (c + 1) * h;
    const double prefactor = 2.0 / (kappa * std::pow(lambda, s));

    // (phi - 2 phi_c)/2 * gamma(s, lambda ((c+1)h)^kappa) - int gamma(s, lambda r_c^kappa) dtheta,
    // folded into a single angular integral of the gamma difference.
    auto integrand = [&](double theta) {
        const double r_c = 2.0 * c * h * std::sin(half) / std::cos(theta - half);
        return radial_gamma_difference(s, lambda, kappa, r_c, outer);
    };
    QuadratureResult q = integrate_adaptive(integrand, 0.5 * (kPi - phi), 0.5 * kPi - phi_c,
                                            abs_tol / prefactor);
    q.value = std::max(0.0, prefactor * q.value);
    q.abs_error *= prefactor;
    return q;
}

double reflection_upper_bound_2d(int c, const ChannelParams& params, double h, double phi) {
    require_reflection(c);
    require_height(h);
    const double lambda = lambda_c(params, c);
    if (std::isinf(lambda)) return 0.0;
    const double kappa = kappa_of(params);
    const double s = 2.0 / kappa;
    return phi / (kappa * std::pow(lambda, s)) *
           radial_gamma_difference(s, lambda, kappa, c * h, (c + 1) * h);
}

double los_integral_3d(const ChannelParams& params, double h, double psi) {
    require_height(h);
    if (!(psi > 0.0 && psi < kPi / 2)) throw std::invalid_argument("psi must lie in (0, pi/2)");
    const double kappa = kappa_of(params);
    const double lambda = lambda_c(params, 0);
    const double s = 3.0 / kappa;
    return solid_angle_of(psi) / (kappa * std::pow(lambda, s)) *
           specfun::lower_incomplete_gamma(s, lambda * std::pow(h, kappa));
}

QuadratureResult reflection_integral_3d(int c, const ChannelParams& params, double h, double psi,
                                        double abs_tol) {
    require_reflection(c);
    require_height(h);
    if (!(psi > 0.0 && psi < kPi / 2)) throw std::invalid_argument("psi must lie in (0, pi/2)");
    const double lambda = lambda_c(params, c);
    if (std::isinf(lambda)) return {};
    const double kappa = kappa_of(params);
    const double s = 3.0 / kappa;
    const double psi_c = std::atan((c - 1.0) / (c + 1.0) * std::tan(psi));
    const double outer = (c + 1) * h;
    const double prefactor = 2.0 * kPi / (kappa * std::pow(lambda, s));

    // theta is the polar angle from the hole axis; the inner boundary is the
    // unfolded cone of the (c-1)-th image, rho = (2ch - Y) tan(psi).
    auto integrand = [&](double theta) {
        const double r_c = 2.0 * c * h * std::sin(psi) / std::sin(theta + psi);
        return std::sin(theta) * radial_gamma_difference(s, lambda, kappa, r_c, outer);
    };
    QuadratureResult q = integrate_adaptive(integrand, psi_c, psi, abs_tol / prefactor);
    q.value = std::max(0.0, prefactor * q.value);
    q.abs_error *= prefactor;
    return q;
}

double reflection_upper_bound_3d(int c, const ChannelParams& params, double h, double psi) {
    require_reflection(c);
    require_height(h);
    const double lambda = lambda_c(params, c);
    if (std::isinf(lambda)) return 0.0;
    const double kappa = kappa_of(params);
    const double s = 3.0 / kappa;
    return solid_angle_of(psi) / (kappa * std::pow(lambda, s)) *
           radial_gamma_difference(s, lambda, kappa, c * h, (c + 1) * h);
}

double h_max(int c, const ChannelParams& params, int dimension) {
    require_reflection(c);
    if (dimension != 2 && dimension != 3) throw std::invalid_argument("dimension must be 2 or 3");
    const double kappa = kappa_of(params);
    const double lambda = lambda_c(params, c);
    const double growth = std::pow(c + 1.0, kappa) - std::pow(static_cast<double>(c), kappa);
    const double log_ratio = dimension * std::log((c + 1.0) / c);
    return std::pow(log_ratio / (lambda * growth), 1.0 / kappa);
}

ContributionBreakdown expected_external_H(const KeyholeDomain& domain, const KeyholeSpec& hole,
                                          const ChannelParams& params, int max_reflections) {
    if (max_reflections < 0) throw std::invalid_argument("C must be non-negative");
    const double h = domain.height;
    const LosAngle angle = los_angle(hole, domain.dimension);
    const bool three_d = domain.dimension == 3;
    const double psi = three_d ? equivalent_cone_half_angle(angle.solid_angle) : 0.0;

    ContributionBreakdown out;
    out.per_c.push_back(three_d ? los_integral_3d(params, h, psi)
                                : los_integral_2d(params, h, angle.full_angle));
    for (int c = 1; c <= max_reflections; ++c) {
        const QuadratureResult q = three_d ? reflection_integral_3d(c, params, h, psi)
                                           : reflection_integral_2d(c, params, h, angle.full_angle);
        out.per_c.push_back(q.value);
        out.abs_error += q.abs_error;
        out.converged = out.converged && q.converged;
    }
    for (double v : out.per_c) out.total_unnormalized += v;
    out.normalized = out.total_unnormalized / domain.volume();
    return out;
}

double mean_links(const ContributionBreakdown& breakdown, double density) {
    if (!(density >= 0.0)) throw std::invalid_argument("density must be non-negative");
    return density * breakdown.total_unnormalized;
}

double external_connect_prob(double mean_links) {
    if (!(mean_links >= 0.0)) throw std::invalid_argument("mean links must be non-negative");
    return -std::expm1(-mean_links);
}

double multi_hole_connect_prob(std::span<const double> mean_links) {
    double p = 1.0;
    for (double mu : mean_links) p *= external_connect_prob(mu);
    return p;
}

}  // namespace keyhole
