#include "keyhole/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "keyhole/specfun.hpp"

namespace keyhole {

namespace {

double approx_probability(double r, double lambda, double kappa) {
    if (r == 0.0) return 1.0;
    if (std::isinf(lambda)) return 0.0;
    return std::exp(-lambda * std::pow(r, kappa));
}

double exact_probability(double r, int c, const ChannelParams& p) {
    if (r == 0.0) return 1.0;
    const double a = std::sqrt(2.0 * p.rice_k);
    const double attenuation = c == 0 ? 1.0 : std::pow(p.alpha, -c);
    const double b = std::sqrt(2.0 * (p.rice_k + 1.0) * p.beta * std::pow(r, p.eta) * attenuation);
    return specfun::marcum_q1(a, b);
}

}  // namespace

ChannelParams ChannelParams::from_r0(double rice_k, double r0, double eta, double alpha) {
    if (!(r0 > 0.0)) throw std::invalid_argument("channel.r0 must be positive");
    ChannelParams p;
    p.rice_k = rice_k;
    p.eta = eta;
    p.alpha = alpha;
    p.beta = std::pow(r0, -eta);
    return p;
}

double ChannelParams::r0() const { return std::pow(beta, -1.0 / eta); }

void ChannelParams::validate() const {
    if (!(rice_k >= 0.0)) throw std::invalid_argument("channel.K must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("channel.omega must be positive");
    if (!(beta > 0.0) || std::isinf(beta)) throw std::invalid_argument("channel.beta must be positive and finite");
    if (!(eta >= 2.0)) throw std::invalid_argument("channel.eta must be >= 2");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("channel.alpha must lie in [0, 1]");
}

double lambda_c(const ChannelParams& params, int c) {
    if (c < 0) throw std::invalid_argument("reflection count must be non-negative");
    const double a = std::sqrt(2.0 * params.rice_k);
    const double mu = specfun::marcum_mu(a);
    const double nu = specfun::marcum_nu(a);
    if (c > 0 && params.alpha == 0.0) return std::numeric_limits<double>::infinity();
    const double log_scale = std::log(2.0 * (params.rice_k + 1.0) * params.beta) - (c == 0 ? 0.0 : c * std::log(params.alpha));
    return std::exp(nu + 0.5 * mu * log_scale);
}

DerivedConstants DerivedConstants::compute(const ChannelParams& params, int max_c) {
    if (max_c < 0) throw std::invalid_argument("max reflections must be non-negative");
    DerivedConstants d;
    d.a = std::sqrt(2.0 * params.rice_k);
    d.mu_a = specfun::marcum_mu(d.a);
    d.nu_a = specfun::marcum_nu(d.a);
    d.kappa = 0.5 * d.mu_a * params.eta;
    d.lambda.reserve(static_cast<std::size_t>(max_c) + 1);
    for (int c = 0; c <= max_c; ++c) d.lambda.push_back(lambda_c(params, c));
    return d;
}

double rician_pdf(double x, const ChannelParams& params) {
    if (!(x >= 0.0)) throw std::domain_error("rician_pdf: x must be non-negative");
    const double k = params.rice_k;
    const double w = params.omega;
    const double z = std::sqrt(4.0 * k * (k + 1.0) * x / w);
    // I_0(z) e^{-(K + (K+1)x/w)} = [e^{-z} I_0(z)] e^{z - K - (K+1)x/w}
    const double exponent = z - k - (k + 1.0) * x / w;
    return (k + 1.0) / w * specfun::bessel_i_scaled(0, z) * std::exp(exponent);
}

double connection_prob(double r, int c, const ChannelParams& params, LinkMode mode) {
    if (!(r >= 0.0)) throw std::domain_error("connection_prob: r must be non-negative");
    if (c < 0) throw std::domain_error("connection_prob: c must be non-negative");
    if (mode == LinkMode::exact) return exact_probability(r, c, params);
    const double a = std::sqrt(2.0 * params.rice_k);
    const double kappa = 0.5 * specfun::marcum_mu(a) * params.eta;
    return approx_probability(r, lambda_c(params, c), kappa);
}

LinkModel::LinkModel(const ChannelParams& params, int max_c, LinkMode mode)
    : params_(params), constants_(DerivedConstants::compute(params, max_c)), mode_(mode) {
    params_.validate();
}

double LinkModel::probability(double r, int c) const {
    if (mode_ == LinkMode::exact) return exact_probability(r, c, params_);
    return approx_probability(r, constants_.lambda_at(c), constants_.kappa);
}

}  // namespace keyhole
