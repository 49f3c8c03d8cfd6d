#pragma once

#include <vector>

namespace keyhole {

enum class LinkMode { exact, approx };

/// Rician random-connection model parameters. Distances are measured in
/// wavelengths.
///
/// The outage formulation P(log2(1 + SNR |h|^2) > R0) with isotropic antennas
/// (G_T = G_R = 1) collapses SNR, the rate threshold and the antenna gains into
/// the single path-loss scale beta = 1 / r0^eta, so none of them appear here.
/// omega only enters the channel-gain density; the pair connection function
/// has it absorbed into beta.
struct ChannelParams {
    double rice_k = 4.0;  // Rice factor K
    double omega = 1.0;   // Rician scale
    double beta = 1.0;    // 1 / r0^eta
    double eta = 2.0;     // path-loss exponent
    double alpha = 1.0;   // per-reflection power attenuation

    static ChannelParams from_r0(double rice_k, double r0, double eta, double alpha);

    double r0() const;
    void validate() const;
};

/// Constants of the approximated connection function
/// H^(c)(r) = exp(-lambda_c r^kappa).
struct DerivedConstants {
    double a = 0.0;      // sqrt(2K)
    double mu_a = 0.0;   // mu(a)
    double nu_a = 0.0;   // nu(a)
    double kappa = 0.0;  // mu(a) eta / 2
    std::vector<double> lambda;  // lambda_c for c = 0..max_c

    static DerivedConstants compute(const ChannelParams& params, int max_c);

    double lambda_at(int c) const { return lambda.at(static_cast<std::size_t>(c)); }
};

/// lambda_c = e^{nu(a)} (2(K+1) beta alpha^{-c})^{mu(a)/2}; +inf when alpha = 0 and c >= 1.
double lambda_c(const ChannelParams& params, int c);

/// Rician channel power density f_X(x).
double rician_pdf(double x, const ChannelParams& params);

/// Pair connection probability H^(c)(r) after c wall reflections.
double connection_prob(double r, int c, const ChannelParams& params,
                       LinkMode mode = LinkMode::approx);

/// Caches the derived constants for repeated evaluation up to max_c reflections.
class LinkModel {
public:
    LinkModel(const ChannelParams& params, int max_c, LinkMode mode);

    double probability(double r, int c) const;

    const ChannelParams& params() const { return params_; }
    const DerivedConstants& constants() const { return constants_; }
    LinkMode mode() const { return mode_; }

private:
    ChannelParams params_;
    DerivedConstants constants_;
    LinkMode mode_;
};

}  // namespace keyhole
