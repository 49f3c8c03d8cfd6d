#pragma once

#include <span>
#include <vector>

#include "keyhole/channel.hpp"
#include "keyhole/geometry.hpp"
#include "keyhole/quadrature.hpp"

namespace keyhole {

/// Default absolute tolerance of the angular quadrature in reflection terms.
inline constexpr double kReflectionTolerance = 1e-7;
inline constexpr int kDefaultMaxReflections = 2;

// All integrals below use the approximated connection function
// H^(c)(r) = exp(-lambda_c r^kappa) and the sector idealisation of D_c.

/// int_{D_0} H^(0) over the circular sector of opening phi and radius h:
/// phi / (kappa lambda_0^{2/kappa}) * gamma(2/kappa, lambda_0 h^kappa).
double los_integral_2d(const ChannelParams& params, double h, double phi);

/// int_{D_c} H^(c) for c >= 1 in 2D. The radial integral is closed form; the
/// angular integral of the incomplete-gamma difference is adaptive.
QuadratureResult reflection_integral_2d(int c, const ChannelParams& params, double h, double phi,
                                        double abs_tol = kReflectionTolerance);

/// Closed-form bound on reflection_integral_2d obtained with lower radius c h.
double reflection_upper_bound_2d(int c, const ChannelParams& params, double h, double phi);

/// 3D line-of-sight term for a cone of polar half-angle psi.
double los_integral_3d(const ChannelParams& params, double h, double psi);

QuadratureResult reflection_integral_3d(int c, const ChannelParams& params, double h, double psi,
                                        double abs_tol = kReflectionTolerance);

double reflection_upper_bound_3d(int c, const ChannelParams& params, double h, double psi);

/// Height maximising the reflection upper bound for reflection order c:
/// h^kappa = D ln((c+1)/c) / (lambda_c ((c+1)^kappa - c^kappa)), D = dimension.
/// For c = 1 this is (ln 4 / (lambda_1 (2^kappa - 1)))^{1/kappa} in 2D and the
/// ln 8 form in 3D.
double h_max(int c, const ChannelParams& params, int dimension);

struct ContributionBreakdown {
    std::vector<double> per_c;        // int_{D_c} H^(c), c = 0..C
    double total_unnormalized = 0.0;  // V <H_ki>
    double normalized = 0.0;          // <H_ki>
    double abs_error = 0.0;
    bool converged = true;
};

/// Mean pair connection probability between the external node in `hole` and
/// a uniformly placed interior node, including up to C reflections.
ContributionBreakdown expected_external_H(const KeyholeDomain& domain, const KeyholeSpec& hole,
                                          const ChannelParams& params,
                                          int max_reflections = kDefaultMaxReflections);

/// Mean number of interior neighbours mu_k = rho * V<H_ki> = N <H_ki>.
double mean_links(const ContributionBreakdown& breakdown, double density);

/// 1 - e^{-mu_k}: probability of at least one direct link.
double external_connect_prob(double mean_links);

/// prod_k (1 - e^{-mu_k}) over all external nodes.
double multi_hole_connect_prob(std::span<const double> mean_links);

}  // namespace keyhole
