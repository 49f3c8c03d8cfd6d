#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "keyhole/channel.hpp"
#include "keyhole/geometry.hpp"
#include "keyhole/random.hpp"

namespace keyhole {

enum class Estimator { semi_analytic, bernoulli };

struct SimConfig {
    std::optional<std::int64_t> n_nodes;
    std::optional<double> density;  // nodes per unit area / volume
    int trials = 2000;
    std::uint64_t seed = 1;
    LinkMode link_mode = LinkMode::approx;
    int max_reflections = 2;
    Estimator estimator = Estimator::semi_analytic;
    int threads = 0;  // 0: hardware concurrency
    std::int64_t max_mesh_nodes = 2000;

    void validate(double volume) const;
    /// N, from n_nodes or round(density * volume).
    std::int64_t node_count(double volume) const;
};

struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Mean and standard error of per-trial samples with a 95% interval. For
/// probabilities (samples in [0, 1]) the Wilson interval replaces the normal
/// one when the mean is within five standard errors of 0 or 1.
EstimateWithCI summarize(std::span<const double> samples, bool probability);

/// Runs trial(index, rng) for every trial on `threads` workers. Each trial
/// owns the stream Rng::stream(seed, index), and results are reduced in index
/// order, so the output does not depend on the thread count.
std::vector<double> run_trials(int trials, std::uint64_t seed, int threads,
                               const std::function<double(int, Rng&)>& trial);

std::vector<Vec3> place_nodes(const KeyholeDomain& domain, std::int64_t n, Rng& rng);

/// Mean degree of the external node divided by the density, mu_k / rho,
/// directly comparable with V<H_ki>.
EstimateWithCI external_mean_degree(const KeyholeDomain& domain, const KeyholeSpec& hole,
                                    const ChannelParams& params, const SimConfig& sim);

/// Probability that every external node (one per hole of the domain) has at
/// least one link to an interior node.
EstimateWithCI all_externals_connected_prob(const KeyholeDomain& domain,
                                            const ChannelParams& params, const SimConfig& sim);

/// Probability that the interior nodes form a single cluster under direct
/// (c = 0) links.
EstimateWithCI interior_mesh_connectivity(const KeyholeDomain& domain, const ChannelParams& params,
                                          const SimConfig& sim);

}  // namespace keyhole
