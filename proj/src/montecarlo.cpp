#include "keyhole/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace keyhole {

namespace {

constexpr double kZ95 = 1.959963984540054;

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
    }

    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t components_;
};

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

int resolve_threads(int requested, int trials) {
    int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(threads, 1, std::max(trials, 1));
}

}  // namespace

void SimConfig::validate(double volume) const {
    if (trials < 1) throw std::invalid_argument("sim.trials must be >= 1");
    if (max_reflections < 0) throw std::invalid_argument("sim.C must be non-negative");
    if (!n_nodes && !density) throw std::invalid_argument("sim.nodes or sim.density is required");
    if (n_nodes && *n_nodes < 0) throw std::invalid_argument("sim.nodes must be non-negative");
    if (density && !(*density >= 0.0)) throw std::invalid_argument("sim.density must be non-negative");
    if (n_nodes && density && std::abs(static_cast<double>(*n_nodes) - *density * volume) > 0.5) {
        throw std::invalid_argument("sim.nodes and sim.density disagree with the domain volume");
    }
    if (max_mesh_nodes < 1) throw std::invalid_argument("sim.max_mesh_nodes must be >= 1");
}

std::int64_t SimConfig::node_count(double volume) const {
    if (n_nodes) return *n_nodes;
    if (density) return static_cast<std::int64_t>(std::llround(*density * volume));
    throw std::invalid_argument("sim.nodes or sim.density is required");
}

EstimateWithCI summarize(std::span<const double> samples, bool probability) {
    EstimateWithCI est;
    est.trials = static_cast<int>(samples.size());
    if (samples.empty()) return est;
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    est.mean = sum / n;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    est.ci_low = est.mean - kZ95 * est.std_error;
    est.ci_high = est.mean + kZ95 * est.std_error;
    const bool near_edge = est.mean <= 5.0 * est.std_error || 1.0 - est.mean <= 5.0 * est.std_error;
    if (probability && near_edge) {
        const double p = std::clamp(est.mean, 0.0, 1.0);
        const double z2 = kZ95 * kZ95;
        const double denom = 1.0 + z2 / n;
        const double centre = (p + z2 / (2.0 * n)) / denom;
        const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
        est.ci_low = centre - half;
        est.ci_high = centre + half;
    }
    return est;
}

std::vector<double> run_trials(int trials, std::uint64_t seed, int threads,
                               const std::function<double(int, Rng&)>& trial) {
    std::vector<double> results(static_cast<std::size_t>(std::max(trials, 0)), 0.0);
    const int workers = resolve_threads(threads, trials);
    auto work = [&](int first, int stride) {
        for (int i = first; i < trials; i += stride) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = trial(i, rng);
        }
    };
    if (workers == 1) {
        work(0, 1);
        return results;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                work(w, workers);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<Vec3> place_nodes(const KeyholeDomain& domain, std::int64_t n, Rng& rng) {
    if (n < 0) throw std::invalid_argument("place_nodes: n must be non-negative");
    std::vector<Vec3> nodes(static_cast<std::size_t>(n));
    for (Vec3& p : nodes) {
        p.x = rng.uniform(0.0, domain.length);
        p.y = rng.uniform(0.0, domain.height);
        if (domain.dimension == 3) p.z = rng.uniform(0.0, domain.width);
    }
    return nodes;
}

EstimateWithCI external_mean_degree(const KeyholeDomain& domain, const KeyholeSpec& hole,
                                    const ChannelParams& params, const SimConfig& sim) {
    const double volume = domain.volume();
    sim.validate(volume);
    const std::int64_t n = sim.node_count(volume);
    const LinkModel link(params, sim.max_reflections, sim.link_mode);
    if (n == 0) {
        const std::vector<double> zeros(static_cast<std::size_t>(sim.trials), 0.0);
        return summarize(zeros, false);
    }
    const double per_node = volume / static_cast<double>(n);  // 1 / rho
    const bool bernoulli = sim.estimator == Estimator::bernoulli;

    const std::vector<double> samples =
        run_trials(sim.trials, sim.seed, sim.threads, [&](int, Rng& rng) {
            const std::vector<Vec3> nodes = place_nodes(domain, n, rng);
            double degree = 0.0;
            for (const Vec3& p : nodes) {
                const PathClass pc = classify_path(p, domain, hole, sim.max_reflections);
                if (!pc.connected()) continue;
                const double prob = link.probability(pc.distance, *pc.reflections);
                if (bernoulli) {
                    degree += rng.bernoulli(prob) ? 1.0 : 0.0;
                } else {
                    degree += prob;
                }
            }
            return degree * per_node;
        });
    return summarize(samples, false);
}

EstimateWithCI all_externals_connected_prob(const KeyholeDomain& domain,
                                            const ChannelParams& params, const SimConfig& sim) {
    if (domain.holes.empty()) throw std::invalid_argument("at least one hole is required");
    const double volume = domain.volume();
    sim.validate(volume);
    const std::int64_t n = sim.node_count(volume);
    const LinkModel link(params, sim.max_reflections, sim.link_mode);
    const bool bernoulli = sim.estimator == Estimator::bernoulli;

    const std::vector<double> samples =
        run_trials(sim.trials, sim.seed, sim.threads, [&](int, Rng& rng) {
            const std::vector<Vec3> nodes = place_nodes(domain, n, rng);
            double all_connected = 1.0;
            for (const KeyholeSpec& hole : domain.holes) {
                double no_link = 1.0;
                bool linked = false;
                for (const Vec3& p : nodes) {
                    const PathClass pc = classify_path(p, domain, hole, sim.max_reflections);
                    if (!pc.connected()) continue;
                    const double prob = link.probability(pc.distance, *pc.reflections);
                    if (bernoulli) {
                        linked = linked || rng.bernoulli(prob);
                    } else {
                        no_link *= 1.0 - prob;
                    }
                }
                all_connected *= bernoulli ? (linked ? 1.0 : 0.0) : 1.0 - no_link;
            }
            return all_connected;
        });
    return summarize(samples, true);
}

EstimateWithCI interior_mesh_connectivity(const KeyholeDomain& domain, const ChannelParams& params,
                                          const SimConfig& sim) {
    const double volume = domain.volume();
    sim.validate(volume);
    const std::int64_t n = sim.node_count(volume);
    if (n > sim.max_mesh_nodes) {
        throw std::invalid_argument("interior mesh of " + std::to_string(n) +
                                    " nodes exceeds sim.max_mesh_nodes");
    }
    const LinkModel link(params, 0, sim.link_mode);

    const std::vector<double> samples =
        run_trials(sim.trials, sim.seed, sim.threads, [&](int, Rng& rng) {
            const std::vector<Vec3> nodes = place_nodes(domain, n, rng);
            if (nodes.size() <= 1) return 1.0;
            DisjointSets sets(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                    const double prob = link.probability(distance(nodes[i], nodes[j]), 0);
                    if (rng.bernoulli(prob)) sets.unite(i, j);
                }
            }
            return sets.components() == 1 ? 1.0 : 0.0;
        });
    return summarize(samples, true);
}

}  // namespace keyhole
