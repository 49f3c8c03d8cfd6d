// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Tolerances are fixed here and are not to be loosened to make a run pass.

#include <boost/math/tools/minima.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "keyhole/analytic.hpp"
#include "keyhole/experiment.hpp"
#include "keyhole/montecarlo.hpp"
#include "keyhole/specfun.hpp"
#include "oracles.hpp"

using namespace keyhole;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPhi = kPi / 16;  // reference 2D wedge
constexpr double kPsi = kPi / 32;  // reference 3D cone half-angle

ChannelParams fig2_params(double alpha) {
    ChannelParams p;
    p.rice_k = 4.0;
    p.beta = 1.0;
    p.eta = 2.0;
    p.alpha = alpha;
    return p;
}

KeyholeDomain strip(double h, double length) {
    KeyholeDomain d;
    d.height = h;
    d.length = length;
    d.holes.push_back(KeyholeSpec::with_angle(0.5 * length, kPhi, 0.1));
    return d;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = out.pass;
    std::string detail = out.detail;
    if (secs > budget_s) {
        pass = false;
        detail += "; over the runtime budget";
    }
    std::printf("[%s] %d %s: %s (%.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", id, title.c_str(),
                detail.c_str(), secs, budget_s);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

Outcome oracle_equivalence() {
    double worst_los = 0.0;
    double worst_refl = 0.0;
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        const ChannelParams p = fig2_params(alpha);
        const DerivedConstants d = DerivedConstants::compute(p, 2);
        const double l0 = d.lambda_at(0);
        for (double h : {0.1, 0.3, 0.5, 1.0, 2.0, 3.0}) {
            const double r2 = oracle::integrate([&](double r) { return r * std::exp(-l0 * std::pow(r, d.kappa)); }, 0.0, h);
            const double r3 =
                oracle::integrate([&](double r) { return r * r * std::exp(-l0 * std::pow(r, d.kappa)); }, 0.0, h);
            const double omega = 2.0 * kPi * (1.0 - std::cos(kPsi));
            worst_los = std::max(worst_los, std::abs(los_integral_2d(p, h, kPhi) - kPhi * r2));
            worst_los = std::max(worst_los, std::abs(los_integral_3d(p, h, kPsi) - omega * r3));
            for (int c : {1, 2}) {
                const double lc = d.lambda_at(c);
                const double o2 = std::max(0.0, oracle::reflection_by_polar_quadrature(lc, d.kappa, c, h, 0.5 * kPhi, 2));
                const double o3 = std::max(0.0, oracle::reflection_by_polar_quadrature(lc, d.kappa, c, h, kPsi, 3));
                worst_refl = std::max(worst_refl, std::abs(reflection_integral_2d(c, p, h, kPhi).value - o2));
                worst_refl = std::max(worst_refl, std::abs(reflection_integral_3d(c, p, h, kPsi).value - o3));
            }
        }
    }
    return {worst_los <= 1e-8 && worst_refl <= 1e-6,
            fmt("max |LOS - quadrature| = %.2e (tol 1e-8), max |reflection - quadrature| = %.2e (tol 1e-6)", worst_los,
                worst_refl)};
}

Outcome marcum_audit() {
    double worst = 0.0;
    double worst_a = 0.0;
    double worst_b = 0.0;
    for (int ia = 0; ia <= 12; ++ia) {
        const double a = 0.25 * ia;
        for (int ib = 0; ib <= 160; ++ib) {
            const double b = 0.05 * ib;
            const double err = std::abs(specfun::marcum_q1(a, b) - specfun::marcum_q1_approx(a, b));
            if (err > worst) {
                worst = err;
                worst_a = a;
                worst_b = b;
            }
        }
    }
    double at_k4 = 0.0;
    const double a8 = std::sqrt(8.0);
    for (int ib = 0; ib <= 160; ++ib) {
        const double b = 0.05 * ib;
        at_k4 = std::max(at_k4, std::abs(specfun::marcum_q1(a8, b) - specfun::marcum_q1_approx(a8, b)));
    }
    std::string detail = fmt("max error %.6f at (a, b) = (%.2f, %.2f) (limit 0.06)", worst, worst_a, worst_b);
    detail += fmt("; at a = sqrt 8: %.6f (limit 0.04)", at_k4);
    return {worst <= 0.06 && at_k4 <= 0.04, detail};
}

Outcome fig2_properties() {
    SweepGrid grid{0.05, 3.0, 40, true};
    bool monotone = true;
    double min_narrow_gain = 1e300;
    double max_tall_gap = 0.0;
    for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
        const ChannelParams p = fig2_params(alpha);
        std::vector<double> heights = grid.points();
        for (double h : {5.0, 7.0, 10.0}) heights.push_back(h);  // h >= 5 r0 with r0 = 1
        for (double h : heights) {
            const KeyholeDomain d = strip(h, 5.0);
            double prev = 0.0;
            std::vector<double> totals;
            for (int c = 0; c <= 2; ++c) {
                const double v = expected_external_H(d, d.holes[0], p, c).total_unnormalized;
                if (v < prev) monotone = false;
                prev = v;
                totals.push_back(v);
            }
            if (alpha == 1.0 && h <= 0.2) min_narrow_gain = std::min(min_narrow_gain, totals[2] / totals[0] - 1.0);
            if (h >= 5.0 * p.r0()) max_tall_gap = std::max(max_tall_gap, (totals[2] - totals[0]) / totals[0]);
        }
    }
    std::string detail = std::string("(a) nondecreasing in C: ") + (monotone ? "yes" : "no");
    detail += fmt("; (b) min C=2 gain over C=0 for h <= 0.2, alpha = 1: %.1f%% (need >= 50%%)", 100.0 * min_narrow_gain);
    detail += fmt("; (c) max relative C gap for h >= 5 r0: %.2e (need <= 1%%)", max_tall_gap);
    return {monotone && min_narrow_gain >= 0.5 && max_tall_gap <= 0.01, detail};
}

Outcome analytic_vs_mc() {
    bool ok = true;
    std::ostringstream detail;
    double worst_rel = 0.0;
    double worst_sigma = 0.0;
    for (double alpha : {0.5, 1.0}) {
        const ChannelParams p = fig2_params(alpha);
        for (double h : {0.3, 0.5, 1.0}) {
            const KeyholeDomain d = strip(h, 5.0);
            SimConfig sim;
            sim.n_nodes = 500;
            sim.trials = 4000;
            sim.seed = 1;
            sim.max_reflections = 2;
            const EstimateWithCI est = external_mean_degree(d, d.holes[0], p, sim);
            const double analytic = expected_external_H(d, d.holes[0], p, 2).total_unnormalized;
            const double gap = std::abs(est.mean - analytic);
            const double sigmas = gap / est.std_error;
            const double rel = gap / analytic;
            worst_rel = std::max(worst_rel, rel);
            worst_sigma = std::max(worst_sigma, sigmas);
            if (sigmas > 3.0 || rel > 0.02) {
                ok = false;
                detail << fmt("h=%.1f alpha=%.1f off by ", h, alpha) << fmt("%.2f sigma, %.2f%%; ", sigmas, 100 * rel);
            }
        }
    }
    detail << fmt("worst %.2f sigma (limit 3), worst %.2f%% relative (limit 2%%)", worst_sigma, 100.0 * worst_rel);
    return {ok, detail.str()};
}

Outcome maximizer() {
    double worst = 0.0;
    for (double alpha : {0.5, 1.0}) {
        const ChannelParams p = fig2_params(alpha);
        for (int dim : {2, 3}) {
            for (int c : {1, 2}) {
                auto neg = [&](double h) {
                    return dim == 2 ? -reflection_upper_bound_2d(c, p, h, kPhi) : -reflection_upper_bound_3d(c, p, h, kPsi);
                };
                const double numeric = boost::math::tools::brent_find_minima(neg, 0.01, 5.0, 45).first;
                worst = std::max(worst, std::abs(h_max(c, p, dim) - numeric) / numeric);
            }
        }
    }
    return {worst <= 1e-6, fmt("max relative |h_max - numeric argmax| = %.2e (tol 1e-6)", worst)};
}

Outcome region_ratios() {
    KeyholeDomain slab;
    slab.dimension = 3;
    slab.height = 0.5;
    slab.length = 2.0;
    slab.width = 2.0;
    slab.holes.push_back(KeyholeSpec::with_half_angle_3d(1.0, 1.0, kPsi, 0.1));
    const std::int64_t n = 1'000'000;
    const double v0 = region_measure(0, slab, slab.holes[0], MeasureMethod::montecarlo, n, 11).value;
    const double v1 = region_measure(1, slab, slab.holes[0], MeasureMethod::montecarlo, n, 12).value;
    const double v2 = region_measure(2, slab, slab.holes[0], MeasureMethod::montecarlo, n, 13).value;
    const double r1 = v1 / v0;
    const double r2 = v2 / v0;

    const KeyholeDomain flat = strip(0.3, 10.0);
    const double a0 = region_measure(0, flat, flat.holes[0], MeasureMethod::montecarlo, n, 21).value;
    const double a1 = region_measure(1, flat, flat.holes[0], MeasureMethod::montecarlo, n, 22).value;
    const double q = a1 / a0;
    const bool ok = r1 >= 6.0 * 0.95 && r1 <= 6.0 * 1.05 && r2 >= 12.0 * 0.95 && r2 <= 12.0 * 1.05 && q >= 1.9 &&
                    q <= 2.1;
    std::string detail = fmt("3D |D1|/|D0| = %.3f (5.7..6.3), |D2|/|D0| = %.3f (11.4..12.6)", r1, r2);
    detail += fmt("; 2D |D1|/|D0| = %.3f (1.9..2.1)", q);
    return {ok, detail};
}

Outcome shape_invariance() {
    const double h = 1.0;
    const ChannelParams p = fig2_params(1.0);
    auto slab = [&](HoleShape shape, double half) {
        KeyholeDomain d;
        d.dimension = 3;
        d.height = h;
        d.length = 0.6;
        d.width = 0.6;
        d.holes.push_back(KeyholeSpec::with_half_angle_3d(0.3, 0.3, half, 0.1, shape));
        return d;
    };
    // Square hole with the cone's solid angle: 4 asin(sin^2 t) = Omega.
    const double omega = 2.0 * kPi * (1.0 - std::cos(kPsi));
    const double square_half = std::asin(std::sqrt(std::sin(omega / 4.0)));
    const KeyholeDomain circ = slab(HoleShape::circular, kPsi);
    const KeyholeDomain sq = slab(HoleShape::square, square_half);
    const double sq_omega = los_angle(sq.holes[0], 3).solid_angle;
    SimConfig sim;
    sim.n_nodes = 1000;
    sim.trials = 2000;
    sim.max_reflections = 0;
    sim.seed = 1;
    const EstimateWithCI a = external_mean_degree(circ, circ.holes[0], p, sim);
    sim.seed = 2;
    const EstimateWithCI b = external_mean_degree(sq, sq.holes[0], p, sim);
    const double sigma = std::hypot(a.std_error, b.std_error);
    const double z = std::abs(a.mean - b.mean) / sigma;
    std::string detail = fmt("circle %.6f, square %.6f, difference %.2f sigma (limit 3)", a.mean, b.mean, z);
    detail += fmt("; solid angles %.6g vs %.6g", omega, sq_omega);
    return {z <= 3.0 && std::abs(sq_omega - omega) < 1e-12, detail};
}

Outcome fig3() {
    KeyholeDomain d;
    d.height = 0.3;
    d.length = 5.0;
    for (double x : {0.5, 1.5, 2.5, 3.5, 4.5}) d.holes.push_back(KeyholeSpec::with_angle(x, kPhi, 0.1));
    auto analytic = [&](const ChannelParams& p, int c, double rho) {
        std::vector<double> mus;
        for (const KeyholeSpec& hole : d.holes) mus.push_back(mean_links(expected_external_H(d, hole, p, c), rho));
        return multi_hole_connect_prob(mus);
    };
    bool ok = d.volume() == 1.5 && overlapping_wedges(d).empty();
    std::ostringstream detail;
    double worst_excess = -1.0;
    for (double alpha : {0.9, 1.0}) {
        const ChannelParams p = fig2_params(alpha);
        for (double rho : {100.0, 200.0, 300.0}) {
            SimConfig sim;
            sim.n_nodes = static_cast<std::int64_t>(std::llround(rho * d.volume()));
            sim.trials = 2000;
            sim.seed = 1;
            sim.max_reflections = 2;
            sim.estimator = Estimator::bernoulli;
            const EstimateWithCI est = all_externals_connected_prob(d, p, sim);
            const double model = analytic(p, 2, rho);
            const double excess = std::abs(est.mean - model) - (3.0 * est.std_error + 0.03);
            worst_excess = std::max(worst_excess, excess);
            if (excess > 0.0) {
                ok = false;
                detail << fmt("alpha=%.1f rho=%.0f: MC %.4f ", alpha, rho, est.mean) << fmt("vs %.4f; ", model);
            }
        }
        double best_gain = 0.0;
        for (double rho = 100.0; rho <= 300.0; rho += 10.0) {
            best_gain = std::max(best_gain, analytic(p, 2, rho) / analytic(p, 0, rho) - 1.0);
        }
        if (best_gain < 0.2) ok = false;
        detail << fmt("alpha=%.1f: max C=2 gain over C=0 on rho in [100, 300] = %.0f%% (need >= 20%%); ", alpha,
                      100.0 * best_gain);
    }
    detail << fmt("worst |MC - analytic| minus (3 sigma + 0.03) = %.4f (need <= 0)", worst_excess);
    return {ok, detail.str()};
}

Outcome determinism() {
    const std::string text = R"(
[experiment]
kind = sweep-h
name = determinism
[domain]
dimension = 2
length = 5
[hole]
position = 2.5
phi = pi/16
[channel]
K = 4
beta = 1
alpha = 0.5, 1
[sweep]
start = 0.2
stop = 1
steps = 3
[sim]
C = 0, 1, 2
trials = 300
nodes = 300
seed = 5
)";
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "keyhole_acceptance_determinism";
    fs::remove_all(dir);
    const ExperimentConfig cfg = parse_experiment_config(text);
    const RunOutcome a = run_experiment(cfg, {dir / "a", std::nullopt, 1});
    const RunOutcome b = run_experiment(cfg, {dir / "b", std::nullopt, 4});
    const RunOutcome c = run_experiment(cfg, {dir / "c", std::uint64_t{6}, 1});
    const DiffReport same = diff_results(a.csv_path, b.csv_path);
    const DiffReport other = diff_results(a.csv_path, c.csv_path);
    const std::set<std::string> mc_columns = {"mc_mean", "mc_stderr"};
    bool only_mc = !other.empty();
    for (const DiffEntry& e : other.entries) only_mc = only_mc && mc_columns.count(e.column) == 1;
    fs::remove_all(dir);
    std::string detail = "same seed: " + std::to_string(same.entries.size()) + " differing cells (need 0)";
    detail += "; other seed: " + std::to_string(other.entries.size()) + " differing cells, " +
              (only_mc ? "all in Monte Carlo columns" : "some outside Monte Carlo columns");
    return {same.empty() && only_mc, detail};
}

}  // namespace

int main() {
    run(1, "closed forms vs independent quadrature", 30, oracle_equivalence);
    run(2, "Marcum approximation audit", 10, marcum_audit);
    run(3, "height sweep properties", 60, fig2_properties);
    run(4, "analytic vs Monte Carlo mean degree", 180, analytic_vs_mc);
    run(5, "h_max vs numeric argmax", 5, maximizer);
    run(6, "region measure ratios", 60, region_ratios);
    run(7, "hole-shape invariance", 60, shape_invariance);
    run(8, "five-hole connectivity vs product formula", 180, fig3);
    run(9, "determinism", 60, determinism);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
