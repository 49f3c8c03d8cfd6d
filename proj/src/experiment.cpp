#include "keyhole/experiment.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "keyhole/analytic.hpp"
#include "keyhole/geometry.hpp"
#include "keyhole/montecarlo.hpp"

namespace keyhole {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool finite_values(const ContributionBreakdown& b) {
    for (double v : b.per_c) {
        if (!std::isfinite(v)) return false;
    }
    return std::isfinite(b.total_unnormalized);
}

void record_analytic(SweepRow& row, const ContributionBreakdown& b, SweepResult& result) {
    row.analytic.assign(static_cast<std::size_t>(result.max_reflections) + 1, std::nullopt);
    for (std::size_t c = 0; c < b.per_c.size(); ++c) row.analytic[c] = b.per_c[c];
    if (!b.converged || !finite_values(b)) {
        result.numeric_failure = true;
        result.messages.push_back("quadrature did not converge for " + row.experiment + " row " +
                                  std::to_string(result.rows.size() + 1));
    }
}

void height_sweep(const ExperimentConfig& cfg, SweepResult& result) {
    for (double h : cfg.grid.points()) {
        KeyholeDomain domain = cfg.domain;
        domain.height = h;
        const KeyholeSpec& hole = domain.holes.front();
        const double volume = domain.volume();
        for (double alpha : cfg.alphas) {
            ChannelParams params = cfg.channel;
            params.alpha = alpha;
            for (int c : cfg.reflections) {
                const auto start = Clock::now();
                SweepRow row;
                row.experiment = cfg.name;
                row.h = h;
                row.alpha = alpha;
                row.reflections = c;
                const ContributionBreakdown b = expected_external_H(domain, hole, params, c);
                record_analytic(row, b, result);
                row.analytic_total = b.total_unnormalized;
                if (cfg.monte_carlo) {
                    SimConfig sim = cfg.sim;
                    sim.max_reflections = c;
                    const std::int64_t n = sim.node_count(volume);
                    row.rho = static_cast<double>(n) / volume;
                    const EstimateWithCI est = external_mean_degree(domain, hole, params, sim);
                    row.mc_mean = est.mean;
                    row.mc_stderr = est.std_error;
                    row.trials = est.trials;
                    if (cfg.kind == ExperimentKind::validate) {
                        const double gap = std::abs(est.mean - b.total_unnormalized);
                        const bool ok = gap <= cfg.validate_sigmas * est.std_error &&
                                        gap <= cfg.validate_rel_tol * std::abs(b.total_unnormalized);
                        if (!ok) {
                            result.disagreement = true;
                            std::ostringstream msg;
                            msg << "h=" << h << " alpha=" << alpha << " C=" << c << ": analytic "
                                << b.total_unnormalized << " vs Monte Carlo " << est.mean << " +- "
                                << est.std_error;
                            result.messages.push_back(msg.str());
                        }
                    }
                }
                row.seconds = seconds_since(start);
                result.rows.push_back(std::move(row));
            }
        }
    }
}

void density_sweep(const ExperimentConfig& cfg, SweepResult& result) {
    const KeyholeDomain& domain = cfg.domain;
    const double volume = domain.volume();
    for (double rho : cfg.grid.points()) {
        for (double alpha : cfg.alphas) {
            ChannelParams params = cfg.channel;
            params.alpha = alpha;
            for (int c : cfg.reflections) {
                const auto start = Clock::now();
                SweepRow row;
                row.experiment = cfg.name;
                row.h = domain.height;
                row.rho = rho;
                row.alpha = alpha;
                row.reflections = c;
                std::vector<double> mus;
                for (std::size_t k = 0; k < domain.holes.size(); ++k) {
                    const ContributionBreakdown b = expected_external_H(domain, domain.holes[k], params, c);
                    if (k == 0) record_analytic(row, b, result);
                    mus.push_back(mean_links(b, rho));
                }
                row.analytic_total = multi_hole_connect_prob(mus);
                if (cfg.monte_carlo) {
                    SimConfig sim = cfg.sim;
                    sim.max_reflections = c;
                    sim.density.reset();
                    sim.n_nodes = static_cast<std::int64_t>(std::llround(rho * volume));
                    const EstimateWithCI est = all_externals_connected_prob(domain, params, sim);
                    row.mc_mean = est.mean;
                    row.mc_stderr = est.std_error;
                    row.trials = est.trials;
                }
                row.seconds = seconds_since(start);
                result.rows.push_back(std::move(row));
            }
        }
    }
}

void region_sweep(const ExperimentConfig& cfg, SweepResult& result) {
    for (double h : cfg.grid.points()) {
        KeyholeDomain domain = cfg.domain;
        domain.height = h;
        const KeyholeSpec& hole = domain.holes.front();
        for (double alpha : cfg.alphas) {
            for (int c_max : cfg.reflections) {
                const auto start = Clock::now();
                SweepRow row;
                row.experiment = cfg.name;
                row.h = h;
                row.alpha = alpha;
                row.reflections = c_max;
                row.analytic.assign(static_cast<std::size_t>(result.max_reflections) + 1, std::nullopt);
                double analytic_total = 0.0;
                double mc_total = 0.0;
                double mc_var = 0.0;
                for (int c = 0; c <= c_max; ++c) {
                    const double a = region_measure(c, domain, hole, MeasureMethod::analytic_approx).value;
                    row.analytic[static_cast<std::size_t>(c)] = a;
                    analytic_total += a;
                    if (cfg.monte_carlo) {
                        const RegionMeasure m = region_measure(c, domain, hole, MeasureMethod::montecarlo,
                                                               cfg.region_samples, cfg.sim.seed + static_cast<std::uint64_t>(c));
                        mc_total += m.value;
                        mc_var += m.std_error * m.std_error;
                    }
                }
                row.analytic_total = analytic_total;
                if (cfg.monte_carlo) {
                    row.mc_mean = mc_total;
                    row.mc_stderr = std::sqrt(mc_var);
                    row.trials = static_cast<int>(cfg.region_samples);
                }
                row.seconds = seconds_since(start);
                result.rows.push_back(std::move(row));
            }
        }
    }
}

std::string manifest_text(const ExperimentConfig& cfg, const std::filesystem::path& csv, int threads) {
    std::ostringstream out;
    out << "# keyhole run manifest\n"
        << "# version: " << kVersion << "\n"
#if defined(__clang__)
        << "# compiler: clang " << __clang_version__ << "\n"
#elif defined(__GNUC__)
        << "# compiler: gcc " << __VERSION__ << "\n"
#endif
        << "# cplusplus: " << __cplusplus << "\n"
        << "# seed: " << cfg.sim.seed << "\n"
        << "# threads: " << threads << " (results do not depend on the thread count)\n"
        << "# results: " << csv.filename().string() << "\n"
        << "# This file is a valid config; `keyhole run` on it reproduces the results.\n\n"
        << to_config_text(cfg);
    return out.str();
}

}  // namespace

std::vector<std::string> csv_header(int max_reflections) {
    std::vector<std::string> header = {"experiment", "h", "rho", "alpha", "C"};
    for (int c = 0; c <= max_reflections; ++c) header.push_back("analytic_c" + std::to_string(c));
    for (const char* name : {"analytic_total", "mc_mean", "mc_stderr", "trials", "seconds"}) {
        header.emplace_back(name);
    }
    return header;
}

CsvTable SweepResult::to_table() const {
    CsvTable table;
    table.header = csv_header(max_reflections);
    for (const SweepRow& row : rows) {
        std::vector<std::string> cells = {row.experiment, format_value(row.h), format_value(row.rho),
                                          format_value(row.alpha), std::to_string(row.reflections)};
        for (int c = 0; c <= max_reflections; ++c) {
            const auto idx = static_cast<std::size_t>(c);
            cells.push_back(idx < row.analytic.size() ? format_value(row.analytic[idx]) : std::string());
        }
        cells.push_back(format_value(row.analytic_total));
        cells.push_back(format_value(row.mc_mean));
        cells.push_back(format_value(row.mc_stderr));
        cells.push_back(row.trials ? std::to_string(*row.trials) : std::string());
        cells.push_back(format_value(row.seconds));
        table.rows.push_back(std::move(cells));
    }
    return table;
}

SweepResult compute_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    SweepResult result;
    result.max_reflections = cfg.max_reflections();
    try {
        switch (cfg.kind) {
            case ExperimentKind::sweep_h:
            case ExperimentKind::sweep_3d:
            case ExperimentKind::validate: height_sweep(cfg, result); break;
            case ExperimentKind::sweep_density: density_sweep(cfg, result); break;
            case ExperimentKind::measure_regions: region_sweep(cfg, result); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        result.numeric_failure = true;
        result.messages.push_back(std::string("numeric failure: ") + e.what());
    }
    return result;
}

RunOutcome run_experiment(ExperimentConfig cfg, const RunOptions& options) {
    if (options.seed) cfg.sim.seed = *options.seed;
    if (options.threads) cfg.sim.threads = *options.threads;
    cfg.validate();

    RunOutcome outcome;
    outcome.result = compute_sweep(cfg);

    std::filesystem::create_directories(options.out_dir);
    const std::string file = cfg.output.empty() ? cfg.name + ".csv" : cfg.output;
    outcome.csv_path = options.out_dir / file;
    outcome.manifest_path = outcome.csv_path;
    outcome.manifest_path.replace_extension(".manifest");
    write_text_atomic(outcome.csv_path, to_csv_text(outcome.result.to_table()));
    write_text_atomic(outcome.manifest_path, manifest_text(cfg, outcome.csv_path, cfg.sim.threads));

    if (outcome.result.numeric_failure) {
        outcome.exit_code = kExitNumeric;
    } else if (outcome.result.disagreement) {
        outcome.exit_code = kExitDisagreement;
    }
    return outcome;
}

}  // namespace keyhole
