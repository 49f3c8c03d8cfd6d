#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "keyhole/config.hpp"
#include "keyhole/experiment.hpp"
#include "keyhole/results.hpp"

namespace {

std::optional<int> threads_from_env() {
    const char* env = std::getenv("KEYHOLE_THREADS");
    if (!env || !*env) return std::nullopt;
    try {
        return std::stoi(env);
    } catch (const std::exception&) {
        std::cerr << "warning: ignoring KEYHOLE_THREADS='" << env << "'\n";
        return std::nullopt;
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            std::optional<int> threads) {
    keyhole::RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.threads = threads ? threads : threads_from_env();
    const keyhole::ExperimentConfig cfg = keyhole::load_experiment_config(config_path);
    for (const std::string& note : cfg.domain.warnings()) std::cerr << "warning: " << note << "\n";
    const keyhole::RunOutcome outcome = keyhole::run_experiment(cfg, options);
    for (const std::string& msg : outcome.result.messages) std::cerr << msg << "\n";
    std::cout << "wrote " << outcome.result.rows.size() << " rows to " << outcome.csv_path.string() << "\n"
              << "manifest " << outcome.manifest_path.string() << "\n";
    return outcome.exit_code;
}

int cmd_validate(const std::string& config_path) {
    const keyhole::ExperimentConfig cfg = keyhole::load_experiment_config(config_path);
    for (const std::string& note : cfg.domain.warnings()) std::cerr << "warning: " << note << "\n";
    const std::size_t rows = cfg.grid.points().size() * cfg.alphas.size() * cfg.reflections.size();
    std::cout << config_path << ": ok (" << keyhole::to_string(cfg.kind) << ", " << rows << " rows)\n";
    return keyhole::kExitOk;
}

int cmd_diff(const std::string& a, const std::string& b, double rel_tol) {
    const keyhole::DiffReport report = keyhole::diff_results(a, b, rel_tol);
    std::cout << report.to_text();
    if (report.empty()) return keyhole::kExitOk;
    std::cout << report.entries.size() << " differing cells\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Connectivity of keyhole external nodes in reflecting domains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", keyhole::kVersion);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    auto* run = app.add_subcommand("run", "Run an experiment and write CSV results plus a manifest");
    run->add_option("config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--threads", threads, "Worker threads (default: KEYHOLE_THREADS or all cores)");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", validate_path, "Experiment config file")->required();

    std::string left;
    std::string right;
    double rel_tol = 1e-12;
    auto* diff = app.add_subcommand("diff", "Compare two results files");
    diff->add_option("a", left, "First CSV")->required();
    diff->add_option("b", right, "Second CSV")->required();
    diff->add_option("--rel-tol", rel_tol, "Relative tolerance for numeric cells");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir, seed, threads);
        if (*validate) return cmd_validate(validate_path);
        if (*diff) return cmd_diff(left, right, rel_tol);
    } catch (const keyhole::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return keyhole::kExitConfig;
    } catch (const keyhole::SchemaError& e) {
        std::cerr << "schema mismatch: " << e.what() << "\n";
        return keyhole::kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return keyhole::kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return keyhole::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return keyhole::kExitNumeric;
    }
    return keyhole::kExitOk;
}
