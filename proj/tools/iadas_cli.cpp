// Command-line front end: properness tables, SNR sweeps, back-off prediction
// and the DAS cell experiments, all emitting CSV.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "iadas/harness.hpp"

namespace {

using namespace iadas;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config_path, "INI config file");
    sub->add_option("--seed", f.seed, "master seed (overrides config)");
    sub->add_option("--trials", f.trials, "trials per point (overrides config)");
    sub->add_option("--out", f.out, "output CSV path (default: config output, else stdout)");
    sub->add_option("--threads", f.threads, "worker threads (overrides config)");
}

ExperimentConfig das_defaults() {
    ExperimentConfig cfg;
    cfg.channel_model = ChannelModel::das;
    cfg.shape = SystemShape{kClusterCells, 15, 5, 2, 5};
    cfg.solver.tol = 1e-6;
    cfg.trials = 100;
    return cfg;
}

ExperimentConfig backoff_defaults() {
    ExperimentConfig cfg;
    cfg.shape = SystemShape{3, 2, 2, 1, 2};
    cfg.snr_grid_db = {0, 5, 10, 15, 20, 25, 30, 35, 40};
    return cfg;
}

ExperimentConfig resolve(const CommonFlags& f, ExperimentConfig defaults) {
    ExperimentConfig cfg = f.config_path.empty() ? std::move(defaults) : load_config(f.config_path);
    if (f.seed) cfg.master_seed = *f.seed;
    if (f.trials) cfg.trials = *f.trials;
    if (f.threads) cfg.threads = *f.threads;
    if (!f.out.empty()) cfg.output_path = f.out;
    cfg.validate();
    return cfg;
}

void emit(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows, RowAxis axis,
          const std::vector<std::string>& comments) {
    if (cfg.output_path.empty()) {
        write_csv(std::cout, rows, axis, comments);
    } else {
        write_csv_file(cfg.output_path, rows, axis, comments);
        std::cerr << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
    }
}

std::vector<std::string> rayleigh_comments() {
    return {"snr_db = 10 log10(P / sigma^2) with P = 1 per transmitter and unit-variance channel entries"};
}

std::vector<std::string> das_comments(const ExperimentConfig& cfg) {
    std::ostringstream line;
    line << "P = " << cfg.total_power_dbm << " dBm, sigma^2 = " << cfg.noise_power_dbm
         << " dBm, R = " << cfg.geometry.cell_radius << " m";
    return {line.str(), "mean_sum_rate and std_sum_rate refer to the centre-cell user's rate"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interference alignment for distributed-antenna networks"};
    app.require_subcommand(1);

    CommonFlags prop_flags, sweep_flags, backoff_flags, map_flags, dist_flags;
    std::string prop_csv;
    auto* prop = app.add_subcommand("properness", "classify a grid of shapes by properness");
    add_common(prop, prop_flags);
    auto* sweep = app.add_subcommand("sweep", "Rayleigh sum-rate vs SNR per constraint mode");
    add_common(sweep, sweep_flags);
    auto* backoff = app.add_subcommand("backoff-predict", "simulated vs predicted max-power back-off rates");
    add_common(backoff, backoff_flags);
    auto* cellmap = app.add_subcommand("cellmap", "centre-user rate over a grid of positions (DAS)");
    add_common(cellmap, map_flags);
    auto* dist = app.add_subcommand("rate-vs-distance", "centre-user rate per distance bin (DAS)");
    add_common(dist, dist_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*prop) {
            const ExperimentConfig cfg = resolve(prop_flags, ExperimentConfig{});
            const auto table = properness_table(cfg.properness);
            if (cfg.output_path.empty()) {
                write_properness_text(std::cout, table);
            } else {
                std::ofstream out(cfg.output_path, std::ios::binary);
                if (!out) throw ConfigError("cannot open output file '" + cfg.output_path + "'");
                write_properness_csv(out, table);
                std::cerr << "wrote " << table.size() << " shapes to " << cfg.output_path << '\n';
            }
        } else if (*sweep) {
            const ExperimentConfig cfg = resolve(sweep_flags, ExperimentConfig{});
            emit(cfg, run_snr_sweep(cfg), RowAxis::snr, rayleigh_comments());
        } else if (*backoff) {
            const ExperimentConfig cfg = resolve(backoff_flags, backoff_defaults());
            emit(cfg, run_backoff_prediction(cfg), RowAxis::snr, rayleigh_comments());
        } else if (*cellmap) {
            const ExperimentConfig cfg = resolve(map_flags, das_defaults());
            emit(cfg, run_cell_map(cfg), RowAxis::grid, das_comments(cfg));
        } else if (*dist) {
            const ExperimentConfig cfg = resolve(dist_flags, das_defaults());
            emit(cfg, run_rate_vs_distance(cfg), RowAxis::distance, das_comments(cfg));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidShape& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
