#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iadas/config.hpp"
#include "iadas/feasibility.hpp"

namespace iadas {

class StreamsExceedRruAntennas : public Error {
public:
    using Error::Error;
};

/// Which column(s) locate a row on its x-axis.
enum class RowAxis { snr, distance, grid };

/// One aggregated line of experiment output.
struct ResultRow {
    std::string experiment;
    std::string shape;
    std::string algorithm;  // written to the constraint_mode column
    double snr_db = 0.0;
    double distance_m = 0.0;
    double grid_x = 0.0;
    double grid_y = 0.0;
    double mean_sum_rate = 0.0;
    double std_sum_rate = 0.0;
    double convergence_rate = 1.0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::optional<bool> high_snr_valid;
    std::vector<double> per_user_mean;  // not written to CSV
};

/// Mean and sample standard deviation (n - 1; zero for a single value),
/// accumulated in index order.
struct Summary {
    double mean = 0.0;
    double std = 0.0;
};
[[nodiscard]] Summary summarize(const std::vector<double>& values);

/// Calls fn(i) for i in [0, n) on `threads` workers. Results must be written
/// to per-index slots; the first exception thrown by any call is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

/// Header comment lines (each starting with "# ") precede the column header.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, RowAxis axis,
               const std::vector<std::string>& comments = {});
void write_csv_file(const std::string& path, const std::vector<ResultRow>& rows, RowAxis axis,
                    const std::vector<std::string>& comments = {});

/// Rayleigh SNR sweep. Per trial one channel set is drawn and each requested
/// mode solved once with P = 1; rates are then evaluated at every grid point
/// with sigma^2 = 10^(-snr/10). The max_power_backoff arm reuses the
/// unconstrained solution of the same trial.
[[nodiscard]] std::vector<ResultRow> run_snr_sweep(const ExperimentConfig& cfg);

/// Simulated unconstrained and backed-off sweeps plus the predicted back-off
/// curve (unconstrained mean minus expected_rate_loss). Ns must be 1. Every
/// row carries high_snr_valid = (snr >= 30 dB).
[[nodiscard]] std::vector<ResultRow> run_backoff_prediction(const ExperimentConfig& cfg);

/// Single-user baseline: each user is served by the serving-cell RRU with the
/// largest large-scale gain, on the Ns dominant right singular vectors of
/// that RRU's Nr x (Nt/N_RRU) block with power P/N_RRU split equally over the
/// streams. All other cells' transmissions count as interference.
[[nodiscard]] std::vector<Precoder> rru_selection_precoders(const ChannelSet& channels, const SystemShape& shape,
                                                            double total_power);
[[nodiscard]] RateSample rru_selection_baseline(const ChannelSet& channels, const NetworkGeometry& geometry,
                                                const SystemShape& shape, double total_power, double noise_power);

/// Names of the four arms compared in the cell experiments.
inline constexpr const char* kArmColocated = "colocated_ia";
inline constexpr const char* kArmDasBackoff = "das_ia_backoff";
inline constexpr const char* kArmDasStrict = "das_ia_strict";
inline constexpr const char* kArmRruSelection = "rru_selection";

/// Centre-cell user's rate in one network realization under every arm.
struct DropResult {
    Point centre_user;
    double distance_m = 0.0;  // centre user to cell centre
    double colocated = 0.0;
    double das_backoff = 0.0;
    double das_strict = 0.0;
    double rru_selection = 0.0;
    bool colocated_converged = false;
    bool unconstrained_converged = false;
    bool strict_converged = false;
};

/// One 7-cell realization. Channels are normalized by sqrt(P/sigma^2) so the
/// solvers run at unit power and unit noise. `centre_user` overrides the
/// random centre-cell position.
[[nodiscard]] DropResult simulate_drop(const ExperimentConfig& cfg, const RandomSeed& seed,
                                       std::optional<Point> centre_user = std::nullopt);

/// Uniform point in the annulus lo <= r < hi around `center`, restricted to
/// the hexagonal cell.
[[nodiscard]] Point uniform_in_ring(Point center, double radius, double lo, double hi, Rng& rng);

/// Raw drops for the rate-vs-distance experiment, `trials` per distance bin,
/// bin-major. Drop i of bin b uses seed (master, b * trials + i).
[[nodiscard]] std::vector<DropResult> rate_vs_distance_drops(const ExperimentConfig& cfg);
[[nodiscard]] std::vector<ResultRow> summarize_rate_vs_distance(const ExperimentConfig& cfg,
                                                                const std::vector<DropResult>& drops);
[[nodiscard]] std::vector<ResultRow> run_rate_vs_distance(const ExperimentConfig& cfg);

/// Grid points (multiples of grid_step_m) inside the centre cell.
[[nodiscard]] std::vector<Point> cell_grid(const GeometryConfig& geometry);
/// Centre user pinned to each grid point for `trials` drops.
[[nodiscard]] std::vector<ResultRow> run_cell_map(const ExperimentConfig& cfg);

struct CellExperimentResults {
    std::vector<ResultRow> cell_map;
    std::vector<ResultRow> rate_vs_distance;
};
[[nodiscard]] CellExperimentResults run_cell_experiments(const ExperimentConfig& cfg);

/// Every valid shape of the grid, classified in both constraint modes.
[[nodiscard]] std::vector<PropernessReport> properness_table(const PropernessGrid& grid);
void write_properness_text(std::ostream& out, const std::vector<PropernessReport>& table);
void write_properness_csv(std::ostream& out, const std::vector<PropernessReport>& table);

}  // namespace iadas
