#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iadas/alignment.hpp"
#include "iadas/metrics.hpp"

namespace iadas {

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Power-constraint handling used by an experiment arm.
enum class PowerMode { unconstrained, max_power_backoff, strict_per_rru };
enum class ChannelModel { rayleigh, das };

[[nodiscard]] const char* to_string(PowerMode m);
[[nodiscard]] const char* to_string(ChannelModel m);

struct GeometryConfig {
    double cell_radius = 300.0;
    PropagationParams propagation;
    std::vector<double> distance_bins_m{0.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0};
    double grid_step_m = 30.0;
    /// Apply per-antenna maximum-power back-off to the co-located baseline.
    bool colocated_per_antenna = false;
};

/// Shapes enumerated by the `properness` table.
struct PropernessGrid {
    std::vector<int> users{3, 4};
    std::vector<int> tx_antennas{2, 3, 4, 5, 6, 7, 8};
    std::vector<int> rx_antennas{2, 3, 4, 5, 6, 7, 8};
    std::vector<int> streams{1, 2};
    /// Explicit RRU counts; 0 stands for "one RRU per antenna" (N_RRU = Nt).
    std::vector<int> rrus{0, 2};
};

struct ExperimentConfig {
    SystemShape shape{3, 4, 6, 2, 4};
    std::vector<PowerMode> modes{PowerMode::unconstrained, PowerMode::strict_per_rru};
    ChannelModel channel_model = ChannelModel::rayleigh;
    std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    int trials = 200;
    std::uint64_t master_seed = 1;
    /// DAS link budget; Rayleigh sweeps use P = 1 and sigma^2 = 10^(-snr/10).
    double total_power_dbm = 46.0;
    double noise_power_dbm = -106.0;
    GeometryConfig geometry;
    SolverOptions solver;
    ExponentVariant backoff_exponent = ExponentVariant::tx_antennas;
    ChiSquareConvention backoff_convention = ChiSquareConvention::complex;
    PropernessGrid properness;
    std::string output_path;
    int threads = 1;

    /// Throws ConfigError on illegal combinations.
    void validate() const;
};

/// Parses an INI-style file with sections [experiment], [shape], [power],
/// [geometry], [solver], [backoff] and [properness]. Keys that are not listed
/// in the README are rejected with ConfigError. Missing keys keep their
/// defaults; solver.tol defaults to 1e-6 for DAS runs when not given.
[[nodiscard]] ExperimentConfig load_config(const std::string& path);
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);

[[nodiscard]] double dbm_to_watts(double dbm);

}  // namespace iadas
