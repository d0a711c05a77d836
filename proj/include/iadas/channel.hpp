#pragma once

#include <array>
#include <string>
#include <vector>

#include "iadas/mathcore.hpp"

namespace iadas {

class InvalidShape : public Error {
public:
    using Error::Error;
};

class UnsupportedTopology : public Error {
public:
    using Error::Error;
};

class GeometryMismatch : public Error {
public:
    using Error::Error;
};

/// Symmetric (Nt x Nr, Ns)^K network whose transmitters each split their Nt
/// antennas evenly over `rrus` remote radio units.
struct SystemShape {
    int users = 1;        // K
    int tx_antennas = 1;  // Nt
    int rx_antennas = 1;  // Nr
    int streams = 1;      // Ns
    int rrus = 1;         // N_RRU

    /// Throws InvalidShape if any field is < 1, rrus does not divide
    /// tx_antennas, or streams exceeds min(Nt, Nr).
    void validate() const;
    [[nodiscard]] int antennas_per_rru() const { return tx_antennas / rrus; }
    /// "(4x6,2)^3" style label; rrus appended as "/4".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const SystemShape&, const SystemShape&) = default;
};

struct PowerConfig {
    double total_power = 1.0;  // P per transmitter, linear
    double noise_power = 1.0;  // sigma^2 per receive antenna, linear
    void validate() const;
};

/// K x K grid of Nr x Nt channels; at(k, l) is the channel from transmitter l
/// to receiver k.
struct ChannelSet {
    SystemShape shape;
    std::vector<ComplexMatrix> links;
    /// Linear large-scale gains g[k][l][r] (flattened); empty for Rayleigh draws.
    std::vector<double> large_scale_gain;

    [[nodiscard]] const ComplexMatrix& at(int k, int l) const {
        return links[static_cast<std::size_t>(k * shape.users + l)];
    }
    [[nodiscard]] ComplexMatrix& at(int k, int l) { return links[static_cast<std::size_t>(k * shape.users + l)]; }
    [[nodiscard]] double gain(int k, int l, int r) const {
        return large_scale_gain[static_cast<std::size_t>((k * shape.users + l) * shape.rrus + r)];
    }
    [[nodiscard]] bool has_large_scale_gain() const { return !large_scale_gain.empty(); }

    /// Every link multiplied by `factor` (gains scaled by factor^2).
    [[nodiscard]] ChannelSet scaled(double factor) const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

[[nodiscard]] double distance(Point a, Point b);

struct PropagationParams {
    double reference_loss_db = 38.5;  // loss at 1 m
    double pathloss_exponent = 3.7;
    double shadow_std_db = 8.0;
    double min_distance_m = 1.0;
};

/// Seven-cell hexagonal cluster, centre cell at the origin and one user per
/// cell. Cell i serves user i; cell 0 is the centre cell.
struct NetworkGeometry {
    double cell_radius = 300.0;
    std::vector<Point> cell_centers;
    std::vector<Point> rru_offsets;  // relative to each cell centre
    std::vector<Point> user_positions;
    PropagationParams propagation;

    [[nodiscard]] Point rru_position(int cell, int rru) const;
    /// Same cells and users with all transmit antennas at each cell centre.
    [[nodiscard]] NetworkGeometry colocated() const;
};

inline constexpr int kClusterCells = 7;

/// Regular hexagon of circumradius R (vertices at azimuths 0, 60, ... deg).
[[nodiscard]] bool inside_hexagon(Point p, Point center, double radius);
[[nodiscard]] Point uniform_in_hexagon(Point center, double radius, Rng& rng);

/// Rayleigh channels: every entry i.i.d. CN(0,1).
[[nodiscard]] ChannelSet draw_rayleigh(const SystemShape& shape, const RandomSeed& seed);

/// Hexagonal 7-cell cluster with adjacent centres sqrt(3)*R apart, RRUs at the
/// cell centre plus four at 2R/3 (azimuths 0, 90, 180, 270 deg) and one user
/// uniform over each cell. Throws UnsupportedTopology unless users == 7.
[[nodiscard]] NetworkGeometry build_geometry(double cell_radius, int users, const RandomSeed& seed,
                                             PropagationParams propagation = {});

/// Large-scale gain in dB for one RRU-user link before shadowing.
[[nodiscard]] double pathloss_gain_db(double distance_m, const PropagationParams& p);

/// Pathloss + lognormal shadowing + Rayleigh channels. The Nt/N_RRU columns of
/// RRU r in link (k, l) share one large-scale gain. Throws GeometryMismatch if
/// the geometry does not carry shape.rrus offsets or enough users/cells.
[[nodiscard]] ChannelSet draw_das_channels(const NetworkGeometry& geom, const SystemShape& shape,
                                           const RandomSeed& seed);

}  // namespace iadas
