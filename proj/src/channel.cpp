#include "iadas/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iadas {

namespace {

constexpr std::uint64_t kShadowSalt = 0x5ad0;
constexpr std::uint64_t kFadingSalt = 0xfad1;

}  // namespace

void SystemShape::validate() const {
    if (users < 1 || tx_antennas < 1 || rx_antennas < 1 || streams < 1 || rrus < 1)
        throw InvalidShape("shape fields must all be >= 1: " + label());
    if (tx_antennas % rrus != 0) throw InvalidShape("rrus must divide tx_antennas: " + label());
    if (streams > std::min(tx_antennas, rx_antennas)) throw InvalidShape("streams exceed min(Nt, Nr): " + label());
}

std::string SystemShape::label() const {
    return "(" + std::to_string(tx_antennas) + "x" + std::to_string(rx_antennas) + "," + std::to_string(streams) +
           ")^" + std::to_string(users) + "/" + std::to_string(rrus);
}

void PowerConfig::validate() const {
    if (!(total_power > 0.0) || !(noise_power > 0.0)) throw DomainError("power and noise must be strictly positive");
}

ChannelSet ChannelSet::scaled(double factor) const {
    ChannelSet out = *this;
    for (auto& h : out.links) h *= factor;
    for (auto& g : out.large_scale_gain) g *= factor * factor;
    return out;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point NetworkGeometry::rru_position(int cell, int rru) const {
    const Point c = cell_centers.at(static_cast<std::size_t>(cell));
    const Point o = rru_offsets.at(static_cast<std::size_t>(rru));
    return {c.x + o.x, c.y + o.y};
}

NetworkGeometry NetworkGeometry::colocated() const {
    NetworkGeometry g = *this;
    g.rru_offsets = {Point{0.0, 0.0}};
    return g;
}

bool inside_hexagon(Point p, Point center, double radius) {
    const double apothem = radius * std::sqrt(3.0) / 2.0;
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    for (int j = 0; j < 6; ++j) {
        const double a = std::numbers::pi / 6.0 + j * std::numbers::pi / 3.0;
        if (dx * std::cos(a) + dy * std::sin(a) > apothem * (1.0 + 1e-12)) return false;
    }
    return true;
}

Point uniform_in_hexagon(Point center, double radius, Rng& rng) {
    const double half_height = radius * std::sqrt(3.0) / 2.0;
    std::uniform_real_distribution<double> ux(-radius, radius);
    std::uniform_real_distribution<double> uy(-half_height, half_height);
    for (;;) {
        const Point p{center.x + ux(rng), center.y + uy(rng)};
        if (inside_hexagon(p, center, radius)) return p;
    }
}

ChannelSet draw_rayleigh(const SystemShape& shape, const RandomSeed& seed) {
    shape.validate();
    Rng rng = make_rng(seed);
    ChannelSet set;
    set.shape = shape;
    set.links.reserve(static_cast<std::size_t>(shape.users * shape.users));
    for (int i = 0; i < shape.users * shape.users; ++i)
        set.links.push_back(complex_gaussian_matrix(shape.rx_antennas, shape.tx_antennas, rng));
    return set;
}

NetworkGeometry build_geometry(double cell_radius, int users, const RandomSeed& seed, PropagationParams propagation) {
    if (users != kClusterCells) throw UnsupportedTopology("the DAS cluster supports exactly 7 users (one per cell)");
    if (!(cell_radius > 0.0)) throw DomainError("cell radius must be positive");

    NetworkGeometry g;
    g.cell_radius = cell_radius;
    g.propagation = propagation;
    g.cell_centers.push_back({0.0, 0.0});
    const double spacing = std::sqrt(3.0) * cell_radius;
    for (int j = 0; j < 6; ++j) {
        const double a = std::numbers::pi / 6.0 + j * std::numbers::pi / 3.0;
        g.cell_centers.push_back({spacing * std::cos(a), spacing * std::sin(a)});
    }
    const double ring = 2.0 * cell_radius / 3.0;
    g.rru_offsets = {{0.0, 0.0}, {ring, 0.0}, {0.0, ring}, {-ring, 0.0}, {0.0, -ring}};

    Rng rng = make_rng(seed);
    for (const Point& c : g.cell_centers) g.user_positions.push_back(uniform_in_hexagon(c, cell_radius, rng));
    return g;
}

double pathloss_gain_db(double distance_m, const PropagationParams& p) {
    const double d = std::max(distance_m, p.min_distance_m);
    return -(p.reference_loss_db + 10.0 * p.pathloss_exponent * std::log10(d));
}

ChannelSet draw_das_channels(const NetworkGeometry& geom, const SystemShape& shape, const RandomSeed& seed) {
    shape.validate();
    if (static_cast<int>(geom.rru_offsets.size()) != shape.rrus)
        throw GeometryMismatch("geometry has " + std::to_string(geom.rru_offsets.size()) + " RRU offsets, shape needs " +
                               std::to_string(shape.rrus));
    if (static_cast<int>(geom.user_positions.size()) < shape.users ||
        static_cast<int>(geom.cell_centers.size()) < shape.users)
        throw GeometryMismatch("geometry has fewer cells/users than the shape");

    const int k_users = shape.users;
    const int per_rru = shape.antennas_per_rru();
    Rng shadow_rng = make_rng(seed.derive(kShadowSalt));
    Rng fading_rng = make_rng(seed.derive(kFadingSalt));
    std::normal_distribution<double> shadow(0.0, 1.0);

    ChannelSet set;
    set.shape = shape;
    set.large_scale_gain.resize(static_cast<std::size_t>(k_users * k_users * shape.rrus));
    for (int k = 0; k < k_users; ++k) {
        for (int l = 0; l < k_users; ++l) {
            for (int r = 0; r < shape.rrus; ++r) {
                const double d = distance(geom.user_positions[static_cast<std::size_t>(k)], geom.rru_position(l, r));
                const double db = pathloss_gain_db(d, geom.propagation) + geom.propagation.shadow_std_db * shadow(shadow_rng);
                set.large_scale_gain[static_cast<std::size_t>((k * k_users + l) * shape.rrus + r)] = std::pow(10.0, db / 10.0);
            }
        }
    }
    set.links.reserve(static_cast<std::size_t>(k_users * k_users));
    for (int k = 0; k < k_users; ++k) {
        for (int l = 0; l < k_users; ++l) {
            ComplexMatrix h = complex_gaussian_matrix(shape.rx_antennas, shape.tx_antennas, fading_rng);
            for (int r = 0; r < shape.rrus; ++r) h.middleCols(r * per_rru, per_rru) *= std::sqrt(set.gain(k, l, r));
            set.links.push_back(std::move(h));
        }
    }
    return set;
}

}  // namespace iadas
