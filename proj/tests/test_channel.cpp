#include <doctest.h>

#include <cmath>
#include <vector>

#include "iadas/channel.hpp"
#include "oracles.hpp"

using namespace iadas;

TEST_SUITE("channel") {

TEST_CASE("shape validation") {
    CHECK_NOTHROW((SystemShape{3, 4, 6, 2, 4}.validate()));
    CHECK_THROWS_AS((SystemShape{3, 4, 6, 2, 3}.validate()), InvalidShape);
    CHECK_THROWS_AS((SystemShape{3, 2, 2, 3, 1}.validate()), InvalidShape);
    CHECK_THROWS_AS((SystemShape{0, 2, 2, 1, 1}.validate()), InvalidShape);
    CHECK(SystemShape{3, 4, 6, 2, 4}.label() == "(4x6,2)^3/4");
    CHECK(SystemShape{3, 4, 6, 2, 4}.antennas_per_rru() == 1);
}

TEST_CASE("rayleigh draw dimensions") {
    const ChannelSet c = draw_rayleigh({3, 2, 2, 1, 2}, RandomSeed{1, 1});
    REQUIRE(c.links.size() == 9);
    for (const auto& h : c.links) {
        CHECK(h.rows() == 2);
        CHECK(h.cols() == 2);
        CHECK(h.allFinite());
    }
    CHECK_FALSE(c.has_large_scale_gain());
}

TEST_CASE("rayleigh entries are standard complex gaussian") {
    std::vector<Complex> pooled;
    for (std::uint64_t t = 0; pooled.size() < 100000; ++t) {
        const ChannelSet c = draw_rayleigh({3, 6, 6, 1, 1}, RandomSeed{2, t});
        for (const auto& h : c.links)
            for (Eigen::Index i = 0; i < h.size(); ++i) pooled.push_back(h(i));
    }
    Complex mean = 0.0;
    for (auto z : pooled) mean += z;
    mean /= static_cast<double>(pooled.size());
    double var = 0.0;
    for (auto z : pooled) var += std::norm(z - mean);
    var /= static_cast<double>(pooled.size() - 1);
    CHECK(std::abs(mean) <= 0.02);
    CHECK(var >= 0.98);
    CHECK(var <= 1.02);
}

TEST_CASE("rayleigh draw is deterministic per seed") {
    const SystemShape s{3, 4, 6, 2, 4};
    const ChannelSet a = draw_rayleigh(s, RandomSeed{9, 3});
    const ChannelSet b = draw_rayleigh(s, RandomSeed{9, 3});
    for (std::size_t i = 0; i < a.links.size(); ++i) CHECK(a.links[i] == b.links[i]);
    CHECK(draw_rayleigh(s, RandomSeed{9, 4}).links[0] != a.links[0]);
}

TEST_CASE("cluster geometry for R = 300") {
    const NetworkGeometry g = build_geometry(300.0, 7, RandomSeed{1, 0});
    REQUIRE(g.cell_centers.size() == 7);
    REQUIRE(g.rru_offsets.size() == 5);
    bool has_200 = false;
    for (const Point& o : g.rru_offsets) {
        if (std::abs(o.x - 200.0) < 1e-12 && std::abs(o.y) < 1e-12) has_200 = true;
        const double r = std::hypot(o.x, o.y);
        CHECK((r < 1e-12 || std::abs(r - 200.0) < 1e-9));
    }
    CHECK(has_200);
    CHECK(g.cell_centers[0].x == 0.0);
    CHECK(g.cell_centers[0].y == 0.0);
    for (int c = 1; c < 7; ++c)
        CHECK(distance(g.cell_centers[0], g.cell_centers[static_cast<std::size_t>(c)]) ==
              doctest::Approx(300.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(distance(g.cell_centers[1], g.cell_centers[2]) == doctest::Approx(519.6152422706632).epsilon(1e-12));
    CHECK_THROWS_AS((void)build_geometry(300.0, 3, RandomSeed{1, 0}), UnsupportedTopology);
}

TEST_CASE("users are uniform over their hexagonal cells") {
    constexpr double R = 300.0;
    double sum_r = 0.0;
    int n = 0;
    int inside = 0;
    for (std::uint64_t t = 0; n < 10000; ++t) {
        const NetworkGeometry g = build_geometry(R, 7, RandomSeed{4, t});
        for (int k = 0; k < 7 && n < 10000; ++k, ++n) {
            const Point c = g.cell_centers[static_cast<std::size_t>(k)];
            const Point u = g.user_positions[static_cast<std::size_t>(k)];
            inside += inside_hexagon(u, c, R) ? 1 : 0;
            sum_r += distance(u, c);
        }
    }
    CHECK(inside == n);
    CHECK(sum_r / n == doctest::Approx(oracle::hexagon_mean_radius(R)).epsilon(0.01));
}

TEST_CASE("pathloss at reference distance and distance doubling") {
    PropagationParams p;
    p.shadow_std_db = 0.0;
    NetworkGeometry g = build_geometry(300.0, 7, RandomSeed{5, 0}, p);
    g.user_positions[0] = g.rru_position(0, 1);  // on top of RRU 1 of the centre cell
    const SystemShape s{7, 15, 5, 2, 5};
    const double ref = std::pow(10.0, -p.reference_loss_db / 10.0);

    const ChannelSet c = draw_das_channels(g, s, RandomSeed{5, 1});
    CHECK(c.gain(0, 0, 1) == doctest::Approx(ref).epsilon(1e-12));

    // per-entry variance of that RRU block over many fading draws
    double power = 0.0;
    int entries = 0;
    for (std::uint64_t t = 0; t < 4000; ++t) {
        const ChannelSet d = draw_das_channels(g, s, RandomSeed{6, t});
        power += d.at(0, 0).middleCols(3, 3).squaredNorm();
        entries += 15;
    }
    CHECK(power / entries == doctest::Approx(ref).epsilon(0.03));

    NetworkGeometry near = g;
    NetworkGeometry far = g;
    near.user_positions[0] = {40.0, 0.0};
    far.user_positions[0] = {80.0, 0.0};
    const ChannelSet cn = draw_das_channels(near, s, RandomSeed{7, 0});
    const ChannelSet cf = draw_das_channels(far, s, RandomSeed{7, 0});
    CHECK(cf.gain(0, 0, 0) / cn.gain(0, 0, 0) == doctest::Approx(std::pow(2.0, -3.7)).epsilon(1e-12));
}

TEST_CASE("shadowing residual has the configured spread") {
    const PropagationParams p;  // 8 dB
    std::vector<double> residual;
    const SystemShape s{7, 5, 2, 1, 5};
    for (std::uint64_t t = 0; residual.size() < 100000; ++t) {
        const NetworkGeometry g = build_geometry(300.0, 7, RandomSeed{8, t}, p);
        const ChannelSet c = draw_das_channels(g, s, RandomSeed{9, t});
        for (int k = 0; k < 7; ++k)
            for (int l = 0; l < 7; ++l)
                for (int r = 0; r < 5; ++r) {
                    const double d = distance(g.user_positions[static_cast<std::size_t>(k)], g.rru_position(l, r));
                    residual.push_back(10.0 * std::log10(c.gain(k, l, r)) - pathloss_gain_db(d, p));
                }
    }
    double mean = 0.0;
    for (double v : residual) mean += v;
    mean /= static_cast<double>(residual.size());
    double var = 0.0;
    for (double v : residual) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(residual.size() - 1));
    CHECK(std::abs(sd - 8.0) <= 0.1);
    CHECK(std::abs(mean) <= 0.1);
}

TEST_CASE("RRU blocks carry their own gain and DAS draws are deterministic") {
    const NetworkGeometry g = build_geometry(300.0, 7, RandomSeed{10, 0});
    const SystemShape s{7, 15, 5, 2, 5};
    const ChannelSet a = draw_das_channels(g, s, RandomSeed{10, 1});
    const ChannelSet b = draw_das_channels(g, s, RandomSeed{10, 1});
    for (std::size_t i = 0; i < a.links.size(); ++i) CHECK(a.links[i] == b.links[i]);
    CHECK(a.large_scale_gain == b.large_scale_gain);
    CHECK(a.large_scale_gain.size() == 7u * 7u * 5u);
    // distinct RRUs of one link see different large-scale gains
    CHECK(a.gain(0, 0, 0) != a.gain(0, 0, 1));

    const ChannelSet scaled = a.scaled(2.0);
    CHECK((scaled.at(1, 2) - 2.0 * a.at(1, 2)).norm() == 0.0);
    CHECK(scaled.gain(1, 2, 3) == doctest::Approx(4.0 * a.gain(1, 2, 3)));
}

TEST_CASE("geometry and shape must agree") {
    const NetworkGeometry g = build_geometry(300.0, 7, RandomSeed{11, 0});
    CHECK_THROWS_AS((void)draw_das_channels(g, SystemShape{7, 15, 5, 2, 3}, RandomSeed{}), GeometryMismatch);
    CHECK_THROWS_AS((void)draw_das_channels(g, SystemShape{8, 15, 5, 2, 5}, RandomSeed{}), GeometryMismatch);
    CHECK_NOTHROW((void)draw_das_channels(g.colocated(), SystemShape{7, 15, 5, 2, 1}, RandomSeed{}));
}

}  // TEST_SUITE
