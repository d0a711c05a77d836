#include <doctest.h>

#include <functional>

#include "iadas/feasibility.hpp"

using namespace iadas;

namespace {

// Every valid shape with K in [2,8], Nt, Nr in [1,12], Ns in [1,4], N_RRU | Nt.
void for_each_shape(const std::function<void(const SystemShape&)>& fn) {
    for (int k = 2; k <= 8; ++k)
        for (int nt = 1; nt <= 12; ++nt)
            for (int nr = 1; nr <= 12; ++nr)
                for (int ns = 1; ns <= std::min({4, nt, nr}); ++ns)
                    for (int rr = 1; rr <= nt; ++rr)
                        if (nt % rr == 0) fn(SystemShape{k, nt, nr, ns, rr});
}

}  // namespace

TEST_SUITE("feasibility") {

TEST_CASE("free variable counts") {
    CHECK(count_free_variables({3, 4, 6, 2, 4}) == 36);
    CHECK(count_free_variables({3, 2, 2, 1, 2}) == 6);
    CHECK(count_free_variables({3, 2, 2, 2, 1}) == 0);
    CHECK(count_free_variables({4, 4, 4, 4, 1}) == 0);
}

TEST_CASE("alignment equation counts") {
    CHECK(count_alignment_equations({3, 2, 2, 1, 2}) == 6);
    CHECK(count_alignment_equations({3, 4, 6, 2, 4}) == 24);
    CHECK(count_alignment_equations({1, 4, 4, 2, 2}) == 0);
}

TEST_CASE("power equation counts") {
    CHECK(count_power_equations({3, 4, 6, 2, 4}) == 6);
    CHECK(count_power_equations({3, 2, 2, 1, 2}) == 3);
    CHECK(count_power_equations({3, 4, 6, 2, 2}) == 0);
    CHECK(count_power_equations({3, 6, 6, 3, 1}) == 0);
}

TEST_CASE("classification examples") {
    const auto small = is_proper({3, 2, 2, 1, 2}, ConstraintMode::strict_per_rru);
    CHECK_FALSE(small.proper_strict);
    CHECK(is_proper({3, 2, 2, 1, 2}, ConstraintMode::unconstrained).proper_unconstrained);
    CHECK(classify(small) == FeasibilityClass::feasible_unconstrained_only);
    CHECK(std::string(to_string(classify(small))) == "feasible only without per-RRU constraints");

    const auto mid = is_proper({3, 4, 6, 2, 4});
    CHECK(mid.proper_strict);
    CHECK(classify(mid) == FeasibilityClass::strictly_feasible);

    const auto seven = is_proper({7, 4, 5, 1, 4});
    CHECK(seven.proper_unconstrained);
    CHECK_FALSE(seven.proper_strict);
    CHECK(classify(seven) == FeasibilityClass::feasible_unconstrained_only);

    CHECK(classify(is_proper({3, 2, 2, 2, 1})) == FeasibilityClass::infeasible);
}

TEST_CASE("inequality and direct count comparison agree on the whole grid") {
    int mismatches = 0;
    int shapes = 0;
    for_each_shape([&](const SystemShape& s) {
        ++shapes;
        const bool counted = count_free_variables(s) >= count_alignment_equations(s) + count_power_equations(s);
        if (counted != strict_properness_inequality(s)) ++mismatches;
        const PropernessReport r = is_proper(s);
        if (r.proper_strict != counted) ++mismatches;
        if (r.proper_unconstrained != unconstrained_properness_inequality(s)) ++mismatches;
        if (r.proper_unconstrained != (count_free_variables(s) >= count_alignment_equations(s))) ++mismatches;
    });
    CHECK(shapes > 9000);
    CHECK(mismatches == 0);
}

TEST_CASE("strict properness implies unconstrained properness") {
    int violations = 0;
    for_each_shape([&](const SystemShape& s) {
        const auto r = is_proper(s);
        if (r.proper_strict && !r.proper_unconstrained) ++violations;
    });
    CHECK(violations == 0);
}

TEST_CASE("single stream per-antenna systems are strictly proper iff Nr >= K") {
    for (int k = 2; k <= 8; ++k)
        for (int nt = 1; nt <= 8; ++nt)
            for (int nr = 1; nr <= 8; ++nr) CHECK(is_proper({k, nt, nr, 1, nt}).proper_strict == (nr >= k));
}

TEST_CASE("moving an antenna from receiver to transmitter can break strict properness") {
    bool witness = false;
    for_each_shape([&](const SystemShape& s) {
        if (witness || s.rx_antennas < 2 || s.rrus != s.tx_antennas) return;
        // per-antenna partition in both shapes
        const SystemShape moved{s.users, s.tx_antennas + 1, s.rx_antennas - 1, s.streams, s.tx_antennas + 1};
        if (moved.streams > std::min(moved.tx_antennas, moved.rx_antennas)) return;
        if (is_proper(s).proper_strict && !is_proper(moved).proper_strict) witness = true;
    });
    CHECK(witness);
}

TEST_CASE("adding receive antennas never breaks properness") {
    int flips = 0;
    for_each_shape([&](const SystemShape& s) {
        if (s.rx_antennas >= 12) return;
        SystemShape more = s;
        more.rx_antennas += 1;
        const auto a = is_proper(s);
        const auto b = is_proper(more);
        if (a.proper_strict && !b.proper_strict) ++flips;
        if (a.proper_unconstrained && !b.proper_unconstrained) ++flips;
    });
    CHECK(flips == 0);
}

}  // TEST_SUITE
