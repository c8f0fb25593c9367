#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "tautsched/oracle.hpp"
#include "tautsched/workload.hpp"

using namespace tautsched;
using Catch::Approx;
using tshelp::make_seq;

namespace {
const EnergyModel kUnit = EnergyModel::unit_shannon(1.0);
}

TEST_CASE("grid oracle endpoints and argument checks") {
    auto seq = make_seq({{2, 0, 4}, {1, 1, 2}});

    // two grid points degenerate to comparing the pure orders
    auto two = grid_split_oracle(seq, 1, kUnit, 2);
    double e0 = schedule_energy(kUnit, schedule_fifo(split_and_reorder(seq, 1, 0.0).sequence));
    double eb = schedule_energy(kUnit, schedule_fifo(split_and_reorder(seq, 1, 2.0).sequence));
    CHECK(two.energy == Approx(std::min(e0, eb)));

    CHECK_THROWS_AS(grid_split_oracle(make_seq({{1, 0, 1}, {1, 1, 2}}), 1, kUnit, 101),
                    std::invalid_argument);
    CHECK_THROWS_AS(grid_split_oracle(seq, 1, kUnit, 1), std::invalid_argument);
}

TEST_CASE("discrete oracle reproduces forced constant rates") {
    auto one = make_seq({{1, 0, 1}});
    CHECK(discrete_convex_oracle(one, kUnit, 100) ==
          Approx(power_of_rate(kUnit, 1.0)).epsilon(1e-6));

    // vanishing packet size drives energy to zero
    auto tiny = make_seq({{1e-9, 0, 1}});
    CHECK(discrete_convex_oracle(tiny, kUnit, 100) == Approx(0.0).margin(1e-8));

    CHECK(discrete_convex_oracle(PacketSequence{}, kUnit, 100) == 0.0);
    CHECK_THROWS_AS(discrete_convex_oracle(make_seq({{2, 0, 4}, {1, 1, 2}}), kUnit, 4000),
                    std::invalid_argument);
    CHECK_THROWS_AS(discrete_convex_oracle(one, kUnit, 4), std::invalid_argument);
}

TEST_CASE("discrete oracle matches the taut string on the two-packet instance") {
    auto seq = make_seq({{2, 0, 3}, {1, 2, 4}});
    double taut = schedule_energy(kUnit, schedule_fifo(seq));
    double oracle = discrete_convex_oracle(seq, kUnit, 4000);
    CHECK(std::abs(taut - oracle) / oracle < 1e-3);
}

TEST_CASE("discretization self-consistency: halving the step barely moves the result") {
    Rng rng(139);
    for (int t = 0; t < 12; ++t) {
        auto seq = tshelp::random_fifo(rng);
        double coarse = discrete_convex_oracle(seq, kUnit, 1000);
        double fine = discrete_convex_oracle(seq, kUnit, 2000);
        CHECK(std::abs(coarse - fine) <= 5e-4 * std::max(fine, 1e-12));
    }
}

TEST_CASE("discrete oracle works for every model family") {
    auto seq = make_seq({{2, 0, 3}, {1, 2, 4}});
    for (const EnergyModel& m :
         {EnergyModel::unit_shannon(2.0), EnergyModel::bandlimited_shannon(10.0, 1.0, 2.0),
          EnergyModel::monomial(2.0), EnergyModel::monomial(3.0)}) {
        double taut = schedule_energy(m, schedule_fifo(seq));
        double oracle = discrete_convex_oracle(seq, m, 2000);
        CHECK(std::abs(taut - oracle) <= 2e-3 * std::max(taut, 1e-12));
    }
}

TEST_CASE("grid oracle certifies the scheduler on random instances") {
    Rng rng(149);
    for (int t = 0; t < 60; ++t) {
        auto [seq, j] = tshelp::random_nonfifo(rng);
        auto best = grid_split_oracle(seq, j, kUnit, 501);
        double cascade = schedule_energy(kUnit, schedule_non_fifo(seq, kUnit).schedule);
        CHECK(cascade <= best.energy * (1.0 + 1e-6));
        // the oracle itself can never beat the exact optimum by more than
        // its grid resolution allows
        CHECK(best.energy >= cascade * (1.0 - 1e-9));
    }
}
