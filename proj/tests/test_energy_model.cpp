#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tautsched/energy_model.hpp"
#include "tautsched/workload.hpp"

using namespace tautsched;
using Catch::Approx;

TEST_CASE("power_of_rate closed forms") {
    EnergyModel us = EnergyModel::unit_shannon(1.0);
    CHECK(power_of_rate(us, 0.0) == 0.0);
    CHECK(power_of_rate(us, 0.5) == Approx(1.0).margin(1e-15));

    EnergyModel bl = EnergyModel::bandlimited_shannon(1000.0, 1.0, 2.0);
    CHECK(power_of_rate(bl, 0.0) == 0.0);
    CHECK(power_of_rate(bl, 1000.0) == Approx(500.0).epsilon(1e-12));

    EnergyModel mono = EnergyModel::monomial(2.0);
    CHECK(power_of_rate(mono, 0.0) == 0.0);
    CHECK(power_of_rate(mono, 3.0) == Approx(9.0));

    CHECK_THROWS_AS(power_of_rate(us, -0.1), std::domain_error);
}

TEST_CASE("rate_of_power inverts the map") {
    EnergyModel us1 = EnergyModel::unit_shannon(1.0);
    CHECK(rate_of_power(us1, 0.0) == 0.0);
    CHECK(rate_of_power(us1, 1.0) == Approx(0.5).epsilon(1e-14));

    EnergyModel us3 = EnergyModel::unit_shannon(3.0);
    CHECK(rate_of_power(us3, 9.0) == Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(rate_of_power(us1, -1.0), std::domain_error);
}

TEST_CASE("round trip rate -> power -> rate within 1e-12 relative") {
    Rng rng(7);
    for (const EnergyModel& m :
         {EnergyModel::unit_shannon(0.7), EnergyModel::bandlimited_shannon(1000.0, 1.0, 2.0),
          EnergyModel::monomial(2.0)}) {
        double top = m.kind == ModelKind::BandlimitedShannon ? 20.0 * m.bandwidth_hz : 20.0;
        for (int i = 0; i < 2000; ++i) {
            double r = top * rng.uniform01();
            double back = rate_of_power(m, power_of_rate(m, r));
            CHECK(back == Approx(r).epsilon(1e-12).margin(1e-12));
        }
    }
}

TEST_CASE("strict monotonicity and convexity on sampled points") {
    Rng rng(11);
    for (const EnergyModel& m :
         {EnergyModel::unit_shannon(1.0), EnergyModel::unit_shannon(2.5),
          EnergyModel::bandlimited_shannon(1000.0, 1.0, 2.0), EnergyModel::monomial(2.0),
          EnergyModel::monomial(3.0)}) {
        double top = m.kind == ModelKind::BandlimitedShannon ? 10.0 * m.bandwidth_hz : 10.0;
        for (int i = 0; i < 10000; ++i) {
            double r1 = top * rng.uniform01();
            double r2 = top * rng.uniform01();
            if (r1 > r2) std::swap(r1, r2);
            if (r2 - r1 > 1e-12) CHECK(power_of_rate(m, r1) < power_of_rate(m, r2));
            double theta = rng.uniform01();
            double mid = power_of_rate(m, theta * r1 + (1.0 - theta) * r2);
            double chord = theta * power_of_rate(m, r1) + (1.0 - theta) * power_of_rate(m, r2);
            CHECK(mid <= chord * (1.0 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("schedule_energy sums closed-form segment energies") {
    EnergyModel us = EnergyModel::unit_shannon(1.0);
    CHECK(schedule_energy(us, Schedule{}) == 0.0);

    Schedule one;
    one.segments = {{0.0, 4.0, 0.5}};
    CHECK(schedule_energy(us, one) == Approx(4.0).epsilon(1e-14));

    Schedule two;
    two.segments = {{0.0, 1.0, 1.0}, {1.0, 3.0, 0.5}};
    CHECK(schedule_energy(us, two) == Approx(5.0).epsilon(1e-14));

    Schedule bad;
    bad.segments = {{0.0, 2.0, 1.0}, {1.0, 3.0, 1.0}};
    CHECK_THROWS_AS(schedule_energy(us, bad), validation_error);

    Schedule negdur;
    negdur.segments = {{2.0, 1.0, 1.0}};
    CHECK_THROWS_AS(schedule_energy(us, negdur), validation_error);
}

TEST_CASE("constant rate beats any split of the same bits over the same window") {
    Rng rng(23);
    EnergyModel us = EnergyModel::unit_shannon(1.0);
    EnergyModel mono = EnergyModel::monomial(2.0);
    for (int trial = 0; trial < 500; ++trial) {
        double duration = 0.5 + 4.0 * rng.uniform01();
        double bits = 0.5 + 5.0 * rng.uniform01();
        int pieces = 2 + static_cast<int>(rng.uniform01() * 4);

        // random piecewise profile carrying the same bits over the same time
        std::vector<double> cuts{0.0, duration};
        for (int i = 0; i < pieces - 1; ++i) cuts.push_back(duration * rng.uniform01());
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> weights;
        double wsum = 0.0;
        for (int i = 0; i < pieces; ++i) {
            weights.push_back(0.05 + rng.uniform01());
            wsum += weights.back();
        }
        Schedule split;
        for (int i = 0; i < pieces; ++i) {
            double t0 = cuts[i], t1 = cuts[i + 1];
            if (t1 - t0 < 1e-9) continue;
            double piece_bits = bits * weights[i] / wsum;
            split.segments.push_back({t0, t1, piece_bits / (t1 - t0)});
        }
        Schedule flat;
        flat.segments = {{0.0, duration, bits / duration}};
        for (const auto& m : {us, mono})
            CHECK(schedule_energy(m, flat) <= schedule_energy(m, split) * (1.0 + 1e-12) + 1e-12);
    }
}
