#include <doctest.h>

#include "lanesim/metrics.hpp"

using namespace lanesim;

TEST_CASE("crossings: a stationary vehicle at the loop never registers") {
    LoopDetectors detectors({100.0});
    std::vector<VehicleTrace> traces = {{1, 0, 100.0, 100.0, 0.0}};
    for (long t = 0; t < 50; ++t) detectors.record(t, traces);
    CHECK(detectors.loops()[0].crossings.empty());
}

TEST_CASE("crossings: half a meter short at 20 m/s crosses this step") {
    LoopDetectors detectors({100.0});
    std::vector<VehicleTrace> traces = {{7, 0, 99.5, 101.5, 20.0}};
    detectors.record(42, traces);
    REQUIRE(detectors.loops()[0].crossings.size() == 1);
    CHECK(detectors.loops()[0].crossings[0].step == 42);
    CHECK(detectors.loops()[0].crossings[0].vehicle_id == 7);
    CHECK(detectors.loops()[0].crossings[0].speed == 20.0);
}

TEST_CASE("crossings: n vehicles passing once each count n") {
    LoopDetectors detectors({50.0});
    for (long t = 0; t < 30; ++t) {
        std::vector<VehicleTrace> traces;
        for (int i = 0; i < 10; ++i) {
            const double x0 = 45.0 + static_cast<double>(t * 2) - i * 3.0;
            traces.push_back({i, 0, x0, x0 + 2.0, 20.0});
        }
        detectors.record(t, traces);
    }
    CHECK(detectors.loops()[0].crossings.size() == 10);
}

TEST_CASE("aggregate: uniform platoon reproduces the q = k v identity") {
    // one crossing every 2 s at 20 m/s
    LoopDetectors detectors({200.0});
    for (long k = 0; k < 40; ++k) {
        std::vector<VehicleTrace> traces = {{static_cast<int>(k), 0, 199.0, 201.0, 20.0}};
        detectors.record(k * 20, traces);
    }
    const FlowDensityRecord rec = aggregate(detectors.loops()[0], 0, 0, 300, 0.1);
    CHECK(rec.flow_veh_per_h == doctest::Approx(1800.0));
    CHECK(rec.space_mean_speed == doctest::Approx(20.0));
    CHECK(rec.density_veh_per_km == doctest::Approx(25.0));
}

TEST_CASE("aggregate: space-mean speed is the harmonic mean") {
    LoopDetectors detectors({200.0});
    for (long k = 0; k < 10; ++k) {
        std::vector<VehicleTrace> traces = {
            {static_cast<int>(k), 0, 199.0, 201.0, k % 2 == 0 ? 10.0 : 30.0}};
        detectors.record(k, traces);
    }
    const FlowDensityRecord rec = aggregate(detectors.loops()[0], 0, 0, 100, 0.1);
    CHECK(rec.space_mean_speed == doctest::Approx(15.0));
}

TEST_CASE("aggregate: empty windows are all zero") {
    LoopDetectors detectors({200.0});
    const FlowDensityRecord rec = aggregate(detectors.loops()[0], 0, 0, 100, 0.1);
    CHECK(rec.flow_veh_per_h == 0.0);
    CHECK(rec.density_veh_per_km == 0.0);
    CHECK(rec.space_mean_speed == 0.0);
}

TEST_CASE("aggregate: the identity holds for every nonempty window") {
    LoopDetectors detectors({100.0});
    Rng rng(12);
    for (long t = 0; t < 500; ++t) {
        if (rng.bernoulli(0.3)) {
            std::vector<VehicleTrace> traces = {
                {static_cast<int>(t), 0, 99.0, 101.0, rng.uniform(2.0, 30.0)}};
            detectors.record(t, traces);
        }
    }
    const auto records = aggregate_series(detectors, 500, 10.0, 0.1);
    for (const auto& rec : records) {
        if (rec.density_veh_per_km > 0.0) {
            CHECK(rec.flow_veh_per_h ==
                  doctest::Approx(rec.density_veh_per_km * rec.space_mean_speed * 3.6));
        }
    }
}

TEST_CASE("aggregate: crossing counts are additive over disjoint windows") {
    LoopDetectors detectors({100.0});
    Rng rng(13);
    for (long t = 0; t < 600; ++t) {
        if (rng.bernoulli(0.4)) {
            std::vector<VehicleTrace> traces = {{static_cast<int>(t), 0, 99.0, 101.0, 15.0}};
            detectors.record(t, traces);
        }
    }
    const auto& loop = detectors.loops()[0];
    const long a = loop.count_between(-1, 299);
    const long b = loop.count_between(299, 599);
    CHECK(a + b == static_cast<long>(loop.crossings.size()));
    // flows over the sub-windows average to the flow over the union
    const auto w1 = aggregate(loop, 0, 0, 300, 0.1);
    const auto w2 = aggregate(loop, 0, 300, 300, 0.1);
    const auto whole = aggregate(loop, 0, 0, 600, 0.1);
    CHECK(w1.flow_veh_per_h + w2.flow_veh_per_h == doctest::Approx(2.0 * whole.flow_veh_per_h));
}

TEST_CASE("mean travel speed: vehicle-step weighted") {
    SpeedAccumulator acc;
    SUBCASE("single constant speed") {
        for (int i = 0; i < 50; ++i) acc.add(20.0, 25.0);
        CHECK(acc.mean() == doctest::Approx(20.0));
        CHECK(acc.mean_expected() == doctest::Approx(25.0));
    }
    SUBCASE("two vehicles for equal durations") {
        for (int i = 0; i < 100; ++i) {
            acc.add(10.0, 20.0);
            acc.add(30.0, 20.0);
        }
        CHECK(acc.mean() == doctest::Approx(20.0));
    }
    SUBCASE("durations weight the mean") {
        for (int i = 0; i < 100; ++i) acc.add(10.0, 20.0);
        for (int i = 0; i < 300; ++i) acc.add(30.0, 20.0);
        CHECK(acc.mean() == doctest::Approx(25.0));
    }
    SUBCASE("empty logs are rejected") {
        CHECK_THROWS(acc.mean());
    }
}
