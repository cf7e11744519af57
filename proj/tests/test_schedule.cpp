#include <doctest.h>

#include <cmath>

#include "wfl/rng.hpp"
#include "wfl/schedule.hpp"

using namespace wfl;
using namespace wfl::sched;

TEST_CASE("schedule endpoints are exact") {
    BerSchedule s{1e-1, 1e-4, 50};
    CHECK(std::fabs(s.target_ber(0) - 1e-1) / 1e-1 < 1e-15);
    CHECK(std::fabs(s.target_ber(49) - 1e-4) / 1e-4 < 1e-15);
}

TEST_CASE("schedule: frozen mid-point value") {
    BerSchedule s{1e-1, 1e-4, 50};
    CHECK(s.target_ber(9) == doctest::Approx(0.001059423769507803).epsilon(1e-12));
}

TEST_CASE("schedule decreases strictly and follows 1/(r+1)^2") {
    BerSchedule s{1e-1, 1e-4, 50};
    const double r2 = 2500.0;
    const double offset = (s.b_last * r2 - s.b0) / (r2 - 1.0);
    double first = (s.target_ber(0) - offset) * 1.0;
    for (int r = 1; r < 50; ++r) {
        CHECK(s.target_ber(r) < s.target_ber(r - 1));
        double scaled = (s.target_ber(r) - offset) * (r + 1) * (r + 1);
        CHECK(std::fabs(scaled - first) / first < 1e-12);
    }
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS((BerSchedule{1e-1, 1e-4, 1}).target_ber(0), std::invalid_argument);
    CHECK_THROWS_AS((BerSchedule{1e-4, 1e-1, 10}).target_ber(0), std::invalid_argument);
    CHECK_THROWS_AS((BerSchedule{1e-1, 0.0, 10}).target_ber(0), std::invalid_argument);
    BerSchedule s{1e-1, 1e-4, 10};
    CHECK_THROWS_AS(s.target_ber(10), std::out_of_range);
    CHECK_THROWS_AS(s.target_ber(-1), std::out_of_range);
}

TEST_CASE("corollary bound holds across the sweep and vanishes with R") {
    for (double theta : {0.01, 0.1, 0.5}) {
        double prev = 1e300;
        for (int rounds : {10, 100, 1000, 10000}) {
            auto cb = corollary_sum_bound(theta, rounds, 5, 8);
            CHECK(cb.lhs <= cb.rhs);
            CHECK(cb.lhs >= 0.0);
            CHECK(cb.lhs < prev);
            prev = cb.lhs;
        }
    }
    auto zero = corollary_sum_bound(0.0, 10, 5, 8);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);

    // independent long-double re-summation
    auto cb = corollary_sum_bound(0.1, 50, 5, 8);
    long double sum = 0.0;
    for (int r = 0; r < 50; ++r) {
        long double br = 0.1L / ((r + 1.0L) * (r + 1.0L));
        sum += br * std::pow(1.0L - br, 7);
    }
    long double lhs = sum / std::sqrt(250.0L);
    CHECK(std::fabs(cb.lhs - static_cast<double>(lhs)) < 1e-15);
}

namespace {

CalibrationTable random_monotone_table(std::uint64_t seed) {
    std::vector<CalibrationEntry> entries;
    std::vector<int> qs{2, 4, 8, 16, 32};
    double ber = 0.3;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        ber *= 0.1 + 0.8 * draw_unit(seed, 1, i);  // non-increasing
        CalibrationEntry e;
        e.snr_db = 2.5;
        e.q = qs[i];
        e.ber = ber;
        e.ci_halfwidth = ber / 10;
        e.frames = 100;
        e.mean_iters = static_cast<double>(qs[i]) * 0.7;
        entries.push_back(e);
    }
    return CalibrationTable(1008, 7, entries);
}

}  // namespace

TEST_CASE("q_for_target: floor, ceiling, and monotone behavior") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto table = random_monotone_table(seed);
        // A target everyone meets -> smallest tabulated Q
        auto easy = table.q_for_target(2.5, 1.0);
        CHECK(easy.q == 2);
        CHECK_FALSE(easy.saturated);
        // A target nobody meets -> largest Q, flagged
        auto hard = table.q_for_target(2.5, 0.0);
        CHECK(hard.q == 32);
        CHECK(hard.saturated);
        // Lowering the target never lowers Q
        int prev_q = 0;
        for (double t = 0.5; t > 1e-9; t *= 0.5) {
            auto lk = table.q_for_target(2.5, t);
            CHECK(lk.q >= prev_q);
            prev_q = lk.q;
        }
        CHECK_THROWS_AS(table.q_for_target(3.5, 0.1), std::invalid_argument);
    }
}

TEST_CASE("calibration table CSV round trip, with iterations companion") {
    auto table = random_monotone_table(7);
    std::string csv = table.to_csv();
    CHECK(csv.rfind("snr_db,q,ber,ci_halfwidth,frames,n,code_seed\n", 0) == 0);
    auto back = CalibrationTable::from_csv(csv, table.iters_to_csv());
    CHECK(back.code_n() == 1008);
    CHECK(back.code_seed() == 7);
    REQUIRE(back.entries().size() == table.entries().size());
    for (std::size_t i = 0; i < back.entries().size(); ++i) {
        CHECK(back.entries()[i].ber == table.entries()[i].ber);
        CHECK(back.entries()[i].q == table.entries()[i].q);
        CHECK(back.entries()[i].ci_halfwidth == table.entries()[i].ci_halfwidth);
        CHECK(back.entries()[i].frames == table.entries()[i].frames);
        CHECK(back.entries()[i].mean_iters == table.entries()[i].mean_iters);
    }
    // Without the companion, budget lookup works but imputation refuses.
    auto bare = CalibrationTable::from_csv(csv);
    CHECK(bare.q_for_target(2.5, 1.0).q == 2);
    CHECK_THROWS(bare.mean_iters(2.5, 2));
}
