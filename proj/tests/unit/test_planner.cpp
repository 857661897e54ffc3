#include <doctest.h>

#include <cmath>
#include <random>

#include "ehsim/errors.hpp"
#include "ehsim/harvest.hpp"
#include "ehsim/planner.hpp"

using namespace ehsim;

TEST_CASE("reference schedules balance at the recovered harvest power") {
    const auto profile = LoadProfile::table_one();
    struct Row {
        double t_s, p_harv, period;
    };
    for (const Row row : {Row{209.9, 2.78082822e-4, 215.16}, Row{42.44, 4.43376101e-4, 47.70},
                          Row{18.10, 6.64661815e-4, 23.36}}) {
        const double p = harvest_power_oracle(profile, row.t_s);
        CHECK(p == doctest::Approx(row.p_harv).epsilon(1e-8));
        const double t_s = solve_sleep_time(p, profile);
        CHECK(t_s == doctest::Approx(row.t_s).epsilon(1e-12));
        const auto plan = check_feasibility(p, profile, t_s);
        CHECK(plan.feasible);
        CHECK(plan.period == doctest::Approx(row.period).epsilon(1e-12));
        CHECK(plan.margin >= 0.0);
    }
}

TEST_CASE("sleep time from a measured harvest power") {
    const auto profile = LoadProfile::table_one();
    CHECK(solve_sleep_time(6.592e-4, profile) == doctest::Approx(18.398).epsilon(1e-4));
    CHECK(solve_sleep_time(2.775e-4, profile) == doctest::Approx(212.597).epsilon(1e-5));
}

TEST_CASE("solved sleep time is minimal") {
    const auto profile = LoadProfile::table_one();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> power(2.4e-4, 2.1e-3);
    for (int i = 0; i < 500; ++i) {
        const double p = power(rng);
        const double t_s = solve_sleep_time(p, profile);
        CHECK(check_feasibility(p, profile, t_s).feasible);
        if (t_s > 0.0) {
            CHECK_FALSE(check_feasibility(p, profile, std::nextafter(t_s, 0.0)).feasible);
        }
    }
}

TEST_CASE("degenerate harvest powers") {
    const auto profile = LoadProfile::table_one();
    CHECK_THROWS_AS((void)solve_sleep_time(0.0, profile), NeverFeasibleError);
    CHECK_THROWS_AS((void)solve_sleep_time(profile.sleep_power(), profile), NeverFeasibleError);
    CHECK_THROWS_AS((void)solve_sleep_time(-1.0, profile), DomainError);
    // Enough power to cover the active cycle outright.
    CHECK(solve_sleep_time(1.0, profile) == 0.0);
    CHECK_FALSE(check_feasibility(0.0, profile, 10.0).feasible);
}

TEST_CASE("oracle harvest model") {
    const auto model = HarvestModel::table_one_oracle();
    CHECK(model.power_at(0.0) == 0.0);
    CHECK(model.power_at(200.0) == doctest::Approx(1.85389e-4).epsilon(1e-5));
    CHECK(model.power_at(300.0) == doctest::Approx(2.78082822e-4).epsilon(1e-8));
    CHECK(model.power_at(400.0) == doctest::Approx(3.60729e-4).epsilon(1e-5));
    CHECK(model.power_at(600.0) == doctest::Approx(5.54019e-4).epsilon(1e-5));
    CHECK(model.power_at(800.0) == doctest::Approx(7.75305e-4).epsilon(1e-5));

    auto clamped = model;
    clamped.above_range = AboveRange::Clamp;
    CHECK(clamped.power_at(800.0) == model.power_at(700.0));

    auto scaled = model;
    scaled.scale = 1.05;
    CHECK(scaled.power_at(450.0) == doctest::Approx(1.05 * model.power_at(450.0)));

    auto bad = model;
    bad.points[1].lux = 300.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(model.power_at(-1.0) == 0.0);
}

TEST_CASE("trend sign follows the harvest surplus") {
    const auto profile = LoadProfile::table_one();
    const auto model = HarvestModel::table_one_oracle();
    struct Case {
        double lux, t_s, minus, plus;
    };
    for (const Case c : {Case{300, 209.9, -0.0199441, 0.0177823}, Case{500, 42.44, -0.00394224, 0.00527766},
                         Case{700, 18.10, -0.00258462, 0.00258462}}) {
        CHECK(check_feasibility(model.power_at(c.lux - 100), profile, c.t_s).margin ==
              doctest::Approx(c.minus).epsilon(1e-5));
        CHECK(check_feasibility(model.power_at(c.lux + 100), profile, c.t_s).margin ==
              doctest::Approx(c.plus).epsilon(1e-5));
        CHECK(std::abs(check_feasibility(model.power_at(c.lux), profile, c.t_s).margin) < 1e-15);
    }
}

TEST_CASE("buffered feasibility") {
    const auto sleep = PiecewisePower::constant(2.31e-4);
    const EnergyBudget budget{0.0041, 100.0};

    const auto dark = check_buffered_feasibility(budget, PiecewisePower::constant(0.0), sleep);
    CHECK_FALSE(dark.feasible);
    REQUIRE(dark.first_violation.has_value());
    CHECK(*dark.first_violation == doctest::Approx(17.7489).epsilon(1e-5));

    const auto lit = check_buffered_feasibility(budget, PiecewisePower::constant(2.31e-4), sleep);
    CHECK(lit.feasible);
    CHECK(lit.min_slack == doctest::Approx(0.0041));

    // One reference duty cycle at its balancing power ends where it started.
    const auto profile = LoadProfile::table_one();
    const double p = harvest_power_oracle(profile, 18.10);
    const auto cycle = duty_cycle_power(profile, 18.10);
    const EnergyBudget one_period{0.01, 23.36};
    const auto balanced = check_buffered_feasibility(one_period, PiecewisePower::constant(p), cycle);
    CHECK(balanced.feasible);
    CHECK(balanced.min_slack < 0.01);

    // Without a buffer the sensing burst cannot be bridged.
    const auto unbuffered = check_buffered_feasibility({0.0, 23.36}, PiecewisePower::constant(p), cycle);
    CHECK_FALSE(unbuffered.feasible);
    CHECK(*unbuffered.first_violation == doctest::Approx(0.0));

    CHECK_THROWS_AS(EnergyBudget({1.0, 10.0}).validate(0.4, 2.0), ConfigError);
    CHECK_NOTHROW(EnergyBudget({0.5, 10.0}).validate(0.4, 2.0));
    CHECK_THROWS_AS(PiecewisePower({{{1.0, 0.0}}}).validate(), ConfigError);
}

TEST_CASE("duty cycle power layout") {
    const auto profile = LoadProfile::table_one();
    const auto power = duty_cycle_power(profile, 10.0, 2);
    REQUIRE(power.segments.size() == 8);
    CHECK(power.segments[3].first == doctest::Approx(5.26));
    CHECK(power.segments[4].first == doctest::Approx(15.26));
    CHECK(power.at(0.1) == doctest::Approx(0.024915));
    CHECK(power.at(6.0) == doctest::Approx(2.31e-4));
}
