#include <doctest.h>

#include <cmath>
#include <random>

#include "ehsim/circuit.hpp"
#include "ehsim/errors.hpp"
#include "support.hpp"

using namespace ehsim;
using ehsim::testing::rel_err;

namespace {

CircuitParams params(double c, double r) {
    CircuitParams p;
    p.capacitance = c;
    p.leakage_resistance = r;
    p.v_on = 3.1;
    p.v_off = 2.8;
    return p;
}

constexpr CircuitMode kOffDisc{false, false};
constexpr CircuitMode kOffConn{false, true};
constexpr CircuitMode kOnDisc{true, false};
constexpr CircuitMode kOnConn{true, true};

}  // namespace

TEST_CASE("equivalent resistances") {
    CHECK(r_eh(3.3, 4.0, 6.592e-4) == doctest::Approx(3504.2476).epsilon(1e-7));
    CHECK(r_pm(3.3, 1.0, 0.0) == kInfiniteResistance);
    CHECK(r_pm(3.3, 1.0, 0.024915) == doctest::Approx(3.3 * 3.3 / 0.024915));
    CHECK(p_pm(0.01, 1.2) == doctest::Approx(0.012));

    CHECK_THROWS_AS((void)r_eh(4.0, 4.0, 1e-3), DomainError);
    CHECK_THROWS_AS((void)r_eh(0.0, 4.0, 1e-3), DomainError);
    CHECK_THROWS_AS((void)r_eh(3.0, 4.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)p_pm(0.01, 0.9), DomainError);
    CHECK_THROWS_AS((void)r_pm(0.0, 1.0, 0.01), DomainError);
}

TEST_CASE("closed-form reference values") {
    const auto p = params(0.4, 1e5);
    CHECK(v_off_disconnected(3.3, 800.0, p) == doctest::Approx(3.2346556).epsilon(1e-8));
    CHECK(v_off_connected(0.0, 100.0, 6.592e-4, p) == doctest::Approx(0.5741080).epsilon(1e-7));
    CHECK(v_on_connected(3.3, 209.9, 2.775e-4, 2.31e-4, p) == doctest::Approx(3.3073859).epsilon(1e-7));

    // Sensing burst from 3.3 V; high-order ODE solution is 3.2950673955855647.
    CHECK(rel_err(v_on_disconnected(3.3, 0.26, 0.024915, p), 3.2950673955855649) < 1e-13);

    const auto half = time_to_voltage(kOffDisc, 3.3, 1.65, 0.0, 0.0, p);
    REQUIRE(half.has_value());
    CHECK(*half == doctest::Approx(27725.887).epsilon(1e-8));
}

TEST_CASE("laws are continuous at t = 0") {
    const auto p = params(0.4, 1e6);
    for (const auto mode : {kOffDisc, kOffConn, kOnDisc, kOnConn}) {
        CHECK(evaluate_law(mode, 3.05, 0.0, 5e-4, 1e-3, p) == 3.05);
        CHECK(evaluate_law(mode, 3.05, 0.0, 5e-4, 1e-3, p, true) == doctest::Approx(3.05).epsilon(1e-15));
    }
}

TEST_CASE("monotone directions") {
    const auto p = params(0.4, 1e6);
    double prev_decay = 3.3;
    double prev_charge = 0.5;
    for (int i = 1; i <= 50; ++i) {
        const double t = 10.0 * i;
        const double decay = v_off_disconnected(3.3, t, p);
        const double charge = v_off_connected(0.5, t, 1e-4, p);
        CHECK(decay < prev_decay);
        CHECK(charge > prev_charge);
        prev_decay = decay;
        prev_charge = charge;
    }
}

TEST_CASE("leaky law reduces to the special cases") {
    const auto p = params(0.4, 2e5);
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
        CHECK(rel_err(v_with_leakage(3.3, t, 0.0, p), v_off_disconnected(3.3, t, p)) < 1e-14);
        CHECK(rel_err(v_with_leakage(3.3, t, -0.0015, p), v_on_disconnected(3.3, t, 0.0015, p)) < 1e-14);
    }
    // Without leakage (R_c -> infinity) the connected laws are recovered.
    const auto lossless = params(0.4, 1e15);
    CHECK(rel_err(v_with_leakage(3.0, 50.0, 4e-4, lossless), v_off_connected(3.0, 50.0, 4e-4, lossless)) < 1e-9);
    CHECK(rel_err(v_with_leakage(3.0, 50.0, -2e-4, lossless), v_on_connected(3.0, 50.0, 1e-4, 3e-4, lossless)) <
          1e-9);
}

TEST_CASE("w_pm scales the load draw") {
    auto p = params(0.4, 1e6);
    p.w_pm = 1.25;
    CHECK(net_power(kOnConn, 1e-3, 4e-4, p) == doctest::Approx(5e-4));
    CHECK(net_power(kOffConn, 1e-3, 4e-4, p) == 1e-3);
    CHECK(net_power(kOnDisc, 1e-3, 4e-4, p) == doctest::Approx(-5e-4));
    CHECK(v_on_connected(3.0, 10.0, 1e-3, 4e-4, p) == doctest::Approx(std::sqrt(2 * 5e-4 * 10.0 / 0.4 + 9.0)));
}

TEST_CASE("ON-disconnected validity bound") {
    const auto p = params(0.4, 1e5);
    const double t_valid = on_disconnected_valid_time(1.0, 0.05, p);
    CHECK(t_valid > 0.0);
    CHECK(v_on_disconnected(1.0, t_valid, 0.05, p) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS((void)v_on_disconnected(1.0, t_valid * 1.01, 0.05, p), ValidityError);
    CHECK(std::isinf(on_disconnected_valid_time(1.0, 0.0, p)));
    CHECK_THROWS_AS((void)v_on_connected(1.0, 1e4, 1e-4, 1e-2, p), ValidityError);
}

TEST_CASE("argument errors") {
    const auto p = params(0.4, 1e5);
    CHECK_THROWS_AS((void)v_off_disconnected(-1.0, 1.0, p), DomainError);
    CHECK_THROWS_AS((void)v_off_disconnected(1.0, -1.0, p), DomainError);
    CHECK_THROWS_AS((void)v_off_connected(1.0, 1.0, 0.0, p), DomainError);
    CHECK_THROWS_AS((void)rk4_oracle(kOnDisc, 1.0, 1.0, 0.0, 0.0, 0.01, p), DomainError);
    CHECK_THROWS_AS((void)rk4_oracle(kOnDisc, 0.1, 100.0, 0.01, 0.0, 0.05, p), DomainError);
}

TEST_CASE("circuit parameter validation") {
    auto p = params(0.4, 1e5);
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.capacitance = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.w_pm = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.v_on = bad.v_off;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.coldstart_energy = 1e-3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.coldstart_duration = 0.1;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("closed forms agree with RK4") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cap(0.05, 1.0);
    std::uniform_real_distribution<double> res(1e4, 1e7);
    std::uniform_real_distribution<double> volt(0.5, 4.0);
    std::uniform_real_distribution<double> power(1e-5, 5e-3);
    std::uniform_real_distribution<double> frac(0.05, 1.0);

    for (int i = 0; i < 200; ++i) {
        const auto p = params(cap(rng), res(rng));
        const double v0 = volt(rng);
        const double p_eh = power(rng);
        const double p_cl = power(rng);
        const double tau = p.time_constant();

        const double t_od = frac(rng) * 3.0 * tau;
        const double t_oc = frac(rng) * p.capacitance * 3.0 * v0 * v0 / (2.0 * p_eh);
        const double t_nd = frac(rng) * 0.8 * on_disconnected_valid_time(v0, p_cl, p);
        const double net = p_eh - p_cl;
        const double t_nc = net > 0.0 ? frac(rng) * p.capacitance * 3.0 * v0 * v0 / (2.0 * net)
                                      : frac(rng) * 0.8 * p.capacitance * v0 * v0 / (2.0 * -net);

        const auto check = [&](CircuitMode mode, double t, bool leak) {
            const double exact = evaluate_law(mode, v0, t, p_eh, p_cl, p, leak);
            const double oracle = rk4_oracle(mode, v0, t, 1e-4 * t, p_eh, p_cl, p, leak);
            CHECK(rel_err(exact, oracle) < 1e-6);
        };
        check(kOffDisc, t_od, false);
        check(kOffConn, t_oc, false);
        check(kOnDisc, t_nd, false);
        check(kOnConn, t_nc, false);
        check(kOffConn, t_oc, true);
    }
}

TEST_CASE("time_to_voltage inverts the laws") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.05, 0.9);
    const auto p = params(0.4, 1e6);
    for (int i = 0; i < 100; ++i) {
        const double v0 = 2.9 + frac(rng);
        const double t = 100.0 * frac(rng);
        for (const auto mode : {kOffDisc, kOffConn, kOnDisc, kOnConn}) {
            for (const bool leak : {false, true}) {
                const double v = evaluate_law(mode, v0, t, 6e-4, 2.5e-4, p, leak);
                const auto back = time_to_voltage(mode, v0, v, 6e-4, 2.5e-4, p, leak);
                REQUIRE(back.has_value());
                CHECK(*back == doctest::Approx(t).epsilon(1e-6));
            }
        }
    }
    CHECK_FALSE(time_to_voltage(kOffDisc, 3.0, 3.1, 0.0, 0.0, p).has_value());
    CHECK_FALSE(time_to_voltage(kOffConn, 3.0, 2.9, 1e-3, 0.0, p).has_value());
    CHECK_FALSE(time_to_voltage(kOnConn, 3.0, 3.1, 1e-4, 1e-4, p).has_value());
    // Leaky charge saturates below sqrt(p R_c).
    CHECK_FALSE(time_to_voltage(kOffConn, 3.0, 40.0, 1e-3, 0.0, p, true).has_value());
}
