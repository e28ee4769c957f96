#include <doctest.h>

#include <cmath>

#include "opa/errors.hpp"
#include "opa/meanfield.hpp"
#include "support.hpp"

using namespace opa;
using opa::testing::Gen;

namespace {

double distance(const MeanFieldState& a, const MeanFieldState& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < 3; ++j) d = std::max(d, std::abs(a[j] - b[j]));
    return d;
}

} // namespace

TEST_CASE("equations of motion") {
    const ModeParams p = opa::testing::resonant(1.25, 0.75, 0.0);
    const MeanFieldState d = derivatives({{1.0, 1.0, 1.0}}, p);
    CHECK(d[0] == Complex(0.0, -2.0));
    CHECK(d[1] == Complex(0.0, -1.25));
    CHECK(d[2] == Complex(0.0, -0.75));

    const ModeParams q = opa::testing::resonant(1.0, 0.5, 0.4, 0.3);
    const MeanFieldState pump = derivatives({{Complex(0.5, 0.2), 0.0, 0.0}}, q);
    CHECK(std::abs(pump[0] - Complex(0.0, -1.5) * Complex(0.5, 0.2)) < 1e-15);
    CHECK(pump[1] == Complex(0.0));
    CHECK(pump[2] == Complex(0.0));

    SUBCASE("property: pointwise Manley-Rowe rates vanish") {
        Gen gen(3);
        for (int trial = 0; trial < 100; ++trial) {
            const ModeParams p2 = gen.params(2.0);
            const MeanFieldState s{gen.triple(3.0)};
            const MeanFieldState ds = derivatives(s, p2);
            std::array<double, 3> rate{};
            for (std::size_t j = 0; j < 3; ++j) rate[j] = 2.0 * (std::conj(s[j]) * ds[j]).real();
            CHECK(std::abs(rate[0] + rate[1]) < 1e-14 * std::max(1.0, s.max_abs() * s.max_abs() * s.max_abs()));
            CHECK(std::abs(rate[0] + rate[2]) < 1e-14 * std::max(1.0, s.max_abs() * s.max_abs() * s.max_abs()));
        }
    }
}

TEST_CASE("Manley-Rowe quantities") {
    const auto zero = manley_rowe({{0.0, 0.0, 0.0}});
    CHECK(zero == std::array<double, 3>{0.0, 0.0, 0.0});
    const auto q = manley_rowe({{2.0, 1.0, 1.0}});
    CHECK(q == std::array<double, 3>{5.0, 5.0, 0.0});
}

TEST_CASE("RK4 sampling grid") {
    CHECK(step_count(1.0, 0.1) == 10);
    CHECK(step_count(0.3, 0.1) == 3);
    CHECK(step_count(1.05, 0.1) == 10);
    const ModeParams p = opa::testing::resonant(1.0, 1.0, 0.1);
    const Trajectory t = integrate_rk4({{1.0, 0.1, 0.0}}, p, 2.0, 0.01);
    CHECK(t.size() == 201);
    CHECK(std::abs(t.time(200) - 2.0) < 1e-12);
    CHECK_THROWS_AS(integrate_rk4({{1.0, 0.0, 0.0}}, p, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(integrate_rk4({{1.0, 0.0, 0.0}}, p, 0.005, 0.01), InvalidArgument);
}

TEST_CASE("free motion matches the closed form") {
    const ModeParams p = opa::testing::resonant(1.3, 0.7, 0.0);
    const MeanFieldState s0{{Complex(1.0, 0.5), Complex(-0.3, 0.2), Complex(0.8, 0.0)}};
    const Trajectory traj = integrate_rk4(s0, p, 10.0, 1e-3);
    const MeanFieldState& last = traj.samples.back();
    const double t = traj.time(traj.size() - 1);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(last[j] - s0[j] * std::polar(1.0, -p.omega[j] * t)) < 1e-10);
    }
}

TEST_CASE("property: Manley-Rowe conservation along trajectories") {
    const ModeParams p = opa::testing::resonant(1.0, 1.0, 0.2);
    const Trajectory ref = integrate_rk4({{5.0, 0.1, Complex(0.0, 0.1)}}, p, 10.0, 1e-3);
    CHECK(manley_rowe_drift(ref) < 1e-8);

    Gen gen(17);
    for (int trial = 0; trial < 5; ++trial) {
        const ModeParams q = gen.params(0.5);
        const Trajectory traj = integrate_rk4({gen.triple(2.0)}, q, 10.0, 1e-3);
        CHECK(manley_rowe_drift(traj) < 1e-8);
    }
}

TEST_CASE("RK4 is fourth order") {
    const ModeParams p = opa::testing::resonant(1.0, 0.6, 0.5, 0.4);
    const MeanFieldState s0{{Complex(2.0, 0.0), Complex(0.5, 0.0), Complex(0.0, 0.3)}};
    const double t = 4.0;
    const double dt = 0.04;
    const MeanFieldState reference = integrate_rk4(s0, p, t, dt / 8).samples.back();
    const double e1 = distance(integrate_rk4(s0, p, t, dt).samples.back(), reference);
    const double e2 = distance(integrate_rk4(s0, p, t, dt / 2).samples.back(), reference);
    const double ratio = e1 / e2;
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("divergence is reported with its time") {
    const ModeParams p = opa::testing::resonant(1000.0, 1000.0, 0.1);
    try {
        integrate_rk4({{0.0, 1.0, 0.0}}, p, 10.0, 0.01);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 10.0);
    }
}

TEST_CASE("undepleted pump solution") {
    SUBCASE("initial values and hyperbolic identity") {
        Gen gen(9);
        for (int trial = 0; trial < 50; ++trial) {
            ModeParams p = gen.params();
            p.pump_alpha0 = gen.disc(3.0);
            const Complex b1 = gen.disc(2.0), b2 = gen.disc(2.0);
            const auto [a1, a2] = undepleted_pump_solution(b1, b2, p, 0.0);
            CHECK(std::abs(a1 - b1) < 1e-15);
            CHECK(std::abs(a2 - b2) < 1e-15);
            const auto [c1, c2] = undepleted_pump_solution(b1, b2, p, gen.uniform(0.0, 2.0));
            const double lhs = std::norm(c1) - std::norm(c2);
            const double rhs = std::norm(b1) - std::norm(b2);
            CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::norm(c1)));
        }
    }
    SUBCASE("agrees with the full equations for a strong pump") {
        Gen gen(2);
        for (int trial = 0; trial < 6; ++trial) {
            ModeParams p = opa::testing::resonant(gen.uniform(0.5, 2.0), gen.uniform(0.5, 2.0), 0.0,
                                                  gen.uniform(-3.0, 3.0));
            p.pump_alpha0 = std::polar(100.0, gen.uniform(-3.0, 3.0));
            const double t = 1.0;
            p.kappa = gen.uniform(0.2, 1.0) / (100.0 * t);
            const Complex b1 = gen.disc(1.0), b2 = gen.disc(1.0);
            const Trajectory traj = integrate_rk4({{p.pump_alpha0, b1, b2}}, p, t, 1e-3);
            const MeanFieldState& last = traj.samples.back();
            const double depletion = 1.0 - std::norm(last[0]) / std::norm(p.pump_alpha0);
            REQUIRE(std::abs(depletion) < 0.01);
            const auto [a1, a2] = undepleted_pump_solution(b1, b2, p, traj.time(traj.size() - 1));
            CHECK(std::abs(a1 - last[1]) < 1e-3 * std::abs(last[1]));
            CHECK(std::abs(a2 - last[2]) < 1e-3 * std::abs(last[2]));
        }
        // gt = 1 from a single seed photon amplitude
        ModeParams p = opa::testing::resonant(1.0, 1.0, 0.01);
        p.pump_alpha0 = 100.0;
        const auto [a1, a2] = undepleted_pump_solution(1.0, 0.0, p, 1.0);
        CHECK(std::abs(std::abs(a1) - 1.5430806348) < 1e-9);
        CHECK(std::abs(std::abs(a2) - std::sinh(1.0)) < 1e-9);
    }
}
