#include <doctest.h>

#include <cmath>

#include "legfunnel/baseline_impedance.hpp"
#include "legfunnel/errors.hpp"
#include "legfunnel/terrain.hpp"

using namespace legfunnel;

namespace {

// closed-form unit-step response of m u'' + c u' + k u = F from rest, underdamped case
double step_response(const ImpedanceParams& p, double force, double t)
{
    const double wn = std::sqrt(p.k / p.m);
    const double zeta = p.c / (2.0 * std::sqrt(p.k * p.m));
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double decay = std::exp(-zeta * wn * t);
    return force / p.k * (1.0 - decay * (std::cos(wd * t) + zeta * wn / wd * std::sin(wd * t)));
}

}  // namespace

TEST_SUITE("baseline_impedance")
{
    TEST_CASE("parameters")
    {
        CHECK_NOTHROW(ImpedanceParams{}.validate());
        CHECK_THROWS_AS((ImpedanceParams{0.0, 1.0, 1.0}.validate()), ParameterError);
        CHECK_THROWS_AS((ImpedanceParams{1.0, -1.0, 1.0}.validate()), ParameterError);
        CHECK_THROWS_AS(impedance_step(ImpedanceParams{}, {}, 1.0, 0.0), DomainError);
    }

    TEST_CASE("rest with zero force")
    {
        ImpedanceState s;
        for (int k = 0; k < 100; ++k) {
            s = impedance_step(ImpedanceParams{}, s, 0.0, 1e-3);
        }
        CHECK(s.u == 0.0);
        CHECK(s.u_dot == 0.0);
    }

    TEST_CASE("step response matches the damped oscillator")
    {
        const ImpedanceParams p; // 114.0, 62.5, 109.0
        const double force = 500.0;
        ImpedanceState s;
        double worst = 0.0;
        for (int k = 1; k <= 10000; ++k) {
            s = impedance_step(p, s, force, 1e-3);
            worst = std::max(worst, std::abs(s.u - step_response(p, force, k * 1e-3)));
        }
        CHECK(worst < 1e-6);
    }

    TEST_CASE("DC gain is 1/k")
    {
        for (const ImpedanceParams p : {ImpedanceParams{}, ImpedanceParams{2.0, 30.0, 500.0},
                                        ImpedanceParams{10.0, 5.0, 20.0}}) {
            ImpedanceState s;
            for (int k = 0; k < 400000; ++k) {
                s = impedance_step(p, s, 100.0, 1e-3);
            }
            CHECK(std::abs(s.u * p.k / 100.0 - 1.0) < 1e-3);
        }
    }

    TEST_CASE("virtual energy is non-increasing without input")
    {
        const ImpedanceParams p;
        ImpedanceState s{0.3, -0.5};
        double prev = 0.5 * p.m * s.u_dot * s.u_dot + 0.5 * p.k * s.u * s.u;
        for (int k = 0; k < 20000; ++k) {
            s = impedance_step(p, s, 0.0, 1e-3);
            const double e = 0.5 * p.m * s.u_dot * s.u_dot + 0.5 * p.k * s.u * s.u;
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }

    TEST_CASE("preset foot trajectory reads the terrain")
    {
        const TerrainProfile flat = TerrainProfile::flat();
        CHECK(preset_foot_trajectory(flat, 2.0, 0.6) == 0.0);

        const TerrainProfile road = TerrainProfile::parallel_slopes();
        // plateaus: left track 1.25..2.25 m, right track 1.55..2.55 m
        CHECK(preset_foot_trajectory(road, 1.8, 0.6) == doctest::Approx(0.050));
        CHECK(preset_foot_trajectory(road, 2.0, -0.6) == doctest::Approx(0.110));
        CHECK(preset_foot_trajectory(road, 2.0, -0.6, 0.1) == doctest::Approx(0.110));
        CHECK_THROWS_AS(preset_foot_trajectory(road, 50.0, 0.6), DomainError);
    }
}
