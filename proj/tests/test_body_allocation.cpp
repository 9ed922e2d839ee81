#include <doctest.h>

#include <cmath>
#include <random>

#include "legfunnel/body_allocation.hpp"
#include "legfunnel/errors.hpp"

using namespace legfunnel;

TEST_SUITE("body_allocation")
{
    TEST_CASE("hexagon geometry")
    {
        const RobotGeometry g = RobotGeometry::regular_hexagon(0.7, 0.6);
        for (int i = 0; i < kNumLegs; ++i) {
            CHECK(g.attach[i].head<2>().norm() == doctest::Approx(0.7));
            // neighbouring vertices of a regular hexagon are one edge length apart
            CHECK((g.attach[i] - g.attach[(i + 1) % kNumLegs]).norm() == doctest::Approx(0.7));
            CHECK((g.attach[i] - g.contact[i]).norm() == doctest::Approx(0.6));
        }
        // clockwise seen from above: the signed turn from one leg to the next is negative
        const Vec3 turn = g.attach[0].cross(g.attach[1]);
        CHECK(turn.z() < 0.0);
        CHECK_THROWS_AS(RobotGeometry::regular_hexagon(0.0, 0.6), ParameterError);
    }

    TEST_CASE("jacobian of vertical legs")
    {
        const RobotGeometry g = RobotGeometry::regular_hexagon(0.7, 0.6);
        const Mat6 j = jacobian(g);
        for (int i = 0; i < kNumLegs; ++i) {
            CHECK(j(0, i) == doctest::Approx(0.0));
            CHECK(j(1, i) == doctest::Approx(0.0));
            CHECK(j(2, i) == doctest::Approx(-1.0));
        }
        CHECK(std::abs(j.row(3).sum()) < 1e-12);
        CHECK(std::abs(j.row(4).sum()) < 1e-12);
    }

    TEST_CASE("moment form agrees with the cross-product form")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            RobotGeometry g = RobotGeometry::regular_hexagon(0.7, 0.6);
            for (int i = 0; i < kNumLegs; ++i) {
                g.contact[i] += 0.2 * Vec3(d(rng), d(rng), d(rng));
            }
            CHECK((jacobian(g) - jacobian_moment_form(g)).cwiseAbs().maxCoeff() < 1e-12);
        }
        RobotGeometry bad = RobotGeometry::regular_hexagon(0.7, 0.6);
        bad.contact[3] = bad.attach[3];
        CHECK_THROWS_AS(jacobian(bad), DomainError);
        CHECK_THROWS_AS(jacobian_moment_form(bad), DomainError);
    }

    TEST_CASE("static stand allocates an equal share")
    {
        const BodyInertia inertia;
        const RobotGeometry g = RobotGeometry::regular_hexagon(0.7, 0.6);
        const Mat6 j = jacobian(g);
        const Vec6 tau = gravity_vector(inertia);
        const AllocationResult r = allocate_leg_forces(j, tau);

        // independent dense minimum-norm least squares on the support map -J
        const Mat6 support = -j;
        const Vec6 dense = support.completeOrthogonalDecomposition().solve(tau);
        const double share = 436.0 * 9.81 / 6.0;
        CHECK(share == doctest::Approx(712.86));
        for (int i = 0; i < kNumLegs; ++i) {
            CHECK(std::abs(r.forces[i] - share) / share < 1e-6);
            CHECK(std::abs(dense[i] - share) / share < 1e-6);
        }
        CHECK(r.feasible);
        CHECK_FALSE(r.clamped);
        CHECK(support_wrench(j, r.forces).isApprox(tau, 1e-6));
    }

    TEST_CASE("allocation is linear and maps zero to zero")
    {
        const Mat6 j = jacobian(RobotGeometry::regular_hexagon(0.7, 0.6));
        const AllocationResult zero = allocate_leg_forces(j, Vec6::Zero());
        CHECK(zero.forces.norm() == 0.0);

        Vec6 tau;
        tau << 0.0, 0.0, 5000.0, 120.0, -80.0, 0.0;
        AllocationOptions raw;
        raw.clamp_nonnegative = false;
        const Vec6 f1 = allocate_leg_forces(j, tau, raw).forces;
        const Vec6 f2 = allocate_leg_forces(j, 2.0 * tau, raw).forces;
        CHECK((f2 - 2.0 * f1).norm() < 1e-9 * f1.norm());
        CHECK((support_wrench(j, f1) - tau).norm() < 1e-3);
    }

    TEST_CASE("tension demand is clamped and flagged")
    {
        const Mat6 j = jacobian(RobotGeometry::regular_hexagon(0.7, 0.6));
        Vec6 tau;
        tau << 0.0, 0.0, 100.0, 2000.0, 0.0, 0.0;
        const AllocationResult r = allocate_leg_forces(j, tau);
        CHECK(r.clamped);
        CHECK(r.forces.minCoeff() >= 0.0);
        CHECK_FALSE(r.feasible);
        Vec6 bad = tau;
        bad[0] = NAN;
        CHECK_THROWS_AS(allocate_leg_forces(j, bad), DomainError);
    }

    TEST_CASE("desired wrench")
    {
        const BodyInertia inertia;
        Posture fb;
        fb.q << 0.1, -0.2, 0.6, 0.0, 0.0, 0.3;
        CHECK(desired_wrench(fb, fb, inertia) == gravity_vector(inertia));

        Posture ref = fb;
        ref.qddot[2] = 0.5;
        const Vec6 tau = desired_wrench(ref, fb, inertia);
        CHECK(tau[2] == doctest::Approx(436.0 * 0.5 + 436.0 * 9.81));

        // zero angular rate: the Coriolis block vanishes
        fb.qdot << 1.0, 2.0, 3.0, 0.0, 0.0, 0.0;
        CHECK(coriolis_matrix(fb.q, fb.qdot, inertia).norm() == 0.0);
    }

    TEST_CASE("rigid body step")
    {
        const BodyInertia inertia;
        BodyState s;
        s.q[2] = 0.6;
        const BodyState held = rigid_body_step(s, gravity_vector(inertia), inertia, 1e-3);
        CHECK((held.q - s.q).norm() < 1e-15);

        const Vec6 acc = body_acceleration(s.q, s.qdot, Vec6::Zero(), inertia);
        CHECK(acc[2] == doctest::Approx(-9.81));

        Vec6 torque = gravity_vector(inertia);
        torque[3] = 29.0;
        const Vec6 roll = body_acceleration(s.q, s.qdot, torque, inertia);
        CHECK(roll[3] == doctest::Approx(29.0 / 145.333));
        CHECK(std::abs(roll[4]) < 1e-15);

        CHECK_THROWS_AS(rigid_body_step(s, torque, inertia, 0.0), DomainError);
        Vec6 inf = Vec6::Zero();
        inf[2] = INFINITY;
        CHECK_THROWS_AS(rigid_body_step(s, inf, inertia, 1e-3), SimulationAbort);
    }

    TEST_CASE("energy does not grow on a damped support")
    {
        // body heaving on a fixed spring-damper support plus gravity
        const BodyInertia inertia;
        const double k = 3.0e5;
        const double c = 6.0e3;
        const double z_rest = 0.6;
        BodyState s;
        s.q[2] = z_rest + 0.02;
        auto energy = [&](const BodyState& b) {
            const double stretch = b.q[2] - z_rest;
            return 0.5 * inertia.mass * b.qdot.head<3>().squaredNorm() + inertia.mass * inertia.gravity * b.q[2] +
                   0.5 * k * stretch * stretch - inertia.mass * inertia.gravity * stretch;
        };
        double prev = energy(s);
        for (int n = 0; n < 2000; ++n) {
            Vec6 tau = Vec6::Zero();
            tau[2] = inertia.mass * inertia.gravity - k * (s.q[2] - z_rest) - c * s.qdot[2];
            s = rigid_body_step(s, tau, inertia, 1e-4);
            const double e = energy(s);
            CHECK(e <= prev + 1e-6);
            prev = e;
        }
    }

    TEST_CASE("rotation")
    {
        Vec6 q = Vec6::Zero();
        q[5] = M_PI / 2.0;
        CHECK((rotation(q) * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);
        q << 0, 0, 0, 0.2, -0.1, 0.7;
        const Mat3 r = rotation(q);
        CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-14);
        CHECK(mass_matrix(q, BodyInertia{}).isApprox(mass_matrix(q, BodyInertia{}).transpose()));
    }
}
