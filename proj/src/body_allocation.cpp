#include "legfunnel/body_allocation.hpp"

#include <cmath>
#include <numbers>

#include "legfunnel/errors.hpp"

namespace legfunnel {

namespace {

Mat3 skew(const Vec3& v)
{
    Mat3 s;
    s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return s;
}

Mat3 world_inertia(const Vec6& q, const BodyInertia& inertia)
{
    const Mat3 r = rotation(q);
    return r * inertia.inertia * r.transpose();
}

}  // namespace

RobotGeometry RobotGeometry::regular_hexagon(double edge, double leg_length, double attach_height)
{
    if (!(edge > 0.0) || !(leg_length > 0.0)) {
        throw ParameterError("hexagon edge and leg length must be positive");
    }
    RobotGeometry geom;
    geom.edge = edge;
    // front-left first, then clockwise seen from above (x forward, y left)
    constexpr double kDeg = std::numbers::pi / 180.0;
    const std::array<double, kNumLegs> angles{30.0, -30.0, -90.0, -150.0, 150.0, 90.0};
    for (int i = 0; i < kNumLegs; ++i) {
        const double a = angles[i] * kDeg;
        geom.attach[i] = Vec3(edge * std::cos(a), edge * std::sin(a), attach_height);
        geom.contact[i] = geom.attach[i] - Vec3(0.0, 0.0, leg_length);
    }
    return geom;
}

void BodyInertia::validate() const
{
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw ParameterError("body mass must be positive");
    }
    if (!inertia.isApprox(inertia.transpose(), 1e-12)) {
        throw ParameterError("inertia tensor must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw ParameterError("inertia tensor must be positive definite");
    }
    if (!(gravity > 0.0)) {
        throw ParameterError("gravity must be positive");
    }
}

Mat3 rotation(const Vec6& q)
{
    return (Eigen::AngleAxisd(q[5], Vec3::UnitZ()) * Eigen::AngleAxisd(q[4], Vec3::UnitY()) *
            Eigen::AngleAxisd(q[3], Vec3::UnitX()))
        .toRotationMatrix();
}

Mat6 mass_matrix(const Vec6& q, const BodyInertia& inertia)
{
    Mat6 m = Mat6::Zero();
    m.topLeftCorner<3, 3>() = inertia.mass * Mat3::Identity();
    m.bottomRightCorner<3, 3>() = world_inertia(q, inertia);
    return m;
}

Mat6 coriolis_matrix(const Vec6& q, const Vec6& qdot, const BodyInertia& inertia)
{
    Mat6 c = Mat6::Zero();
    const Vec3 omega = qdot.tail<3>();
    c.bottomRightCorner<3, 3>() = skew(omega) * world_inertia(q, inertia);
    return c;
}

Vec6 gravity_vector(const BodyInertia& inertia)
{
    Vec6 g = Vec6::Zero();
    g[2] = inertia.mass * inertia.gravity;
    return g;
}

Mat6 jacobian(const RobotGeometry& geom)
{
    Mat6 j;
    for (int i = 0; i < kNumLegs; ++i) {
        const Vec3& p = geom.contact[i];
        const Vec3& b = geom.attach[i];
        const double len = (p - b).norm();
        if (!(len >= 1e-9)) {
            throw DomainError("degenerate leg: contact coincides with attachment");
        }
        j.col(i).head<3>() = (p - b) / len;
        j.col(i).tail<3>() = -p.cross(b) / len;
    }
    return j;
}

Mat6 jacobian_moment_form(const RobotGeometry& geom)
{
    Mat6 j;
    for (int i = 0; i < kNumLegs; ++i) {
        const Vec3& p = geom.contact[i];
        const Vec3& b = geom.attach[i];
        const double len = (p - b).norm();
        if (!(len >= 1e-9)) {
            throw DomainError("degenerate leg: contact coincides with attachment");
        }
        j.col(i).head<3>() = (p - b) / len;
        j.col(i).tail<3>() = p.cross(p - b) / len;
    }
    return j;
}

Vec6 support_wrench(const Mat6& jac, const Vec6& forces)
{
    return -jac * forces;
}

Vec6 desired_wrench(const Posture& ref, const Posture& fb, const BodyInertia& inertia)
{
    return mass_matrix(fb.q, inertia) * (ref.qddot - fb.qddot) +
           coriolis_matrix(fb.q, fb.qdot, inertia) * (ref.qdot - fb.qdot) + gravity_vector(inertia);
}

AllocationResult allocate_leg_forces(const Mat6& jac, const Vec6& tau, const AllocationOptions& opts)
{
    if (!jac.allFinite() || !tau.allFinite()) {
        throw DomainError("allocation inputs must be finite");
    }
    const Mat6 support = -jac;
    const Mat6 normal = support.transpose() * support + opts.damping * Mat6::Identity();
    AllocationResult out;
    out.forces = normal.ldlt().solve(support.transpose() * tau);
    if (opts.clamp_nonnegative && out.forces.minCoeff() < 0.0) {
        out.clamped = true;
        out.forces = out.forces.cwiseMax(0.0);
    }
    out.residual = (support * out.forces - tau).norm();
    out.feasible = out.residual <= opts.residual_tolerance;
    return out;
}

Vec6 body_acceleration(const Vec6& q, const Vec6& qdot, const Vec6& tau_applied, const BodyInertia& inertia)
{
    const Mat6 m = mass_matrix(q, inertia);
    const Vec6 rhs = tau_applied - coriolis_matrix(q, qdot, inertia) * qdot - gravity_vector(inertia);
    return m.ldlt().solve(rhs);
}

BodyState rigid_body_step(const BodyState& state, const Vec6& tau_applied, const BodyInertia& inertia, double dt)
{
    if (!(dt > 0.0)) {
        throw DomainError("rigid body step requires dt > 0");
    }
    auto deriv = [&](const BodyState& s) {
        return BodyState{s.qdot, body_acceleration(s.q, s.qdot, tau_applied, inertia)};
    };
    auto offset = [](const BodyState& s, const BodyState& d, double h) {
        return BodyState{s.q + h * d.q, s.qdot + h * d.qdot};
    };
    const BodyState k1 = deriv(state);
    const BodyState k2 = deriv(offset(state, k1, 0.5 * dt));
    const BodyState k3 = deriv(offset(state, k2, 0.5 * dt));
    const BodyState k4 = deriv(offset(state, k3, dt));
    BodyState next;
    next.q = state.q + dt / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    next.qdot = state.qdot + dt / 6.0 * (k1.qdot + 2.0 * k2.qdot + 2.0 * k3.qdot + k4.qdot);
    if (!next.q.allFinite() || !next.qdot.allFinite()) {
        throw SimulationAbort("rigid body state became non-finite");
    }
    return next;
}

}  // namespace legfunnel
