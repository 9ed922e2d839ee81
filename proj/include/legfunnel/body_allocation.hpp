#pragma once

#include <array>

#include <Eigen/Dense>

namespace legfunnel {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr int kNumLegs = 6;

/// Body pose [x, y, z, roll, pitch, yaw] in the navigation frame plus its derivatives.
struct Posture {
    Vec6 q = Vec6::Zero();
    Vec6 qdot = Vec6::Zero();
    Vec6 qddot = Vec6::Zero();
};

/// Leg attachment points B_i and wheel contact points P_i, both in the body frame (origin at the COG).
struct RobotGeometry {
    double edge = 0.7; // hexagon edge length l (m)
    std::array<Vec3, kNumLegs> attach{};
    std::array<Vec3, kNumLegs> contact{};

    /// Legs on the vertices of a regular hexagon, numbered clockwise seen from above starting
    /// front-left, contacts `leg_length` straight below each attachment.
    static RobotGeometry regular_hexagon(double edge, double leg_length, double attach_height = 0.0);
};

struct BodyInertia {
    double mass = 436.0;
    Mat3 inertia = Eigen::Vector3d(145.333, 145.333, 186.027).asDiagonal();
    double gravity = 9.81;

    void validate() const;
};

struct AllocationOptions {
    double damping = 1e-6;
    double residual_tolerance = 1.0;
    bool clamp_nonnegative = true;
};

struct AllocationResult {
    Vec6 forces = Vec6::Zero();
    double residual = 0.0; // |(-J) F - tau| after clamping
    bool feasible = true;  // residual within tolerance
    bool clamped = false;  // some leg would have had to pull
};

/// Z-Y-X (yaw, pitch, roll) rotation from body to navigation frame.
Mat3 rotation(const Vec6& q);

Mat6 mass_matrix(const Vec6& q, const BodyInertia& inertia);

/// Translational block zero, rotational block skew(w) * I_world with w taken as the Euler rates
/// (small roll/pitch), so that C(q, qdot) * qdot = [0; w x (I w)].
Mat6 coriolis_matrix(const Vec6& q, const Vec6& qdot, const BodyInertia& inertia);

/// [0, 0, m g, 0, 0, 0]: the support wrench needed to hold the body against gravity (z up).
Vec6 gravity_vector(const BodyInertia& inertia);

/// Column i = [(P_i - B_i)/|P_i - B_i| ; -P_i x B_i / |P_i - B_i|].
/// Throws DomainError when a leg is shorter than 1e-9 m.
Mat6 jacobian(const RobotGeometry& geom);

/// Same matrix assembled from the moment form P_i x (P_i - B_i) / |P_i - B_i|.
Mat6 jacobian_moment_form(const RobotGeometry& geom);

/// Wrench a compressive leg-force vector exerts on the body: -J F.
Vec6 support_wrench(const Mat6& jac, const Vec6& forces);

/// tau = M(q_fb)(qddot_ref - qddot_fb) + C(q_fb, qdot_fb)(qdot_ref - qdot_fb) + G.
Vec6 desired_wrench(const Posture& ref, const Posture& fb, const BodyInertia& inertia);

/// Damped least-squares solve of support_wrench(J, F) = tau.
AllocationResult allocate_leg_forces(const Mat6& jac, const Vec6& tau, const AllocationOptions& opts = {});

/// qddot from M qddot + C qdot + G = tau_applied.
Vec6 body_acceleration(const Vec6& q, const Vec6& qdot, const Vec6& tau_applied, const BodyInertia& inertia);

struct BodyState {
    Vec6 q = Vec6::Zero();
    Vec6 qdot = Vec6::Zero();
};

/// One RK4 step of the rigid-body equation with tau_applied held. Throws SimulationAbort on
/// non-finite state and DomainError for dt <= 0.
BodyState rigid_body_step(const BodyState& state, const Vec6& tau_applied, const BodyInertia& inertia, double dt);

}  // namespace legfunnel
