#pragma once

namespace legfunnel {

class TerrainProfile;

/// Virtual spring-damper-mass u = F / (m s^2 + c s + k).
struct ImpedanceParams {
    double m = 114.0;
    double c = 62.5;
    double k = 109.0;

    void validate() const;
};

struct ImpedanceState {
    double u = 0.0;
    double u_dot = 0.0;
};

struct ImpedanceRate {
    double du = 0.0;
    double du_dot = 0.0;
};

ImpedanceRate impedance_derivative(const ImpedanceParams& params, const ImpedanceState& state, double force);

/// One RK4 step of m u'' + c u' + k u = F with F held. Throws DomainError for dt <= 0.
ImpedanceState impedance_step(const ImpedanceParams& params, const ImpedanceState& state, double force, double dt);

/// Terrain height under the wheel at (x, y), averaged over the contact patch when patch > 0.
/// Perfect prior knowledge of the road.
double preset_foot_trajectory(const TerrainProfile& terrain, double wheel_x, double wheel_y,
                              double patch = 0.0);

}  // namespace legfunnel
