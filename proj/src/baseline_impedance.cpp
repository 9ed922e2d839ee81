#include "legfunnel/baseline_impedance.hpp"

#include <cmath>

#include "legfunnel/errors.hpp"
#include "legfunnel/terrain.hpp"

namespace legfunnel {

void ImpedanceParams::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(m) || !positive(c) || !positive(k)) {
        throw ParameterError("impedance parameters m, c and k must be positive");
    }
}

ImpedanceRate impedance_derivative(const ImpedanceParams& params, const ImpedanceState& state, double force)
{
    return {state.u_dot, (force - params.c * state.u_dot - params.k * state.u) / params.m};
}

ImpedanceState impedance_step(const ImpedanceParams& params, const ImpedanceState& state, double force, double dt)
{
    if (!(dt > 0.0)) {
        throw DomainError("impedance step requires dt > 0");
    }
    auto offset = [](const ImpedanceState& s, const ImpedanceRate& r, double h) {
        return ImpedanceState{s.u + h * r.du, s.u_dot + h * r.du_dot};
    };
    const ImpedanceRate k1 = impedance_derivative(params, state, force);
    const ImpedanceRate k2 = impedance_derivative(params, offset(state, k1, 0.5 * dt), force);
    const ImpedanceRate k3 = impedance_derivative(params, offset(state, k2, 0.5 * dt), force);
    const ImpedanceRate k4 = impedance_derivative(params, offset(state, k3, dt), force);
    return {state.u + dt / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du),
            state.u_dot + dt / 6.0 * (k1.du_dot + 2.0 * k2.du_dot + 2.0 * k3.du_dot + k4.du_dot)};
}

double preset_foot_trajectory(const TerrainProfile& terrain, double wheel_x, double wheel_y, double patch)
{
    return terrain.patch_height(wheel_x, wheel_y, patch);
}

}  // namespace legfunnel
