#include "legfunnel/leg_plant.hpp"

#include <cmath>

#include "legfunnel/errors.hpp"

namespace legfunnel {

void LegPlantParams::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(b_damp) || !positive(k_stiff) || !positive(k_p)) {
        throw ParameterError("leg plant coefficients B, K and k_p must be positive");
    }
}

double leg_force(const LegPlantParams& params, const LegPlantState& state)
{
    return params.k_stiff * state.x1 + params.b_damp * state.x2;
}

double output_map(const LegPlantParams& params, const LegPlantState& state)
{
    return params.rho3() * state.x1 + params.rho4() * state.x2;
}

LegPlantRate plant_derivative(const LegPlantParams& params, const LegPlantState& state, double u)
{
    return {state.x2, params.rho2() * u + params.rho1() * state.x2, -state.z};
}

LegPlantState step(const LegPlantParams& params, const LegPlantState& state, double u, double dt)
{
    if (!(dt > 0.0)) {
        throw DomainError("leg plant step requires dt > 0");
    }
    auto offset = [](const LegPlantState& s, const LegPlantRate& r, double h) {
        return LegPlantState{s.x1 + h * r.dx1, s.x2 + h * r.dx2, s.z + h * r.dz};
    };
    const LegPlantRate k1 = plant_derivative(params, state, u);
    const LegPlantRate k2 = plant_derivative(params, offset(state, k1, 0.5 * dt), u);
    const LegPlantRate k3 = plant_derivative(params, offset(state, k2, 0.5 * dt), u);
    const LegPlantRate k4 = plant_derivative(params, offset(state, k3, dt), u);
    const double w = dt / 6.0;
    return {state.x1 + w * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1),
            state.x2 + w * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2),
            state.z + w * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz)};
}

double iss_envelope(double z0, double t, double x_sup)
{
    if (t < 0.0) {
        throw DomainError("ISS envelope requires t >= 0");
    }
    return std::abs(z0) * std::exp(-t) + x_sup;
}

double tracking_error(double f_ref, const LegPlantState& state, const LegPlantParams& params)
{
    return f_ref - output_map(params, state);
}

}  // namespace legfunnel
