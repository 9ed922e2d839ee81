#pragma once

namespace legfunnel {

/// Spring-damper leg with force-rate actuation.
///
/// The two suspension spring-dampers of a wheel-leg are stored as their sums
/// (B = B_r + B_l, K = K_r + K_l). The control signal enters the spring rate
/// equation through k_p so that the leg force rate equals k_p * u when the base
/// is fixed. Defaults are artifact values, not measured prototype data.
struct LegPlantParams {
    double b_damp = 1000.0;   // N*s/m
    double k_stiff = 50000.0; // N/m
    double k_p = 50000.0;     // N/s per unit control signal

    double rho1() const { return -k_stiff / b_damp; }
    double rho2() const { return k_p / b_damp; }
    double rho3() const { return k_stiff; }
    double rho4() const { return b_damp; }

    /// Throws ParameterError unless all coefficients are positive and finite.
    void validate() const;
};

/// x1 = spring length variation S (m), x2 = its rate (m/s), z = ISS constructor.
struct LegPlantState {
    double x1 = 0.0;
    double x2 = 0.0;
    double z = 0.0;
};

struct LegPlantRate {
    double dx1 = 0.0;
    double dx2 = 0.0;
    double dz = 0.0;
};

/// F = K*S + B*Sdot.
double leg_force(const LegPlantParams& params, const LegPlantState& state);

/// Output map of the state-space model, y = rho3*x1 + rho4*x2.
double output_map(const LegPlantParams& params, const LegPlantState& state);

/// (x2, rho2*u + rho1*x2, -z).
LegPlantRate plant_derivative(const LegPlantParams& params, const LegPlantState& state, double u);

/// One classical RK4 step with u held over the step. Throws DomainError for dt <= 0.
LegPlantState step(const LegPlantParams& params, const LegPlantState& state, double u, double dt);

/// |z0| * exp(-t) + x_sup. Throws DomainError for t < 0.
double iss_envelope(double z0, double t, double x_sup);

/// e = f_ref - y.
double tracking_error(double f_ref, const LegPlantState& state, const LegPlantParams& params);

}  // namespace legfunnel
