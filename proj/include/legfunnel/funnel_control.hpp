#pragma once

#include <string>
#include <vector>

#include "legfunnel/leg_plant.hpp"

namespace legfunnel {

/// Exponential performance funnel psi(t) = a*exp(-b*t) + xi.
struct FunnelParams {
    double a = 750.0;  // N
    double b = 7.20;   // 1/s
    double xi = 250.0; // N

    double psi0() const { return a + xi; }
    void validate() const;
};

/// Event-trigger and saturation constants.
struct TriggerParams {
    double rho5 = 0.6;   // relative trigger threshold
    double varrho = 0.5; // lower-gain fraction of u_hat
    double u_hat = 1.9;  // saturation bound

    void validate() const;
};

/// Funnel clock: time of the last event and the event log.
struct TriggerState {
    double t_k = 0.0;
    std::vector<double> event_times;
};

struct OmegaBound {
    double omega = 0.0;        // control-signal units, magnitude reading
    double omega_signed = 0.0; // same with the literal signed rho6*B_f term
    double omega_force_rate = 0.0; // N/s, before division by k_p
    double b_f = 0.0;
    double b_x = 0.0;
    double l_psi = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho6 = 0.0;
};

struct ConditionCheck {
    std::string name;
    bool passed = false;
    double slack = 0.0; // positive when satisfied
};

struct ValidationReport {
    std::vector<ConditionCheck> conditions;
    double varpi = 0.0;       // admissible containment margin candidate
    double delta = 0.0;       // dwell time for that margin (0 when not computable)
    OmegaBound omega;

    bool all_passed() const;
};

double funnel_value(const FunnelParams& params, double elapsed);

/// Symmetric clip to [-u_hat, u_hat]; sgn(0) is taken as 0.
double saturate(double v, double u_hat);

/// U_k = e / (psi(elapsed) - |e|). Throws FunnelViolation when |e| >= psi.
double gain_current(double e, const FunnelParams& params, double elapsed_since_event);

/// U_s = e / (psi(0) - |e|).
double gain_reset(double e, const FunnelParams& params);

/// Trigger threshold scale: min(|U_k|, u_hat) above varrho*u_hat, varrho*u_hat otherwise.
double u_bar(double u_k, const TriggerParams& trig);

/// Evaluates Gamma(t). On an event the funnel clock restarts at t and t is logged.
bool trigger_evaluate(double e, double t, const FunnelParams& params, const TriggerParams& trig,
                      TriggerState& state);

/// u = -sat(U_k) using the funnel clock in `state`.
double control_law(double e, double t, const FunnelParams& params, const TriggerParams& trig,
                   const TriggerState& state);

/// Worst-case drift bound used by the containment hypotheses.
OmegaBound omega_bound(double f_ref_rate_sup, const LegPlantParams& plant, const FunnelParams& params,
                       double ref_sup, double x0_norm);

/// Checks the four containment hypotheses; never throws.
ValidationReport validate_parameters(const FunnelParams& params, const TriggerParams& trig,
                                     const OmegaBound& omega, double e0);

/// delta = rho5*varrho*u_hat*varpi^2 / ((a+xi)(a+xi-varpi)). Requires 0 < varpi < a+xi.
double min_inter_event_time(const FunnelParams& params, const TriggerParams& trig, double varpi);

}  // namespace legfunnel
