#include "legfunnel/funnel_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "legfunnel/errors.hpp"

namespace legfunnel {

void FunnelParams::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(a) || !positive(b) || !positive(xi)) {
        throw ParameterError("funnel parameters a, b and xi must be positive");
    }
}

void TriggerParams::validate() const
{
    auto open_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; };
    if (!open_unit(rho5)) {
        throw ParameterError("rho5 must lie in (0, 1)");
    }
    if (!open_unit(varrho)) {
        throw ParameterError("varrho must lie in (0, 1)");
    }
    if (!std::isfinite(u_hat) || u_hat <= 0.0) {
        throw ParameterError("u_hat must be positive");
    }
}

bool ValidationReport::all_passed() const
{
    return std::all_of(conditions.begin(), conditions.end(), [](const ConditionCheck& c) { return c.passed; });
}

double funnel_value(const FunnelParams& params, double elapsed)
{
    if (!(elapsed >= 0.0)) {
        throw DomainError("funnel evaluated at negative elapsed time");
    }
    return params.a * std::exp(-params.b * elapsed) + params.xi;
}

double saturate(double v, double u_hat)
{
    if (std::abs(v) <= u_hat) {
        return v;
    }
    return v > 0.0 ? u_hat : -u_hat;
}

double gain_current(double e, const FunnelParams& params, double elapsed_since_event)
{
    const double psi = funnel_value(params, elapsed_since_event);
    const double distance = psi - std::abs(e);
    if (!(distance > 0.0)) {
        throw FunnelViolation(e, psi, elapsed_since_event);
    }
    return e / distance;
}

double gain_reset(double e, const FunnelParams& params)
{
    return gain_current(e, params, 0.0);
}

double u_bar(double u_k, const TriggerParams& trig)
{
    const double floor = trig.varrho * trig.u_hat;
    const double magnitude = std::abs(u_k);
    if (magnitude > floor) {
        return std::min(magnitude, trig.u_hat);
    }
    return floor;
}

bool trigger_evaluate(double e, double t, const FunnelParams& params, const TriggerParams& trig,
                      TriggerState& state)
{
    const double u_k = gain_current(e, params, t - state.t_k);
    const double u_s = gain_reset(e, params);
    // ties fire
    const bool fired = std::abs(u_k - u_s) >= trig.rho5 * u_bar(u_k, trig);
    if (fired) {
        state.t_k = t;
        state.event_times.push_back(t);
    }
    return fired;
}

double control_law(double e, double t, const FunnelParams& params, const TriggerParams& trig,
                   const TriggerState& state)
{
    return -saturate(gain_current(e, params, t - state.t_k), trig.u_hat);
}

OmegaBound omega_bound(double f_ref_rate_sup, const LegPlantParams& plant, const FunnelParams& params,
                       double ref_sup, double x0_norm)
{
    plant.validate();
    params.validate();

    OmegaBound out;
    out.rho1 = plant.rho1();
    out.rho2 = plant.rho2();
    out.rho6 = (plant.rho3() + plant.rho4() * out.rho1) / out.rho1;
    out.b_x = std::abs(x0_norm) + std::abs(ref_sup) + params.psi0();
    out.b_f = std::abs(out.rho1) * out.b_x;
    out.l_psi = params.a * params.b;

    const double rate = std::abs(f_ref_rate_sup);
    out.omega_force_rate = rate + std::abs(out.rho6) * out.b_f + out.l_psi;
    out.omega = out.omega_force_rate / plant.k_p;
    out.omega_signed = (rate + out.rho6 * out.b_f + out.l_psi) / plant.k_p;
    return out;
}

ValidationReport validate_parameters(const FunnelParams& params, const TriggerParams& trig,
                                     const OmegaBound& omega, double e0)
{
    ValidationReport report;
    report.omega = omega;

    const double big_omega = omega.omega;
    const double psi0 = params.a + params.xi;
    const double u_hat = trig.u_hat;

    report.conditions.push_back({"u_hat > omega", u_hat > big_omega, u_hat - big_omega});
    report.conditions.push_back({"|e(0)| < psi(0)", std::abs(e0) < psi0, psi0 - std::abs(e0)});
    const double rho5_limit = u_hat > 0.0 ? 1.0 - big_omega / u_hat : -std::numeric_limits<double>::infinity();
    report.conditions.push_back({"rho5 < 1 - omega/u_hat", trig.rho5 < rho5_limit, rho5_limit - trig.rho5});
    report.conditions.push_back({"varrho*u_hat < 1", trig.varrho * u_hat < 1.0, 1.0 - trig.varrho * u_hat});

    double varpi = std::min(params.xi / 2.0, psi0 - std::abs(e0));
    if (big_omega > 0.0) {
        varpi = std::min(varpi, (1.0 - trig.rho5) * params.xi / (2.0 * big_omega));
    }
    report.varpi = varpi;
    report.delta = 0.0;
    if (varpi > 0.0 && varpi < psi0 && trig.rho5 > 0.0 && trig.varrho > 0.0 && u_hat > 0.0) {
        report.delta = min_inter_event_time(params, trig, varpi);
    }
    return report;
}

double min_inter_event_time(const FunnelParams& params, const TriggerParams& trig, double varpi)
{
    const double psi0 = params.a + params.xi;
    if (!(varpi > 0.0) || !(varpi < psi0)) {
        throw DomainError("varpi must lie in (0, a + xi)");
    }
    return trig.rho5 * trig.varrho * trig.u_hat * varpi * varpi / (psi0 * (psi0 - varpi));
}

}  // namespace legfunnel
