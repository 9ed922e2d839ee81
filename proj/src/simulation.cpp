#include "legfunnel/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "legfunnel/errors.hpp"
#include "legfunnel/sensor.hpp"

namespace legfunnel {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// the impedance output is read in millimetres when composed with the foot trajectory
constexpr double kImpedanceToMetres = 1e-3;

// stacked posture state: q (6), qdot (6), then per leg [L, Ldot, z, u_imp, u_imp_dot]
constexpr int kLegSlots = 5;
constexpr int kStateSize = 12 + kLegSlots * kNumLegs;
using State = Eigen::Matrix<double, kStateSize, 1>;
using LegInputs = std::array<double, kNumLegs>;

enum Slot { kExt = 0, kExtRate, kIss, kImp, kImpRate };

constexpr int slot(int leg, Slot s)
{
    return 12 + kLegSlots * leg + s;
}

std::string describe_violation(const FunnelViolation& v, int leg, double t, double omega, double observed_rate,
                               double k_p)
{
    std::ostringstream os;
    os << "funnel violation on leg " << leg + 1 << " at t=" << t << " s: |e|=" << std::abs(v.error())
       << " N, psi=" << v.psi() << " N; hypotheses assumed omega=" << omega
       << ", observed reference rate " << observed_rate << " N/s (" << observed_rate / k_p << " control units)";
    return os.str();
}

struct ContactState {
    double h = 0.0;     // terrain height under the wheel
    double h_dot = 0.0;
    double s = 0.0;     // spring compression
    double s_dot = 0.0;
    double force = 0.0;
};

struct BodyEval {
    std::array<ContactState, kNumLegs> legs;
    Vec6 qddot = Vec6::Zero();
};

/// Six spring-damper legs with actuated length carrying a rigid body over the terrain.
class PostureModel {
public:
    explicit PostureModel(const ScenarioConfig& cfg)
        : cfg_(cfg), terrain_(cfg.terrain()), geom_(cfg.geometry()),
          share_(cfg.inertia.mass * cfg.inertia.gravity / kNumLegs), s0_(share_ / cfg.plant.k_stiff)
    {
    }

    double share() const { return share_; }
    double rest_compression() const { return s0_; }

    State initial_state() const
    {
        State x = State::Zero();
        x[2] = cfg_.leg_length;
        x[6] = cfg_.speed;
        for (int i = 0; i < kNumLegs; ++i) {
            x[slot(i, kIss)] = cfg_.z0;
        }
        return x;
    }

    /// Leg geometry for pose q: attachments fixed in the body, legs kept vertical in the world.
    RobotGeometry geometry_at(const Vec6& q) const
    {
        RobotGeometry g = geom_;
        const Vec3 down_body = rotation(q).transpose() * Vec3(0.0, 0.0, -1.0);
        for (int i = 0; i < kNumLegs; ++i) {
            g.contact[i] = g.attach[i] + cfg_.leg_length * down_body;
        }
        return g;
    }

    /// World-frame wrench of compressive leg forces at pose q.
    Vec6 world_wrench(const Vec6& q, const Vec6& forces) const
    {
        const Mat3 r = rotation(q);
        const Vec6 body = support_wrench(jacobian(geometry_at(q)), forces);
        Vec6 w;
        w.head<3>() = r * body.head<3>();
        w.tail<3>() = r * body.tail<3>();
        return w;
    }

    BodyEval evaluate(const State& x) const
    {
        const Vec6 q = x.head<6>();
        const Vec6 qd = x.segment<6>(6);
        const Mat3 r = rotation(q);
        const Vec3 omega = qd.tail<3>();
        const auto& plant = cfg_.plant;

        BodyEval out;
        Vec6 forces;
        for (int i = 0; i < kNumLegs; ++i) {
            const Vec3 arm = r * geom_.attach[i];
            const Vec3 arm_rate = omega.cross(arm);
            ContactState& c = out.legs[i];
            const double wx = q[0] + arm.x();
            const double wy = q[1] + arm.y();
            c.h = preset_foot_trajectory(terrain_, wx, wy, cfg_.patch_length);
            c.h_dot = terrain_.patch_slope(wx, wy, cfg_.patch_length) * (qd[0] + arm_rate.x());
            const double rise = q[2] + arm.z() - (cfg_.leg_length + geom_.attach[i].z());
            c.s = s0_ + x[slot(i, kExt)] + c.h - rise;
            c.s_dot = x[slot(i, kExtRate)] + c.h_dot - (qd[2] + arm_rate.z());
            c.force = plant.k_stiff * c.s + plant.b_damp * c.s_dot;
            forces[i] = c.force;
        }
        out.qddot = body_acceleration(q, qd, world_wrench(q, forces), cfg_.inertia);
        return out;
    }

    State derivative(const State& x, const LegInputs& u_plant) const
    {
        const BodyEval ev = evaluate(x);
        State dx;
        dx.head<6>() = x.segment<6>(6);
        dx.segment<6>(6) = ev.qddot;

        double h_lo = ev.legs[0].h;
        double h_hi = ev.legs[0].h;
        for (const auto& c : ev.legs) {
            h_lo = std::min(h_lo, c.h);
            h_hi = std::max(h_hi, c.h);
        }
        const double h_mid = 0.5 * (h_lo + h_hi);
        const double wa = cfg_.posture.servo_bandwidth;

        for (int i = 0; i < kNumLegs; ++i) {
            const ContactState& c = ev.legs[i];
            const double ext = x[slot(i, kExt)];
            const double ext_rate = x[slot(i, kExtRate)];
            dx[slot(i, kExt)] = ext_rate;
            dx[slot(i, kIss)] = -x[slot(i, kIss)];
            if (cfg_.controller == ControllerKind::Funnel) {
                dx[slot(i, kExtRate)] = cfg_.plant.rho2() * u_plant[i] + cfg_.plant.rho1() * c.s_dot;
                dx[slot(i, kImp)] = 0.0;
                dx[slot(i, kImpRate)] = 0.0;
            } else {
                const ImpedanceRate imp = impedance_derivative(
                    cfg_.impedance, ImpedanceState{x[slot(i, kImp)], x[slot(i, kImpRate)]}, c.force - share_);
                dx[slot(i, kImp)] = imp.du;
                dx[slot(i, kImpRate)] = imp.du_dot;
                const double command = (h_mid - c.h) - kImpedanceToMetres * x[slot(i, kImp)];
                dx[slot(i, kExtRate)] = wa * wa * (command - ext) - 2.0 * wa * ext_rate;
            }
        }
        return dx;
    }

    State rk4(const State& x, const LegInputs& u_plant, double dt) const
    {
        const State k1 = derivative(x, u_plant);
        const State k2 = derivative(x + 0.5 * dt * k1, u_plant);
        const State k3 = derivative(x + 0.5 * dt * k2, u_plant);
        const State k4 = derivative(x + dt * k3, u_plant);
        State next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite()) {
            throw SimulationAbort("posture state became non-finite");
        }
        return next;
    }

    /// Projects the actuator extensions back into the workspace. Returns which legs were clipped.
    std::array<bool, kNumLegs> clamp_workspace(State& x) const
    {
        std::array<bool, kNumLegs> hit{};
        const double lim = cfg_.workspace_limit;
        for (int i = 0; i < kNumLegs; ++i) {
            double& ext = x[slot(i, kExt)];
            double& rate = x[slot(i, kExtRate)];
            if (std::abs(ext) > lim) {
                hit[i] = true;
                ext = std::clamp(ext, -lim, lim);
                if (ext * rate > 0.0) {
                    rate = 0.0;
                }
            }
        }
        return hit;
    }

    /// Reference posture: level attitude, body height chosen to centre the actuator strokes.
    Posture reference(const Posture& fb, const State& x) const
    {
        double lo = x[slot(0, kExt)];
        double hi = lo;
        for (int i = 1; i < kNumLegs; ++i) {
            lo = std::min(lo, x[slot(i, kExt)]);
            hi = std::max(hi, x[slot(i, kExt)]);
        }
        Posture ref = fb;
        const double w = cfg_.posture.bandwidth;
        const double zeta = cfg_.posture.damping;
        const std::array<double, 3> target{fb.q[2] - 0.5 * (lo + hi), 0.0, 0.0};
        for (int j = 0; j < 3; ++j) {
            const int dof = 2 + j;
            ref.q[dof] = target[j];
            ref.qdot[dof] = 0.0;
            ref.qddot[dof] = w * w * (target[j] - fb.q[dof]) - 2.0 * zeta * w * fb.qdot[dof];
        }
        return ref;
    }

    AllocationResult plan(const Posture& fb, const State& x) const
    {
        const Vec6 tau_world = desired_wrench(reference(fb, x), fb, cfg_.inertia);
        const Mat3 r = rotation(fb.q);
        Vec6 tau_body;
        tau_body.head<3>() = r.transpose() * tau_world.head<3>();
        tau_body.tail<3>() = r.transpose() * tau_world.tail<3>();
        return allocate_leg_forces(jacobian(geometry_at(fb.q)), tau_body, cfg_.allocation);
    }

private:
    const ScenarioConfig& cfg_;
    TerrainProfile terrain_;
    RobotGeometry geom_;
    double share_;
    double s0_;
};

void check_preconditions(const ScenarioConfig& cfg, const RunOptions& opts)
{
    cfg.validate();
    if (cfg.controller != ControllerKind::Funnel || !opts.require_hypotheses) {
        return;
    }
    const ScenarioValidation v = validate_scenario(cfg);
    for (const auto& c : v.report.conditions) {
        if (!c.passed) {
            throw ConfigError("containment hypothesis '" + c.name + "' fails for scenario '" + cfg.name + "'");
        }
    }
    if (cfg.enforce_dwell_resolution && !v.resolution_ok) {
        std::ostringstream os;
        os << "dt=" << cfg.dt << " s does not resolve the minimum inter-event time (need dt <= "
           << v.resolution_limit << " s)";
        throw ConfigError(os.str());
    }
}

SimTrajectory make_trajectory(const ScenarioConfig& cfg)
{
    SimTrajectory traj;
    traj.name = cfg.name;
    traj.mode = cfg.mode;
    traj.controller = cfg.controller;
    traj.dt = cfg.dt;
    traj.duration = cfg.duration;
    traj.z0 = cfg.z0;
    traj.funnel = cfg.funnel;
    traj.trigger = cfg.trigger;
    if (cfg.controller == ControllerKind::Funnel) {
        traj.omega_estimate = scenario_omega(cfg).omega;
    }
    return traj;
}

long step_count(const ScenarioConfig& cfg)
{
    return std::lround(cfg.duration / cfg.dt);
}

/// Funnel part of one control tick for one leg. Returns u_plant; fills the sample.
double funnel_tick(LegSample& sample, double t, const ScenarioConfig& cfg, TriggerState& trig)
{
    sample.psi_pre = funnel_value(cfg.funnel, t - trig.t_k);
    sample.contained = std::abs(sample.e) < sample.psi_pre;
    if (!sample.contained) {
        throw FunnelViolation(sample.e, sample.psi_pre, t - trig.t_k);
    }
    sample.event = trigger_evaluate(sample.e, t, cfg.funnel, cfg.trigger, trig);
    sample.psi = funnel_value(cfg.funnel, t - trig.t_k);
    sample.u = control_law(sample.e, t, cfg.funnel, cfg.trigger, trig);
    // the actuator is driven against the law's sign so that the leg force closes on the reference
    return -sample.u;
}

SimTrajectory run_force_tracking(const ScenarioConfig& cfg)
{
    SimTrajectory traj = make_trajectory(cfg);
    traj.triggers.assign(1, TriggerState{});
    const long n = step_count(cfg);
    traj.steps.reserve(static_cast<std::size_t>(n) + 1);

    LegPlantState x{0.0, 0.0, cfg.z0};
    double x_sup = 0.0;
    double prev_ref = cfg.profile.value(0.0);
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        StepRecord rec;
        rec.t = t;
        rec.legs.resize(1);
        LegSample& s = rec.legs[0];
        s.f_ref = cfg.profile.value(t);
        s.y = output_map(cfg.plant, x);
        s.e = s.f_ref - s.y;
        if (k > 0) {
            traj.observed_ref_rate_sup = std::max(traj.observed_ref_rate_sup, std::abs(s.f_ref - prev_ref) / cfg.dt);
        }
        prev_ref = s.f_ref;
        x_sup = std::max(x_sup, std::hypot(x.x1, x.x2));
        rec.iss_z = std::abs(x.z);
        rec.iss_x_sup = x_sup;

        double u_plant = 0.0;
        try {
            u_plant = funnel_tick(s, t, cfg, traj.triggers[0]);
        } catch (const FunnelViolation& v) {
            traj.steps.push_back(std::move(rec));
            traj.aborted = true;
            traj.funnel_violation = true;
            traj.abort_reason =
                describe_violation(v, 0, t, traj.omega_estimate, traj.observed_ref_rate_sup, cfg.plant.k_p);
            return traj;
        }
        traj.steps.push_back(std::move(rec));
        if (k == n) {
            break;
        }
        x = step(cfg.plant, x, u_plant, cfg.dt);
        if (!std::isfinite(x.x1) || !std::isfinite(x.x2) || !std::isfinite(x.z)) {
            traj.aborted = true;
            traj.abort_reason = "leg state became non-finite";
            return traj;
        }
    }
    return traj;
}

SimTrajectory run_posture(const ScenarioConfig& cfg)
{
    SimTrajectory traj = make_trajectory(cfg);
    traj.triggers.assign(kNumLegs, TriggerState{});
    const PostureModel model(cfg);
    PostureSensor sensor(cfg.sensor);
    const bool funnel = cfg.controller == ControllerKind::Funnel;
    const long n = step_count(cfg);
    traj.steps.reserve(static_cast<std::size_t>(n) + 1);

    State x = model.initial_state();
    double x_sup = 0.0;
    Vec6 prev_ref = Vec6::Constant(model.share());
    for (long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const BodyEval ev = model.evaluate(x);
        const Posture truth{x.head<6>(), x.segment<6>(6), ev.qddot};
        const Posture fb = sensor.sample(t, truth);

        Vec6 f_ref = Vec6::Constant(model.share());
        if (funnel) {
            const AllocationResult alloc = model.plan(fb, x);
            f_ref = alloc.forces;
            traj.allocation_warnings += alloc.feasible ? 0 : 1;
            traj.clamp_warnings += alloc.clamped ? 1 : 0;
        }
        if (k > 0) {
            traj.observed_ref_rate_sup =
                std::max(traj.observed_ref_rate_sup, (f_ref - prev_ref).cwiseAbs().maxCoeff() / cfg.dt);
        }
        prev_ref = f_ref;

        StepRecord rec;
        rec.t = t;
        rec.q = truth.q;
        rec.roll_deg = truth.q[3] * kRadToDeg;
        rec.pitch_deg = truth.q[4] * kRadToDeg;
        rec.legs.resize(kNumLegs);
        LegInputs u_plant{};
        for (int i = 0; i < kNumLegs; ++i) {
            const ContactState& c = ev.legs[i];
            x_sup = std::max(x_sup, std::hypot(c.s, c.s_dot));
            rec.iss_z = std::max(rec.iss_z, std::abs(x[slot(i, kIss)]));
            LegSample& s = rec.legs[i];
            s.f_ref = f_ref[i];
            s.y = c.force;
            s.e = s.f_ref - s.y;
            if (!funnel) {
                s.u = x[slot(i, kImp)];
                continue;
            }
            try {
                u_plant[i] = funnel_tick(s, t, cfg, traj.triggers[i]);
            } catch (const FunnelViolation& v) {
                rec.iss_x_sup = x_sup;
                traj.steps.push_back(std::move(rec));
                traj.aborted = true;
                traj.funnel_violation = true;
                traj.abort_reason =
                    describe_violation(v, i, t, traj.omega_estimate, traj.observed_ref_rate_sup, cfg.plant.k_p);
                return traj;
            }
        }
        rec.iss_x_sup = x_sup;
        traj.steps.push_back(std::move(rec));
        if (k == n) {
            break;
        }
        try {
            x = model.rk4(x, u_plant, cfg.dt);
        } catch (const SimulationAbort& e) {
            traj.aborted = true;
            traj.abort_reason = e.what();
            return traj;
        }
        const auto hit = model.clamp_workspace(x);
        for (int i = 0; i < kNumLegs; ++i) {
            traj.steps.back().legs[i].limit_hit = hit[i];
        }
    }
    return traj;
}

}  // namespace

SimTrajectory run_scenario(const ScenarioConfig& cfg, const RunOptions& opts)
{
    check_preconditions(cfg, opts);
    if (cfg.mode == ScenarioMode::ForceTracking) {
        return run_force_tracking(cfg);
    }
    return run_posture(cfg);
}

Metrics extract_metrics(const SimTrajectory& traj)
{
    if (traj.steps.empty()) {
        throw DomainError("cannot extract metrics from an empty trajectory");
    }
    const std::size_t legs = traj.steps.front().legs.size();
    const bool funnel = traj.controller == ControllerKind::Funnel;

    Metrics m;
    m.legs.assign(legs, LegMetrics{});
    m.horizon = traj.steps.back().t - traj.steps.front().t;
    m.contained = !traj.funnel_violation;

    double roll_lo = traj.steps.front().roll_deg;
    double roll_hi = roll_lo;
    double pitch_lo = traj.steps.front().pitch_deg;
    double pitch_hi = pitch_lo;
    double varpi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < legs; ++i) {
        m.legs[i].e_min = m.legs[i].e_max = traj.steps.front().legs[i].e;
    }
    for (const auto& rec : traj.steps) {
        roll_lo = std::min(roll_lo, rec.roll_deg);
        roll_hi = std::max(roll_hi, rec.roll_deg);
        pitch_lo = std::min(pitch_lo, rec.pitch_deg);
        pitch_hi = std::max(pitch_hi, rec.pitch_deg);
        m.max_abs_z = std::max(m.max_abs_z, rec.iss_z);
        for (std::size_t i = 0; i < legs; ++i) {
            const LegSample& s = rec.legs[i];
            LegMetrics& lm = m.legs[i];
            lm.e_min = std::min(lm.e_min, s.e);
            lm.e_max = std::max(lm.e_max, s.e);
            m.contained = m.contained && s.contained;
            m.limit_hits += s.limit_hit ? 1 : 0;
            if (funnel) {
                varpi = std::min(varpi, s.psi_pre - std::abs(s.e));
            }
        }
    }
    m.roll_range = roll_hi - roll_lo;
    m.pitch_range = pitch_hi - pitch_lo;
    m.angle_min = std::min(roll_lo, pitch_lo);
    m.angle_max = std::max(roll_hi, pitch_hi);
    m.angle_range = m.angle_max - m.angle_min;

    for (std::size_t i = 0; i < legs; ++i) {
        LegMetrics& lm = m.legs[i];
        lm.e_range = lm.e_max - lm.e_min;
        m.e_range_max = std::max(m.e_range_max, lm.e_range);
        if (i < traj.triggers.size()) {
            const auto& ev = traj.triggers[i].event_times;
            lm.events = static_cast<int>(ev.size());
            // the run start is the initial event t_0
            double last = traj.steps.front().t;
            for (double te : ev) {
                lm.min_gap = std::min(lm.min_gap, te - last);
                last = te;
            }
        }
        m.event_count += lm.events;
        m.min_gap = std::min(m.min_gap, lm.min_gap);
    }

    if (funnel) {
        m.varpi_measured = varpi;
        const double psi0 = traj.funnel.psi0();
        if (varpi > 0.0 && varpi < psi0) {
            m.delta_measured = min_inter_event_time(traj.funnel, traj.trigger, varpi);
            m.dwell_ok = m.min_gap >= m.delta_measured;
            const double cap = m.horizon / m.delta_measured + 1.0;
            m.zeno_ok = std::all_of(m.legs.begin(), m.legs.end(),
                                    [cap](const LegMetrics& lm) { return lm.events <= cap; });
        } else {
            m.dwell_ok = false;
            m.zeno_ok = false;
        }
    }
    return m;
}

Metrics force_tracking_test(const ScenarioConfig& cfg)
{
    ScenarioConfig single = cfg;
    single.mode = ScenarioMode::ForceTracking;
    single.controller = ControllerKind::Funnel;
    return extract_metrics(run_scenario(single));
}

}  // namespace legfunnel
