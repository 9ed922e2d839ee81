#pragma once

#include <limits>
#include <string>
#include <vector>

#include "legfunnel/scenario_config.hpp"

namespace legfunnel {

struct LegSample {
    double f_ref = 0.0;
    double y = 0.0;
    double e = 0.0;
    double psi = 0.0;     // funnel in force after the trigger update (0 for the impedance baseline)
    double psi_pre = 0.0; // funnel that held up to this instant
    double u = 0.0;
    bool event = false;
    bool contained = true;
    bool limit_hit = false;
};

struct StepRecord {
    double t = 0.0;
    std::vector<LegSample> legs;
    Vec6 q = Vec6::Zero();
    double roll_deg = 0.0;
    double pitch_deg = 0.0;
    double iss_z = 0.0;     // max |z| over legs
    double iss_x_sup = 0.0; // sup over [0, t] of |x| over legs
};

struct SimTrajectory {
    std::string name;
    ScenarioMode mode = ScenarioMode::ForceTracking;
    ControllerKind controller = ControllerKind::Funnel;
    double dt = 0.0;
    double duration = 0.0;
    double z0 = 0.0;
    FunnelParams funnel;
    TriggerParams trigger;

    std::vector<StepRecord> steps;
    std::vector<TriggerState> triggers;

    bool aborted = false;
    bool funnel_violation = false;
    std::string abort_reason;

    double omega_estimate = 0.0;
    double observed_ref_rate_sup = 0.0;
    int allocation_warnings = 0;
    int clamp_warnings = 0;
};

struct RunOptions {
    /// Refuse funnel runs whose containment hypotheses or step resolution check fail.
    bool require_hypotheses = true;
};

/// Runs the closed loop described by cfg. A funnel violation or a non-finite state stops the run
/// and is recorded in `aborted` / `abort_reason`; invalid configurations throw ConfigError.
SimTrajectory run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct LegMetrics {
    double e_min = 0.0;
    double e_max = 0.0;
    double e_range = 0.0;
    int events = 0;
    double min_gap = std::numeric_limits<double>::infinity();
};

struct Metrics {
    std::vector<LegMetrics> legs;
    double e_range_max = 0.0;
    double angle_min = 0.0; // over roll and pitch samples, degrees
    double angle_max = 0.0;
    double angle_range = 0.0;
    double roll_range = 0.0;
    double pitch_range = 0.0;
    int event_count = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double varpi_measured = std::numeric_limits<double>::quiet_NaN();
    double delta_measured = std::numeric_limits<double>::quiet_NaN();
    bool contained = true;
    bool dwell_ok = true;
    bool zeno_ok = true;
    int limit_hits = 0;
    double max_abs_z = 0.0;
    double horizon = 0.0;
};

/// Throws DomainError on an empty trajectory.
Metrics extract_metrics(const SimTrajectory& traj);

/// Single-leg force tracking run with the cfg's funnel parameters.
Metrics force_tracking_test(const ScenarioConfig& cfg);

}  // namespace legfunnel
