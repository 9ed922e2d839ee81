#pragma once

#include "legfunnel/body_allocation.hpp"
#include "legfunnel/scenario_config.hpp"

namespace legfunnel {

/// Posture feedback: either the true state or a 20 Hz sample-and-hold with first-difference rates.
class PostureSensor {
public:
    explicit PostureSensor(SensorMode mode, double rate_hz = 20.0);

    Posture sample(double t, const Posture& truth);

private:
    SensorMode mode_;
    double period_;
    bool primed_ = false;
    double next_time_ = 0.0;
    Posture held_;
};

/// Stateless entry point for truth mode; sampled mode needs a PostureSensor.
Posture sensor_sample(const Posture& truth, SensorMode mode);

}  // namespace legfunnel
