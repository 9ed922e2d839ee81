#include "legfunnel/sensor.hpp"

#include <cmath>

#include "legfunnel/errors.hpp"

namespace legfunnel {

PostureSensor::PostureSensor(SensorMode mode, double rate_hz) : mode_(mode), period_(1.0 / rate_hz)
{
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
        throw ParameterError("sensor rate must be positive");
    }
}

Posture PostureSensor::sample(double t, const Posture& truth)
{
    if (mode_ == SensorMode::Truth) {
        return truth;
    }
    if (!primed_) {
        // first sample: no history yet, so rates start at zero
        held_ = Posture{truth.q, Vec6::Zero(), Vec6::Zero()};
        primed_ = true;
        next_time_ = t + period_;
        return held_;
    }
    // small tolerance so that t = k * period lands on the sample instant despite rounding
    if (t + 1e-9 * period_ >= next_time_) {
        Posture fresh;
        fresh.q = truth.q;
        fresh.qdot = (truth.q - held_.q) / period_;
        fresh.qddot = (fresh.qdot - held_.qdot) / period_;
        held_ = fresh;
        next_time_ += period_;
    }
    return held_;
}

Posture sensor_sample(const Posture& truth, SensorMode mode)
{
    if (mode == SensorMode::Truth) {
        return truth;
    }
    // a single call has no history: hold the pose with zero rates
    return Posture{truth.q, Vec6::Zero(), Vec6::Zero()};
}

}  // namespace legfunnel
