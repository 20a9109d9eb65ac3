#pragma once

// Closed-loop integration of the planar point-mass dynamics under a velocity
// tracking controller: fixed-step RK4 with the control law evaluated at every
// stage, per-step logging, and settling detection.

#include <vector>

#include "longfd/control.hpp"

namespace longfd {

// Reference factories. Wind is carried inside the ReferenceState so a profile
// fully describes the scenario's exogenous signals.
ReferenceProfileFn constant_profile(const Vec2& xdot_r,
                                    const Vec2& wind = Vec2::Zero());
// xdot_r = (0, min(rate*t, v_max)); the acceleration is right-continuous at
// the corner t = v_max/rate (ramp value before, zero from the corner on).
ReferenceProfileFn ramp_then_cruise_profile(double rate, double v_max,
                                            const Vec2& wind = Vec2::Zero());

struct SimLogRow {
    double t = 0.0;
    Vec2 xdot_r = Vec2::Zero();
    Vec2 xdot = Vec2::Zero();
    Vec2 vtilde = Vec2::Zero();  // body frame
    double alpha = 0.0;          // [rad]; NaN at zero airspeed
    double omega = 0.0;
    double thrust = 0.0;         // [N]
    double theta = 0.0;          // [rad], wrapped
    double Fp_norm = 0.0;        // estimated |F_p| [N]
    double V = 0.0;              // controller Lyapunov value
};

struct SimOptions {
    double dt = 1e-3;
    double t_end = 12.0;
    double settle_eps = 0.2;   // |vtilde| threshold [m/s]
    double settle_hold = 1.0;  // dwell below threshold [s]

    void validate() const;  // throws ConfigError unless dt > 0, t_end >= dt
};

struct SimResult {
    std::vector<SimLogRow> rows;  // one per step boundary, including t = 0
    bool settled = false;
    double settle_time = 0.0;  // start of the first sustained sub-threshold dwell
};

// Integrates xdot' = g*e1 + (F_a - T*R(theta)*e1)/m, theta' = omega with the
// true plant and the controller closed around it. Throws NumericalError if
// the state leaves the finite range.
SimResult simulate(const AeroModel& plant_model, const BodyParams& plant_body,
                   const VelocityTrackingController& controller,
                   const ReferenceProfileFn& profile, const Vec2& xdot0,
                   double theta0, const SimOptions& opts);

struct SimMetrics {
    bool settled = false;
    double settle_time = 0.0;
    // Largest |vtilde| from settle_time on; +inf when the run never settles.
    double max_error_post_settle = 0.0;
    // Start of the dominant velocity-error spike: the time the error last
    // left the settle band before the peak of |vtilde| over t >= 1 s; falls
    // back to the time of max |omega| when the error never entered the band.
    double jump_time_estimate = 0.0;
    double thrust_min = 0.0, thrust_max = 0.0;
};

SimMetrics compute_metrics(const SimResult& result, double settle_eps = 0.2);

}  // namespace longfd
