#include "longfd/sim.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "longfd/errors.hpp"

namespace longfd {

ReferenceProfileFn constant_profile(const Vec2& xdot_r, const Vec2& wind) {
    return [xdot_r, wind](double t) {
        ReferenceState ref;
        ref.t = t;
        ref.xdot_r = xdot_r;
        ref.xdot_w = wind;
        return ref;
    };
}

ReferenceProfileFn ramp_then_cruise_profile(double rate, double v_max,
                                            const Vec2& wind) {
    if (!(rate > 0.0) || !(v_max > 0.0))
        throw ConfigError("ramp_then_cruise_profile: rate and v_max must be > 0");
    const double t_corner = v_max / rate;
    return [rate, v_max, t_corner, wind](double t) {
        ReferenceState ref;
        ref.t = t;
        ref.xdot_w = wind;
        if (t < t_corner) {
            ref.xdot_r = Vec2(0.0, rate * t);
            ref.xddot_r = Vec2(0.0, rate);
        } else {
            ref.xdot_r = Vec2(0.0, v_max);
        }
        return ref;
    };
}

void SimOptions::validate() const {
    if (!(dt > 0.0)) throw ConfigError("integration dt must be > 0");
    if (!(t_end >= dt)) throw ConfigError("integration t_end must be >= dt");
    if (!(settle_eps > 0.0)) throw ConfigError("settle_eps must be > 0");
    if (!(settle_hold >= 0.0)) throw ConfigError("settle_hold must be >= 0");
}

namespace {

struct PlantState {
    Vec2 v = Vec2::Zero();
    double theta = 0.0;
};

struct PlantDeriv {
    Vec2 acc = Vec2::Zero();
    double omega = 0.0;
};

}  // namespace

SimResult simulate(const AeroModel& plant_model, const BodyParams& plant_body,
                   const VelocityTrackingController& controller,
                   const ReferenceProfileFn& profile, const Vec2& xdot0,
                   double theta0, const SimOptions& opts) {
    opts.validate();
    plant_body.validate();

    const auto deriv = [&](double t, const PlantState& s) -> PlantDeriv {
        ReferenceState ref = profile(t);
        ref.t = t;
        const ControlInput u = controller.compute(ref, s.v, s.theta);
        const Vec2 Fa = aero_force(plant_model, plant_body, s.v - ref.xdot_w, s.theta);
        PlantDeriv d;
        d.acc = plant_body.g * e1() +
                (Fa - u.thrust * (rot(s.theta) * e1())) / plant_body.m;
        d.omega = u.omega;
        return d;
    };

    SimResult out;
    const long long n_steps = std::llround(opts.t_end / opts.dt);
    out.rows.reserve(static_cast<std::size_t>(n_steps) + 1);

    const auto log_row = [&](double t, const PlantState& s) {
        ReferenceState ref = profile(t);
        ref.t = t;
        ControlDiagnostics diag;
        const ControlInput u = controller.compute(ref, s.v, s.theta, &diag);
        const AirState air = angle_of_attack(s.v - ref.xdot_w, s.theta,
                                             controller.body().delta);
        SimLogRow row;
        row.t = t;
        row.xdot_r = ref.xdot_r;
        row.xdot = s.v;
        row.vtilde = diag.vtilde;
        row.alpha = air.alpha ? *air.alpha : std::numeric_limits<double>::quiet_NaN();
        row.omega = u.omega;
        row.thrust = u.thrust;
        row.theta = wrap_angle(s.theta);
        row.Fp_norm = diag.Fp_norm;
        row.V = diag.V;
        out.rows.push_back(row);
    };

    PlantState s{xdot0, wrap_angle(theta0)};
    log_row(0.0, s);
    for (long long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * opts.dt;
        const double h = opts.dt;
        const PlantDeriv d1 = deriv(t, s);
        const PlantDeriv d2 = deriv(
            t + 0.5 * h, {s.v + 0.5 * h * d1.acc, s.theta + 0.5 * h * d1.omega});
        const PlantDeriv d3 = deriv(
            t + 0.5 * h, {s.v + 0.5 * h * d2.acc, s.theta + 0.5 * h * d2.omega});
        const PlantDeriv d4 =
            deriv(t + h, {s.v + h * d3.acc, s.theta + h * d3.omega});
        s.v += (h / 6.0) * (d1.acc + 2.0 * d2.acc + 2.0 * d3.acc + d4.acc);
        s.theta += (h / 6.0) *
                   (d1.omega + 2.0 * d2.omega + 2.0 * d3.omega + d4.omega);
        s.theta = wrap_angle(s.theta);
        if (!s.v.allFinite() || !std::isfinite(s.theta))
            throw NumericalError("simulate: state diverged at t = " +
                                 std::to_string(t + h));
        log_row(static_cast<double>(k + 1) * opts.dt, s);
    }

    // Earliest time from which |vtilde| stays within the band for the full
    // hold duration.
    long long last_above = -1;
    bool found = false;
    for (std::size_t i = 0; i < out.rows.size() && !found; ++i) {
        if (out.rows[i].vtilde.norm() > opts.settle_eps) {
            last_above = static_cast<long long>(i);
            continue;
        }
        const double start = out.rows[static_cast<std::size_t>(last_above + 1)].t;
        if (out.rows[i].t - start >= opts.settle_hold) {
            out.settled = true;
            out.settle_time = start;
            found = true;
        }
    }
    return out;
}

SimMetrics compute_metrics(const SimResult& result, double settle_eps) {
    SimMetrics m;
    m.settled = result.settled;
    m.settle_time = result.settle_time;
    if (result.rows.empty()) return m;

    m.thrust_min = m.thrust_max = result.rows.front().thrust;
    for (const auto& r : result.rows) {
        m.thrust_min = std::min(m.thrust_min, r.thrust);
        m.thrust_max = std::max(m.thrust_max, r.thrust);
    }

    if (m.settled) {
        for (const auto& r : result.rows)
            if (r.t >= m.settle_time)
                m.max_error_post_settle =
                    std::max(m.max_error_post_settle, r.vtilde.norm());
    } else {
        m.max_error_post_settle = std::numeric_limits<double>::infinity();
    }

    // Dominant spike: peak of |vtilde| over t >= 1 s, then walk back to the
    // last instant the error was still inside the band.
    std::size_t peak = 0;
    double peak_err = -1.0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (result.rows[i].t < 1.0) continue;
        const double e = result.rows[i].vtilde.norm();
        if (e > peak_err) {
            peak_err = e;
            peak = i;
        }
    }
    bool have_start = false;
    for (std::size_t i = peak + 1; i-- > 0;) {
        if (result.rows[i].vtilde.norm() <= settle_eps) {
            m.jump_time_estimate = result.rows[i].t;
            have_start = true;
            break;
        }
    }
    if (!have_start) {
        std::size_t imax = 0;
        for (std::size_t i = 0; i < result.rows.size(); ++i)
            if (std::abs(result.rows[i].omega) > std::abs(result.rows[imax].omega))
                imax = i;
        m.jump_time_estimate = result.rows[imax].t;
    }
    return m;
}

}  // namespace longfd
