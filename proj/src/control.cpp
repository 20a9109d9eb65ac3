#include "longfd/control.hpp"

#include <algorithm>
#include <cmath>

#include "longfd/errors.hpp"

namespace longfd {

void ControllerGains::validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(k3 > 0.0))
        throw ConfigError("controller gains k1, k2, k3 must be > 0");
    if (!(tau > 0.0)) throw ConfigError("controller gain tau must be > 0");
}

double mu_tau(double s, double tau) {
    if (!(tau > 0.0)) throw ConfigError("mu_tau: tau must be > 0");
    if (s >= tau) return 1.0;
    if (s <= 0.0) return 0.0;
    return std::sin(0.5 * kPi * (s / tau) * (s / tau));
}

double mu_tau_over_s2(double s, double tau) {
    if (!(tau > 0.0)) throw ConfigError("mu_tau_over_s2: tau must be > 0");
    const double limit = 0.5 * kPi / (tau * tau);
    if (s <= 0.0) return limit;
    if (s >= tau) return 1.0 / (s * s);
    const double x = 0.5 * kPi * (s / tau) * (s / tau);
    if (x < 1e-8) return limit;  // sin(x)/s^2 would lose precision
    return std::sin(x) / (s * s);
}

Vec2 feedforward_F_delta(const AeroModel& model, const BodyParams& body,
                         const ReferenceState& ref, const Vec2& xdot, double theta,
                         const Vec2& xddot_a, LambdaRule rule) {
    const Vec2 xdot_a = xdot - ref.xdot_w;
    const AirState air = angle_of_attack(xdot_a, theta, body.delta);
    if (!air.alpha) return -body.m * ref.xdddot_r;

    const TransformedCoeffJets j =
        transformed_coeff_jets(model, *air.alpha, body.delta, rule);
    const double n = air.speed;
    const Mat2 S = skew90();
    // Air-velocity sensitivity with the coefficients frozen at the current
    // alpha; the alpha dependence enters separately through gamma_dot.
    const Mat2 M = j.cl_bar * S - j.cd_bar * Mat2::Identity();
    const Mat2 dfp_dxa =
        body.k_a * M * (xdot_a * xdot_a.transpose() / n + n * Mat2::Identity());
    const Vec2 dfp_dalpha =
        body.k_a * n * ((j.cl_bar_d1 * S - j.cd_bar_d1 * Mat2::Identity()) * xdot_a);
    const double gamma_dot = xdot_a.dot(S.transpose() * xddot_a) / (n * n);
    return dfp_dxa * xddot_a - dfp_dalpha * gamma_dot - body.m * ref.xdddot_r;
}

VelocityTrackingController::VelocityTrackingController(AeroModel model,
                                                       BodyParams body,
                                                       LambdaRule rule,
                                                       ControllerGains gains,
                                                       ControlLaw law,
                                                       bool use_feedforward)
    : model_(std::move(model)),
      body_(body),
      rule_(rule),
      gains_(gains),
      law_(law),
      use_feedforward_(use_feedforward) {
    body_.validate();
    gains_.validate();
}

ControlInput VelocityTrackingController::compute(const ReferenceState& ref,
                                                 const Vec2& xdot, double theta,
                                                 ControlDiagnostics* diag) const {
    const Mat2 R = rot(theta);
    const Mat2 S = skew90();
    const Vec2 vtilde = R.transpose() * (xdot - ref.xdot_r);
    const Vec2 xdot_a = xdot - ref.xdot_w;

    const Vec2 F = apparent_force(model_, body_, ref, xdot, theta);
    const TransformedForce tf =
        transformed_force(model_, body_, ref, xdot, theta, rule_);
    const Vec2 Fb = R.transpose() * F;
    const Vec2 Fpb = R.transpose() * tf.F_p;
    const double Fp_norm = tf.F_p.norm();

    ControlInput u;
    u.thrust = Fb(0) + gains_.k1 * Fp_norm * vtilde(0);

    Vec2 F_delta = Vec2::Zero();
    if (use_feedforward_) {
        // Predicted acceleration under the commanded thrust, closed with the
        // estimated model (exact when the estimates match the plant).
        const Vec2 Fa_hat = aero_force(model_, body_, xdot_a, theta);
        const Vec2 xddot_pred =
            body_.g * e1() + (Fa_hat - u.thrust * (R * e1())) / body_.m;
        F_delta = feedforward_F_delta(model_, body_, ref, xdot, theta,
                                      xddot_pred - ref.xddot_w, rule_);
    }

    const double s1 = Fp_norm + Fpb(0);
    double gain_k = 1.0;
    double omega = 0.0;
    if (law_ == ControlLaw::ideal) {
        if (!(Fp_norm > 0.0) || !(s1 > 1e-12 * std::max(1.0, Fp_norm)))
            throw SingularityError(
                "ideal control law: |F_p| + F_p_body1 vanishes (orientation "
                "error at pi, or self-balancing reference velocity)");
        const AirState air = angle_of_attack(xdot_a, theta, body_.delta);
        if (air.alpha) {
            const TransformedCoeffJets j =
                transformed_coeff_jets(model_, *air.alpha, body_.delta, rule_);
            const double phi = *air.alpha + body_.delta;
            const double den =
                1.0 + body_.k_a * air.speed * air.speed * Fb(1) *
                          (std::cos(phi) * j.cd_bar_d1 - std::sin(phi) * j.cl_bar_d1) /
                          (Fp_norm * Fp_norm);
            if (std::abs(den) < 1e-12)
                throw SingularityError(
                    "ideal control law: rate-scaling denominator vanished");
            gain_k = 1.0 / den;
        }
        omega = gains_.k2 * Fp_norm * vtilde(1) +
                gains_.k3 * Fp_norm * Fpb(1) / (s1 * s1);
        if (use_feedforward_)
            omega -= Fpb.dot(S * (R.transpose() * F_delta)) / (Fp_norm * Fp_norm);
        omega *= gain_k;
    } else {
        omega = gains_.k2 * Fp_norm * vtilde(1) +
                gains_.k3 * Fp_norm * Fpb(1) * mu_tau_over_s2(s1, gains_.tau);
        if (use_feedforward_)
            omega -= Fpb.dot(S * (R.transpose() * F_delta)) *
                     mu_tau_over_s2(Fp_norm, gains_.tau);
    }
    u.omega = omega;

    if (diag) {
        diag->vtilde = vtilde;
        diag->F_p = tf.F_p;
        diag->F_p_body = Fpb;
        diag->Fp_norm = Fp_norm;
        diag->T_p = u.thrust + tf.T_p_offset;
        diag->gain_k = gain_k;
        diag->theta_err = Fp_norm > 0.0 ? std::atan2(Fpb(1), Fpb(0)) : 0.0;
        diag->V = 0.5 * body_.m * vtilde.squaredNorm();
        if (Fp_norm > 0.0) diag->V += (1.0 - Fpb(0) / Fp_norm) / gains_.k2;
        diag->Vdot_pred = -gains_.k1 * Fp_norm * vtilde(0) * vtilde(0);
        if (s1 > 0.0)
            diag->Vdot_pred -=
                (gains_.k3 / gains_.k2) * Fpb(1) * Fpb(1) / (s1 * s1);
    }
    return u;
}

}  // namespace longfd
