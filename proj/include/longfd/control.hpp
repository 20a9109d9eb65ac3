#pragma once

// Velocity-tracking control laws built on the transformed thrust variable:
// thrust from the longitudinal force balance, pitch rate from orientation
// error between the body axis and the estimated transformed force, in an
// exact-cancellation (ideal) and a regularized (robust) variant.

#include <Eigen/Dense>

#include "longfd/aero.hpp"
#include "longfd/equilibrium.hpp"
#include "longfd/equivalency.hpp"

namespace longfd {

struct ControllerGains {
    double k1 = 0.0;   // longitudinal velocity-error gain [1/(N*s) scale]
    double k2 = 0.0;   // lateral velocity-error gain
    double k3 = 0.0;   // orientation-error gain
    double tau = 1.0;  // force scale of the robust law's saturation [N]

    void validate() const;  // throws ConfigError unless k1,k2,k3,tau > 0
};

enum class ControlLaw { ideal, robust };

struct ControlInput {
    double thrust = 0.0;  // T [N]
    double omega = 0.0;   // commanded pitch rate [rad/s]
};

// Quantities evaluated alongside the law, all from the estimated model.
struct ControlDiagnostics {
    Vec2 vtilde = Vec2::Zero();    // body-frame velocity error R^T(xdot - xdot_r)
    Vec2 F_p = Vec2::Zero();       // estimated transformed force, inertial coords
    Vec2 F_p_body = Vec2::Zero();  // R^T * F_p
    double Fp_norm = 0.0;
    double T_p = 0.0;       // transformed thrust T + k_a*lambda*|xdot_a|^2
    double gain_k = 1.0;    // ideal law's rate scaling (identically 1 in the robust law)
    double V = 0.0;         // Lyapunov value m/2*|vtilde|^2 + (1 - cos(theta_err))/k2
    double Vdot_pred = 0.0; // decrease rate the exact-cancellation law enforces
    double theta_err = 0.0; // atan2(F_p_body2, F_p_body1)
};

// Smooth saturation: sin(pi*s^2/(2*tau^2)) for 0 <= s <= tau, 1 beyond.
double mu_tau(double s, double tau);
// mu_tau(s)/s^2 extended continuously with pi/(2*tau^2) at s = 0.
double mu_tau_over_s2(double s, double tau);

// Aerodynamic rate-of-change feedforward
//   F_delta = d(f_p)/d(xdot_a)*xddot_a - d(f_p)/d(alpha)*gamma_dot - m*xdddot_r
// evaluated with the given model/body (typically estimates); reduces to
// -m*xdddot_r at zero airspeed where the aerodynamic terms vanish.
Vec2 feedforward_F_delta(const AeroModel& model, const BodyParams& body,
                         const ReferenceState& ref, const Vec2& xdot, double theta,
                         const Vec2& xddot_a, LambdaRule rule = LambdaRule::general);

class VelocityTrackingController {
  public:
    VelocityTrackingController(AeroModel model, BodyParams body, LambdaRule rule,
                               ControllerGains gains, ControlLaw law,
                               bool use_feedforward);

    // Thrust and pitch-rate command for the current state against the
    // reference. When feedforward is enabled, the air acceleration entering
    // F_delta is predicted from the commanded thrust and the estimated model.
    ControlInput compute(const ReferenceState& ref, const Vec2& xdot, double theta,
                         ControlDiagnostics* diag = nullptr) const;

    const BodyParams& body() const { return body_; }
    const AeroModel& model() const { return model_; }
    const ControllerGains& gains() const { return gains_; }
    ControlLaw law() const { return law_; }
    LambdaRule rule() const { return rule_; }
    bool use_feedforward() const { return use_feedforward_; }

  private:
    AeroModel model_;
    BodyParams body_;
    LambdaRule rule_;
    ControllerGains gains_;
    ControlLaw law_;
    bool use_feedforward_;
};

}  // namespace longfd
