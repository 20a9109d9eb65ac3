#pragma once

// Thrust change of variable making the transformed external force direction
// independent of orientation (as for a spherical body): the lambda rules,
// transformed coefficients/force/thrust, the exactness conditions, the
// closed-form equilibrium orientation, and the local linearization with its
// controllability check.

#include <Eigen/Dense>
#include <cstddef>

#include "longfd/aero.hpp"
#include "longfd/equilibrium.hpp"

namespace longfd {

enum class LambdaRule { general, special };

// General rule: lambda(alpha) = cl'*cos(alpha+delta) + cd'*sin(alpha+delta).
double lambda_general(const AeroModel& model, double alpha, double delta);

// Special rule (delta = 0): lambda(alpha) = cl(alpha)/sin(alpha), with the
// limit cl'(alpha) at sin(alpha) = 0 (removable for odd lift).
double lambda_special(const AeroModel& model, double alpha);

// Transformed coefficients for a given lambda:
// clbar = cl - lambda*sin(alpha+delta), cdbar = cd + lambda*cos(alpha+delta).
CoeffPair transformed_coeffs(const AeroModel& model, double alpha, double delta,
                             double lambda);

// Values plus first derivatives of lambda and the transformed coefficients,
// for the selected rule (the special rule assumes delta = 0).
struct TransformedCoeffJets {
    double lambda = 0.0, lambda_d1 = 0.0;
    double cl_bar = 0.0, cd_bar = 0.0;
    double cl_bar_d1 = 0.0, cd_bar_d1 = 0.0;
};
TransformedCoeffJets transformed_coeff_jets(const AeroModel& model, double alpha,
                                            double delta, LambdaRule rule);

// Exactness condition for orientation-independent transformed force:
// (cd'' - 2*cl')*sin(alpha+delta) + (cl'' + 2*cd')*cos(alpha+delta) = 0.
struct GlobalConditionReport {
    double max_residual = 0.0;
    std::size_t grid_size = 0;
    bool holds = false;  // max_residual <= 1e-8 * (1 + max |c''|)
};
GlobalConditionReport check_global_condition(const AeroModel& model, double delta,
                                             int grid_n = 2048);

// Delta = 0 special case: cd + cl*cot(alpha) constant across alpha.
struct SpecialConditionReport {
    double c_bar_D_value = 0.0;   // mean of cd + cl*cot(alpha) over the grid
    double max_deviation = 0.0;   // worst deviation from that mean
    bool holds = false;           // max_deviation <= 1e-8 * (1 + |mean|)
};
SpecialConditionReport check_special_condition(const AeroModel& model,
                                               int grid_n = 2048);

struct TransformedForce {
    Vec2 F_p = Vec2::Zero();   // m*g*e1 + f_p - m*xddot_r [N], inertial coords
    double T_p_offset = 0.0;   // T_p - T = k_a*lambda*|xdot_a|^2 [N]
    double lambda = 0.0;
    double c_bar_L = 0.0, c_bar_D = 0.0;
};

// Transformed external force at the given state. At zero airspeed the
// aerodynamic part vanishes and F_p equals the apparent force.
TransformedForce transformed_force(const AeroModel& model, const BodyParams& body,
                                   const ReferenceState& ref, const Vec2& xdot,
                                   double theta, LambdaRule rule = LambdaRule::general);

// Closed-form equilibrium orientation atan2(F_p2, F_p1), valid when the
// transformed force is orientation-independent with positive constant drag.
// Throws NumericalError when the model fails those preconditions and
// SingularityError when |F_p| vanishes (the bad reference velocity).
double theta_e_closed_form(const AeroModel& model, const BodyParams& body,
                           const ReferenceState& ref,
                           LambdaRule rule = LambdaRule::general);

// Norm of the central finite difference (h = 1e-6 rad) of F_p/|F_p| with
// respect to theta, evaluated at xdot = xdot_r. Near zero at equilibria.
double direction_flatness(const AeroModel& model, const BodyParams& body,
                          const ReferenceState& ref, double theta_e,
                          LambdaRule rule = LambdaRule::general);

struct Linearization {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Matrix<double, 3, 2> B = Eigen::Matrix<double, 3, 2>::Zero();
    Eigen::Matrix<double, 3, 2> B_dot = Eigen::Matrix<double, 3, 2>::Zero();
    Eigen::Matrix<double, 3, 4> ctrl_matrix = Eigen::Matrix<double, 3, 4>::Zero();
    int rank = 0;  // of [B, A*B - B_dot], by SVD thresholding at 1e-8*sigma_max
};

// Linearized error dynamics about a certified equilibrium orientation
// (state: mass-scaled velocity error + orientation error; inputs: transformed
// thrust + angular rate). Velocity Jacobian and the equilibrium drift rate
// use finite differences. Throws SingularityError when |F_p| vanishes at the
// equilibrium (the controllability claim is void there).
Linearization linearize(const AeroModel& model, const BodyParams& body,
                        const ReferenceState& ref, double theta_e,
                        LambdaRule rule = LambdaRule::general);

}  // namespace longfd
