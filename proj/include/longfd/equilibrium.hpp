#pragma once

// Equilibrium-orientation analysis: the scalar circle function f_t(theta)
// whose zeros are the orientations at which thrust alone can balance the
// apparent external force, root solving over the circle, thrust-positivity
// filtering, the a_nu(alpha_e) fold curve for steady horizontal flight,
// branch tracking with jump detection, the stall-induced multiplicity
// condition, and the self-balancing reference-velocity integrator.

#include <functional>
#include <optional>
#include <vector>

#include "longfd/aero.hpp"

namespace longfd {

// Reference trajectory and wind data at one time instant.
struct ReferenceState {
    double t = 0.0;
    Vec2 xdot_r = Vec2::Zero();    // reference velocity [m/s]
    Vec2 xddot_r = Vec2::Zero();   // reference acceleration [m/s^2]
    Vec2 xdddot_r = Vec2::Zero();  // reference jerk [m/s^3]
    Vec2 xdot_w = Vec2::Zero();    // wind velocity [m/s]
    Vec2 xddot_w = Vec2::Zero();   // wind acceleration [m/s^2]
};

using ReferenceProfileFn = std::function<ReferenceState(double)>;

// Apparent external force F = m*g*e1 + F_a(xdot - xdot_w, theta) - m*xddot_r:
// the force the thrust must cancel at equilibrium.
Vec2 apparent_force(const AeroModel& model, const BodyParams& body,
                    const ReferenceState& ref, const Vec2& xdot, double theta);

// f_t(theta) = F^T R(theta) e2 evaluated at xdot = xdot_r. Zeros are the
// equilibrium orientations at this instant.
double f_t(const AeroModel& model, const BodyParams& body,
           const ReferenceState& ref, double theta);

struct EquilibriumSolution {
    double theta_e = 0.0;                // orientation [rad], in (-pi, pi]
    std::optional<double> alpha_e;       // angle of attack at (xdot_r - xdot_w); unset at zero airspeed
    double thrust_e = 0.0;               // F^T R(theta_e) e1 [N]
    bool thrust_nonneg = false;
    double residual = 0.0;               // |f_t(theta_e)| [N]
};

struct EquilibriumSet {
    std::vector<EquilibriumSolution> solutions;  // ascending theta_e
    bool degenerate_all_orientations = false;    // f_t ~ 0 everywhere
};

struct SolverOptions {
    int n_grid = 720;               // uniform scan samples over [-pi, pi)
    double bisect_tol = 1e-10;      // bracket width target [rad]
    double degeneracy_scale = 1e-9; // of (m*g + k_a*|xdot_r - xdot_w|^2)
};

// Scans f_t on a uniform grid, refines every sign change by bisection, and
// annotates each root with thrust and angle of attack. An empty set is a
// valid result; the degenerate flag marks the all-orientations case.
EquilibriumSet solve_equilibria(const AeroModel& model, const BodyParams& body,
                                const ReferenceState& ref,
                                const SolverOptions& opts = {});

// Keeps the solutions with thrust_e >= 0.
EquilibriumSet positive_thrust_subset(const EquilibriumSet& set);

// Dimensionless speed parameter a_nu = k_a*nu^2/(m*g) required for a steady
// horizontal flight equilibrium at angle of attack alpha_e (no wind, delta=0):
// a_nu = cos(alpha_e) / (cd*sin(alpha_e) + cl*cos(alpha_e)).
// Unset when the denominator vanishes or sin(alpha_e) = 0.
std::optional<double> a_nu_of_alpha(const AeroModel& model, double alpha_e);

struct BifurcationCurve {
    struct Sample {
        double alpha_e = 0.0;
        double a_nu = 0.0;
        bool defined = false;
    };
    struct Fold {
        double alpha_e = 0.0;  // where the slope of a_nu changes sign
        double a_nu = 0.0;
    };
    std::vector<Sample> samples;
    std::vector<Fold> folds;
};

// Evaluates a_nu over the grid and locates folds (slope sign changes,
// refined by bisection on a central-difference slope).
BifurcationCurve bifurcation_sweep(const AeroModel& model,
                                   const std::vector<double>& alpha_grid);

struct TrackOptions {
    double jump_threshold = deg2rad(5.0);  // wrapped-theta distance [rad]
    SolverOptions solver;
};

struct JumpEvent {
    double t = 0.0;
    double theta_before = 0.0, theta_after = 0.0;  // [rad]
    std::optional<double> alpha_before, alpha_after;
};

struct TrackPoint {
    double t = 0.0;
    bool has_solution = false;
    EquilibriumSolution sol;
    bool jump = false;  // branch moved farther than the jump threshold
    bool gap = false;   // no equilibria at this instant
};

struct TrackResult {
    std::vector<TrackPoint> points;
    std::vector<JumpEvent> jumps;
    int gaps = 0;
};

// Follows one equilibrium branch along a reference profile: nearest
// wrapped-theta continuation, initialized at the positive-thrust solution
// with the largest angle of attack.
TrackResult track_branch(const AeroModel& model, const BodyParams& body,
                         const ReferenceProfileFn& profile,
                         const std::vector<double>& t_grid,
                         const TrackOptions& opts = {});

struct StallConditionReport {
    // Rear drag exceeds front drag: cd(pi) > cd(0). Without it the search
    // is void and alpha_s stays unset.
    bool drag_asymmetry_holds = false;
    // First angle in (0, pi/2) with cl > 0 and
    // tan(alpha_s) <= (cd(alpha_s) - cd(pi)) / cl(alpha_s).
    std::optional<double> alpha_s;
};

// Searches for a stall angle guaranteeing more than two equilibria in some
// speed range (drag-dominance condition).
StallConditionReport check_stall_multiplicity_condition(const AeroModel& model,
                                                        int grid_n = 2048);

struct BadReferenceTrajectory {
    std::vector<double> t;
    std::vector<Vec2> xdot_b;    // reference velocity along which every
                                 // orientation is an equilibrium
    std::vector<double> fp_norm; // |F_p| along the trajectory (should be ~0)
};

using WindFn = std::function<Vec2(double)>;  // wind velocity vs time

// Integrates xddot_b = g*e1 + (k_a/m)*|xdot_b - xdot_w|*(clbar*S - cdbar*I)*(xdot_b - xdot_w)
// with RK4, where (clbar, cdbar) are the constant transformed coefficients.
// Requires a model with direction-flat transformed force and cdbar > 0;
// refuses with NumericalError otherwise.
BadReferenceTrajectory integrate_bad_reference(const AeroModel& model,
                                               const BodyParams& body,
                                               const Vec2& xdot_b0,
                                               const WindFn& wind,
                                               double horizon, double dt);

}  // namespace longfd
