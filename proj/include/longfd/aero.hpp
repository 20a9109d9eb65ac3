#pragma once

// Aerodynamic coefficient models (parametric, blended, tabulated, custom),
// the steady aerodynamic force in inertial coordinates, angle-of-attack
// conventions, and shape symmetry / passivity checks.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "longfd/frame.hpp"
#include "longfd/interp.hpp"

namespace longfd {

// Physical constants of the vehicle: mass, gravity, the aerodynamic constant
// k_a = rho*Sigma/2, and the fixed angle delta between the body's zero-lift
// direction and the thrust axis.
struct BodyParams {
    double m = 1.0;      // mass [kg]
    double g = 9.81;     // gravitational acceleration [m/s^2]
    double k_a = 0.0;    // rho*Sigma/2 [kg/m]
    double delta = 0.0;  // zero-lift-to-thrust angle [rad], in (-pi, pi]

    void validate() const;  // throws ConfigError on non-physical values
};

struct CoeffPair {
    double cl = 0.0;
    double cd = 0.0;
};

struct CoeffDerivs {
    double cl_d1 = 0.0;
    double cd_d1 = 0.0;
    double cl_d2 = 0.0;
    double cd_d2 = 0.0;
};

// Smooth-rectangular blending weight in [0,1]: 1 at alpha=0, ~0 beyond
// |alpha| >> alpha_bar, with transition sharpness k_bar.
double sigma(double alpha_bar, double k_bar, double alpha);
// First/second derivative of sigma with respect to alpha.
double sigma_d1(double alpha_bar, double k_bar, double alpha);
double sigma_d2(double alpha_bar, double k_bar, double alpha);

// Lift/drag coefficient model as a function of angle of attack. All variants
// evaluate for any finite alpha (wrapped to (-pi, pi]) and provide first and
// second derivatives: analytic for parametric variants, from the piecewise
// cubic for the tabulated variant.
class AeroModel {
  public:
    using CoeffFn = std::function<CoeffPair(double)>;
    using DerivFn = std::function<CoeffDerivs(double)>;

    // cl = c1*sin(2a), cd = c0 + 2*c1*sin^2(a) (high-incidence plate shape).
    static AeroModel flat_plate(double c0, double c1);
    // Pre-stall rational model: cl = c2^2*sin(2a)/(2*D), cd = c0 + c2*c3*sin^2(a)/D,
    // D = (c2-c3)*cos^2(a) + c3. Taylor: cl ~ c2*a, cd ~ c0 + c3*a^2.
    static AeroModel small_alpha(double c0, double c2, double c3);
    // sigma-weighted combination: small_alpha inside |a| <~ alpha_bar,
    // flat_plate outside, with per-coefficient sharpness k_l / k_d.
    static AeroModel blended(double c0, double c1, double c2, double c3,
                             double alpha_bar, double k_l, double k_d);
    // Interpolated table over one revolution; alpha in radians.
    static AeroModel tabulated(const std::vector<double>& alpha,
                               const std::vector<double>& cl,
                               const std::vector<double>& cd);
    // User-supplied coefficient functions (deriv_fn optional: central
    // finite differences are used when absent).
    static AeroModel custom(CoeffFn coeff_fn, DerivFn deriv_fn = nullptr,
                            std::string name = "custom");

    CoeffPair coeffs(double alpha) const;
    CoeffDerivs coeff_derivs(double alpha) const;
    const std::string& kind() const { return kind_; }

  private:
    struct FlatPlate {
        double c0, c1;
    };
    struct SmallAlpha {
        double c0, c2, c3;
    };
    struct Blended {
        double c0, c1, c2, c3, alpha_bar, k_l, k_d;
    };
    struct Tabulated {
        PeriodicPchip cl, cd;
    };
    struct Custom {
        CoeffFn coeff_fn;
        DerivFn deriv_fn;
    };
    using Variant = std::variant<FlatPlate, SmallAlpha, Blended, Tabulated, Custom>;

    AeroModel(Variant v, std::string kind) : var_(std::move(v)), kind_(std::move(kind)) {}

    Variant var_;
    std::string kind_;
};

// Air-velocity state: course angle gamma and angle of attack alpha are
// carried with an explicit undefined flag at zero airspeed (never NaN).
struct AirState {
    Vec2 xdot_a = Vec2::Zero();   // air velocity, inertial coords [m/s]
    double speed = 0.0;           // |xdot_a|
    std::optional<double> gamma;  // atan2(xdot_a2, xdot_a1), unset at zero airspeed
    std::optional<double> alpha;  // theta - gamma + pi - delta, wrapped; unset at zero airspeed
};

// Populates AirState for a body at orientation theta with offset delta.
AirState angle_of_attack(const Vec2& xdot_a, double theta, double delta);

// Steady aerodynamic force in inertial coordinates:
// F_a = k_a*|xdot_a|*(cl*S - cd*I)*xdot_a; exactly zero at zero airspeed.
Vec2 aero_force(const AeroModel& model, const BodyParams& body,
                const Vec2& xdot_a, double theta);

struct SymmetryReport {
    bool is_even_drag = false;
    bool is_odd_lift = false;
    double max_violation = 0.0;  // worst of the two parity residuals
    double cl_at_zero = 0.0;     // |cl(0)|
    double cl_at_pi = 0.0;       // |cl(pi)|
};

struct BisymmetryReport {
    bool is_pi_periodic = false;
    double max_violation = 0.0;
};

struct PassivityReport {
    bool is_passive = false;
    double min_cd = 0.0;
};

// Grid checks over [-pi, pi): drag evenness + lift oddness (with zero lift at
// 0 and pi), pi-periodicity, and cd >= 0 (which is equivalent to
// xdot_a . F_a <= 0). Booleans use threshold tol.
SymmetryReport check_symmetry(const AeroModel& model, int grid_n = 2048,
                              double tol = 1e-9);
BisymmetryReport check_bisymmetry(const AeroModel& model, int grid_n = 2048,
                                  double tol = 1e-9);
PassivityReport check_passivity(const AeroModel& model, int grid_n = 2048);

// Reads a coefficient table (CSV columns alpha_deg,cl,cd; '#' comments) and
// builds the periodic interpolated model. Throws ConfigError naming the
// offending row on malformed input.
AeroModel load_tabulated(const std::string& path);

}  // namespace longfd
