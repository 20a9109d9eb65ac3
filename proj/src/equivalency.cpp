#include "longfd/equivalency.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "longfd/errors.hpp"

namespace longfd {

double lambda_general(const AeroModel& model, double alpha, double delta) {
    const CoeffDerivs d = model.coeff_derivs(alpha);
    const double phi = alpha + delta;
    return d.cl_d1 * std::cos(phi) + d.cd_d1 * std::sin(phi);
}

double lambda_special(const AeroModel& model, double alpha) {
    const double s = std::sin(alpha);
    // Removable singularity for odd lift: near sin(alpha)=0 the ratio tends
    // to cl'(alpha)/cos(alpha), with cos = +/-1 at the two zeros.
    if (std::abs(s) < 1e-6)
        return model.coeff_derivs(alpha).cl_d1 / std::cos(alpha);
    return model.coeffs(alpha).cl / s;
}

CoeffPair transformed_coeffs(const AeroModel& model, double alpha, double delta,
                             double lambda) {
    const CoeffPair c = model.coeffs(alpha);
    const double phi = alpha + delta;
    return {c.cl - lambda * std::sin(phi), c.cd + lambda * std::cos(phi)};
}

TransformedCoeffJets transformed_coeff_jets(const AeroModel& model, double alpha,
                                            double delta, LambdaRule rule) {
    const CoeffPair c = model.coeffs(alpha);
    const CoeffDerivs d = model.coeff_derivs(alpha);
    const double phi = alpha + delta;
    const double sp = std::sin(phi), cp = std::cos(phi);

    TransformedCoeffJets out;
    if (rule == LambdaRule::general) {
        out.lambda = d.cl_d1 * cp + d.cd_d1 * sp;
        out.lambda_d1 = d.cl_d2 * cp - d.cl_d1 * sp + d.cd_d2 * sp + d.cd_d1 * cp;
    } else {
        const double s = std::sin(alpha);
        if (std::abs(s) < 1e-6) {
            // Limit of cl/sin for odd lift; cos = +/-1 at the two zeros.
            out.lambda = d.cl_d1 / std::cos(alpha);
            out.lambda_d1 = 0.0;
        } else {
            out.lambda = c.cl / s;
            out.lambda_d1 = (d.cl_d1 * s - c.cl * std::cos(alpha)) / (s * s);
        }
    }
    out.cl_bar = c.cl - out.lambda * sp;
    out.cd_bar = c.cd + out.lambda * cp;
    out.cl_bar_d1 = d.cl_d1 - out.lambda_d1 * sp - out.lambda * cp;
    out.cd_bar_d1 = d.cd_d1 + out.lambda_d1 * cp - out.lambda * sp;
    return out;
}

GlobalConditionReport check_global_condition(const AeroModel& model, double delta,
                                             int grid_n) {
    GlobalConditionReport rep;
    rep.grid_size = static_cast<std::size_t>(std::max(grid_n, 2));
    double max_d2 = 0.0;
    for (std::size_t i = 0; i < rep.grid_size; ++i) {
        const double a = -kPi + 2.0 * kPi * static_cast<double>(i) /
                                    static_cast<double>(rep.grid_size);
        const CoeffDerivs d = model.coeff_derivs(a);
        const double phi = a + delta;
        const double r = (d.cd_d2 - 2.0 * d.cl_d1) * std::sin(phi) +
                         (d.cl_d2 + 2.0 * d.cd_d1) * std::cos(phi);
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
        max_d2 = std::max({max_d2, std::abs(d.cl_d2), std::abs(d.cd_d2)});
    }
    rep.holds = rep.max_residual <= 1e-8 * (1.0 + max_d2);
    return rep;
}

SpecialConditionReport check_special_condition(const AeroModel& model, int grid_n) {
    SpecialConditionReport rep;
    const int n = std::max(grid_n, 2);
    std::vector<double> vals;
    vals.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double a = -kPi + 2.0 * kPi * i / n;
        const double s = std::sin(a);
        if (std::abs(s) < 1e-6) continue;
        const CoeffPair c = model.coeffs(a);
        vals.push_back(c.cd + c.cl * std::cos(a) / s);
    }
    if (vals.empty()) return rep;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    rep.c_bar_D_value = mean;
    for (double v : vals) rep.max_deviation = std::max(rep.max_deviation, std::abs(v - mean));
    rep.holds = rep.max_deviation <= 1e-8 * (1.0 + std::abs(mean));
    return rep;
}

TransformedForce transformed_force(const AeroModel& model, const BodyParams& body,
                                   const ReferenceState& ref, const Vec2& xdot,
                                   double theta, LambdaRule rule) {
    TransformedForce out;
    const Vec2 xdot_a = xdot - ref.xdot_w;
    const AirState air = angle_of_attack(xdot_a, theta, body.delta);
    if (!air.alpha) {  // zero airspeed: no aerodynamic contribution
        out.F_p = body.m * body.g * e1() - body.m * ref.xddot_r;
        return out;
    }
    const TransformedCoeffJets j =
        transformed_coeff_jets(model, *air.alpha, body.delta, rule);
    out.lambda = j.lambda;
    out.c_bar_L = j.cl_bar;
    out.c_bar_D = j.cd_bar;
    const Vec2 f_p = body.k_a * air.speed *
                     (j.cl_bar * (skew90() * xdot_a) - j.cd_bar * xdot_a);
    out.F_p = body.m * body.g * e1() + f_p - body.m * ref.xddot_r;
    out.T_p_offset = body.k_a * j.lambda * air.speed * air.speed;
    return out;
}

double theta_e_closed_form(const AeroModel& model, const BodyParams& body,
                           const ReferenceState& ref, LambdaRule rule) {
    const GlobalConditionReport cond = check_global_condition(model, body.delta);
    if (!cond.holds)
        throw NumericalError(
            "theta_e_closed_form: transformed force direction depends on "
            "orientation (condition residual " +
            std::to_string(cond.max_residual) + ")");
    const double cd_bar =
        transformed_coeff_jets(model, 0.0, body.delta, rule).cd_bar;
    if (!(cd_bar > 0.0))
        throw NumericalError(
            "theta_e_closed_form: transformed drag must be positive, got " +
            std::to_string(cd_bar));
    const TransformedForce tf =
        transformed_force(model, body, ref, ref.xdot_r, 0.0, rule);
    if (tf.F_p.norm() <= 1e-12 * body.m * body.g)
        throw SingularityError(
            "theta_e_closed_form: |F_p| = 0 (self-balancing reference velocity)");
    return std::atan2(tf.F_p(1), tf.F_p(0));
}

double direction_flatness(const AeroModel& model, const BodyParams& body,
                          const ReferenceState& ref, double theta_e,
                          LambdaRule rule) {
    const double h = 1e-6;
    const auto unit = [&](double th) -> Vec2 {
        const Vec2 F_p = transformed_force(model, body, ref, ref.xdot_r, th, rule).F_p;
        const double n = F_p.norm();
        if (n <= 0.0)
            throw SingularityError("direction_flatness: |F_p| = 0");
        return F_p / n;
    };
    return ((unit(theta_e + h) - unit(theta_e - h)) / (2.0 * h)).norm();
}

namespace {

// Reference data a short step away in time, from the carried derivatives.
ReferenceState shift_reference(const ReferenceState& ref, double h) {
    ReferenceState out = ref;
    out.t = ref.t + h;
    out.xdot_r = ref.xdot_r + h * ref.xddot_r + 0.5 * h * h * ref.xdddot_r;
    out.xddot_r = ref.xddot_r + h * ref.xdddot_r;
    out.xdot_w = ref.xdot_w + h * ref.xddot_w;
    return out;
}

double nearest_equilibrium(const AeroModel& model, const BodyParams& body,
                           const ReferenceState& ref, double guess) {
    const EquilibriumSet set = solve_equilibria(model, body, ref);
    if (set.solutions.empty())
        throw NumericalError(
            "linearize: no equilibrium under the shifted reference");
    double best = std::numeric_limits<double>::infinity(), th = guess;
    for (const auto& s : set.solutions) {
        const double d = std::abs(wrap_angle(s.theta_e - guess));
        if (d < best) {
            best = d;
            th = s.theta_e;
        }
    }
    return th;
}

}  // namespace

Linearization linearize(const AeroModel& model, const BodyParams& body,
                        const ReferenceState& ref, double theta_e,
                        LambdaRule rule) {
    Linearization lin;
    const Vec2 Fp0 =
        transformed_force(model, body, ref, ref.xdot_r, theta_e, rule).F_p;
    const double Fp_norm = Fp0.norm();
    if (Fp_norm <= 1e-12 * body.m * body.g)
        throw SingularityError("linearize: |F_p| = 0 at the equilibrium");

    const double hv = 1e-6;
    Mat2 dFp_dv;
    for (int j = 0; j < 2; ++j) {
        Vec2 vp = ref.xdot_r, vm = ref.xdot_r;
        vp(j) += hv;
        vm(j) -= hv;
        const Vec2 Fp = transformed_force(model, body, ref, vp, theta_e, rule).F_p;
        const Vec2 Fm = transformed_force(model, body, ref, vm, theta_e, rule).F_p;
        dFp_dv.col(j) = (Fp - Fm) / (2.0 * hv);
    }

    const double ha = 1e-6;
    const double np =
        transformed_force(model, body, ref, ref.xdot_r, theta_e + ha, rule).F_p.norm();
    const double nm =
        transformed_force(model, body, ref, ref.xdot_r, theta_e - ha, rule).F_p.norm();
    const double a_coef = (np - nm) / (2.0 * ha);
    const double b_coef = -Fp_norm;  // thrust on the aligned (T_p = +|F_p|) branch

    const Mat2 R = rot(theta_e);
    lin.A.topLeftCorner<2, 2>() = dFp_dv / body.m;
    lin.A.topRightCorner<2, 1>() = R * Vec2(a_coef, b_coef);

    lin.B.col(0).head<2>() = -(R * e1());
    lin.B(2, 1) = 1.0;

    const double ht = 1e-4;
    const double th_p =
        nearest_equilibrium(model, body, shift_reference(ref, ht), theta_e);
    const double th_m =
        nearest_equilibrium(model, body, shift_reference(ref, -ht), theta_e);
    const double theta_dot_e = wrap_angle(th_p - th_m) / (2.0 * ht);
    lin.B_dot.col(0).head<2>() = -theta_dot_e * (R * e2());

    lin.ctrl_matrix.leftCols<2>() = lin.B;
    lin.ctrl_matrix.rightCols<2>() = lin.A * lin.B - lin.B_dot;

    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(lin.ctrl_matrix);
    const auto& sv = svd.singularValues();
    if (sv.size() > 0 && sv(0) > 0.0) {
        const double thresh = 1e-8 * sv(0);
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > thresh) ++lin.rank;
    }
    return lin;
}

}  // namespace longfd
