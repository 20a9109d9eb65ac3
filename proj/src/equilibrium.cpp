#include "longfd/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "longfd/equivalency.hpp"
#include "longfd/errors.hpp"

namespace longfd {

Vec2 apparent_force(const AeroModel& model, const BodyParams& body,
                    const ReferenceState& ref, const Vec2& xdot, double theta) {
    const Vec2 xdot_a = xdot - ref.xdot_w;
    return body.m * body.g * e1() + aero_force(model, body, xdot_a, theta) -
           body.m * ref.xddot_r;
}

double f_t(const AeroModel& model, const BodyParams& body,
           const ReferenceState& ref, double theta) {
    const Vec2 F = apparent_force(model, body, ref, ref.xdot_r, theta);
    return F.dot(rot(theta) * e2());
}

namespace {

EquilibriumSolution annotate(const AeroModel& model, const BodyParams& body,
                             const ReferenceState& ref, double theta) {
    EquilibriumSolution sol;
    sol.theta_e = wrap_angle(theta);
    const Vec2 F = apparent_force(model, body, ref, ref.xdot_r, sol.theta_e);
    const Mat2 R = rot(sol.theta_e);
    sol.thrust_e = F.dot(R * e1());
    sol.residual = std::abs(F.dot(R * e2()));
    sol.thrust_nonneg = sol.thrust_e >= 0.0;
    sol.alpha_e = angle_of_attack(ref.xdot_r - ref.xdot_w, sol.theta_e, body.delta).alpha;
    return sol;
}

}  // namespace

EquilibriumSet solve_equilibria(const AeroModel& model, const BodyParams& body,
                                const ReferenceState& ref, const SolverOptions& opts) {
    if (opts.n_grid < 4) throw ConfigError("solve_equilibria: n_grid must be >= 4");
    if (!(opts.bisect_tol > 0.0)) throw ConfigError("solve_equilibria: bisect_tol must be > 0");

    const int n = opts.n_grid;
    std::vector<double> th(n + 1), fv(n + 1);
    for (int i = 0; i <= n; ++i) {
        th[i] = -kPi + 2.0 * kPi * i / n;  // th[n] closes the circle at +pi
        fv[i] = f_t(model, body, ref, th[i]);
    }

    EquilibriumSet out;
    const double scale =
        body.m * body.g + body.k_a * (ref.xdot_r - ref.xdot_w).squaredNorm();
    double fmax = 0.0;
    for (double v : fv) fmax = std::max(fmax, std::abs(v));
    if (fmax <= opts.degeneracy_scale * scale) {
        out.degenerate_all_orientations = true;
        return out;
    }

    std::vector<double> roots;
    // Grid values this close to zero count as roots outright; the band covers
    // roots sitting exactly on a grid point (e.g. the +/-pi seam, where the
    // periodic evaluation leaves a last-ulp remnant instead of an exact zero).
    const double zero_band = 1e-12 * scale;
    for (int i = 0; i < n; ++i) {
        if (std::abs(fv[i]) <= zero_band) roots.push_back(th[i]);
        if (fv[i] * fv[i + 1] < 0.0) {
            double lo = th[i], hi = th[i + 1], flo = fv[i];
            while (hi - lo > opts.bisect_tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f_t(model, body, ref, mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
    }

    std::vector<EquilibriumSolution> sols;
    sols.reserve(roots.size());
    for (double r : roots) sols.push_back(annotate(model, body, ref, r));
    std::sort(sols.begin(), sols.end(),
              [](const EquilibriumSolution& a, const EquilibriumSolution& b) {
                  return a.theta_e < b.theta_e;
              });

    // Merge roots closer than the solver can distinguish (a bracket refined
    // next to an exact grid zero, or the pair straddling the +/-pi seam).
    const double merge_tol = 1e-8;
    std::vector<EquilibriumSolution> kept;
    for (const auto& s : sols) {
        if (!kept.empty() &&
            std::abs(wrap_angle(s.theta_e - kept.back().theta_e)) < merge_tol) {
            if (s.residual < kept.back().residual) kept.back() = s;
        } else {
            kept.push_back(s);
        }
    }
    if (kept.size() > 1 &&
        std::abs(wrap_angle(kept.front().theta_e - kept.back().theta_e)) < merge_tol) {
        if (kept.back().residual < kept.front().residual) kept.front() = kept.back();
        kept.pop_back();
    }

    out.solutions = std::move(kept);
    return out;
}

EquilibriumSet positive_thrust_subset(const EquilibriumSet& set) {
    EquilibriumSet out;
    out.degenerate_all_orientations = set.degenerate_all_orientations;
    for (const auto& s : set.solutions)
        if (s.thrust_nonneg) out.solutions.push_back(s);
    return out;
}

std::optional<double> a_nu_of_alpha(const AeroModel& model, double alpha_e) {
    const double a = wrap_angle(alpha_e);
    const double s = std::sin(a), c = std::cos(a);
    if (std::abs(s) < 1e-12) return std::nullopt;  // cot(alpha_e) undefined
    const CoeffPair cp = model.coeffs(a);
    const double den = cp.cd * s + cp.cl * c;
    if (std::abs(den) < 1e-12) return std::nullopt;
    return c / den;
}

BifurcationCurve bifurcation_sweep(const AeroModel& model,
                                   const std::vector<double>& alpha_grid) {
    BifurcationCurve curve;
    curve.samples.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        BifurcationCurve::Sample s;
        s.alpha_e = a;
        if (auto v = a_nu_of_alpha(model, a)) {
            s.a_nu = *v;
            s.defined = true;
        }
        curve.samples.push_back(s);
    }

    const auto slope = [&model](double a) -> std::optional<double> {
        const double h = 1e-7;
        const auto p = a_nu_of_alpha(model, a + h);
        const auto m = a_nu_of_alpha(model, a - h);
        if (!p || !m) return std::nullopt;
        return (*p - *m) / (2.0 * h);
    };

    const auto& smp = curve.samples;
    for (std::size_t i = 1; i + 1 < smp.size(); ++i) {
        if (!smp[i - 1].defined || !smp[i].defined || !smp[i + 1].defined) continue;
        const double dl = smp[i].a_nu - smp[i - 1].a_nu;
        const double dr = smp[i + 1].a_nu - smp[i].a_nu;
        if (!(dl * dr < 0.0)) continue;

        double lo = smp[i - 1].alpha_e, hi = smp[i + 1].alpha_e;
        double alpha_star = smp[i].alpha_e;
        auto slo = slope(lo);
        const auto shi = slope(hi);
        if (slo && shi && (*slo) * (*shi) < 0.0) {
            for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
                const double mid = 0.5 * (lo + hi);
                const auto sm = slope(mid);
                if (!sm) break;
                if (*sm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((*slo < 0.0) != (*sm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    slo = sm;
                }
            }
            alpha_star = 0.5 * (lo + hi);
        }
        if (auto av = a_nu_of_alpha(model, alpha_star))
            curve.folds.push_back({alpha_star, *av});
    }
    return curve;
}

TrackResult track_branch(const AeroModel& model, const BodyParams& body,
                         const ReferenceProfileFn& profile,
                         const std::vector<double>& t_grid,
                         const TrackOptions& opts) {
    TrackResult res;
    res.points.reserve(t_grid.size());
    bool have_prev = false;
    EquilibriumSolution prev;

    for (double t : t_grid) {
        ReferenceState ref = profile(t);
        ref.t = t;
        const EquilibriumSet set = solve_equilibria(model, body, ref, opts.solver);

        TrackPoint pt;
        pt.t = t;
        if (set.solutions.empty()) {
            pt.gap = true;
            ++res.gaps;
            if (have_prev) {  // the tracked branch vanished outright
                JumpEvent ev;
                ev.t = t;
                ev.theta_before = ev.theta_after = prev.theta_e;
                ev.alpha_before = prev.alpha_e;
                res.jumps.push_back(ev);
                have_prev = false;
            }
            res.points.push_back(pt);
            continue;
        }

        std::size_t pick = 0;
        if (have_prev) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < set.solutions.size(); ++i) {
                const double d =
                    std::abs(wrap_angle(set.solutions[i].theta_e - prev.theta_e));
                if (d < best) {
                    best = d;
                    pick = i;
                }
            }
            if (best > opts.jump_threshold) {
                pt.jump = true;
                JumpEvent ev;
                ev.t = t;
                ev.theta_before = prev.theta_e;
                ev.theta_after = set.solutions[pick].theta_e;
                ev.alpha_before = prev.alpha_e;
                ev.alpha_after = set.solutions[pick].alpha_e;
                res.jumps.push_back(ev);
            }
            pt.sol = set.solutions[pick];
        } else {
            // Initial selection: positive-thrust solution with the largest
            // angle of attack (the high-incidence, hover-like branch).
            const EquilibriumSet pos = positive_thrust_subset(set);
            const auto& pool = pos.solutions.empty() ? set.solutions : pos.solutions;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < pool.size(); ++i) {
                const double key =
                    pool[i].alpha_e.value_or(-std::numeric_limits<double>::infinity());
                if (i == 0 || key > best) {
                    best = key;
                    pick = i;
                }
            }
            pt.sol = pool[pick];
        }

        pt.has_solution = true;
        prev = pt.sol;
        have_prev = true;
        res.points.push_back(pt);
    }
    return res;
}

StallConditionReport check_stall_multiplicity_condition(const AeroModel& model,
                                                        int grid_n) {
    StallConditionReport rep;
    const double cd_front = model.coeffs(0.0).cd;
    const double cd_rear = model.coeffs(kPi).cd;
    rep.drag_asymmetry_holds = cd_rear > cd_front;
    if (!rep.drag_asymmetry_holds) return rep;

    for (int i = 1; i < grid_n; ++i) {
        const double a = 0.5 * kPi * i / grid_n;
        const CoeffPair c = model.coeffs(a);
        if (!(c.cl > 0.0)) continue;
        if (std::tan(a) <= (c.cd - cd_rear) / c.cl) {
            rep.alpha_s = a;
            break;
        }
    }
    return rep;
}

BadReferenceTrajectory integrate_bad_reference(const AeroModel& model,
                                               const BodyParams& body,
                                               const Vec2& xdot_b0,
                                               const WindFn& wind, double horizon,
                                               double dt) {
    if (!(dt > 0.0) || !(horizon >= dt))
        throw ConfigError("integrate_bad_reference: need dt > 0 and horizon >= dt");

    const GlobalConditionReport cond = check_global_condition(model, body.delta);
    if (!cond.holds)
        throw NumericalError(
            "integrate_bad_reference: transformed force direction depends on "
            "orientation (condition residual " +
            std::to_string(cond.max_residual) + ")");

    // Under the (verified) condition the transformed coefficients are
    // constant in alpha; freeze them from alpha = 0 and double-check on a
    // coarse sweep to guard against tabulated-model roundoff.
    const TransformedCoeffJets j0 =
        transformed_coeff_jets(model, 0.0, body.delta, LambdaRule::general);
    const double clbar = j0.cl_bar, cdbar = j0.cd_bar;
    for (int i = 0; i < 16; ++i) {
        const double a = -kPi + 2.0 * kPi * (i + 0.5) / 16;
        const TransformedCoeffJets ji =
            transformed_coeff_jets(model, a, body.delta, LambdaRule::general);
        if (std::abs(ji.cl_bar - clbar) > 1e-6 * (1.0 + std::abs(clbar)) ||
            std::abs(ji.cd_bar - cdbar) > 1e-6 * (1.0 + std::abs(cdbar)))
            throw NumericalError(
                "integrate_bad_reference: transformed coefficients vary with alpha");
    }
    if (!(cdbar > 0.0))
        throw NumericalError(
            "integrate_bad_reference: transformed drag must be positive, got " +
            std::to_string(cdbar));

    const auto wind_at = [&wind](double t) -> Vec2 {
        return wind ? wind(t) : Vec2::Zero();
    };
    const Mat2 M = clbar * skew90() - cdbar * Mat2::Identity();
    const auto rhs = [&](double t, const Vec2& v) -> Vec2 {
        const Vec2 va = v - wind_at(t);
        return body.g * e1() + (body.k_a / body.m) * va.norm() * (M * va);
    };

    BadReferenceTrajectory traj;
    const int n_steps = static_cast<int>(std::llround(horizon / dt));
    traj.t.reserve(n_steps + 1);
    traj.xdot_b.reserve(n_steps + 1);
    traj.fp_norm.reserve(n_steps + 1);

    const auto log_point = [&](double t, const Vec2& v) {
        // Defining property, evaluated with the model's own alpha-dependent
        // transform rather than the frozen constants.
        ReferenceState ref;
        ref.t = t;
        ref.xdot_r = v;
        ref.xddot_r = rhs(t, v);
        ref.xdot_w = wind_at(t);
        const TransformedForce tf =
            transformed_force(model, body, ref, v, 0.0, LambdaRule::general);
        traj.t.push_back(t);
        traj.xdot_b.push_back(v);
        traj.fp_norm.push_back(tf.F_p.norm());
    };

    Vec2 v = xdot_b0;
    log_point(0.0, v);
    for (int k = 0; k < n_steps; ++k) {
        const double t = k * dt;
        const Vec2 k1 = rhs(t, v);
        const Vec2 k2 = rhs(t + 0.5 * dt, v + 0.5 * dt * k1);
        const Vec2 k3 = rhs(t + 0.5 * dt, v + 0.5 * dt * k2);
        const Vec2 k4 = rhs(t + dt, v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!v.allFinite())
            throw NumericalError("integrate_bad_reference: state diverged at t = " +
                                 std::to_string(t + dt));
        log_point((k + 1) * dt, v);
    }
    return traj;
}

}  // namespace longfd
