#include "longfd/aero.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "longfd/errors.hpp"

namespace longfd {
namespace {

// Value and first two derivatives of a scalar function of alpha.
struct Jet {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

// Quotient rule for n/d given jets of numerator and denominator.
Jet rational(const Jet& n, const Jet& d) {
    Jet r;
    r.v = n.v / d.v;
    r.d1 = (n.d1 * d.v - n.v * d.d1) / (d.v * d.v);
    r.d2 = n.d2 / d.v - (2.0 * n.d1 * d.d1 + n.v * d.d2) / (d.v * d.v) +
           2.0 * n.v * d.d1 * d.d1 / (d.v * d.v * d.v);
    return r;
}

struct CoeffJets {
    Jet cl, cd;
};

CoeffJets flat_plate_jets(double c0, double c1, double a) {
    const double s2 = std::sin(2.0 * a), c2 = std::cos(2.0 * a);
    CoeffJets out;
    out.cl = {c1 * s2, 2.0 * c1 * c2, -4.0 * c1 * s2};
    const double sa = std::sin(a);
    out.cd = {c0 + 2.0 * c1 * sa * sa, 2.0 * c1 * s2, 4.0 * c1 * c2};
    return out;
}

CoeffJets small_alpha_jets(double c0, double c2, double c3, double a) {
    const double s2 = std::sin(2.0 * a), cc2 = std::cos(2.0 * a);
    const double ca = std::cos(a), sa = std::sin(a);
    const Jet den = {(c2 - c3) * ca * ca + c3, -(c2 - c3) * s2, -2.0 * (c2 - c3) * cc2};
    const Jet num_l = {0.5 * c2 * c2 * s2, c2 * c2 * cc2, -2.0 * c2 * c2 * s2};
    const Jet num_d = {c2 * c3 * sa * sa, c2 * c3 * s2, 2.0 * c2 * c3 * cc2};
    CoeffJets out;
    out.cl = rational(num_l, den);
    out.cd = rational(num_d, den);
    out.cd.v += c0;
    return out;
}

Jet sigma_jet(double alpha_bar, double k_bar, double a) {
    const double norm = 1.0 + std::tanh(k_bar * alpha_bar * alpha_bar);
    const double u = k_bar * alpha_bar * alpha_bar - k_bar * a * a;
    const double th = std::tanh(u);
    const double ch = std::cosh(u);
    const double sech2 = 1.0 / (ch * ch);  // underflows cleanly to 0 for |u| large
    Jet s;
    s.v = (1.0 + th) / norm;
    s.d1 = -2.0 * k_bar * a * sech2 / norm;
    s.d2 = -2.0 * k_bar * sech2 * (1.0 + 4.0 * k_bar * a * a * th) / norm;
    return s;
}

// c = inner*sigma + outer*(1-sigma), with product-rule derivatives.
Jet blend(const Jet& inner, const Jet& outer, const Jet& s) {
    Jet r;
    const Jet diff = {inner.v - outer.v, inner.d1 - outer.d1, inner.d2 - outer.d2};
    r.v = outer.v + diff.v * s.v;
    r.d1 = outer.d1 + diff.d1 * s.v + diff.v * s.d1;
    r.d2 = outer.d2 + diff.d2 * s.v + 2.0 * diff.d1 * s.d1 + diff.v * s.d2;
    return r;
}

CoeffJets blended_jets(double c0, double c1, double c2, double c3, double alpha_bar,
                       double k_l, double k_d, double a) {
    const CoeffJets inner = small_alpha_jets(c0, c2, c3, a);
    const CoeffJets outer = flat_plate_jets(c0, c1, a);
    const Jet sl = sigma_jet(alpha_bar, k_l, a);
    const Jet sd = sigma_jet(alpha_bar, k_d, a);
    CoeffJets out;
    out.cl = blend(inner.cl, outer.cl, sl);
    out.cd = blend(inner.cd, outer.cd, sd);
    return out;
}

}  // namespace

void BodyParams::validate() const {
    if (!(m > 0.0)) throw ConfigError("body.m must be positive");
    if (!(g > 0.0)) throw ConfigError("body.g must be positive");
    if (!(k_a >= 0.0)) throw ConfigError("body.k_a must be non-negative");
    if (!(delta > -kPi && delta <= kPi) || !std::isfinite(delta)) {
        throw ConfigError("body.delta must lie in (-pi, pi]");
    }
}

double sigma(double alpha_bar, double k_bar, double alpha) {
    return sigma_jet(alpha_bar, k_bar, alpha).v;
}

double sigma_d1(double alpha_bar, double k_bar, double alpha) {
    return sigma_jet(alpha_bar, k_bar, alpha).d1;
}

double sigma_d2(double alpha_bar, double k_bar, double alpha) {
    return sigma_jet(alpha_bar, k_bar, alpha).d2;
}

AeroModel AeroModel::flat_plate(double c0, double c1) {
    return AeroModel(FlatPlate{c0, c1}, "flat_plate");
}

AeroModel AeroModel::small_alpha(double c0, double c2, double c3) {
    return AeroModel(SmallAlpha{c0, c2, c3}, "small_alpha");
}

AeroModel AeroModel::blended(double c0, double c1, double c2, double c3,
                             double alpha_bar, double k_l, double k_d) {
    return AeroModel(Blended{c0, c1, c2, c3, alpha_bar, k_l, k_d}, "blended");
}

AeroModel AeroModel::tabulated(const std::vector<double>& alpha,
                               const std::vector<double>& cl,
                               const std::vector<double>& cd) {
    Tabulated t{PeriodicPchip(alpha, cl, 2.0 * kPi), PeriodicPchip(alpha, cd, 2.0 * kPi)};
    return AeroModel(std::move(t), "tabulated");
}

AeroModel AeroModel::custom(CoeffFn coeff_fn, DerivFn deriv_fn, std::string name) {
    if (!coeff_fn) throw ConfigError("custom model needs a coefficient function");
    return AeroModel(Custom{std::move(coeff_fn), std::move(deriv_fn)}, std::move(name));
}

CoeffPair AeroModel::coeffs(double alpha) const {
    const double a = wrap_angle(alpha);
    return std::visit(
        [a](const auto& v) -> CoeffPair {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FlatPlate>) {
                const CoeffJets j = flat_plate_jets(v.c0, v.c1, a);
                return {j.cl.v, j.cd.v};
            } else if constexpr (std::is_same_v<T, SmallAlpha>) {
                const CoeffJets j = small_alpha_jets(v.c0, v.c2, v.c3, a);
                return {j.cl.v, j.cd.v};
            } else if constexpr (std::is_same_v<T, Blended>) {
                const CoeffJets j = blended_jets(v.c0, v.c1, v.c2, v.c3, v.alpha_bar,
                                                 v.k_l, v.k_d, a);
                return {j.cl.v, j.cd.v};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return {v.cl.value(a), v.cd.value(a)};
            } else {
                return v.coeff_fn(a);
            }
        },
        var_);
}

CoeffDerivs AeroModel::coeff_derivs(double alpha) const {
    const double a = wrap_angle(alpha);
    return std::visit(
        [&](const auto& v) -> CoeffDerivs {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FlatPlate>) {
                const CoeffJets j = flat_plate_jets(v.c0, v.c1, a);
                return {j.cl.d1, j.cd.d1, j.cl.d2, j.cd.d2};
            } else if constexpr (std::is_same_v<T, SmallAlpha>) {
                const CoeffJets j = small_alpha_jets(v.c0, v.c2, v.c3, a);
                return {j.cl.d1, j.cd.d1, j.cl.d2, j.cd.d2};
            } else if constexpr (std::is_same_v<T, Blended>) {
                const CoeffJets j = blended_jets(v.c0, v.c1, v.c2, v.c3, v.alpha_bar,
                                                 v.k_l, v.k_d, a);
                return {j.cl.d1, j.cd.d1, j.cl.d2, j.cd.d2};
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                return {v.cl.deriv1(a), v.cd.deriv1(a), v.cl.deriv2(a), v.cd.deriv2(a)};
            } else {
                if (v.deriv_fn) return v.deriv_fn(a);
                const double h = 1e-6;
                const CoeffPair p = this->coeffs(a + h), q = this->coeffs(a - h);
                const CoeffPair c = this->coeffs(a);
                return {(p.cl - q.cl) / (2.0 * h), (p.cd - q.cd) / (2.0 * h),
                        (p.cl - 2.0 * c.cl + q.cl) / (h * h),
                        (p.cd - 2.0 * c.cd + q.cd) / (h * h)};
            }
        },
        var_);
}

AirState angle_of_attack(const Vec2& xdot_a, double theta, double delta) {
    AirState st;
    st.xdot_a = xdot_a;
    st.speed = xdot_a.norm();
    if (st.speed > 0.0) {
        st.gamma = std::atan2(xdot_a.y(), xdot_a.x());
        st.alpha = wrap_angle(theta - *st.gamma + kPi - delta);
    }
    return st;
}

Vec2 aero_force(const AeroModel& model, const BodyParams& body,
                const Vec2& xdot_a, double theta) {
    const AirState st = angle_of_attack(xdot_a, theta, body.delta);
    if (!st.alpha) return Vec2::Zero();
    const CoeffPair c = model.coeffs(*st.alpha);
    const Vec2 lift_dir = skew90() * xdot_a;  // +90-degree rotation of the air velocity
    return body.k_a * st.speed * (c.cl * lift_dir - c.cd * xdot_a);
}

SymmetryReport check_symmetry(const AeroModel& model, int grid_n, double tol) {
    SymmetryReport rep;
    double worst_even = 0.0, worst_odd = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        const double a = -kPi + 2.0 * kPi * i / grid_n;
        const CoeffPair p = model.coeffs(a);
        const CoeffPair q = model.coeffs(-a);
        worst_even = std::max(worst_even, std::abs(p.cd - q.cd));
        worst_odd = std::max(worst_odd, std::abs(p.cl + q.cl));
    }
    rep.cl_at_zero = std::abs(model.coeffs(0.0).cl);
    rep.cl_at_pi = std::abs(model.coeffs(kPi).cl);
    worst_odd = std::max({worst_odd, rep.cl_at_zero, rep.cl_at_pi});
    rep.max_violation = std::max(worst_even, worst_odd);
    rep.is_even_drag = worst_even <= tol;
    rep.is_odd_lift = worst_odd <= tol;
    return rep;
}

BisymmetryReport check_bisymmetry(const AeroModel& model, int grid_n, double tol) {
    BisymmetryReport rep;
    for (int i = 0; i < grid_n; ++i) {
        const double a = -kPi + 2.0 * kPi * i / grid_n;
        const CoeffPair p = model.coeffs(a);
        const CoeffPair q = model.coeffs(a + kPi);
        rep.max_violation = std::max({rep.max_violation, std::abs(p.cl - q.cl),
                                      std::abs(p.cd - q.cd)});
    }
    rep.is_pi_periodic = rep.max_violation <= tol;
    return rep;
}

PassivityReport check_passivity(const AeroModel& model, int grid_n) {
    PassivityReport rep;
    rep.min_cd = model.coeffs(-kPi).cd;
    for (int i = 0; i < grid_n; ++i) {
        const double a = -kPi + 2.0 * kPi * i / grid_n;
        rep.min_cd = std::min(rep.min_cd, model.coeffs(a).cd);
    }
    rep.is_passive = rep.min_cd >= 0.0;
    return rep;
}

AeroModel load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coefficient table: " + path);
    std::string line;
    std::vector<double> alpha, cl, cd;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (!header_seen) {
            // Require the documented header once.
            std::string h = line.substr(first);
            h.erase(h.find_last_not_of(" \t\r") + 1);
            h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
            if (h != "alpha_deg,cl,cd") {
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected header 'alpha_deg,cl,cd', got '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(row, cell, ',')) {
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected 3 comma-separated values");
            }
            try {
                std::size_t used = 0;
                vals[c] = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": malformed number '" + cell + "'");
            }
            if (!std::isfinite(vals[c])) {
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": non-finite entry");
            }
        }
        if (!alpha.empty() && !(vals[0] > rad2deg(alpha.back()))) {
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": alpha_deg not strictly increasing");
        }
        alpha.push_back(deg2rad(vals[0]));
        cl.push_back(vals[1]);
        cd.push_back(vals[2]);
    }
    if (alpha.size() < 4) {
        throw ConfigError(path + ": coefficient table needs at least 4 rows, got " +
                          std::to_string(alpha.size()));
    }
    if (alpha.front() < -kPi || alpha.back() - alpha.front() >= 2.0 * kPi) {
        throw ConfigError(path + ": alpha_deg must stay within one revolution");
    }
    return AeroModel::tabulated(alpha, cl, cd);
}

}  // namespace longfd
