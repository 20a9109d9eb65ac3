// Command-line front end: model checks, equilibrium solving, bifurcation
// sweep, branch-tracking transition, closed-loop simulation, and the
// self-balancing reference-velocity integrator. Angles cross this boundary
// in degrees; everything behind it is SI radians.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longfd/config.hpp"
#include "longfd/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    if (!out) throw longfd::ConfigError("cannot write '" + p.string() + "'");
    return out;
}

json optional_deg(const std::optional<double>& angle) {
    if (!angle) return nullptr;
    return longfd::rad2deg(*angle);
}

longfd::TomlTable load_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
    longfd::TomlTable cfg = longfd::TomlTable::parse_file(path);
    for (const auto& s : overrides) cfg.set_override(s);
    return cfg;
}

int run_check_model(const longfd::TomlTable& cfg, const fs::path& out_dir) {
    const longfd::AeroModel model = longfd::load_aero_model(cfg, "aero");
    const double delta = longfd::deg2rad(cfg.number_or("body.delta_deg", 0.0));

    const longfd::SymmetryReport sym = longfd::check_symmetry(model);
    const longfd::BisymmetryReport bis = longfd::check_bisymmetry(model);
    const longfd::PassivityReport pas = longfd::check_passivity(model);
    const longfd::GlobalConditionReport glo = longfd::check_global_condition(model, delta);
    const longfd::SpecialConditionReport spe = longfd::check_special_condition(model);
    const longfd::StallConditionReport sta = longfd::check_stall_multiplicity_condition(model);

    json stall;
    if (!sta.drag_asymmetry_holds) {
        stall = "precondition_failed";
    } else if (!sta.alpha_s) {
        stall = "not_found";
    } else {
        stall = json{{"alpha_s_deg", longfd::rad2deg(*sta.alpha_s)}};
    }

    const json report = {
        {"model", model.kind()},
        {"symmetric", sym.is_even_drag && sym.is_odd_lift},
        {"bisymmetric", bis.is_pi_periodic},
        {"passive", pas.is_passive},
        {"global_condition", glo.holds},
        {"special_condition", spe.holds},
        {"stall_condition", stall},
        {"details",
         {{"symmetry",
           {{"max_violation", sym.max_violation},
            {"cl_at_zero", sym.cl_at_zero},
            {"cl_at_pi", sym.cl_at_pi}}},
          {"bisymmetry", {{"max_violation", bis.max_violation}}},
          {"passivity", {{"min_cd", pas.min_cd}}},
          {"global_condition",
           {{"max_residual", glo.max_residual},
            {"grid_size", glo.grid_size},
            {"holds", glo.holds}}},
          {"special_condition",
           {{"c_bar_D", spe.c_bar_D_value},
            {"max_deviation", spe.max_deviation},
            {"holds", spe.holds}}}}}};

    std::cout << report.dump(2) << "\n";
    open_out(out_dir, "check_model.json") << report.dump(2) << "\n";
    return 0;
}

int run_equilibria(const longfd::TomlTable& cfg, const fs::path& out_dir,
                   const std::string& format, const longfd::Vec2& vr,
                   const longfd::Vec2& ar) {
    const longfd::BodyParams body = longfd::load_body_params(cfg, "body");
    const longfd::AeroModel model = longfd::load_aero_model(cfg, "aero");

    longfd::ReferenceState ref;
    ref.xdot_r = vr;
    ref.xddot_r = ar;
    ref.xdot_w = longfd::Vec2(cfg.number_or("wind.w1", 0.0),
                              cfg.number_or("wind.w2", 0.0));

    const longfd::EquilibriumSet set = longfd::solve_equilibria(model, body, ref);
    const double mg = body.m * body.g;

    if (format == "json") {
        json sols = json::array();
        for (const auto& s : set.solutions)
            sols.push_back({{"theta_e_deg", longfd::rad2deg(s.theta_e)},
                            {"alpha_e_deg", optional_deg(s.alpha_e)},
                            {"thrust", s.thrust_e},
                            {"thrust_over_mg", s.thrust_e / mg},
                            {"residual", s.residual}});
        const json out = {{"count", set.solutions.size()},
                          {"degenerate_all_orientations", set.degenerate_all_orientations},
                          {"solutions", sols}};
        std::cout << out.dump(2) << "\n";
        open_out(out_dir, "equilibria.json") << out.dump(2) << "\n";
    } else {
        std::ofstream csv = open_out(out_dir, "equilibria.csv");
        csv << "theta_e_deg,alpha_e_deg,thrust,thrust_over_mg,residual\n";
        for (const auto& s : set.solutions) {
            csv << fmt(longfd::rad2deg(s.theta_e)) << ','
                << (s.alpha_e ? fmt(longfd::rad2deg(*s.alpha_e)) : "nan") << ','
                << fmt(s.thrust_e) << ',' << fmt(s.thrust_e / mg) << ','
                << fmt(s.residual) << '\n';
        }
        std::cout << "count=" << set.solutions.size() << "\n";
        if (set.degenerate_all_orientations)
            std::cout << "degenerate_all_orientations=1\n";
    }
    return 0;
}

int run_bifurcation(const longfd::TomlTable& cfg, const fs::path& out_dir,
                    const std::string& format, double alpha_min_deg,
                    double alpha_max_deg, double alpha_step_deg) {
    if (!(alpha_step_deg > 0.0) || !(alpha_max_deg > alpha_min_deg))
        throw longfd::ConfigError("bifurcation: need alpha-step > 0 and alpha-max > alpha-min");
    const longfd::AeroModel model = longfd::load_aero_model(cfg, "aero");

    std::vector<double> grid;
    for (double a = alpha_min_deg; a <= alpha_max_deg + 1e-12; a += alpha_step_deg)
        grid.push_back(longfd::deg2rad(a));
    const longfd::BifurcationCurve curve = longfd::bifurcation_sweep(model, grid);

    if (format == "json") {
        json samples = json::array(), folds = json::array();
        for (const auto& s : curve.samples)
            if (s.defined)
                samples.push_back({{"alpha_e_deg", longfd::rad2deg(s.alpha_e)},
                                   {"a_nu", s.a_nu}});
        for (const auto& f : curve.folds)
            folds.push_back({{"alpha_e_deg", longfd::rad2deg(f.alpha_e)},
                             {"a_nu", f.a_nu}});
        const json out = {{"samples", samples}, {"folds", folds}};
        std::cout << json{{"folds", folds}}.dump(2) << "\n";
        open_out(out_dir, "bifurcation.json") << out.dump(2) << "\n";
    } else {
        std::ofstream csv = open_out(out_dir, "bifurcation.csv");
        csv << "alpha_e_deg,a_nu\n";
        for (const auto& s : curve.samples)
            if (s.defined)
                csv << fmt(longfd::rad2deg(s.alpha_e)) << ',' << fmt(s.a_nu) << '\n';
        std::ofstream fcsv = open_out(out_dir, "folds.csv");
        fcsv << "alpha_e_deg,a_nu\n";
        for (const auto& f : curve.folds)
            fcsv << fmt(longfd::rad2deg(f.alpha_e)) << ',' << fmt(f.a_nu) << '\n';
        std::cout << "folds=" << curve.folds.size() << "\n";
        for (const auto& f : curve.folds)
            std::cout << "fold alpha_e_deg=" << fmt(longfd::rad2deg(f.alpha_e))
                      << " a_nu=" << fmt(f.a_nu) << "\n";
    }
    return 0;
}

int run_transition(const longfd::TomlTable& cfg, const fs::path& out_dir,
                   const std::string& format, double t_end, double dt,
                   double jump_threshold_deg) {
    const longfd::BodyParams body = longfd::load_body_params(cfg, "body");
    const longfd::AeroModel model = longfd::load_aero_model(cfg, "aero");

    const longfd::Vec2 wind(cfg.number_or("wind.w1", 0.0),
                            cfg.number_or("wind.w2", 0.0));
    const std::string profile_kind = cfg.str("profile.kind");
    longfd::ReferenceProfileFn profile;
    if (profile_kind == "ramp_then_cruise") {
        profile = longfd::ramp_then_cruise_profile(cfg.number("profile.rate"),
                                                   cfg.number("profile.v_max"), wind);
    } else if (profile_kind == "constant") {
        profile = longfd::constant_profile(
            longfd::Vec2(cfg.number_or("profile.vr1", 0.0),
                         cfg.number_or("profile.vr2", 0.0)),
            wind);
    } else {
        throw longfd::ConfigError("profile.kind must be 'ramp_then_cruise' or 'constant'");
    }

    if (!(dt > 0.0) || !(t_end >= 0.0))
        throw longfd::ConfigError("transition: need dt > 0 and t-end >= 0");
    std::vector<double> t_grid;
    for (double t = 0.0; t <= t_end + 1e-12; t += dt) t_grid.push_back(t);

    longfd::TrackOptions opts;
    opts.jump_threshold = longfd::deg2rad(jump_threshold_deg);
    const longfd::TrackResult res =
        longfd::track_branch(model, body, profile, t_grid, opts);
    const double mg = body.m * body.g;

    if (format == "json") {
        json points = json::array(), jumps = json::array();
        for (const auto& p : res.points) {
            json row = {{"t", p.t}, {"gap", p.gap}, {"jump", p.jump}};
            if (p.has_solution) {
                row["theta_e_deg"] = longfd::rad2deg(p.sol.theta_e);
                row["alpha_e_deg"] = optional_deg(p.sol.alpha_e);
                row["thrust_over_mg"] = p.sol.thrust_e / mg;
            }
            points.push_back(row);
        }
        for (const auto& j : res.jumps)
            jumps.push_back({{"t", j.t},
                             {"theta_before_deg", longfd::rad2deg(j.theta_before)},
                             {"theta_after_deg", longfd::rad2deg(j.theta_after)},
                             {"alpha_before_deg", optional_deg(j.alpha_before)},
                             {"alpha_after_deg", optional_deg(j.alpha_after)}});
        const json out = {{"points", points}, {"jumps", jumps}, {"gaps", res.gaps}};
        std::cout << json{{"jumps", jumps}, {"gaps", res.gaps}}.dump(2) << "\n";
        open_out(out_dir, "transition.json") << out.dump(2) << "\n";
    } else {
        std::ofstream csv = open_out(out_dir, "transition.csv");
        csv << "t,theta_e_deg,alpha_e_deg,thrust_over_mg,jump_flag\n";
        for (const auto& p : res.points) {
            csv << fmt(p.t) << ',';
            if (p.has_solution) {
                csv << fmt(longfd::rad2deg(p.sol.theta_e)) << ','
                    << (p.sol.alpha_e ? fmt(longfd::rad2deg(*p.sol.alpha_e)) : "nan")
                    << ',' << fmt(p.sol.thrust_e / mg) << ',';
            } else {
                csv << "nan,nan,nan,";
            }
            csv << (p.jump ? 1 : 0) << '\n';
        }
        std::cout << "jumps=" << res.jumps.size() << " gaps=" << res.gaps << "\n";
        for (const auto& j : res.jumps) {
            std::cout << "jump t=" << fmt(j.t);
            if (j.alpha_before && j.alpha_after)
                std::cout << " alpha_e_deg " << fmt(longfd::rad2deg(*j.alpha_before))
                          << " -> " << fmt(longfd::rad2deg(*j.alpha_after));
            std::cout << " theta_e_deg " << fmt(longfd::rad2deg(j.theta_before))
                      << " -> " << fmt(longfd::rad2deg(j.theta_after)) << "\n";
        }
    }
    return 0;
}

int run_simulate(const longfd::TomlTable& cfg, const fs::path& out_dir,
                 const std::string& format) {
    longfd::SimSetup setup = longfd::load_sim_setup(cfg);
    const longfd::SimResult result =
        longfd::simulate(setup.plant_model, setup.plant_body, setup.controller,
                         setup.profile, setup.xdot0, setup.theta0, setup.options);
    const longfd::SimMetrics metrics =
        longfd::compute_metrics(result, setup.options.settle_eps);
    const double mg = setup.plant_body.m * setup.plant_body.g;

    const json mjson = {{"settled", metrics.settled},
                        {"settle_time", metrics.settled ? json(metrics.settle_time) : json()},
                        {"max_error_post_settle",
                         metrics.settled ? json(metrics.max_error_post_settle) : json()},
                        {"jump_time_estimate", metrics.jump_time_estimate},
                        {"thrust_min", metrics.thrust_min},
                        {"thrust_max", metrics.thrust_max},
                        {"final_theta_deg",
                         longfd::rad2deg(result.rows.back().theta)},
                        {"final_vtilde", result.rows.back().vtilde.norm()}};

    if (format == "json") {
        json rows = json::array();
        for (const auto& r : result.rows)
            rows.push_back({{"t", r.t},
                            {"vr1", r.xdot_r(0)},
                            {"vr2", r.xdot_r(1)},
                            {"v1", r.xdot(0)},
                            {"v2", r.xdot(1)},
                            {"vtil1", r.vtilde(0)},
                            {"vtil2", r.vtilde(1)},
                            {"alpha_deg", std::isfinite(r.alpha)
                                              ? json(longfd::rad2deg(r.alpha))
                                              : json()},
                            {"omega", r.omega},
                            {"thrust_over_mg", r.thrust / mg},
                            {"theta_deg", longfd::rad2deg(r.theta)},
                            {"Fp_norm", r.Fp_norm},
                            {"V", r.V}});
        const json out = {{"metrics", mjson}, {"rows", rows}};
        std::cout << json{{"metrics", mjson}}.dump(2) << "\n";
        open_out(out_dir, "sim.json") << out.dump(2) << "\n";
    } else {
        std::ofstream csv = open_out(out_dir, "sim.csv");
        csv << "t,vr1,vr2,v1,v2,vtil1,vtil2,alpha_deg,omega,thrust_over_mg,"
               "theta_deg,Fp_norm,V\n";
        for (const auto& r : result.rows) {
            csv << fmt(r.t) << ',' << fmt(r.xdot_r(0)) << ',' << fmt(r.xdot_r(1))
                << ',' << fmt(r.xdot(0)) << ',' << fmt(r.xdot(1)) << ','
                << fmt(r.vtilde(0)) << ',' << fmt(r.vtilde(1)) << ','
                << (std::isfinite(r.alpha) ? fmt(longfd::rad2deg(r.alpha)) : "nan")
                << ',' << fmt(r.omega) << ',' << fmt(r.thrust / mg) << ','
                << fmt(longfd::rad2deg(r.theta)) << ',' << fmt(r.Fp_norm) << ','
                << fmt(r.V) << '\n';
        }
        std::cout << "rows=" << result.rows.size() << "\n"
                  << "settled=" << (metrics.settled ? 1 : 0) << "\n";
        if (metrics.settled)
            std::cout << "settle_time=" << fmt(metrics.settle_time) << "\n";
        std::cout << "jump_time_estimate=" << fmt(metrics.jump_time_estimate) << "\n"
                  << "thrust_over_mg_range=[" << fmt(metrics.thrust_min / mg) << ","
                  << fmt(metrics.thrust_max / mg) << "]\n"
                  << "final_theta_deg=" << fmt(longfd::rad2deg(result.rows.back().theta))
                  << "\n"
                  << "final_vtilde=" << fmt(result.rows.back().vtilde.norm()) << "\n";
    }
    return 0;
}

int run_bad_velocity(const longfd::TomlTable& cfg, const fs::path& out_dir,
                     const std::string& format, const longfd::Vec2& v0,
                     double horizon, double dt) {
    const longfd::BodyParams body = longfd::load_body_params(cfg, "body");
    const longfd::AeroModel model = longfd::load_aero_model(cfg, "aero");
    const longfd::Vec2 wind(cfg.number_or("wind.w1", 0.0),
                            cfg.number_or("wind.w2", 0.0));

    const longfd::BadReferenceTrajectory traj = longfd::integrate_bad_reference(
        model, body, v0, [wind](double) { return wind; }, horizon, dt);

    double max_fp = 0.0;
    for (double f : traj.fp_norm) max_fp = std::max(max_fp, f);

    if (format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < traj.t.size(); ++i)
            rows.push_back({{"t", traj.t[i]},
                            {"v1", traj.xdot_b[i](0)},
                            {"v2", traj.xdot_b[i](1)},
                            {"Fp_norm", traj.fp_norm[i]}});
        const json out = {{"max_Fp_norm", max_fp}, {"rows", rows}};
        std::cout << json{{"max_Fp_norm", max_fp}}.dump(2) << "\n";
        open_out(out_dir, "bad_velocity.json") << out.dump(2) << "\n";
    } else {
        std::ofstream csv = open_out(out_dir, "bad_velocity.csv");
        csv << "t,v1,v2,Fp_norm\n";
        for (std::size_t i = 0; i < traj.t.size(); ++i)
            csv << fmt(traj.t[i]) << ',' << fmt(traj.xdot_b[i](0)) << ','
                << fmt(traj.xdot_b[i](1)) << ',' << fmt(traj.fp_norm[i]) << '\n';
        std::cout << "max_Fp_norm=" << fmt(max_fp) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Longitudinal flight dynamics: equilibria, bifurcation, "
                 "spherical-equivalency control, closed-loop simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "TOML configuration file")
            ->required();
        sub->add_option("--out", out_dir, "output directory (default .)");
        sub->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--set", overrides,
                        "override a config value, e.g. --set integration.t_end=6");
    };

    CLI::App* check = app.add_subcommand(
        "check-model", "shape symmetry, passivity, and equivalency-condition checks");
    add_common(check);

    CLI::App* equi = app.add_subcommand(
        "equilibria", "solve the equilibrium orientations for one reference state");
    add_common(equi);
    double vr1 = 0.0, vr2 = 0.0, ar1 = 0.0, ar2 = 0.0;
    equi->add_option("--vr1", vr1, "reference velocity, 1-component (down) [m/s]");
    equi->add_option("--vr2", vr2, "reference velocity, 2-component [m/s]");
    equi->add_option("--ar1", ar1, "reference acceleration, 1-component [m/s^2]");
    equi->add_option("--ar2", ar2, "reference acceleration, 2-component [m/s^2]");

    CLI::App* bif = app.add_subcommand(
        "bifurcation", "sweep the steady horizontal-flight speed parameter");
    add_common(bif);
    double alpha_min = 0.1, alpha_max = 89.9, alpha_step = 0.1;
    bif->add_option("--alpha-min", alpha_min, "grid start [deg]");
    bif->add_option("--alpha-max", alpha_max, "grid end [deg]");
    bif->add_option("--alpha-step", alpha_step, "grid step [deg]");

    CLI::App* tra = app.add_subcommand(
        "transition", "track an equilibrium branch along the configured profile");
    add_common(tra);
    double tra_t_end = 12.0, tra_dt = 0.02, tra_jump_deg = 5.0;
    tra->add_option("--t-end", tra_t_end, "tracking horizon [s]");
    tra->add_option("--dt", tra_dt, "tracking step [s]");
    tra->add_option("--jump-threshold-deg", tra_jump_deg,
                    "orientation jump threshold [deg]");

    CLI::App* sim = app.add_subcommand(
        "simulate", "closed-loop velocity-tracking simulation from the config");
    add_common(sim);

    CLI::App* bad = app.add_subcommand(
        "bad-velocity", "integrate the self-balancing reference velocity");
    add_common(bad);
    double bv1 = 0.0, bv2 = 0.0, bad_horizon = 5.0, bad_dt = 1e-3;
    bad->add_option("--v1", bv1, "initial velocity, 1-component [m/s]");
    bad->add_option("--v2", bv2, "initial velocity, 2-component [m/s]");
    bad->add_option("--horizon", bad_horizon, "integration horizon [s]");
    bad->add_option("--dt", bad_dt, "integration step [s]");

    try {
        app.parse(argc, argv);
        const longfd::TomlTable cfg = load_config(config_path, overrides);
        if (app.got_subcommand(check)) return run_check_model(cfg, out_dir);
        if (app.got_subcommand(equi))
            return run_equilibria(cfg, out_dir, format, longfd::Vec2(vr1, vr2),
                                  longfd::Vec2(ar1, ar2));
        if (app.got_subcommand(bif))
            return run_bifurcation(cfg, out_dir, format, alpha_min, alpha_max,
                                   alpha_step);
        if (app.got_subcommand(tra))
            return run_transition(cfg, out_dir, format, tra_t_end, tra_dt,
                                  tra_jump_deg);
        if (app.got_subcommand(sim)) return run_simulate(cfg, out_dir, format);
        if (app.got_subcommand(bad))
            return run_bad_velocity(cfg, out_dir, format, longfd::Vec2(bv1, bv2),
                                    bad_horizon, bad_dt);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const longfd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const longfd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
