#include "longfd/config.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "longfd/errors.hpp"

namespace longfd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
            c != '.')
            return false;
    return true;
}

}  // namespace

// Shared by file parsing (strict: strings must be quoted) and --set
// overrides (bare text falls back to a string).
TomlTable::Value TomlTable::lex_value(const std::string& text,
                                      const std::string& where,
                                      bool allow_bare_string) {
    Value v;
    if (text.empty()) throw ConfigError(where + ": empty value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"')
            throw ConfigError(where + ": unterminated string");
        v.kind = Value::Kind::string;
        v.s = text.substr(1, text.size() - 2);
        if (v.s.find('"') != std::string::npos)
            throw ConfigError(where + ": embedded quote in string");
        return v;
    }
    if (text == "true" || text == "false") {
        v.kind = Value::Kind::boolean;
        v.b = (text == "true");
        return v;
    }
    try {
        std::size_t pos = 0;
        const double num = std::stod(text, &pos);
        if (pos == text.size()) {
            v.kind = Value::Kind::number;
            v.num = num;
            return v;
        }
    } catch (const std::exception&) {
    }
    if (allow_bare_string) {
        v.kind = Value::Kind::string;
        v.s = text;
        return v;
    }
    throw ConfigError(where + ": cannot parse value '" + text +
                      "' (strings must be double-quoted)");
}

TomlTable TomlTable::parse_string(const std::string& text,
                                  const std::string& origin) {
    TomlTable t;
    t.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        std::string code;
        bool in_str = false;
        for (char ch : line) {
            if (ch == '"') in_str = !in_str;
            if (ch == '#' && !in_str) break;
            code += ch;
        }
        const std::string stmt = trim(code);
        if (stmt.empty()) continue;

        if (stmt.front() == '[') {
            if (stmt.back() != ']')
                throw ConfigError(where + ": malformed section header '" + stmt + "'");
            section = trim(stmt.substr(1, stmt.size() - 2));
            if (!valid_key(section))
                throw ConfigError(where + ": invalid section name '" + section + "'");
            continue;
        }

        const auto eq = stmt.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + stmt + "'");
        const std::string key = trim(stmt.substr(0, eq));
        if (!valid_key(key) || key.find('.') != std::string::npos)
            throw ConfigError(where + ": invalid key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (t.values_.count(full))
            throw ConfigError(where + ": duplicate key '" + full + "'");

        t.values_.emplace(full, lex_value(trim(stmt.substr(eq + 1)), where, false));
    }
    return t;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    TomlTable t = parse_string(buf.str(), path);
    t.base_dir_ = std::filesystem::path(path).parent_path().string();
    return t;
}

void TomlTable::set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (!valid_key(key))
        throw ConfigError("--set: invalid key '" + key + "'");
    values_[key] =
        lex_value(trim(assignment.substr(eq + 1)), "--set " + assignment, true);
}

const TomlTable::Value* TomlTable::find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool TomlTable::has(const std::string& key) const { return find(key) != nullptr; }

double TomlTable::number(const std::string& key) const {
    const Value* v = find(key);
    if (!v)
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    if (v->kind != Value::Kind::number)
        throw ConfigError(origin_ + ": key '" + key + "' must be a number");
    return v->num;
}

double TomlTable::number_or(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::number)
        throw ConfigError(origin_ + ": key '" + key + "' must be a number");
    return v->num;
}

std::string TomlTable::str(const std::string& key) const {
    const Value* v = find(key);
    if (!v)
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    if (v->kind != Value::Kind::string)
        throw ConfigError(origin_ + ": key '" + key + "' must be a string");
    return v->s;
}

std::string TomlTable::str_or(const std::string& key,
                              const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::string)
        throw ConfigError(origin_ + ": key '" + key + "' must be a string");
    return v->s;
}

bool TomlTable::boolean_or(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::boolean)
        throw ConfigError(origin_ + ": key '" + key + "' must be true or false");
    return v->b;
}

BodyParams load_body_params(const TomlTable& cfg, const std::string& section) {
    BodyParams body;
    body.m = cfg.number(section + ".m");
    body.g = cfg.number_or(section + ".g", 9.81);
    body.k_a = cfg.number(section + ".k_a");
    body.delta = deg2rad(cfg.number_or(section + ".delta_deg", 0.0));
    body.validate();
    return body;
}

AeroModel load_aero_model(const TomlTable& cfg, const std::string& section) {
    const std::string kind = cfg.str(section + ".kind");
    if (kind == "flat_plate") {
        return AeroModel::flat_plate(cfg.number(section + ".c0"),
                                     cfg.number(section + ".c1"));
    }
    if (kind == "small_alpha") {
        return AeroModel::small_alpha(cfg.number(section + ".c0"),
                                      cfg.number(section + ".c2"),
                                      cfg.number(section + ".c3"));
    }
    if (kind == "blended") {
        return AeroModel::blended(cfg.number(section + ".c0"),
                                  cfg.number(section + ".c1"),
                                  cfg.number(section + ".c2"),
                                  cfg.number(section + ".c3"),
                                  deg2rad(cfg.number(section + ".alpha_bar_deg")),
                                  cfg.number(section + ".k_l"),
                                  cfg.number(section + ".k_d"));
    }
    if (kind == "tabulated") {
        std::filesystem::path p(cfg.str(section + ".file"));
        if (p.is_relative() && !cfg.base_dir().empty())
            p = std::filesystem::path(cfg.base_dir()) / p;
        return load_tabulated(p.string());
    }
    throw ConfigError(section + ".kind must be one of flat_plate, small_alpha, "
                      "blended, tabulated; got '" +
                      kind + "'");
}

SimSetup load_sim_setup(const TomlTable& cfg) {
    BodyParams plant_body = load_body_params(cfg, "body");
    AeroModel plant_model = load_aero_model(cfg, "aero");

    BodyParams ctrl_body = load_body_params(cfg, "controller");
    AeroModel ctrl_model = load_aero_model(cfg, "controller");

    const std::string rule_name = cfg.str_or("controller.lambda_rule", "general");
    LambdaRule rule;
    if (rule_name == "general") {
        rule = LambdaRule::general;
    } else if (rule_name == "special") {
        rule = LambdaRule::special;
    } else {
        throw ConfigError("controller.lambda_rule must be 'general' or 'special'");
    }

    const std::string law_name = cfg.str_or("controller.law", "robust");
    ControlLaw law;
    if (law_name == "ideal") {
        law = ControlLaw::ideal;
    } else if (law_name == "robust") {
        law = ControlLaw::robust;
    } else {
        throw ConfigError("controller.law must be 'ideal' or 'robust'");
    }

    ControllerGains gains;
    gains.k1 = cfg.number("gains.k1");
    gains.k2 = cfg.number("gains.k2");
    gains.k3 = cfg.number("gains.k3");
    gains.tau = law == ControlLaw::robust ? cfg.number("gains.tau")
                                          : cfg.number_or("gains.tau", 1.0);
    gains.validate();

    const Vec2 wind(cfg.number_or("wind.w1", 0.0), cfg.number_or("wind.w2", 0.0));
    const std::string profile_kind = cfg.str("profile.kind");
    ReferenceProfileFn profile;
    if (profile_kind == "ramp_then_cruise") {
        profile = ramp_then_cruise_profile(cfg.number("profile.rate"),
                                           cfg.number("profile.v_max"), wind);
    } else if (profile_kind == "constant") {
        profile = constant_profile(Vec2(cfg.number_or("profile.vr1", 0.0),
                                        cfg.number_or("profile.vr2", 0.0)),
                                   wind);
    } else {
        throw ConfigError(
            "profile.kind must be 'ramp_then_cruise' or 'constant'; got '" +
            profile_kind + "'");
    }

    SimOptions options;
    options.dt = cfg.number("integration.dt");
    options.t_end = cfg.number("integration.t_end");
    options.settle_eps = cfg.number_or("integration.settle_eps", 0.2);
    options.settle_hold = cfg.number_or("integration.settle_hold", 1.0);
    options.validate();

    return SimSetup{
        std::move(plant_model),
        plant_body,
        VelocityTrackingController(std::move(ctrl_model), ctrl_body, rule, gains,
                                   law, cfg.boolean_or("controller.use_feedforward", false)),
        std::move(profile),
        options,
        Vec2(cfg.number_or("profile.v0_1", 0.0), cfg.number_or("profile.v0_2", 0.0)),
        deg2rad(cfg.number_or("profile.theta0_deg", 0.0))};
}

}  // namespace longfd
