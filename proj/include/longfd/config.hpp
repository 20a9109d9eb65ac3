#pragma once

// Scenario configuration: a small TOML-subset reader (sections, scalar
// key = value pairs, '#' comments), dotted-path overrides, and the schema
// that assembles plant, controller, reference profile, and integration
// options for the simulate subcommand.

#include <map>
#include <optional>
#include <string>

#include "longfd/sim.hpp"

namespace longfd {

// Flat view of a TOML file restricted to [section] headers and scalar values
// (strings, numbers, booleans). Keys are "section.key". Unsupported syntax
// (arrays, inline tables, multi-line strings) raises ConfigError with the
// file and line.
class TomlTable {
  public:
    static TomlTable parse_file(const std::string& path);
    static TomlTable parse_string(const std::string& text,
                                  const std::string& origin = "<string>");

    // Applies "section.key=value" (the --set syntax); value is lexed like a
    // file value. Creates the key if absent.
    void set_override(const std::string& assignment);

    bool has(const std::string& key) const;

    // Typed getters throw ConfigError naming the key when it is missing or
    // has the wrong type; the *_or forms return the fallback when absent.
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& fallback) const;
    bool boolean_or(const std::string& key, bool fallback) const;

    // Directory of the parsed file (for resolving relative paths in values);
    // empty for parse_string.
    const std::string& base_dir() const { return base_dir_; }

  private:
    struct Value {
        enum class Kind { string, number, boolean } kind = Kind::string;
        std::string s;
        double num = 0.0;
        bool b = false;
    };
    static Value lex_value(const std::string& text, const std::string& where,
                           bool allow_bare_string);
    const Value* find(const std::string& key) const;

    std::map<std::string, Value> values_;
    std::string origin_;
    std::string base_dir_;
};

// Builds the coefficient model described by "<section>.kind" and its
// parameters ("flat_plate", "small_alpha", "blended", or "tabulated" with a
// "file" path resolved against the config's directory).
AeroModel load_aero_model(const TomlTable& cfg, const std::string& section);

// Reads m, g, k_a, delta_deg from the section into validated BodyParams.
BodyParams load_body_params(const TomlTable& cfg, const std::string& section);

struct SimSetup {
    AeroModel plant_model;
    BodyParams plant_body;
    VelocityTrackingController controller;
    ReferenceProfileFn profile;
    SimOptions options;
    Vec2 xdot0;
    double theta0 = 0.0;
};

// Assembles a full closed-loop scenario from sections [body], [aero],
// [controller], [gains], [profile], [wind], [integration].
SimSetup load_sim_setup(const TomlTable& cfg);

}  // namespace longfd
