#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "longfd/config.hpp"
#include "longfd/errors.hpp"

using namespace longfd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("longfd_cfg_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path write(const std::string& name, const std::string& text) const {
        const fs::path p = path / name;
        std::ofstream(p) << text;
        return p;
    }
};

const char* kScenarioText = R"([body]
m = 10.0
k_a = 0.646

[aero]
kind = "flat_plate"
c0 = 0.0139
c1 = 0.9430

[controller]
m = 10.0
k_a = 0.646
kind = "flat_plate"
c0 = 0.0139
c1 = 0.9430
law = "ideal"

[gains]
k1 = 0.1529
k2 = 0.0234
k3 = 6.0

[profile]
kind = "constant"
vr2 = 12.0

[integration]
dt = 0.001
t_end = 2.0
)";

}  // namespace

TEST_CASE("scalar value parsing") {
    const TomlTable t = TomlTable::parse_string(
        "top = 1\n"
        "[alpha]\n"
        "n1 = 42        # trailing comment\n"
        "n2 = -3.5e-2\n"
        "name = \"with # inside\"\n"
        "flag = true\n"
        "off = false\n"
        "\n"
        "[beta-2]\n"
        "under_score = 7\n");
    CHECK(t.number("top") == 1.0);
    CHECK(t.number("alpha.n1") == 42.0);
    CHECK(t.number("alpha.n2") == doctest::Approx(-0.035));
    CHECK(t.str("alpha.name") == "with # inside");
    CHECK(t.boolean_or("alpha.flag", false));
    CHECK(!t.boolean_or("alpha.off", true));
    CHECK(t.number("beta-2.under_score") == 7.0);
    CHECK(t.has("alpha.n1"));
    CHECK(!t.has("alpha.n3"));
    CHECK(t.base_dir().empty());
}

TEST_CASE("syntax errors name origin and line") {
    using doctest::Contains;
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("a = 1\nb 2\n", "f.toml"),
                         Contains("f.toml:2"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("[sec\nx = 1\n", "f.toml"),
                         Contains("malformed section"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("kind = flat_plate\n"),
                         Contains("must be double-quoted"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("x = 1\nx = 2\n"),
                         Contains("duplicate key"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("s = \"oops\n"),
                         Contains("unterminated string"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("a.b = 1\n"),
                         Contains("invalid key"), ConfigError);
    CHECK_THROWS_WITH_AS(TomlTable::parse_string("x =\n"),
                         Contains("empty value"), ConfigError);
}

TEST_CASE("typed access") {
    using doctest::Contains;
    const TomlTable t = TomlTable::parse_string(
        "[s]\nnum = 3\nword = \"hi\"\nflag = true\n", "g.toml");
    CHECK_THROWS_WITH_AS(t.number("s.word"), Contains("'s.word' must be a number"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(t.str("s.num"), Contains("must be a string"), ConfigError);
    CHECK_THROWS_WITH_AS(t.number("s.gone"), Contains("missing required key 's.gone'"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(t.boolean_or("s.num", true), Contains("true or false"),
                         ConfigError);
    CHECK(t.number_or("s.gone", 2.5) == 2.5);
    CHECK(t.str_or("s.gone", "dflt") == "dflt");
    CHECK(t.number_or("s.num", 0.0) == 3.0);
    // Present-but-wrong-type is an error even for the fallback forms.
    CHECK_THROWS_AS(t.number_or("s.word", 1.0), ConfigError);
}

TEST_CASE("dotted-path overrides") {
    TomlTable t = TomlTable::parse_string("[aero]\nkind = \"blended\"\nc0 = 0.014\n");
    t.set_override("aero.c0=0.02");
    CHECK(t.number("aero.c0") == 0.02);
    t.set_override("aero.kind=flat_plate");  // bare strings allowed here
    CHECK(t.str("aero.kind") == "flat_plate");
    t.set_override("gains.k1=0.3");  // creates missing keys
    CHECK(t.number("gains.k1") == 0.3);
    t.set_override("controller.use_feedforward=true");
    CHECK(t.boolean_or("controller.use_feedforward", false));
    CHECK_THROWS_AS(t.set_override("no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(t.set_override("bad key!=1"), ConfigError);
    CHECK_THROWS_AS(t.set_override("x="), ConfigError);
}

TEST_CASE("file access") {
    TempDir tmp;
    const fs::path p = tmp.write("ok.toml", "[body]\nm = 2.0\nk_a = 0.1\n");
    const TomlTable t = TomlTable::parse_file(p.string());
    CHECK(t.number("body.m") == 2.0);
    CHECK(t.base_dir() == p.parent_path().string());
    CHECK_THROWS_WITH_AS(TomlTable::parse_file((tmp.path / "missing.toml").string()),
                         doctest::Contains("cannot open config file"), ConfigError);
}

TEST_CASE("body section") {
    const TomlTable t = TomlTable::parse_string("[body]\nm = 10.0\nk_a = 0.646\n");
    const BodyParams b = load_body_params(t, "body");
    CHECK(b.m == 10.0);
    CHECK(b.g == 9.81);  // default
    CHECK(b.k_a == 0.646);
    CHECK(b.delta == 0.0);  // default

    TomlTable full = TomlTable::parse_string(
        "[body]\nm = 3.0\ng = 1.62\nk_a = 0.2\ndelta_deg = 4.0\n");
    const BodyParams moon = load_body_params(full, "body");
    CHECK(moon.g == 1.62);
    CHECK(moon.delta == doctest::Approx(deg2rad(4.0)));

    full.set_override("body.m=-5");
    CHECK_THROWS_AS(load_body_params(full, "body"), ConfigError);
    const TomlTable missing = TomlTable::parse_string("[body]\nm = 1.0\n");
    CHECK_THROWS_WITH_AS(load_body_params(missing, "body"),
                         doctest::Contains("body.k_a"), ConfigError);
}

TEST_CASE("coefficient model section") {
    SUBCASE("analytic kinds") {
        const TomlTable t = TomlTable::parse_string(
            "[a]\nkind = \"flat_plate\"\nc0 = 0.1\nc1 = 0.9\n"
            "[b]\nkind = \"small_alpha\"\nc0 = 0.05\nc2 = 5.0\nc3 = 0.3\n"
            "[c]\nkind = \"blended\"\nc0 = 0.014\nc1 = 0.95\nc2 = 5.5\nc3 = 0.3\n"
            "alpha_bar_deg = 11.0\nk_l = 28.0\nk_d = 167.0\n");
        const AeroModel fp = load_aero_model(t, "a");
        CHECK(fp.coeffs(0.5).cl ==
              doctest::Approx(AeroModel::flat_plate(0.1, 0.9).coeffs(0.5).cl));
        const AeroModel sa = load_aero_model(t, "b");
        CHECK(sa.coeffs(0.2).cd ==
              doctest::Approx(AeroModel::small_alpha(0.05, 5.0, 0.3).coeffs(0.2).cd));
        const AeroModel bl = load_aero_model(t, "c");
        const AeroModel ref =
            AeroModel::blended(0.014, 0.95, 5.5, 0.3, deg2rad(11.0), 28.0, 167.0);
        for (double al : {0.05, 0.4, 1.2}) {
            CHECK(bl.coeffs(al).cl == doctest::Approx(ref.coeffs(al).cl));
            CHECK(bl.coeffs(al).cd == doctest::Approx(ref.coeffs(al).cd));
        }
    }
    SUBCASE("unknown kind") {
        const TomlTable t = TomlTable::parse_string("[a]\nkind = \"cubic\"\n");
        CHECK_THROWS_WITH_AS(load_aero_model(t, "a"),
                             doctest::Contains("a.kind must be one of"), ConfigError);
    }
    SUBCASE("tabulated file resolved against the config directory") {
        TempDir tmp;
        tmp.write("coeffs.csv",
                  "alpha_deg,cl,cd\n-180,0,0.1\n-90,-1,1.5\n0,0,0.1\n90,1,1.5\n");
        const fs::path cfg =
            tmp.write("t.toml", "[a]\nkind = \"tabulated\"\nfile = \"coeffs.csv\"\n");
        const AeroModel m = load_aero_model(TomlTable::parse_file(cfg.string()), "a");
        CHECK(m.coeffs(deg2rad(90.0)).cl == doctest::Approx(1.0));
        CHECK(m.coeffs(0.0).cd == doctest::Approx(0.1));
    }
}

TEST_CASE("full scenario assembly") {
    SUBCASE("shipped transition scenario") {
        const std::string path =
            std::string(LONGFD_CONFIG_DIR) + "/naca0021_transition.toml";
        const SimSetup s = load_sim_setup(TomlTable::parse_file(path));
        CHECK(s.plant_body.m == 10.0);
        CHECK(s.plant_body.g == 9.81);
        CHECK(s.plant_body.k_a == 0.646);
        CHECK(s.plant_body.delta == 0.0);
        CHECK(s.controller.body().m == 9.0);
        CHECK(s.controller.body().k_a == 0.51);
        CHECK(s.controller.gains().k1 == 0.1529);
        CHECK(s.controller.gains().k2 == 0.0234);
        CHECK(s.controller.gains().k3 == 6.0);
        CHECK(s.controller.gains().tau == 80.0);
        CHECK(s.controller.law() == ControlLaw::robust);
        CHECK(s.controller.rule() == LambdaRule::general);
        CHECK(!s.controller.use_feedforward());
        CHECK(s.options.dt == 0.001);
        CHECK(s.options.t_end == 12.0);
        CHECK(s.xdot0 == Vec2::Zero());
        CHECK(s.theta0 == 0.0);
        CHECK(s.profile(3.0).xdot_r == Vec2(0.0, 6.0));
        CHECK(s.profile(11.0).xdot_r == Vec2(0.0, 20.0));

        const AeroModel plant_ref =
            AeroModel::blended(0.014, 0.95, 5.5, 0.3, deg2rad(11.0), 28.0, 167.0);
        const AeroModel est_ref =
            AeroModel::blended(0.02, 0.9, 5.0, 0.5, deg2rad(10.0), 28.0, 167.0);
        CHECK(s.plant_model.coeffs(0.3).cl == doctest::Approx(plant_ref.coeffs(0.3).cl));
        CHECK(s.controller.model().coeffs(0.3).cl ==
              doctest::Approx(est_ref.coeffs(0.3).cl));
    }
    SUBCASE("ideal law defaults tau, robust law requires it") {
        TomlTable t = TomlTable::parse_string(kScenarioText);
        const SimSetup s = load_sim_setup(t);
        CHECK(s.controller.law() == ControlLaw::ideal);
        CHECK(s.controller.gains().tau == 1.0);
        t.set_override("controller.law=robust");
        CHECK_THROWS_WITH_AS(load_sim_setup(t), doctest::Contains("gains.tau"),
                             ConfigError);
    }
    SUBCASE("constant profile reads target and wind") {
        TomlTable t = TomlTable::parse_string(kScenarioText);
        t.set_override("wind.w2=-3.0");
        const SimSetup s = load_sim_setup(t);
        CHECK(s.profile(0.5).xdot_r == Vec2(0.0, 12.0));
        CHECK(s.profile(0.5).xdot_w == Vec2(0.0, -3.0));
        CHECK(s.profile(0.5).xddot_r == Vec2::Zero());
    }
    SUBCASE("bad selector values are rejected") {
        TomlTable t = TomlTable::parse_string(kScenarioText);
        t.set_override("controller.lambda_rule=generic");
        CHECK_THROWS_AS(load_sim_setup(t), ConfigError);
        TomlTable u = TomlTable::parse_string(kScenarioText);
        u.set_override("profile.kind=spiral");
        CHECK_THROWS_WITH_AS(load_sim_setup(u), doctest::Contains("profile.kind"),
                             ConfigError);
        TomlTable w = TomlTable::parse_string(kScenarioText);
        w.set_override("integration.dt=0");
        CHECK_THROWS_AS(load_sim_setup(w), ConfigError);
    }
}
