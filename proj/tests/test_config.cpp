#include <string>

#include "doctest.h"
#include "roadfield/config.hpp"
#include "roadfield/model.hpp"
#include "roadfield/util.hpp"

using namespace roadfield;

namespace {

const char* kSample = R"(# reference run
[parameters]
D = 2.0
mu = 0.5   # trailing comment
c = -1.5

[niche]
kind = "radial_fl"
L = 4.0
table = "has # no comment inside"

[command]
name = "sweep"
values = [1, 2.5, 4]
with_verdicts = true
check = ["dichotomy", "rayleigh-floor"]
)";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("toml subset round trips values, comments, and escapes") {
    const ConfigMap map = parse_toml_string(kSample);
    CHECK(map.at("parameters.D").number == 2.0);
    CHECK(map.at("parameters.mu").number == 0.5);
    CHECK(map.at("parameters.c").number == -1.5);
    CHECK(map.at("niche.kind").text == "radial_fl");
    CHECK(map.at("niche.table").text == "has # no comment inside");
    CHECK(map.at("command.values").items.size() == 3);
    CHECK(map.at("command.values").items[1].number == 2.5);
    CHECK(map.at("command.with_verdicts").boolean == true);
    CHECK(map.at("command.check").items[0].text == "dichotomy");
    CHECK(map.at("parameters.D").line == 3);

    const ConfigMap esc =
        parse_toml_string("[niche]\ntable = \"a\\\"b\\\\c\"\n");
    CHECK(esc.at("niche.table").text == "a\"b\\c");
  }

  TEST_CASE("toml syntax errors carry line numbers") {
    CHECK_THROWS_AS(parse_toml_string("D = 1\n"), ConfigError);  // no section
    CHECK_THROWS_AS(parse_toml_string("[parameters]\nD = 1\nD = 2\n"),
                    ConfigError);  // duplicate key
    CHECK_THROWS_AS(parse_toml_string("[parameters]\nD = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml_string("[niche]\nkind = \"open\n"),
                    ConfigError);  // unterminated string
    CHECK_THROWS_AS(parse_toml_string("[parameters]\nD = 1 2\n"),
                    ConfigError);  // trailing text
    CHECK_THROWS_AS(parse_toml_string("[command]\ncheck = [[1]]\n"),
                    ConfigError);  // nested array
    CHECK_THROWS_AS(parse_toml_string("[parameters\nD = 1\n"), ConfigError);

    try {
      parse_toml_string("[parameters]\nD = 1\nD = 2\n");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  TEST_CASE("apply folds a parsed map over the defaults") {
    RunConfig cfg;
    cfg.apply(parse_toml_string(kSample));
    CHECK(cfg.params.D == 2.0);
    CHECK(cfg.params.mu == 0.5);
    CHECK(cfg.params.c == -1.5);
    CHECK(cfg.params.d == 1.0);  // untouched default
    CHECK(cfg.niche_kind == "radial_fl");
    CHECK(cfg.niche_L == 4.0);
    CHECK(cfg.command == "sweep");
    CHECK(cfg.values == "1,2.5,4");  // numeric array folded to a list
    CHECK(cfg.with_verdicts);
    CHECK(cfg.checks == std::vector<std::string>{"dichotomy", "rayleigh-floor"});
    CHECK(cfg.h == 0.25);  // numerics untouched
  }

  TEST_CASE("unknown and ill-typed keys are named errors") {
    RunConfig cfg;
    try {
      cfg.apply(parse_toml_string("[parameters]\nDD = 1\n"));
      FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("parameters.DD") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg.apply(parse_toml_string("[parameters]\nD = true\n")),
                    ConfigError);
    CHECK_THROWS_AS(
        cfg.apply(parse_toml_string("[numerics]\nmax_steps = 2.5\n")),
        ConfigError);  // integer keys reject fractions
    CHECK_THROWS_AS(cfg.apply(parse_toml_string("[command]\nseed = -1\n")),
                    ConfigError);
    CHECK_THROWS_AS(cfg.apply(parse_toml_string("[wrong]\nD = 1\n")),
                    ConfigError);
  }

  TEST_CASE("overrides reuse the toml value grammar") {
    RunConfig cfg;
    cfg.apply_override("numerics.h", "0.125");
    CHECK(cfg.h == 0.125);
    cfg.apply_override("niche.kind", "radial_fl");  // bare string
    CHECK(cfg.niche_kind == "radial_fl");
    cfg.apply_override("command.values", "[1, 2]");
    CHECK(cfg.values == "1,2");
    cfg.apply_override("parameters.strict_exchange", "false");
    CHECK_FALSE(cfg.params.strict_exchange);
    CHECK_THROWS_AS(cfg.apply_override("numerics.hh", "1"), ConfigError);
    CHECK_THROWS_AS(cfg.apply_override("badkey", "1"), ConfigError);
  }

  TEST_CASE("resolved echo parses back to itself and omits the out dir") {
    RunConfig cfg;
    cfg.apply(parse_toml_string(kSample));
    cfg.out_dir = "somewhere/else";
    const std::string echo = cfg.to_toml();
    CHECK(echo.find("[output]") == std::string::npos);
    CHECK(echo.find("somewhere") == std::string::npos);

    RunConfig back;
    back.apply(parse_toml_string(echo));
    CHECK(back.to_toml() == echo);
    CHECK(back.params.D == cfg.params.D);
    CHECK(back.niche_kind == cfg.niche_kind);
    CHECK(back.values == cfg.values);
    CHECK(back.checks == cfg.checks);
    CHECK(back.seed == cfg.seed);
  }

  TEST_CASE("numerics block maps onto the exhaustion schedule") {
    RunConfig cfg;
    cfg.apply(parse_toml_string(
        "[numerics]\nh = 0.5\nX0 = 10\ngrowth = 2\nstop_tol = 1e-3\n"
        "max_steps = 3\nmax_x = 40\neigen_tol = 1e-8\n"));
    const ExhaustionSchedule s = cfg.schedule();
    CHECK(s.x0 == 10.0);
    CHECK(s.growth == 2.0);
    CHECK(s.stop_tol == 1e-3);
    CHECK(s.max_steps == 3);
    CHECK(s.spacing == 0.5);
    CHECK(s.max_x == 40.0);
    CHECK(s.eigen_tol == 1e-8);
  }

  TEST_CASE("niche construction names the missing key") {
    RunConfig cfg;
    try {
      cfg.make_niche();
      FAIL("missing kind accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("niche.kind") != std::string::npos);
    }
    cfg.niche_kind = "tabulated";
    try {
      cfg.make_niche();
      FAIL("missing table accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("niche.table") != std::string::npos);
    }
    cfg.niche_kind = "no-such-kind";
    CHECK_THROWS_AS(cfg.make_niche(), ConfigError);

    cfg.niche_kind = "radial_fl";
    cfg.niche_L = 2.0;
    const NicheProfile radial = cfg.make_niche();
    CHECK(radial.kind() == NicheKind::RadialFL);
    CHECK(radial.extent() == 2.0);

    cfg.niche_kind = "constant";
    cfg.niche_m0 = 1.0;
    cfg.niche_homogeneous = true;
    const NicheProfile flat = cfg.make_niche();
    CHECK(flat.homogeneous());
    CHECK(flat.sup() == 1.0);
  }
}
