#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "roadfield/analysis.hpp"
#include "roadfield/util.hpp"

using namespace roadfield;

namespace {

Parameters params(double D, double d, double mu, double nu, double c) {
  Parameters p;
  p.D = D;
  p.d = d;
  p.mu = mu;
  p.nu = nu;
  p.c = c;
  return p;
}

ExhaustionSchedule rung(double x, double h) {
  ExhaustionSchedule s;
  s.x0 = x;
  s.spacing = h;
  s.max_steps = 1;
  return s;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("kpp speed") {
    CHECK(c_kpp(1.0) == 2.0);
    CHECK(c_kpp(4.0) == 4.0);
    CHECK_THROWS_AS(c_kpp(0.0), ConfigError);
  }

  TEST_CASE("range parsing") {
    CHECK(parse_range("0:1:5") ==
          std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(parse_range("2:7:1") == std::vector<double>{2.0});
    CHECK(parse_range("3") == std::vector<double>{3.0});
    CHECK(parse_range("1,2,3.5") == std::vector<double>{1.0, 2.0, 3.5});
    CHECK(parse_range("-2:8:21").size() == 21);
    CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
    CHECK_THROWS_AS(parse_range("1:2:2.5"), ConfigError);
    CHECK_THROWS_AS(parse_range("a:2:3"), ConfigError);
    CHECK_THROWS_AS(parse_range("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_range(""), ConfigError);
  }

  TEST_CASE("homogeneous eigenvalue sits just above the growth floor") {
    // m == 1 everywhere: the exact generalized eigenvalue is -1; truncation
    // can only raise it
    const double lam = lambda_homogeneous(params(1, 1, 1, 1, 0), 0.0);
    CHECK(lam >= -1.0 - 1e-9);
    CHECK(lam < -0.9);
  }

  TEST_CASE("extinction at rest returns the zero speed pair") {
    // nowhere-favorable niche: lambda(0) > 0, so both speeds are zero by
    // convention
    const SpeedPair sp = critical_speeds(params(1, 1, 1, 1, 0),
                                         NicheProfile::radial_fl(-1.0), 0.05,
                                         rung(4.0, 0.5), 5);
    CHECK(sp.c_star == 0.0);
    CHECK(sp.c_star_upper == 0.0);
    CHECK_FALSE(sp.provisional);
    CHECK(sp.scan.size() == 1);
    CHECK(sp.scan[0].lambda > 0.0);
  }

  TEST_CASE("favorable niches bracket a positive critical speed") {
    const SpeedPair sp = critical_speeds(params(1, 1, 1, 1, 0),
                                         NicheProfile::radial_fl(3.0), 0.05,
                                         rung(8.0, 0.5), 11);
    CHECK(sp.c_star > 1.0);
    CHECK(sp.c_star <= sp.c_star_upper);
    CHECK(sp.c_star_upper <= sp.bound + sp.bracket_width);
    CHECK_FALSE(sp.provisional);
    CHECK(sp.scan.size() == 11);
    const double cn = critical_speed_no_road(1.0, NicheProfile::radial_fl(3.0),
                                             0.05, rung(8.0, 0.5));
    CHECK(cn > 1.0);
    CHECK(cn < 2.0);
  }

  TEST_CASE("speed searches demand a confined niche") {
    CHECK_THROWS_AS(critical_speeds(params(1, 1, 1, 1, 0),
                                    NicheProfile::constant(1.0, true), 0.05,
                                    rung(4.0, 0.5)),
                    ConfigError);
    CHECK_THROWS_AS(critical_speeds(params(1, 1, 1, 1, 0),
                                    NicheProfile::radial_fl(3.0), -1.0,
                                    rung(4.0, 0.5)),
                    ConfigError);
  }

  TEST_CASE("diffusion threshold conventions") {
    const NicheProfile hostile = NicheProfile::radial_fl(-2.0);
    CHECK(diffusion_threshold(params(1, 1, 1, 1, 0), hostile, 5.0, 0.05,
                              rung(4.0, 0.5)) == 0.0);
    // a moving frame has no stationary threshold
    CHECK_THROWS_AS(diffusion_threshold(params(1, 1, 1, 1, 0.5), hostile, 5.0,
                                        0.05, rung(4.0, 0.5)),
                    ConfigError);
    // persistent all the way up to d_max: the bracket is useless
    CHECK_THROWS_AS(diffusion_threshold(params(1, 1, 1, 1, 0),
                                        NicheProfile::radial_fl(5.0), 1.0,
                                        0.05, rung(8.0, 0.5)),
                    NumericsError);
  }

  TEST_CASE("sweep axes") {
    CHECK(sweep_axis_from_name("c") == SweepAxis::c);
    CHECK(sweep_axis_from_name("mu") == SweepAxis::mu);
    CHECK(std::string(to_string(SweepAxis::D)) == "D");
    CHECK_THROWS_AS(sweep_axis_from_name("q"), ConfigError);
  }

  TEST_CASE("sweep fills the documented csv shape") {
    SweepOptions opts;
    opts.sched = rung(6.0, 0.5);
    const SweepTable table =
        sweep(SweepAxis::L, {1.0, 2.0, 3.0}, params(1, 1, 1, 1, 0),
              NicheProfile::radial_fl(1.0), false, opts);
    CHECK(table.rows.size() == 3);
    for (const SweepRow& row : table.rows) {
      CHECK(row.error.empty());
      CHECK(row.lambda.has_value());
      CHECK(row.lambda_neumann.has_value());
      CHECK(row.final_x == 6.0);
    }
    // lambda decreases with the niche radius on a shared truncation
    CHECK(*table.rows[0].lambda > *table.rows[2].lambda);

    std::ostringstream csv;
    table.write_csv(csv);
    const std::string text = csv.str();
    CHECK(text.rfind("axis,value,lambda,lambda_neumann,converged\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("L,1,") != std::string::npos);
  }

  TEST_CASE("sweep records per-row failures without aborting") {
    SweepOptions opts;
    opts.sched = rung(4.0, 0.5);
    const SweepTable table =
        sweep(SweepAxis::d, {-1.0, 1.0}, params(1, 1, 1, 1, 0),
              NicheProfile::radial_fl(1.0), false, opts);
    CHECK_FALSE(table.rows[0].error.empty());  // d = -1 is invalid
    CHECK_FALSE(table.rows[0].lambda.has_value());
    CHECK(table.rows[1].error.empty());
    CHECK(table.rows[1].lambda.has_value());

    std::ostringstream csv;
    table.write_csv(csv);
    // the failed row leaves its value columns empty
    CHECK(csv.str().find("d,-1,,,false\n") != std::string::npos);
  }

  TEST_CASE("sweep input validation") {
    SweepOptions opts;
    opts.sched = rung(4.0, 0.5);
    CHECK_THROWS_AS(sweep(SweepAxis::c, {}, params(1, 1, 1, 1, 0),
                          NicheProfile::radial_fl(1.0), false, opts),
                    ConfigError);
    CHECK_THROWS_AS(sweep(SweepAxis::c, {2.0, 1.0}, params(1, 1, 1, 1, 0),
                          NicheProfile::radial_fl(1.0), false, opts),
                    ConfigError);  // not ascending
    CHECK_THROWS_AS(sweep(SweepAxis::L, {1.0}, params(1, 1, 1, 1, 0),
                          NicheProfile::constant(-1.0), false, opts),
                    ConfigError);  // an L sweep re-centers a radial niche
  }

  TEST_CASE("sweep verdicts ride on the classified dynamics") {
    SweepOptions opts;
    opts.sched = rung(8.0, 0.5);
    opts.horizon = 100.0;
    opts.steady_tol = 1e-3;
    const SweepTable table =
        sweep(SweepAxis::L, {0.0, 3.0}, params(1, 1, 1, 1, 0),
              NicheProfile::radial_fl(1.0), true, opts);
    CHECK(table.has_verdicts);
    REQUIRE(table.rows[0].verdict.has_value());
    REQUIRE(table.rows[1].verdict.has_value());
    CHECK(*table.rows[0].verdict == Verdict::Extinction);
    CHECK(*table.rows[1].verdict == Verdict::Persistence);

    std::ostringstream csv;
    table.write_csv(csv);
    CHECK(csv.str().rfind("axis,value,lambda,lambda_neumann,converged,verdict\n",
                          0) == 0);
    CHECK(csv.str().find(",persistence\n") != std::string::npos);
  }

  TEST_CASE("verification registry") {
    const std::vector<std::string> names = verify_check_names();
    CHECK(names.size() == 19);
    CHECK(names.front() == "separable-eigenvalue");
    CHECK(names.back() == "rayleigh-floor");
    CHECK_THROWS_AS(verify_suite({"no-such-check"}), ConfigError);

    const VerifyReport report =
        verify_suite({"oracle-equivalence", "rayleigh-floor"});
    REQUIRE(report.checks.size() == 2);
    CHECK(report.all_pass());
    for (const CheckResult& r : report.checks) {
      CHECK(r.pass);
      CHECK(r.margin >= 0.0);
      CHECK(r.seconds >= 0.0);
      CHECK_FALSE(r.detail.empty());
    }
  }
}
