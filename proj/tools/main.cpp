#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "roadfield/analysis.hpp"
#include "roadfield/config.hpp"
#include "roadfield/dynamics.hpp"
#include "roadfield/eigensolver.hpp"
#include "roadfield/manifest.hpp"
#include "roadfield/util.hpp"

// Batch front end: resolve the configuration (TOML file, --set overrides,
// explicit flags -- later layers win), run one subcommand, and persist every
// artifact through a RunRecorder so the manifest can witness reproducibility.
// Exit codes: 0 success, 1 computation failure or failed verification,
// 2 configuration error.

namespace {

using namespace roadfield;
using nlohmann::ordered_json;

std::string ladder_csv(const ExhaustionResult& ex) {
  std::string out = "x,y,lambda,residual,iterations\n";
  for (const ExhaustionRung& r : ex.ladder)
    out += fmt17(r.x) + "," + fmt17(r.y) + "," + fmt17(r.lambda) + "," +
           fmt17(r.residual) + "," + std::to_string(r.iterations) + "\n";
  return out;
}

ordered_json ladder_json(const ExhaustionResult& ex) {
  ordered_json rungs = ordered_json::array();
  for (const ExhaustionRung& r : ex.ladder)
    rungs.push_back({{"x", r.x},
                     {"y", r.y},
                     {"lambda", r.lambda},
                     {"residual", r.residual},
                     {"iterations", r.iterations}});
  return rungs;
}

std::string road_csv(const Grid& g, const Eigen::VectorXd& road,
                     const char* value_name) {
  std::string out = std::string("x,") + value_name + "\n";
  for (int i = 0; i < g.nx; ++i)
    out += fmt17(g.x(i)) + "," + fmt17(road[i]) + "\n";
  return out;
}

std::string field_csv(const Grid& g, const Eigen::VectorXd& field,
                      const char* value_name) {
  std::string out = std::string("x,y,") + value_name + "\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out += fmt17(g.x(i)) + "," + fmt17(g.y(j)) + "," +
             fmt17(field[static_cast<long>(j) * g.nx + i]) + "\n";
  return out;
}

std::string scan_csv(const std::vector<ScanPoint>& scan) {
  std::string out = "c,lambda,converged\n";
  for (const ScanPoint& pt : scan)
    out += fmt17(pt.c) + "," + fmt17(pt.lambda) + "," +
           (pt.converged ? "true" : "false") + "\n";
  return out;
}

// Eigenpair on the final exhaustion rung (the ladder stores only values).
EigenResult final_rung_pair(const RunConfig& cfg, const Parameters& p,
                            const NicheProfile& profile, OperatorKind kind,
                            const ExhaustionResult& ex, Grid& grid_out) {
  const ExhaustionRung& last = ex.ladder.back();
  grid_out = Grid::build(last.x, last.y, cfg.h);
  SparseOperator op;
  switch (kind) {
    case OperatorKind::Coupled:
      op = assemble_coupled(grid_out, p, profile);
      break;
    case OperatorKind::Neumann:
      op = assemble_neumann(grid_out, p.d, p.c, profile);
      break;
    case OperatorKind::Robin:
      op = assemble_robin(grid_out, p.d, p.c, p.nu, profile);
      break;
  }
  SolverOptions opts;
  opts.tol = cfg.eigen_tol;
  return principal_eigenpair(op, opts);
}

ExhaustionSchedule pinned_or_schedule(const RunConfig& cfg) {
  ExhaustionSchedule sched = cfg.schedule();
  if (cfg.X > 0.0) {  // explicit truncation: single rung at X
    sched.x0 = cfg.X;
    sched.max_steps = 1;
  }
  return sched;
}

int run_eigen(const RunConfig& cfg, OperatorKind kind) {
  cfg.params.validate();
  const NicheProfile profile = cfg.make_niche();
  Parameters p = cfg.params;
  if (kind == OperatorKind::Robin) {
    p.nu = cfg.robin_nu;
    p.strict_exchange = false;  // boundary uptake only, no road coupling
  }
  if (kind == OperatorKind::Neumann) p.strict_exchange = false;

  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  const ExhaustionSchedule sched = pinned_or_schedule(cfg);
  const ExhaustionResult ex = exhaust_lambda(p, profile, kind, sched);
  rec.add_stage("exhaustion", {{"rungs", ex.ladder.size()},
                               {"converged", ex.converged},
                               {"lambda_inf", ex.lambda_inf}});

  Grid grid;
  const EigenResult pair = final_rung_pair(cfg, p, profile, kind, ex, grid);
  rec.add_stage("eigenpair", {{"x", grid.half_width},
                              {"residual", pair.residual},
                              {"iterations", pair.iterations}});

  ordered_json report;
  report["kind"] = to_string(kind);
  report["lambda_inf"] = ex.lambda_inf;
  report["converged"] = ex.converged;
  report["ladder"] = ladder_json(ex);
  report["final"] = {{"x", grid.half_width},
                     {"y", grid.height},
                     {"h", grid.spacing},
                     {"lambda", pair.lambda},
                     {"residual", pair.residual},
                     {"iterations", pair.iterations}};
  rec.write_text("eigen.json", report.dump(2) + "\n");
  rec.write_text("tables/ladder.csv", ladder_csv(ex));

  if (kind == OperatorKind::Coupled) {
    rec.write_text("fields/phi.csv",
                   road_csv(grid, pair.vector.head(grid.nx), "phi"));
    rec.write_text(
        "fields/psi.csv",
        field_csv(grid, pair.vector.tail(static_cast<long>(grid.nx) * grid.ny),
                  "psi"));
  } else {
    rec.write_text("fields/psi.csv", field_csv(grid, pair.vector, "psi"));
  }
  rec.finalize();

  std::cout << "lambda_inf = " << fmt17(ex.lambda_inf) << " ("
            << (ex.converged ? "converged" : "NOT converged") << ", "
            << ex.ladder.size() << " rungs, final X = "
            << fmt17(grid.half_width) << ")\n";
  if (!ex.converged) {
    std::cerr << "exhaustion did not meet stop_tol " << fmt17(sched.stop_tol)
              << " by X = " << fmt17(grid.half_width)
              << "; raise numerics.max_steps or numerics.max_x\n";
    return 1;
  }
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  cfg.params.validate();
  const NicheProfile profile = cfg.make_niche();
  const ReactionTerm term{profile};

  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  double X = cfg.X;
  if (X <= 0.0) {
    // Size the box from the eigenvalue exhaustion, half again as wide so the
    // steady profile's tails have room.
    const ExhaustionResult ex =
        exhaust_lambda(cfg.params, profile, OperatorKind::Coupled,
                       cfg.schedule());
    X = std::round(1.5 * ex.ladder.back().x / cfg.h) * cfg.h;
    rec.add_stage("domain", {{"x", X},
                             {"from_exhaustion", true},
                             {"exhaustion_x", ex.ladder.back().x},
                             {"lambda_inf", ex.lambda_inf}});
  } else {
    rec.add_stage("domain", {{"x", X}, {"from_exhaustion", false}});
  }
  const Grid grid = Grid::build(X, X, cfg.h);

  std::string road_frames = "t,x,value\n";
  std::string field_frames = "t,x,y,value\n";
  int sink_calls = 0;
  EvolveOptions opts;
  opts.sink = [&](const State& upper, const State*) {
    if (cfg.frame_stride <= 0 || sink_calls++ % cfg.frame_stride != 0) return;
    for (int i = 0; i < grid.nx; ++i)
      road_frames += fmt17(upper.t) + "," + fmt17(grid.x(i)) + "," +
                     fmt17(upper.u[i]) + "\n";
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        field_frames += fmt17(upper.t) + "," + fmt17(grid.x(i)) + "," +
                        fmt17(grid.y(j)) + "," +
                        fmt17(upper.v[static_cast<long>(j) * grid.nx + i]) +
                        "\n";
  };

  const Classification cl = evolve_classify(cfg.params, term, grid,
                                            cfg.horizon, cfg.dt,
                                            cfg.steady_tol, opts);
  rec.add_stage("classification", {{"verdict", to_string(cl.verdict)},
                                   {"lambda", cl.lambda},
                                   {"time", cl.time},
                                   {"steps", cl.steps},
                                   {"bracket_gap", cl.bracket_gap}});

  ordered_json evidence = ordered_json::array();
  for (const auto& row : cl.evidence)
    evidence.push_back({{"t", row[0]},
                        {"sup", row[1]},
                        {"core_min", row[2]},
                        {"gap", row[3]}});
  ordered_json report;
  report["verdict"] = to_string(cl.verdict);
  report["lambda"] = cl.lambda;
  report["time"] = cl.time;
  report["steps"] = cl.steps;
  report["bracket_gap"] = cl.bracket_gap;
  report["sup_state"] = cl.sup_state;
  report["core_min"] = cl.core_min;
  report["state_min"] = cl.state_min;
  report["grid"] = {{"x", grid.half_width},
                    {"y", grid.height},
                    {"h", grid.spacing}};
  report["evidence"] = std::move(evidence);
  rec.write_text("classification.json", report.dump(2) + "\n");
  rec.write_text("fields/road_frames.csv", road_frames);
  rec.write_text("fields/field_frames.csv", field_frames);
  if (cl.steady_state) {
    rec.write_text("fields/steady_road.csv",
                   road_csv(grid, cl.steady_state->u, "u"));
    rec.write_text("fields/steady_field.csv",
                   field_csv(grid, cl.steady_state->v, "v"));
  }
  rec.finalize();

  std::cout << "verdict = " << to_string(cl.verdict)
            << " (lambda = " << fmt17(cl.lambda) << ", t = " << fmt17(cl.time)
            << ", " << cl.steps << " steps)\n";
  return 0;
}

int run_critical_speed(const RunConfig& cfg) {
  cfg.params.validate();
  const NicheProfile profile = cfg.make_niche();

  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  const SpeedPair sp = critical_speeds(cfg.params, profile, cfg.speed_tol,
                                       cfg.schedule(), cfg.scan_points,
                                       cfg.jobs);
  rec.add_stage("speeds", {{"c_star", sp.c_star},
                           {"c_star_upper", sp.c_star_upper},
                           {"provisional", sp.provisional}});

  ordered_json report;
  report["c_star"] = sp.c_star;
  report["c_star_upper"] = sp.c_star_upper;
  report["bound"] = sp.bound;
  report["bracket_width"] = sp.bracket_width;
  report["provisional"] = sp.provisional;
  report["tol"] = cfg.speed_tol;
  rec.write_text("speeds.json", report.dump(2) + "\n");
  rec.write_text("tables/scan.csv", scan_csv(sp.scan));
  rec.finalize();

  std::cout << "c_star = " << fmt17(sp.c_star)
            << ", c_star_upper = " << fmt17(sp.c_star_upper)
            << " (bound " << fmt17(sp.bound) << ")\n";
  if (sp.provisional) {
    std::cerr << "speed scan is provisional: an eigenvalue stage did not "
                 "converge or no sign change was bracketed\n";
    return 1;
  }
  return 0;
}

int run_threshold_d(const RunConfig& cfg) {
  cfg.params.validate();
  const NicheProfile profile = cfg.make_niche();

  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  const double d_star = diffusion_threshold(cfg.params, profile, cfg.d_max,
                                            cfg.threshold_tol, cfg.schedule());
  rec.add_stage("threshold", {{"d_star", d_star}});

  ordered_json report;
  report["d_star"] = d_star;
  report["d_max"] = cfg.d_max;
  report["tol"] = cfg.threshold_tol;
  rec.write_text("threshold.json", report.dump(2) + "\n");
  rec.finalize();

  std::cout << "d_star = " << fmt17(d_star) << " (bracket width "
            << fmt17(cfg.threshold_tol) << ")\n";
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  cfg.params.validate();
  if (cfg.values.empty())
    throw ConfigError(
        "command.values is not set (start:stop:count or a comma list)");
  const SweepAxis axis = sweep_axis_from_name(cfg.axis);
  const NicheProfile profile = cfg.make_niche();
  const std::vector<double> values = parse_range(cfg.values);

  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  SweepOptions opts;
  opts.sched = cfg.schedule();
  opts.horizon = cfg.horizon;
  opts.dt = cfg.dt;
  opts.steady_tol = cfg.steady_tol;
  opts.jobs = cfg.jobs;
  const SweepTable table =
      sweep(axis, values, cfg.params, profile, cfg.with_verdicts, opts);

  int failures = 0;
  ordered_json errors = ordered_json::array();
  for (const SweepRow& row : table.rows)
    if (!row.error.empty()) {
      ++failures;
      errors.push_back({{"value", row.value}, {"error", row.error}});
    }
  rec.add_stage("sweep", {{"axis", cfg.axis},
                          {"rows", table.rows.size()},
                          {"failures", failures},
                          {"errors", std::move(errors)}});

  std::ostringstream csv;
  table.write_csv(csv);
  rec.write_text("tables/sweep.csv", csv.str());
  rec.finalize();

  std::cout << table.rows.size() << " rows on axis " << cfg.axis;
  if (failures) std::cout << ", " << failures << " FAILED";
  std::cout << "\n";
  if (failures) {
    std::cerr << "sweep had " << failures
              << " failed rows; see the manifest sweep stage\n";
    return 1;
  }
  return 0;
}

int run_homogeneous_speed(const RunConfig& cfg) {
  cfg.params.validate();
  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  const double ckpp = c_kpp(cfg.params.d);
  const double ch = homogeneous_speed_cH(cfg.params, cfg.speed_tol);
  rec.add_stage("homogeneous", {{"c_kpp", ckpp}, {"c_h", ch}});

  ordered_json report;
  report["c_kpp"] = ckpp;
  report["c_h"] = ch;
  report["enhancement"] = ch / ckpp - 1.0;
  report["tol"] = cfg.speed_tol;
  rec.write_text("speeds.json", report.dump(2) + "\n");
  rec.finalize();

  std::cout << "c_H = " << fmt17(ch) << " vs c_KPP = " << fmt17(ckpp)
            << " (enhancement " << fmt17(ch / ckpp - 1.0) << ")\n";
  return 0;
}

int run_verify(const RunConfig& cfg) {
  RunRecorder rec(cfg.out_dir, to_json(cfg));
  rec.write_text("resolved.toml", cfg.to_toml());

  const VerifyReport report = verify_suite(cfg.checks, cfg.seed, cfg.jobs);
  ordered_json checks = ordered_json::array();
  for (const CheckResult& r : report.checks) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (margin "
              << fmt17(r.margin) << ", " << fmt17(r.seconds) << "s): "
              << r.detail << "\n";
    // seconds stay out of the artifact: the report must be byte-identical
    // across reruns
    checks.push_back({{"name", r.name},
                      {"pass", r.pass},
                      {"margin", r.margin},
                      {"detail", r.detail}});
  }
  ordered_json doc;
  doc["seed"] = cfg.seed;
  doc["all_pass"] = report.all_pass();
  doc["checks"] = std::move(checks);
  rec.write_text("verify_report.json", doc.dump(2) + "\n");
  rec.add_stage("verify", {{"checks", report.checks.size()},
                           {"all_pass", report.all_pass()}});
  const std::string digest = rec.finalize();

  std::cout << (report.all_pass() ? "all checks passed"
                                  : "SOME CHECKS FAILED")
            << " (outputs digest " << digest << ")\n";
  return report.all_pass() ? 0 : 1;
}

int dispatch(const RunConfig& cfg) {
  if (cfg.command == "eigen") return run_eigen(cfg, OperatorKind::Coupled);
  if (cfg.command == "eigen-no-road")
    return run_eigen(cfg, cfg.robin_nu >= 0.0 ? OperatorKind::Robin
                                              : OperatorKind::Neumann);
  if (cfg.command == "simulate") return run_simulate(cfg);
  if (cfg.command == "critical-speed") return run_critical_speed(cfg);
  if (cfg.command == "threshold-d") return run_threshold_d(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  if (cfg.command == "homogeneous-speed") return run_homogeneous_speed(cfg);
  if (cfg.command == "verify") return run_verify(cfg);
  throw ConfigError("command.name '" + cfg.command + "' is not a subcommand");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Road-field reaction-diffusion toolkit: principal eigenvalues on "
      "exhausting domains, persistence classification, and parameter "
      "studies"};
  app.fallthrough(true);
  app.require_subcommand(0, 1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "TOML configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", sets,
                 "override one key, e.g. --set parameters.D=2 (repeatable)");
  app.add_option("--out", out_dir, "output directory (default out)");
  app.add_option("--jobs", jobs, "max concurrent eigenvalue evaluations");
  app.add_option("--seed", seed, "seed for randomized verification pairs");

  std::optional<double> opt_robin, opt_tol, opt_dmax, opt_horizon, opt_dt, opt_x;
  std::optional<std::string> opt_axis, opt_values;
  std::optional<std::vector<std::string>> opt_checks;
  bool flag_verdicts = false;

  CLI::App* cmd_eigen = app.add_subcommand(
      "eigen", "exhausted principal eigenvalue of the coupled system");
  cmd_eigen->add_option("--x", opt_x, "pin the truncation half-width");
  CLI::App* cmd_enr = app.add_subcommand(
      "eigen-no-road", "field-only eigenvalue (Neumann or Robin wall)");
  cmd_enr->add_option("--robin", opt_robin,
                      "Robin uptake rate nu (omit for the Neumann wall)");
  cmd_enr->add_option("--x", opt_x, "pin the truncation half-width");
  CLI::App* cmd_sim = app.add_subcommand(
      "simulate", "evolve the semilinear system and classify the outcome");
  cmd_sim->add_option("--horizon", opt_horizon, "simulated time horizon");
  cmd_sim->add_option("--dt", opt_dt, "IMEX time step");
  cmd_sim->add_option("--x", opt_x,
                      "half-width (default: 1.5x the exhaustion domain)");
  CLI::App* cmd_speed = app.add_subcommand(
      "critical-speed", "lower/upper critical frame speeds by scan+bisection");
  cmd_speed->add_option("--tol", opt_tol, "bisection tolerance on c");
  CLI::App* cmd_thr = app.add_subcommand(
      "threshold-d", "field diffusivity threshold d_star at c = 0");
  cmd_thr->add_option("--d-max", opt_dmax, "upper end of the d bracket");
  cmd_thr->add_option("--tol", opt_tol, "bisection tolerance on d");
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "eigenvalue (and optional verdict) along one parameter axis");
  cmd_sweep->add_option("--axis", opt_axis, "one of c, L, d, D, mu, nu");
  cmd_sweep->add_option("--values", opt_values,
                        "start:stop:count or comma list");
  cmd_sweep->add_flag("--with-verdicts", flag_verdicts,
                      "classify persistence at every row");
  CLI::App* cmd_hom = app.add_subcommand(
      "homogeneous-speed", "road-enhanced spreading speed, m == 1");
  cmd_hom->add_option("--tol", opt_tol, "bisection tolerance on c");
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "run the verification battery (all checks by default)");
  cmd_verify->add_option("--check", opt_checks,
                         "run only the named checks (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config '" + config_path + "'");
      cfg.apply(parse_toml(in));
    }
    for (const std::string& kv : sets) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects section.key=value, got '" + kv + "'");
      cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const CLI::App* sub : {cmd_eigen, cmd_enr, cmd_sim, cmd_speed,
                                cmd_thr, cmd_sweep, cmd_hom, cmd_verify})
      if (sub->parsed()) cfg.command = sub->get_name();
    if (out_dir) cfg.out_dir = *out_dir;
    if (jobs) cfg.jobs = *jobs;
    if (seed) cfg.seed = *seed;
    if (opt_robin) cfg.robin_nu = *opt_robin;
    if (opt_x) cfg.X = *opt_x;
    if (opt_horizon) cfg.horizon = *opt_horizon;
    if (opt_dt) cfg.dt = *opt_dt;
    if (opt_tol && cfg.command == "threshold-d") cfg.threshold_tol = *opt_tol;
    if (opt_tol && cfg.command != "threshold-d") cfg.speed_tol = *opt_tol;
    if (opt_dmax) cfg.d_max = *opt_dmax;
    if (opt_axis) cfg.axis = *opt_axis;
    if (opt_values) cfg.values = *opt_values;
    if (flag_verdicts) cfg.with_verdicts = true;
    if (opt_checks) cfg.checks = *opt_checks;
    if (cfg.command.empty())
      throw ConfigError(
          "no subcommand given (eigen, eigen-no-road, simulate, "
          "critical-speed, threshold-d, sweep, homogeneous-speed, verify)");
    if (cfg.jobs < 1) throw ConfigError("command.jobs must be >= 1");
    return dispatch(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
