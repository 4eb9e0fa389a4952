#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "roadfield/eigensolver.hpp"
#include "roadfield/model.hpp"

// Run configuration: a strict TOML subset ([section] headers, `key = value`
// lines, numbers / booleans / quoted strings / flat arrays, `#` comments)
// resolved against compiled-in defaults.  Unknown keys are errors, never
// silent typos; command-line overrides are applied through the same key
// dispatch and therefore get the same validation.

namespace roadfield {

struct TomlValue {
  enum class Kind { Number, Boolean, String, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<TomlValue> items;  // scalars only (no nested arrays)
  int line = 0;
};

// Flat `section.key -> value` map in file order is all the subset needs.
using ConfigMap = std::map<std::string, TomlValue>;

// Throws ConfigError with a line number on any syntax violation, duplicate
// key, or key outside a [section].
ConfigMap parse_toml(std::istream& in);
ConfigMap parse_toml_string(const std::string& text);

// One scalar or array parsed with the TOML value grammar; text that is not a
// number, boolean, quoted string, or array is taken as a bare string so that
// `--set niche.kind=radial_fl` works without shell quoting.
TomlValue parse_override_value(const std::string& text);

struct RunConfig {
  // [parameters]
  Parameters params;

  // [niche] -- `kind` has no default: runs that need a niche must name one.
  std::string niche_kind;
  double niche_L = 3.0;
  std::string niche_table;
  double niche_m0 = 0.0;
  bool niche_homogeneous = false;
  bool niche_clamp = true;

  // [numerics] -- every field has a default and all of them are echoed into
  // the manifest.  X = 0 lets simulate size its grid from the exhaustion.
  double h = 0.25;
  double X0 = 8.0;
  double growth = 1.5;
  double stop_tol = 1e-4;
  int max_steps = 6;
  double max_x = 32.0;
  double eigen_tol = 1e-10;
  double dt = 0.05;
  double horizon = 500.0;
  double steady_tol = 1e-6;
  double speed_tol = 0.02;
  double threshold_tol = 0.01;
  double d_max = 20.0;
  int scan_points = 21;
  double X = 0.0;

  // [command]
  std::string command;
  std::string axis = "L";
  std::string values;        // start:stop:count or comma list
  double robin_nu = -1.0;    // eigen-no-road: < 0 selects the Neumann wall
  bool with_verdicts = false;
  std::vector<std::string> checks;  // verify selection; empty = all
  int frame_stride = 100;    // simulate: snapshots every N-th recording
  int jobs = 1;
  std::uint64_t seed = 20240704;

  // [output]
  std::string out_dir = "out";

  // Folds every entry into this config; throws ConfigError naming
  // `section.key` for unknown keys or ill-typed values.
  void apply(const ConfigMap& map);
  // Same dispatch for one `--set section.key=value` override.
  void apply_override(const std::string& dotted_key, const std::string& value);

  // Exhaustion schedule assembled from the numerics block.
  ExhaustionSchedule schedule() const;
  // Builds the configured niche; throws ConfigError naming `niche.kind` or
  // `niche.table` when the block is incomplete.
  NicheProfile make_niche() const;

  // Fully resolved round-trippable echo (defaults expanded); parsing it back
  // reproduces this config exactly.  The output directory is omitted -- the
  // echo names the run, not where its artifacts landed.
  std::string to_toml() const;
};

}  // namespace roadfield
