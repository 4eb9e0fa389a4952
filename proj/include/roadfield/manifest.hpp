#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

// Reproducible-run plumbing: every CLI invocation funnels its artifacts
// through a RunRecorder, which writes them under one directory and closes the
// run with a `manifest.json` naming the resolved configuration, tool version,
// per-stage convergence metadata, and a digest inventory of every output.
// The combined digest covers output bytes only (never the wall clock), so
// byte-identical reruns are detectable by comparing one string.

namespace roadfield {

struct RunConfig;

inline constexpr const char* kToolName = "roadfield";
inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& bytes);

// Resolved config (defaults expanded) as ordered JSON, mirroring the TOML
// sections; embedded in the manifest.
nlohmann::ordered_json to_json(const RunConfig& config);

class RunRecorder {
 public:
  RunRecorder(std::string out_dir, nlohmann::ordered_json resolved_config);

  // Writes bytes to out_dir/rel_path (creating parent directories) and
  // records the file digest.  Paths are relative, unique, and stay inside
  // the output directory; violations throw ConfigError.
  void write_text(const std::string& rel_path, const std::string& bytes);

  void add_stage(const std::string& name, nlohmann::ordered_json meta);

  // SHA-256 over the sorted `path:digest` lines of all outputs so far.
  std::string outputs_digest() const;

  // Writes manifest.json atomically (temp file + rename); returns the
  // outputs digest it recorded.
  std::string finalize();

 private:
  std::string dir_;
  nlohmann::ordered_json config_;
  nlohmann::ordered_json stages_ = nlohmann::ordered_json::array();
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace roadfield
