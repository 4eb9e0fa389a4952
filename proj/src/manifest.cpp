#include "roadfield/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "roadfield/config.hpp"
#include "roadfield/util.hpp"

namespace roadfield {

std::string sha256_hex(const void* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data, len) != 1 ||
      EVP_DigestFinal_ex(ctx, digest, &digest_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericsError("SHA-256 digest computation failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  return sha256_hex(bytes.data(), bytes.size());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["parameters"] = {{"D", c.params.D},
                     {"d", c.params.d},
                     {"mu", c.params.mu},
                     {"nu", c.params.nu},
                     {"c", c.params.c},
                     {"strict_exchange", c.params.strict_exchange}};
  j["niche"] = {{"kind", c.niche_kind},     {"L", c.niche_L},
                {"table", c.niche_table},   {"m0", c.niche_m0},
                {"homogeneous", c.niche_homogeneous},
                {"clamp", c.niche_clamp}};
  j["numerics"] = {{"h", c.h},
                   {"X0", c.X0},
                   {"growth", c.growth},
                   {"stop_tol", c.stop_tol},
                   {"max_steps", c.max_steps},
                   {"max_x", c.max_x},
                   {"eigen_tol", c.eigen_tol},
                   {"dt", c.dt},
                   {"horizon", c.horizon},
                   {"steady_tol", c.steady_tol},
                   {"speed_tol", c.speed_tol},
                   {"threshold_tol", c.threshold_tol},
                   {"d_max", c.d_max},
                   {"scan_points", c.scan_points},
                   {"X", c.X}};
  j["command"] = {{"name", c.command},
                  {"axis", c.axis},
                  {"values", c.values},
                  {"robin_nu", c.robin_nu},
                  {"with_verdicts", c.with_verdicts},
                  {"check", c.checks},
                  {"frame_stride", c.frame_stride},
                  {"jobs", c.jobs},
                  {"seed", c.seed}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

RunRecorder::RunRecorder(std::string out_dir,
                         nlohmann::ordered_json resolved_config)
    : dir_(std::move(out_dir)),
      config_(std::move(resolved_config)),
      start_(std::chrono::steady_clock::now()) {
  if (dir_.empty()) throw ConfigError("output.dir must not be empty");
  std::filesystem::create_directories(dir_);
}

void RunRecorder::write_text(const std::string& rel_path,
                             const std::string& bytes) {
  const std::filesystem::path rel(rel_path);
  if (rel.empty() || rel.is_absolute())
    throw ConfigError("output path '" + rel_path + "' must be relative");
  for (const auto& part : rel)
    if (part == "..")
      throw ConfigError("output path '" + rel_path +
                        "' must stay inside the output directory");
  for (const auto& [path, digest] : outputs_)
    if (path == rel_path)
      throw ConfigError("output path '" + rel_path + "' written twice");

  const std::filesystem::path full = std::filesystem::path(dir_) / rel;
  if (rel.has_parent_path())
    std::filesystem::create_directories(full.parent_path());
  std::ofstream out(full, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + full.string() + "' for write");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw NumericsError("short write to '" + full.string() + "'");
  outputs_.emplace_back(rel_path, sha256_hex(bytes));
}

void RunRecorder::add_stage(const std::string& name,
                            nlohmann::ordered_json meta) {
  nlohmann::ordered_json stage;
  stage["name"] = name;
  stage["meta"] = std::move(meta);
  stages_.push_back(std::move(stage));
}

std::string RunRecorder::outputs_digest() const {
  std::vector<std::pair<std::string, std::string>> sorted = outputs_;
  std::sort(sorted.begin(), sorted.end());
  std::string lines;
  for (const auto& [path, digest] : sorted)
    lines += path + ":" + digest + "\n";
  return sha256_hex(lines);
}

std::string RunRecorder::finalize() {
  std::vector<std::pair<std::string, std::string>> sorted = outputs_;
  std::sort(sorted.begin(), sorted.end());
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : sorted)
    files.push_back({{"path", path}, {"sha256", digest}});

  nlohmann::ordered_json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["config"] = config_;
  manifest["stages"] = stages_;
  manifest["outputs"] = std::move(files);
  const std::string digest = outputs_digest();
  manifest["outputs_digest"] = digest;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
          .count();

  const std::filesystem::path final_path =
      std::filesystem::path(dir_) / "manifest.json";
  const std::filesystem::path tmp_path =
      std::filesystem::path(dir_) / "manifest.json.tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ConfigError("cannot open '" + tmp_path.string() + "' for write");
    out << manifest.dump(2) << '\n';
    out.close();
    if (!out) throw NumericsError("short write to '" + tmp_path.string() + "'");
  }
  std::filesystem::rename(tmp_path, final_path);
  return digest;
}

}  // namespace roadfield
