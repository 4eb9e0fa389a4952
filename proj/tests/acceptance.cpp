#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "roadfield/analysis.hpp"

// Acceptance gate: one process run per criterion, one [PASS]/[FAIL] line on
// stdout, exit 0/1.  Criteria 1-17 are named subsets of the verification
// battery (tolerances live next to the checks themselves); criterion 18
// drives the command-line binary twice and compares the recorded manifests
// byte for byte.

using namespace roadfield;
namespace fs = std::filesystem;

namespace {

// criterion number -> battery check names, in battery order
const std::vector<std::vector<std::string>> kCriterionChecks = {
    {"separable-eigenvalue"},                     // 1
    {"oracle-equivalence"},                       // 2
    {"shift-identity"},                           // 3
    {"speed-bound"},                              // 4
    {"kappa-bound"},                              // 5
    {"min-at-zero"},                              // 6
    {"lambda-le-mu"},                             // 7
    {"monotonicity"},                             // 8
    {"road-deleterious"},                         // 9
    {"road-harmful"},                             // 10
    {"threshold-d"},                              // 11
    {"persistence-all-d"},                        // 12
    {"homogeneous-speed"},                        // 13
    {"climate-road-benefit"},                     // 14
    {"cstar-ladder", "lambda-homogeneous-limit"}, // 15
    {"dichotomy"},                                // 16
    {"scheme-properties"},                        // 17
};

int report(int criterion, bool pass, const std::string& evidence) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              evidence.c_str());
  return pass ? 0 : 1;
}

int run_battery_criterion(int criterion) {
  const auto& names = kCriterionChecks[static_cast<std::size_t>(criterion - 1)];
  const VerifyReport rep = verify_suite(names, 20240704ull, 1);
  std::ostringstream evidence;
  bool pass = true;
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const CheckResult& r = rep.checks[i];
    pass = pass && r.pass;
    if (i) evidence << "; ";
    evidence << r.name << (r.pass ? " ok" : " FAILED") << " (" << r.detail
             << ")";
  }
  return report(criterion, pass, evidence.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Two identical `verify` runs into different directories must agree on every
// recorded artifact digest.
int run_determinism_criterion() {
  const fs::path base = fs::temp_directory_path() / "roadfield_acceptance";
  std::vector<std::string> digests;
  std::vector<std::string> reports;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = base / ("run" + std::to_string(rep));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cmd = std::string("\"") + ROADFIELD_CLI_PATH +
                            "\" verify --check rayleigh-floor --out \"" +
                            dir.string() + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0)
      return report(18, false, "verify run " + std::to_string(rep) +
                                   " exited nonzero");
    std::ifstream in(dir / "manifest.json");
    if (!in) return report(18, false, "manifest.json missing");
    nlohmann::json manifest;
    in >> manifest;
    digests.push_back(manifest.at("outputs_digest").get<std::string>());
    reports.push_back(slurp(dir / "verify_report.json"));
  }
  const bool same_digest = digests[0] == digests[1];
  const bool same_report = !reports[0].empty() && reports[0] == reports[1];
  return report(18, same_digest && same_report,
                "outputs_digest " + digests[0] +
                    (same_digest ? " == " : " != ") + digests[1] +
                    (same_report ? ", reports byte-identical"
                                 : ", reports differ"));
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      criterion = std::atoi(argv[++i]);
  }
  if (criterion < 1 || criterion > 18) {
    std::fprintf(stderr, "usage: acceptance --criterion N   (N in 1..18)\n");
    return 2;
  }
  try {
    if (criterion == 18) return run_determinism_criterion();
    return run_battery_criterion(criterion);
  } catch (const std::exception& e) {
    return report(criterion, false, std::string("error: ") + e.what());
  }
}
