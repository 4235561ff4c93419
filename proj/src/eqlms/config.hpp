#pragma once

// Experiment configuration: the flat key set shared by the CLI flags and the
// JSON config file, plus JSON forms of ExperimentSpec and ProtocolSuite used
// by the manifest.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqlms/bench.hpp"
#include "eqlms/presets.hpp"

namespace eqlms {

// One entry of a custom suite ("entries" key).
struct EntryConfig {
  std::string label;
  Algorithm algo = Algorithm::kLms;
  double mu = 0.1;
  std::vector<double> q{kPresetQ};
  std::optional<double> beta, gamma, zeta;
};

struct RunConfig {
  std::string command = "run";  // run | suite | compare
  std::vector<Algorithm> algo;  // empty: command default
  std::optional<double> mu;
  std::vector<double> q;        // empty: 2.0
  double beta = 0.9;
  double gamma = 0.1;
  double zeta = 1e-6;
  std::vector<double> snr;      // empty: command default
  std::optional<std::size_t> iters;
  std::optional<std::size_t> runs;
  std::uint64_t seed = 1;
  std::optional<double> lambda_max = 1.0;  // nullopt: "estimate"
  int protocol = 1;
  std::string mode = "convergence";
  std::string out = "results";
  bool full_scale = false;
  unsigned workers = 0;
  std::string q_init = "ones";
  double window = kDefaultWindowFraction;
  double tol_db = kDefaultToleranceDb;
  std::vector<EntryConfig> entries;
};

inline constexpr std::size_t kDeskRuns = 200;
inline constexpr std::size_t kFullScaleRuns = 1000;

// Every accepted top-level key.
const std::vector<std::string>& config_keys();

// Strict parse: unknown keys and wrongly typed values throw Error(kConfig).
RunConfig config_from_json(const nlohmann::json& j);
// Overlay `j` onto `base` (keys present in j win).
RunConfig merge_config(const RunConfig& base, const nlohmann::json& j);
// Fully resolved form, with command defaults filled in.
nlohmann::json config_to_json(const RunConfig& c);

std::vector<ProtocolSuite> plan_suites(const RunConfig& c);

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json suite_to_json(const ProtocolSuite& suite);
ProtocolSuite suite_from_json(const nlohmann::json& j);

}  // namespace eqlms
