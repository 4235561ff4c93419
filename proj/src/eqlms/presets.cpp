#include "eqlms/presets.hpp"

#include <cmath>

#include "eqlms/errors.hpp"

namespace eqlms {

namespace {

// Rows: LMS (also q-LMS), time-varying q-LMS, NLMS, Eq-LMS.
// Columns: 10, 20, 30 dB SNR.
using RateTable = std::array<std::array<double, 3>, 4>;

// Entries are carried as published. Some cells are out of line with their
// neighbours by orders of magnitude and are probably misprints:
//   protocol 1 convergence, 30 dB: LMS/TV/NLMS ~1e-5 cannot converge in 1e4 steps
//   protocol 2 convergence, 20 dB: TV-qLMS 1e-3
//   protocol 3 convergence, 30 dB: LMS 4.5e-3
//   protocol 2 steady-state, 10 dB: NLMS 9e-2
//   protocol 3 steady-state, 20 dB: LMS 8.9e-4, TV-qLMS 9e-5
constexpr std::array<RateTable, 3> kConvergenceRates = {{
    {{{4.4e-2, 2.45e-2, 2.7e-5}, {3.5e-1, 1.3e-1, 3.2e-5}, {2.45e-1, 1.2e-1, 8.7e-5}, {1e-1, 1e-1, 1e-1}}},
    {{{4e-3, 1.5e-3, 5.2e-4}, {2e-2, 1e-3, 1.8e-3}, {2e-2, 9e-3, 2.5e-3}, {1e-2, 1e-2, 1e-2}}},
    {{{3.6e-4, 1.3e-4, 4.5e-3}, {1.6e-3, 6e-4, 1.5e-4}, {1.9e-3, 7e-4, 2.3e-4}, {1e-3, 1e-3, 1e-3}}},
}};

constexpr std::array<RateTable, 3> kSteadyStateRates = {{
    {{{3e-2, 8.9e-3, 2.7e-3}, {3.3e-2, 8.8e-3, 3.1e-3}, {1e-1, 2.8e-2, 8.5e-3}, {1e-1, 1e-1, 1e-1}}},
    {{{3e-3, 8.8e-4, 2.7e-4}, {3.3e-3, 9.3e-4, 3.1e-4}, {9e-2, 2.72e-3, 8.5e-4}, {1e-2, 1e-2, 1e-2}}},
    {{{3e-4, 8.9e-4, 2.7e-5}, {3.3e-4, 9e-5, 3.2e-5}, {1e-3, 2.8e-4, 8.5e-5}, {1e-3, 1e-3, 1e-3}}},
}};

// Equal-steady-state runs are shorter at low SNR.
constexpr std::array<std::array<std::size_t, 3>, 3> kSteadyStateIterations = {{
    {1000, 5000, 10000},
    {10000, 50000, 100000},
    {100000, 500000, 1000000},
}};

constexpr std::array<std::size_t, 3> kConvergenceIterations = {10000, 100000, 1000000};

std::size_t protocol_index(int protocol) {
  if (protocol < 1 || protocol > 3) {
    throw Error(ErrorCode::kConfig, "protocol must be 1, 2 or 3, got " + std::to_string(protocol));
  }
  return static_cast<std::size_t>(protocol - 1);
}

std::size_t snr_index(double snr_db) {
  for (std::size_t i = 0; i < kPresetSnrsDb.size(); ++i) {
    if (snr_db == kPresetSnrsDb[i]) return i;
  }
  throw Error(ErrorCode::kConfig, "presets exist for 10, 20 and 30 dB SNR only");
}

std::size_t row_index(Algorithm kind) {
  switch (kind) {
    case Algorithm::kLms:
    case Algorithm::kQlms: return 0;
    case Algorithm::kTvqlms: return 1;
    case Algorithm::kNlms: return 2;
    case Algorithm::kEqlms: return 3;
    case Algorithm::kQnlms: break;
  }
  throw Error(ErrorCode::kConfig, "no preset learning rate for " + std::string(algorithm_name(kind)));
}

std::string snr_tag(double snr_db) {
  return std::to_string(static_cast<long long>(std::lround(snr_db))) + "dB";
}

}  // namespace

std::string mode_name(SuiteMode mode) {
  return mode == SuiteMode::kEqualConvergence ? "convergence" : "steady-state";
}

std::optional<SuiteMode> parse_mode(const std::string& name) {
  if (name == "convergence") return SuiteMode::kEqualConvergence;
  if (name == "steady-state") return SuiteMode::kEqualSteadyState;
  return std::nullopt;
}

double preset_mu(int protocol, SuiteMode mode, Algorithm kind, double snr_db) {
  const auto& table = mode == SuiteMode::kEqualConvergence ? kConvergenceRates : kSteadyStateRates;
  return table[protocol_index(protocol)][row_index(kind)][snr_index(snr_db)];
}

std::size_t preset_iterations(int protocol, SuiteMode mode, double snr_db) {
  const std::size_t p = protocol_index(protocol);
  if (mode == SuiteMode::kEqualConvergence) {
    snr_index(snr_db);
    return kConvergenceIterations[p];
  }
  return kSteadyStateIterations[p][snr_index(snr_db)];
}

ProtocolSuite preset_suite(int protocol, SuiteMode mode, double snr_db, const PresetOptions& options) {
  ProtocolSuite suite;
  suite.name = "p" + std::to_string(protocol) + "-" + mode_name(mode) + "-" + snr_tag(snr_db);
  suite.group = "Protocol " + std::to_string(protocol) + ", equal " +
                (mode == SuiteMode::kEqualConvergence ? "convergence" : "steady-state error");
  suite.mode = mode;

  ExperimentSpec base;
  base.channel = ChannelModel::reference(snr_db);
  base.n_iterations = options.n_iterations.value_or(preset_iterations(protocol, mode, snr_db));
  base.n_runs = options.n_runs;
  base.base_seed = options.base_seed;
  base.q_init = options.q_init;
  base.algorithm.beta = options.beta;
  base.algorithm.gamma = options.gamma;
  base.algorithm.zeta = options.zeta;
  base.algorithm.lambda_max = options.lambda_max;

  auto add = [&](const std::string& label, Algorithm kind, double q) {
    ExperimentSpec spec = base;
    spec.algorithm.kind = kind;
    spec.algorithm.mu = preset_mu(protocol, mode, kind, snr_db);
    spec.algorithm.q_fixed = {q};
    suite.entries.push_back({label, std::move(spec)});
  };
  add("LMS", Algorithm::kLms, 1.0);
  add("qLMS(q=2)", Algorithm::kQlms, kPresetQ);
  add("TV-qLMS", Algorithm::kTvqlms, 1.0);
  add("NLMS", Algorithm::kNlms, 1.0);
  add("Eq-LMS", Algorithm::kEqlms, 1.0);
  return suite;
}

}  // namespace eqlms
