#pragma once

// Monte-Carlo system identification: an adaptive filter with as many taps as
// the channel learns h from noisy channel output, and the normalized weight
// deviation is tracked every instant.
//
// Curve convention: index i holds NWD(w(i)), the weights after i updates, so
// index 0 is exactly 1 for zero-initialized filters.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqlms/filters.hpp"
#include "eqlms/metrics.hpp"
#include "eqlms/signal.hpp"

namespace eqlms {

enum class QInitPolicy { kOnes, kSeededUniform };

inline constexpr std::size_t kDefaultLambdaWarmup = 10000;

struct ExperimentSpec {
  AlgorithmSpec algorithm;
  ChannelModel channel = ChannelModel::reference(20.0);
  std::size_t n_iterations = 10000;
  std::size_t n_runs = 200;
  std::uint64_t base_seed = 1;
  QInitPolicy q_init = QInitPolicy::kOnes;
  // Samples used for lambda_max when algorithm.lambda_max is unset.
  std::size_t lambda_warmup = kDefaultLambdaWarmup;

  void validate() const;
};

enum class SuiteMode { kEqualConvergence, kEqualSteadyState };

struct SuiteEntry {
  std::string label;
  ExperimentSpec spec;
};

struct ProtocolSuite {
  std::string name;   // unique id, used in file names
  std::string group;  // suites sharing a group render as one table
  SuiteMode mode = SuiteMode::kEqualConvergence;
  std::vector<SuiteEntry> entries;

  // Labels unique; channel and n_iterations shared by all entries.
  void validate() const;
};

struct RunResult {
  std::vector<double> nwd_per_iteration;
  std::vector<double> final_weights;
  std::uint64_t seed_used = 0;  // input-stream seed
};

// Throws DivergenceError on the first non-finite weight or NWD value.
RunResult run_single(const ExperimentSpec& spec, std::size_t run_index);

struct HarnessOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  double window_fraction = kDefaultWindowFraction;
  double tol_db = kDefaultToleranceDb;
};

struct EnsembleResult {
  NwdCurve curve;
  std::vector<double> run_tail_means;  // per-run steady-state NWD, linear
  std::vector<std::uint64_t> run_seeds;
};

// Runs may execute on several workers; accumulation is always in run order.
// Throws EnsembleDivergenceError listing every divergent run.
EnsembleResult run_ensemble(const ExperimentSpec& spec, const HarnessOptions& options = {});
NwdCurve run_monte_carlo(const ExperimentSpec& spec, const HarnessOptions& options = {});

// Standard error of the ensemble steady-state level, in dB (delta method on
// the per-run tail means). NaN with fewer than two runs.
double steady_state_standard_error_db(const EnsembleResult& result);

struct SummaryRow {
  std::string label;
  Algorithm algorithm = Algorithm::kLms;
  double mu = 0.0;
  double snr_db = 0.0;
  std::size_t n_runs = 0;
  std::size_t n_iterations = 0;
  double steady_state_db = 0.0;
  double steady_state_se_db = 0.0;
  std::optional<std::size_t> convergence_point;
  std::vector<std::size_t> divergent_runs;

  bool diverged() const noexcept { return !divergent_runs.empty(); }
};

struct SuiteReport {
  ProtocolSuite suite;
  std::vector<SummaryRow> rows;
  std::vector<EnsembleResult> results;  // parallel to rows; empty curve if diverged

  bool any_diverged() const noexcept;
};

// A divergent entry yields a row flagged diverged; the remaining entries
// still run.
SuiteReport run_protocol_suite(const ProtocolSuite& suite, const HarnessOptions& options = {});

}  // namespace eqlms
