#pragma once

// Built-in learning-rate presets for the three evaluation protocols.
//
// Each protocol targets a rate regime (1e-1, 1e-2, 1e-3) and comes in two
// calibrations: equal convergence (compare steady-state NWD) and equal
// steady state (compare convergence points). Five configurations are
// benchmarked per cell: LMS, q-LMS with q = 2 (same mu as LMS), time-varying
// q-LMS, NLMS and Eq-LMS.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "eqlms/bench.hpp"

namespace eqlms {

inline constexpr std::array<double, 3> kPresetSnrsDb = {10.0, 20.0, 30.0};
inline constexpr double kPresetQ = 2.0;

struct PresetOptions {
  std::size_t n_runs = 200;
  std::uint64_t base_seed = 1;
  double beta = 0.9;
  double gamma = 0.1;
  double zeta = 1e-6;
  std::optional<double> lambda_max = 1.0;
  QInitPolicy q_init = QInitPolicy::kOnes;
  std::optional<std::size_t> n_iterations;  // override the protocol default
};

std::string mode_name(SuiteMode mode);  // "convergence" / "steady-state"
std::optional<SuiteMode> parse_mode(const std::string& name);

// Learning rate for `kind` (kQlms shares the LMS row). Throws Error(kConfig)
// for protocols outside 1..3 or SNRs other than 10/20/30 dB.
double preset_mu(int protocol, SuiteMode mode, Algorithm kind, double snr_db);
std::size_t preset_iterations(int protocol, SuiteMode mode, double snr_db);

ProtocolSuite preset_suite(int protocol, SuiteMode mode, double snr_db, const PresetOptions& options = {});

}  // namespace eqlms
