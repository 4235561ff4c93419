#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqlms/bench.hpp"
#include "eqlms/config.hpp"

namespace eqlms {

inline constexpr const char* kLibraryVersion = "1.0.0";

// Aligned text tables: one block per suite group, one column per SNR.
std::string render_table(const std::vector<SuiteReport>& reports);

// "%.17g"; round-trips every double.
std::string format_double(double v);

// Lower-case alphanumerics, everything else collapsed to '-'.
std::string slugify(const std::string& label);

// Writes into `dir` (created if missing):
//   summary.csv                  label,mu,snr_db,steady_state_db,convergence_point
//   curves/<suite>__<label>.csv  iteration,nwd_mean,nwd_db
//   runs/<suite>__<label>.csv    run_index,input_seed,tail_mean_nwd
//   manifest.json                effective config, conventions, every suite spec
// Throws Error(kIo) with the offending path.
void export_results(const std::vector<SuiteReport>& reports, const std::filesystem::path& dir,
                    const nlohmann::json& effective_config);

}  // namespace eqlms
