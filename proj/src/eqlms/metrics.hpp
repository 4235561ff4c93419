#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace eqlms {

// NWD is a norm ratio, so decibels use the amplitude convention 20 log10.
inline constexpr double kDbScale = 20.0;
inline constexpr double kDefaultWindowFraction = 0.1;
inline constexpr double kDefaultToleranceDb = 1.0;

// |h - w| / |h|.
double nwd(std::span<const double> h, std::span<const double> w);

double to_db(double v);

struct NwdCurve {
  std::vector<double> values;  // ensemble mean, linear scale
  std::size_t n_runs = 0;

  std::size_t n_iterations() const noexcept { return values.size(); }
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Element-wise mean of equally long run curves, fed one run at a time so the
// full ensemble never has to be held in memory.
class EnsembleAccumulator {
 public:
  explicit EnsembleAccumulator(std::size_t length);
  void add(std::span<const double> run_curve);
  std::size_t runs() const noexcept { return runs_; }
  NwdCurve mean() const;

 private:
  std::vector<CompensatedSum> sums_;
  std::size_t runs_ = 0;
};

NwdCurve ensemble_mean(const std::vector<std::vector<double>>& run_curves);

// Number of trailing samples the steady-state window covers.
std::size_t tail_length(std::size_t n, double window_fraction);

// Mean of the last ceil(window_fraction * n) values, linear scale.
double tail_mean(std::span<const double> values, double window_fraction = kDefaultWindowFraction);

double steady_state_db(const NwdCurve& curve, double window_fraction = kDefaultWindowFraction);

// Smallest i such that every value from i on is within tol_db of the
// steady-state level; nullopt if the curve never settles.
std::optional<std::size_t> convergence_point(const NwdCurve& curve, double tol_db = kDefaultToleranceDb);

}  // namespace eqlms
