#pragma once

// LMS-family adaptive filter kernels.
//
// Every algorithm shares one per-sample contract: given the state at instant
// i, a regressor x(i) = [x(i), x(i-1), ..., x(i-M+1)] and the desired sample
// d(i), produce y(i) = w(i)^T x(i), e(i) = d(i) - y(i) and the state at i+1.
//
//   LMS     w += mu e x
//   NLMS    w += mu e x / (zeta + |x|^2)
//   QLMS    w += mu e G x,                     G = diag((q_k + 1) / 2)
//   QNLMS   w += mu e G x / (zeta + x^T G x)
//   TVQLMS  psi' = beta psi + gamma e^2, q' = clip(psi', 1, 2 / (mu lambda_max)),
//           then QLMS with the scalar q' on every tap
//   EQLMS   w += mu e (x .* q), then q_1' = min((|e| + sum q) / (M + 1), 1 / lambda_max)
//           is pushed onto the front of q and the last entry falls off
//
// Note the two gain conventions: fixed-q variants use (q + 1) / 2 while the
// Eq-LMS q-vector multiplies the regressor directly.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace eqlms {

enum class Algorithm { kLms, kNlms, kQlms, kQnlms, kTvqlms, kEqlms };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::kLms,   Algorithm::kNlms,   Algorithm::kQlms,
                                               Algorithm::kQnlms, Algorithm::kTvqlms, Algorithm::kEqlms};

// Lower-case CLI token: "lms", "nlms", "qlms", "qnlms", "tvqlms", "eqlms".
std::string_view algorithm_name(Algorithm kind);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct AlgorithmSpec {
  Algorithm kind = Algorithm::kLms;
  double mu = 0.01;
  // QLMS / QNLMS only. One entry per tap, or a single entry applied to all.
  std::vector<double> q_fixed{1.0};
  double beta = 0.9;
  double gamma = 0.1;
  double zeta = 1e-6;
  // nullopt means "estimate from the input before filtering".
  std::optional<double> lambda_max = 1.0;

  // Throws Error(kParameter) if the hyperparameters are invalid for `kind`.
  // `lambda_max` may still be unresolved here; the step functions need it.
  void validate(std::size_t taps) const;

  double q_gain(std::size_t tap) const noexcept {
    const double q = q_fixed.size() == 1 ? q_fixed[0] : q_fixed[tap];
    return (q + 1.0) / 2.0;
  }
};

struct FilterState {
  std::vector<double> weights;
  std::vector<double> q_vector;  // all ones for algorithms without a q-vector
  double psi = 1.0;
  std::uint64_t iteration = 0;

  static FilterState zeros(std::size_t taps);
  std::size_t taps() const noexcept { return weights.size(); }
};

struct StepOutput {
  double y = 0.0;
  double e = 0.0;
  FilterState new_state;
};

struct Innovation {
  double y = 0.0;
  double e = 0.0;
};

double predict(const FilterState& state, std::span<const double> x);

// In-place step for any kind; the loop the harness runs.
// Errors: kDimension on length mismatch, kNumeric on non-finite x/d or a
// zero normalizer with zeta == 0, kParameter for unresolved/invalid
// lambda_max where it is needed.
Innovation advance(FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);

// Pure per-algorithm steps. Each requires spec.kind to match.
StepOutput lms_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);
StepOutput nlms_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);
StepOutput qlms_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);
StepOutput qnlms_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);
StepOutput tvq_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);
StepOutput eqlms_step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);

// Dispatch on spec.kind.
StepOutput step(const FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec);

inline constexpr std::size_t kPowerIterationCap = 1000;
inline constexpr double kPowerIterationTol = 1e-8;

// Sample autocorrelation r(tau) = (1/N) sum_t x(t) x(t - tau), tau < taps.
std::vector<double> autocorrelation(std::span<const double> samples, std::size_t taps);

// Dominant eigenvalue of the taps x taps Toeplitz autocorrelation matrix by
// power iteration. Requires samples.size() >= 10 * taps; an all-zero input
// throws Error(kDegenerate).
double estimate_lambda_max(std::span<const double> samples, std::size_t taps);

}  // namespace eqlms
