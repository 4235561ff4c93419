#include "eqlms/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "eqlms/errors.hpp"

namespace eqlms {

double nwd(std::span<const double> h, std::span<const double> w) {
  if (h.size() != w.size()) {
    throw Error(ErrorCode::kDimension,
                "nwd: h has " + std::to_string(h.size()) + " taps, w has " + std::to_string(w.size()));
  }
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double d = h[k] - w[k];
    diff += d * d;
    ref += h[k] * h[k];
  }
  if (ref == 0.0) throw Error(ErrorCode::kDegenerate, "nwd: reference response has zero norm");
  return std::sqrt(diff) / std::sqrt(ref);
}

double to_db(double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::kDomain, "to_db: value must be positive, got " + std::to_string(v));
  return kDbScale * std::log10(v);
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    carry_ += (sum_ - t) + v;
  } else {
    carry_ += (v - t) + sum_;
  }
  sum_ = t;
}

EnsembleAccumulator::EnsembleAccumulator(std::size_t length) : sums_(length) {}

void EnsembleAccumulator::add(std::span<const double> run_curve) {
  if (run_curve.size() != sums_.size()) {
    throw Error(ErrorCode::kDimension, "ensemble: run curve has length " + std::to_string(run_curve.size()) +
                                           ", expected " + std::to_string(sums_.size()));
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i].add(run_curve[i]);
  ++runs_;
}

NwdCurve EnsembleAccumulator::mean() const {
  if (runs_ == 0) throw Error(ErrorCode::kDimension, "ensemble: no runs accumulated");
  NwdCurve curve;
  curve.n_runs = runs_;
  curve.values.resize(sums_.size());
  const double n = static_cast<double>(runs_);
  for (std::size_t i = 0; i < sums_.size(); ++i) curve.values[i] = sums_[i].value() / n;
  return curve;
}

NwdCurve ensemble_mean(const std::vector<std::vector<double>>& run_curves) {
  if (run_curves.empty()) throw Error(ErrorCode::kDimension, "ensemble_mean: no runs");
  EnsembleAccumulator acc(run_curves.front().size());
  for (const auto& run : run_curves) acc.add(run);
  return acc.mean();
}

std::size_t tail_length(std::size_t n, double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw Error(ErrorCode::kDomain, "window fraction must lie in (0, 1]");
  }
  const auto len = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n)));
  return len == 0 ? 1 : (len > n ? n : len);
}

double tail_mean(std::span<const double> values, double window_fraction) {
  if (values.empty()) throw Error(ErrorCode::kDimension, "steady state of an empty curve");
  const std::size_t len = tail_length(values.size(), window_fraction);
  CompensatedSum sum;
  for (std::size_t i = values.size() - len; i < values.size(); ++i) sum.add(values[i]);
  return sum.value() / static_cast<double>(len);
}

double steady_state_db(const NwdCurve& curve, double window_fraction) {
  return to_db(tail_mean(curve.values, window_fraction));
}

std::optional<std::size_t> convergence_point(const NwdCurve& curve, double tol_db) {
  if (curve.values.size() < 10) throw Error(ErrorCode::kDimension, "convergence_point: curve shorter than 10");
  if (!(tol_db > 0.0)) throw Error(ErrorCode::kDomain, "convergence_point: tolerance must be positive");
  const double ceiling = steady_state_db(curve) + tol_db;
  // Walk backwards to the last sample outside the band.
  std::size_t i = curve.values.size();
  while (i > 0) {
    const double v = curve.values[i - 1];
    const double db = v > 0.0 ? to_db(v) : -std::numeric_limits<double>::infinity();
    if (!(db <= ceiling)) break;
    --i;
  }
  if (i == curve.values.size()) return std::nullopt;
  return i;
}

}  // namespace eqlms
