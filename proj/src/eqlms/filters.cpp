#include "eqlms/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqlms/errors.hpp"

namespace eqlms {

namespace {

constexpr std::string_view kNames[] = {"lms", "nlms", "qlms", "qnlms", "tvqlms", "eqlms"};

void check_regressor(const FilterState& state, std::span<const double> x, double d) {
  if (x.size() != state.weights.size() || state.q_vector.size() != state.weights.size()) {
    throw Error(ErrorCode::kDimension, "regressor has " + std::to_string(x.size()) + " taps, filter has " +
                                           std::to_string(state.weights.size()));
  }
  if (!std::isfinite(d)) throw Error(ErrorCode::kNumeric, "desired sample is not finite");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNumeric, "regressor contains a non-finite sample");
  }
}

double resolved_lambda(const AlgorithmSpec& spec) {
  if (!spec.lambda_max) {
    throw Error(ErrorCode::kParameter, std::string(algorithm_name(spec.kind)) + ": lambda_max is not resolved");
  }
  if (!(*spec.lambda_max > 0.0)) throw Error(ErrorCode::kParameter, "lambda_max must be positive");
  return *spec.lambda_max;
}

Innovation innovate(const FilterState& state, std::span<const double> x, double d) {
  Innovation out;
  out.y = predict(state, x);
  out.e = d - out.y;
  return out;
}

void lms_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  const double step = spec.mu * in.e;
  for (std::size_t k = 0; k < x.size(); ++k) s.weights[k] += step * x[k];
}

void nlms_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  double energy = 0.0;
  for (double v : x) energy += v * v;
  const double denom = spec.zeta + energy;
  if (denom == 0.0) throw Error(ErrorCode::kNumeric, "nlms: zero regressor with zeta = 0");
  const double step = spec.mu * in.e / denom;
  for (std::size_t k = 0; k < x.size(); ++k) s.weights[k] += step * x[k];
}

void qlms_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  const double step = spec.mu * in.e;
  for (std::size_t k = 0; k < x.size(); ++k) s.weights[k] += step * spec.q_gain(k) * x[k];
}

void qnlms_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  double energy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) energy += spec.q_gain(k) * x[k] * x[k];
  const double denom = spec.zeta + energy;
  if (denom == 0.0) throw Error(ErrorCode::kNumeric, "qnlms: zero weighted regressor norm with zeta = 0");
  const double step = spec.mu * in.e / denom;
  for (std::size_t k = 0; k < x.size(); ++k) s.weights[k] += step * spec.q_gain(k) * x[k];
}

void tvq_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  const double lambda = resolved_lambda(spec);
  const double q_upper = 2.0 / (spec.mu * lambda);
  const double psi = spec.beta * s.psi + spec.gamma * in.e * in.e;
  double q = psi;
  if (psi > q_upper) {
    q = q_upper;
  } else if (psi < 1.0) {
    q = 1.0;
  }
  const double step = spec.mu * in.e * ((q + 1.0) / 2.0);
  for (std::size_t k = 0; k < x.size(); ++k) s.weights[k] += step * x[k];
  s.psi = psi;
  std::fill(s.q_vector.begin(), s.q_vector.end(), q);
}

void eqlms_update(FilterState& s, std::span<const double> x, const Innovation& in, const AlgorithmSpec& spec) {
  const double lambda = resolved_lambda(spec);
  const std::size_t m = x.size();
  double q_sum = 0.0;
  for (double q : s.q_vector) {
    if (!(q > 0.0)) throw Error(ErrorCode::kParameter, "eqlms: q-vector entries must be positive");
    q_sum += q;
  }
  // Weight update uses q(i); q(i+1) is formed afterwards.
  const double step = spec.mu * in.e;
  for (std::size_t k = 0; k < m; ++k) s.weights[k] += step * x[k] * s.q_vector[k];

  const double candidate = (std::abs(in.e) + q_sum) / static_cast<double>(m + 1);
  const double head = std::min(candidate, 1.0 / lambda);
  std::copy_backward(s.q_vector.begin(), s.q_vector.end() - 1, s.q_vector.end());
  s.q_vector[0] = head;
}

StepOutput pure_step(Algorithm expected, const FilterState& state, std::span<const double> x, double d,
                     const AlgorithmSpec& spec) {
  if (spec.kind != expected) {
    throw Error(ErrorCode::kParameter, std::string(algorithm_name(expected)) + " step called with a " +
                                           std::string(algorithm_name(spec.kind)) + " spec");
  }
  StepOutput out;
  out.new_state = state;
  const Innovation in = advance(out.new_state, x, d, spec);
  out.y = in.y;
  out.e = in.e;
  return out;
}

}  // namespace

std::string_view algorithm_name(Algorithm kind) { return kNames[static_cast<int>(kind)]; }

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

void AlgorithmSpec::validate(std::size_t taps) const {
  auto fail = [this](const std::string& msg) {
    throw Error(ErrorCode::kParameter, std::string(algorithm_name(kind)) + ": " + msg);
  };
  if (taps == 0) fail("filter needs at least one tap");
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be positive");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) fail("zeta must be nonnegative");
  if (lambda_max && !(*lambda_max > 0.0)) fail("lambda_max must be positive");
  if (kind == Algorithm::kQlms || kind == Algorithm::kQnlms) {
    if (q_fixed.size() != 1 && q_fixed.size() != taps) {
      fail("q needs 1 or " + std::to_string(taps) + " entries, got " + std::to_string(q_fixed.size()));
    }
    for (double q : q_fixed) {
      if (!(q > 0.0) || !std::isfinite(q)) fail("q entries must be positive");
    }
  }
  if (kind == Algorithm::kTvqlms) {
    if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0, 1)");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be positive");
  }
}

FilterState FilterState::zeros(std::size_t taps) {
  if (taps == 0) throw Error(ErrorCode::kDimension, "filter needs at least one tap");
  FilterState s;
  s.weights.assign(taps, 0.0);
  s.q_vector.assign(taps, 1.0);
  return s;
}

double predict(const FilterState& state, std::span<const double> x) {
  if (x.size() != state.weights.size()) {
    throw Error(ErrorCode::kDimension, "regressor has " + std::to_string(x.size()) + " taps, filter has " +
                                           std::to_string(state.weights.size()));
  }
  double y = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) y += state.weights[k] * x[k];
  return y;
}

Innovation advance(FilterState& state, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  check_regressor(state, x, d);
  const Innovation in = innovate(state, x, d);
  switch (spec.kind) {
    case Algorithm::kLms: lms_update(state, x, in, spec); break;
    case Algorithm::kNlms: nlms_update(state, x, in, spec); break;
    case Algorithm::kQlms: qlms_update(state, x, in, spec); break;
    case Algorithm::kQnlms: qnlms_update(state, x, in, spec); break;
    case Algorithm::kTvqlms: tvq_update(state, x, in, spec); break;
    case Algorithm::kEqlms: eqlms_update(state, x, in, spec); break;
  }
  ++state.iteration;
  return in;
}

StepOutput lms_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kLms, s, x, d, spec);
}
StepOutput nlms_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kNlms, s, x, d, spec);
}
StepOutput qlms_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kQlms, s, x, d, spec);
}
StepOutput qnlms_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kQnlms, s, x, d, spec);
}
StepOutput tvq_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kTvqlms, s, x, d, spec);
}
StepOutput eqlms_step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(Algorithm::kEqlms, s, x, d, spec);
}

StepOutput step(const FilterState& s, std::span<const double> x, double d, const AlgorithmSpec& spec) {
  return pure_step(spec.kind, s, x, d, spec);
}

std::vector<double> autocorrelation(std::span<const double> samples, std::size_t taps) {
  const std::size_t n = samples.size();
  std::vector<double> r(taps, 0.0);
  for (std::size_t lag = 0; lag < taps && lag < n; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < n; ++t) acc += samples[t] * samples[t - lag];
    r[lag] = acc / static_cast<double>(n);
  }
  return r;
}

double estimate_lambda_max(std::span<const double> samples, std::size_t taps) {
  if (taps == 0) throw Error(ErrorCode::kDimension, "estimate_lambda_max: taps must be positive");
  if (samples.size() < 10 * taps) {
    throw Error(ErrorCode::kDimension, "estimate_lambda_max: need at least " + std::to_string(10 * taps) +
                                           " samples, got " + std::to_string(samples.size()));
  }
  const std::vector<double> r = autocorrelation(samples, taps);
  if (r[0] == 0.0) throw Error(ErrorCode::kDegenerate, "estimate_lambda_max: input is identically zero");

  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(taps, 0.0);
    for (std::size_t i = 0; i < taps; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < taps; ++j) acc += r[i > j ? i - j : j - i] * v[j];
      out[i] = acc;
    }
    return out;
  };
  auto normalize = [](std::vector<double>& v) {
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (double& c : v) c /= norm;
    return true;
  };

  // Asymmetric start so that neither constant nor alternating inputs land in
  // the null space.
  std::vector<double> v(taps);
  for (std::size_t k = 0; k < taps; ++k) v[k] = 1.0 + static_cast<double>(k) / static_cast<double>(taps);
  normalize(v);

  double lambda = 0.0;
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    std::vector<double> w = apply(v);
    double rayleigh = 0.0;
    for (std::size_t k = 0; k < taps; ++k) rayleigh += v[k] * w[k];
    if (!normalize(w)) {
      // v fell in the null space of R; restart from a basis vector.
      std::fill(v.begin(), v.end(), 0.0);
      v[it % taps] = 1.0;
      continue;
    }
    const bool done = it > 0 && std::abs(rayleigh - lambda) <= kPowerIterationTol * std::abs(rayleigh);
    lambda = rayleigh;
    v = std::move(w);
    if (done) break;
  }
  if (!(lambda > 0.0)) throw Error(ErrorCode::kDegenerate, "estimate_lambda_max: autocorrelation is degenerate");
  return lambda;
}

}  // namespace eqlms
