#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "eqlms/bench.hpp"
#include "eqlms/errors.hpp"
#include "eqlms/presets.hpp"
#include "oracles.hpp"

using namespace eqlms;

namespace {

ExperimentSpec small_spec(Algorithm kind, double mu, double snr, std::size_t iters, std::size_t runs) {
  ExperimentSpec spec;
  spec.algorithm.kind = kind;
  spec.algorithm.mu = mu;
  spec.channel = ChannelModel::reference(snr);
  spec.n_iterations = iters;
  spec.n_runs = runs;
  return spec;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eqlms::Error");
  return ErrorCode::kDomain;
}

}  // namespace

TEST_CASE("run_single is deterministic") {
  for (Algorithm kind : kAllAlgorithms) {
    const auto spec = small_spec(kind, 0.02, 20.0, 500, 1);
    const auto a = run_single(spec, 3);
    const auto b = run_single(spec, 3);
    CHECK(a.nwd_per_iteration == b.nwd_per_iteration);
    CHECK(a.final_weights == b.final_weights);
    CHECK(a.seed_used == derive_seed(1, 3, StreamId::kInput));
    CHECK(a.nwd_per_iteration.size() == 500);
    CHECK(run_single(spec, 4).nwd_per_iteration != a.nwd_per_iteration);
  }
}

TEST_CASE("run_single replays the documented signal chain") {
  const auto spec = small_spec(Algorithm::kLms, 0.03, 10.0, 300, 1);
  const auto x = generate_input({300, derive_seed(1, 2, StreamId::kInput), 1.0});
  const auto d = add_noise_at_snr(channel_output(spec.channel, x), 10.0, derive_seed(1, 2, StreamId::kNoise));
  std::vector<double> w(5, 0.0);
  std::vector<double> curve;
  for (std::size_t i = 0; i < 300; ++i) {
    std::vector<double> diff(5);
    for (std::size_t k = 0; k < 5; ++k) diff[k] = spec.channel.h[k] - w[k];
    curve.push_back(oracle::norm(diff) / std::sqrt(10.0));
    const auto r = regressor_at(x, i, 5);
    double y = 0.0;
    for (std::size_t k = 0; k < 5; ++k) y += w[k] * r[k];
    for (std::size_t k = 0; k < 5; ++k) w[k] += 0.03 * (d[i] - y) * r[k];
  }
  const auto got = run_single(spec, 2);
  for (std::size_t i = 0; i < 300; ++i) REQUIRE(got.nwd_per_iteration[i] == doctest::Approx(curve[i]).epsilon(1e-12));
  for (std::size_t k = 0; k < 5; ++k) CHECK(got.final_weights[k] == doctest::Approx(w[k]).epsilon(1e-12));
}

TEST_CASE("curves start at exactly 1 for zero initial weights") {
  for (Algorithm kind : kAllAlgorithms) {
    for (double snr : {10.0, 20.0, 30.0}) {
      const auto curve = run_monte_carlo(small_spec(kind, 0.01, snr, 50, 4), {1});
      CHECK(curve.values[0] == 1.0);
    }
  }
}

TEST_CASE("a vanishing learning rate leaves the curve at 1") {
  // mu = 0 is outside the parameter domain.
  CHECK(code_of([] { run_single(small_spec(Algorithm::kLms, 0.0, 20.0, 10, 1), 0); }) == ErrorCode::kParameter);
  const auto r = run_single(small_spec(Algorithm::kLms, 1e-300, 20.0, 200, 1), 0);
  for (double v : r.nwd_per_iteration) CHECK(v == 1.0);
}

TEST_CASE("stable LMS at 10 dB gains more than 10 dB") {
  const auto r = run_single(small_spec(Algorithm::kLms, 0.044, 10.0, 10000, 1), 0);
  CHECK(to_db(r.nwd_per_iteration.back()) < to_db(r.nwd_per_iteration.front()) - 10.0);
}

TEST_CASE("one run equals the single-run curve") {
  const auto spec = small_spec(Algorithm::kEqlms, 0.1, 20.0, 400, 1);
  CHECK(run_monte_carlo(spec).values == run_single(spec, 0).nwd_per_iteration);
}

TEST_CASE("doubling the run count reuses the first runs") {
  const auto spec = small_spec(Algorithm::kNlms, 0.2, 20.0, 300, 6);
  auto doubled = spec;
  doubled.n_runs = 12;
  const auto a = run_ensemble(spec, {2});
  const auto b = run_ensemble(doubled, {2});
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.run_seeds[i] == b.run_seeds[i]);
    CHECK(a.run_tail_means[i] == b.run_tail_means[i]);
  }
  std::vector<std::vector<double>> runs;
  for (std::size_t r = 0; r < 12; ++r) runs.push_back(run_single(doubled, r).nwd_per_iteration);
  CHECK(b.curve.values == ensemble_mean(runs).values);
}

TEST_CASE("worker count does not change results") {
  const auto spec = small_spec(Algorithm::kTvqlms, 0.05, 20.0, 500, 7);
  const auto serial = run_ensemble(spec, {1});
  for (unsigned workers : {2U, 3U, 8U}) {
    const auto parallel = run_ensemble(spec, {workers});
    CHECK(parallel.curve.values == serial.curve.values);
    CHECK(parallel.run_tail_means == serial.run_tail_means);
  }
}

TEST_CASE("divergent runs are reported, never averaged") {
  const auto spec = small_spec(Algorithm::kTvqlms, 0.35, 10.0, 2000, 3);
  try {
    run_single(spec, 0);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.code() == ErrorCode::kDivergence);
    CHECK(e.run_index() == 0);
    CHECK(e.iteration() < 2000);
  }
  try {
    run_monte_carlo(spec, {1});
    FAIL("expected divergence");
  } catch (const EnsembleDivergenceError& e) {
    CHECK(e.runs() == std::vector<std::size_t>{0, 1, 2});
  }
}

TEST_CASE("estimated lambda_max and seeded q initialization") {
  auto spec = small_spec(Algorithm::kEqlms, 0.1, 20.0, 2000, 2);
  spec.algorithm.lambda_max = std::nullopt;
  const auto estimated = run_monte_carlo(spec, {1});
  CHECK(to_db(estimated.values.back()) < -15.0);
  spec.q_init = QInitPolicy::kSeededUniform;
  const auto seeded = run_monte_carlo(spec, {1});
  CHECK(seeded.values != estimated.values);
  CHECK(to_db(seeded.values.back()) < -15.0);
}

TEST_CASE("experiment validation") {
  auto spec = small_spec(Algorithm::kLms, 0.1, 20.0, 10, 1);
  spec.n_runs = 0;
  CHECK(code_of([&] { spec.validate(); }) == ErrorCode::kParameter);
  spec.n_runs = 1;
  spec.n_iterations = 0;
  CHECK(code_of([&] { spec.validate(); }) == ErrorCode::kParameter);
}

TEST_CASE("suite validation") {
  ProtocolSuite suite;
  suite.name = "s";
  CHECK(code_of([&] { suite.validate(); }) == ErrorCode::kParameter);
  suite.entries = {{"a", small_spec(Algorithm::kLms, 0.1, 20.0, 10, 1)},
                   {"a", small_spec(Algorithm::kNlms, 0.1, 20.0, 10, 1)}};
  CHECK(code_of([&] { suite.validate(); }) == ErrorCode::kParameter);
  suite.entries[1].label = "b";
  CHECK_NOTHROW(suite.validate());
  suite.entries[1].spec.channel.snr_db = 10.0;
  CHECK(code_of([&] { suite.validate(); }) == ErrorCode::kParameter);
  suite.entries[1].spec.channel.snr_db = 20.0;
  suite.entries[1].spec.n_iterations = 11;
  CHECK(code_of([&] { suite.validate(); }) == ErrorCode::kParameter);
}

TEST_CASE("a one-entry suite matches the ensemble and metrics") {
  const auto spec = small_spec(Algorithm::kQlms, 0.02, 20.0, 1000, 5);
  ProtocolSuite suite{"one", "g", SuiteMode::kEqualConvergence, {{"only", spec}}};
  const auto report = run_protocol_suite(suite, {1});
  REQUIRE(report.rows.size() == 1);
  const auto curve = run_monte_carlo(spec, {1});
  const auto& row = report.rows[0];
  CHECK(row.label == "only");
  CHECK(row.algorithm == Algorithm::kQlms);
  CHECK(row.mu == 0.02);
  CHECK(row.snr_db == 20.0);
  CHECK(row.n_runs == 5);
  CHECK(row.n_iterations == 1000);
  CHECK(row.steady_state_db == steady_state_db(curve));
  CHECK(row.convergence_point == convergence_point(curve));
  CHECK(report.results[0].curve.values == curve.values);
  CHECK_FALSE(report.any_diverged());
}

TEST_CASE("a divergent entry leaves the other rows intact") {
  ProtocolSuite suite{"mixed", "g", SuiteMode::kEqualConvergence,
                      {{"ok", small_spec(Algorithm::kLms, 0.05, 10.0, 1000, 3)},
                       {"bad", small_spec(Algorithm::kTvqlms, 0.35, 10.0, 1000, 3)}}};
  const auto report = run_protocol_suite(suite, {1});
  CHECK(report.any_diverged());
  CHECK_FALSE(report.rows[0].diverged());
  CHECK(std::isfinite(report.rows[0].steady_state_db));
  CHECK(report.rows[1].diverged());
  CHECK(report.rows[1].divergent_runs.size() == 3);
  CHECK(std::isnan(report.rows[1].steady_state_db));
  CHECK_FALSE(report.rows[1].convergence_point.has_value());
}

TEST_CASE("steady-state standard error follows the delta method") {
  EnsembleResult r;
  r.run_tail_means = {0.1, 0.12, 0.09, 0.11, 0.105};
  double mean = 0.0;
  for (double v : r.run_tail_means) mean += v;
  mean /= 5.0;
  double ss = 0.0;
  for (double v : r.run_tail_means) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / 4.0) / std::sqrt(5.0);
  CHECK(steady_state_standard_error_db(r) == doctest::Approx(20.0 / std::numbers::ln10 * se / mean).epsilon(1e-12));
  r.run_tail_means = {0.1};
  CHECK(std::isnan(steady_state_standard_error_db(r)));
}

TEST_CASE("preset learning rates match the published tables") {
  using enum SuiteMode;
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kLms, 10.0) == 4.4e-2);
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kQlms, 20.0) == 2.45e-2);
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kTvqlms, 10.0) == 3.5e-1);
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kNlms, 20.0) == 1.2e-1);
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kEqlms, 30.0) == 1e-1);
  CHECK(preset_mu(1, kEqualConvergence, Algorithm::kLms, 30.0) == 2.7e-5);
  CHECK(preset_mu(1, kEqualSteadyState, Algorithm::kLms, 10.0) == 3e-2);
  CHECK(preset_mu(1, kEqualSteadyState, Algorithm::kTvqlms, 20.0) == 8.8e-3);
  CHECK(preset_mu(1, kEqualSteadyState, Algorithm::kNlms, 30.0) == 8.5e-3);
  CHECK(preset_mu(2, kEqualConvergence, Algorithm::kEqlms, 10.0) == 1e-2);
  CHECK(preset_mu(3, kEqualConvergence, Algorithm::kLms, 30.0) == 4.5e-3);
  CHECK(preset_mu(3, kEqualSteadyState, Algorithm::kLms, 20.0) == 8.9e-4);
  CHECK(preset_mu(3, kEqualSteadyState, Algorithm::kEqlms, 20.0) == 1e-3);
  CHECK(preset_iterations(1, kEqualConvergence, 30.0) == 10000);
  CHECK(preset_iterations(1, kEqualSteadyState, 10.0) == 1000);
  CHECK(preset_iterations(1, kEqualSteadyState, 20.0) == 5000);
  CHECK(preset_iterations(1, kEqualSteadyState, 30.0) == 10000);
  CHECK(preset_iterations(3, kEqualConvergence, 10.0) == 1000000);
  CHECK(code_of([] { preset_mu(4, SuiteMode::kEqualConvergence, Algorithm::kLms, 10.0); }) == ErrorCode::kConfig);
  CHECK(code_of([] { preset_mu(1, SuiteMode::kEqualConvergence, Algorithm::kLms, 15.0); }) == ErrorCode::kConfig);
  CHECK(code_of([] { preset_mu(1, SuiteMode::kEqualConvergence, Algorithm::kQnlms, 10.0); }) == ErrorCode::kConfig);
}

TEST_CASE("preset suites list the five compared filters") {
  const auto suite = preset_suite(1, SuiteMode::kEqualSteadyState, 20.0);
  CHECK(suite.name == "p1-steady-state-20dB");
  REQUIRE(suite.entries.size() == 5);
  const std::vector<std::string> labels{"LMS", "qLMS(q=2)", "TV-qLMS", "NLMS", "Eq-LMS"};
  for (std::size_t i = 0; i < 5; ++i) CHECK(suite.entries[i].label == labels[i]);
  CHECK(suite.entries[1].spec.algorithm.kind == Algorithm::kQlms);
  CHECK(suite.entries[1].spec.algorithm.q_fixed == std::vector<double>{2.0});
  CHECK(suite.entries[1].spec.algorithm.mu == suite.entries[0].spec.algorithm.mu);
  for (const auto& e : suite.entries) {
    CHECK(e.spec.n_iterations == 5000);
    CHECK(e.spec.n_runs == 200);
    CHECK(e.spec.channel.snr_db == 20.0);
    CHECK(e.spec.algorithm.lambda_max == 1.0);
  }
  CHECK(parse_mode("convergence") == SuiteMode::kEqualConvergence);
  CHECK(parse_mode("steady-state") == SuiteMode::kEqualSteadyState);
  CHECK_FALSE(parse_mode("fast").has_value());
}

TEST_CASE("stable equal-convergence configurations settle at least 7 dB below the start") {
  PresetOptions options;
  options.n_runs = 50;
  for (double snr : kPresetSnrsDb) {
    const auto report = run_protocol_suite(preset_suite(1, SuiteMode::kEqualConvergence, snr, options), {1});
    for (const auto& row : report.rows) {
      if (row.diverged()) continue;
      CAPTURE(row.label);
      CAPTURE(snr);
      CHECK(row.steady_state_db <= -7.0);
    }
  }
}
