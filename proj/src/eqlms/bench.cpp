#include "eqlms/bench.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

#include "eqlms/errors.hpp"

namespace eqlms {

void ExperimentSpec::validate() const {
  channel.validate();
  algorithm.validate(channel.taps());
  if (n_iterations == 0) throw Error(ErrorCode::kParameter, "n_iterations must be at least 1");
  if (n_runs == 0) throw Error(ErrorCode::kParameter, "n_runs must be at least 1");
  if (!algorithm.lambda_max && lambda_warmup < 10 * channel.taps()) {
    throw Error(ErrorCode::kParameter, "lambda warm-up needs at least 10 samples per tap");
  }
}

void ProtocolSuite::validate() const {
  if (entries.empty()) throw Error(ErrorCode::kParameter, "suite '" + name + "' has no entries");
  std::set<std::string> labels;
  for (const auto& entry : entries) {
    if (entry.label.empty()) throw Error(ErrorCode::kParameter, "suite '" + name + "': empty label");
    if (!labels.insert(entry.label).second) {
      throw Error(ErrorCode::kParameter, "suite '" + name + "': duplicate label '" + entry.label + "'");
    }
    entry.spec.validate();
    const auto& first = entries.front().spec;
    if (entry.spec.channel.h != first.channel.h || entry.spec.channel.snr_db != first.channel.snr_db) {
      throw Error(ErrorCode::kParameter, "suite '" + name + "': entries must share one channel");
    }
    if (entry.spec.n_iterations != first.n_iterations) {
      throw Error(ErrorCode::kParameter, "suite '" + name + "': entries must share n_iterations");
    }
  }
}

RunResult run_single(const ExperimentSpec& spec, std::size_t run_index) {
  spec.validate();
  const std::size_t taps = spec.channel.taps();
  const std::size_t n = spec.n_iterations;

  AlgorithmSpec algorithm = spec.algorithm;
  const bool estimate = !algorithm.lambda_max.has_value();

  RunResult result;
  result.seed_used = derive_seed(spec.base_seed, run_index, StreamId::kInput);
  const std::size_t generated = estimate ? std::max(n, spec.lambda_warmup) : n;
  std::vector<double> x = generate_input({generated, result.seed_used, 1.0});
  if (estimate) {
    algorithm.lambda_max = estimate_lambda_max(std::span<const double>(x).first(spec.lambda_warmup), taps);
  }
  x.resize(n);
  const std::vector<double> d =
      add_noise_at_snr(channel_output(spec.channel, x), spec.channel.snr_db,
                       derive_seed(spec.base_seed, run_index, StreamId::kNoise));

  FilterState state = FilterState::zeros(taps);
  if (spec.q_init == QInitPolicy::kSeededUniform) {
    const RandomStream q_stream(derive_seed(spec.base_seed, run_index, StreamId::kQInit));
    for (std::size_t k = 0; k < taps; ++k) state.q_vector[k] = q_stream.uniform_open0(k);
  }

  const auto& h = spec.channel.h;
  result.nwd_per_iteration.resize(n);
  std::vector<double> regressor(taps, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    result.nwd_per_iteration[i] = nwd(h, state.weights);
    // Weights near the overflow threshold overflow the norm first.
    if (!std::isfinite(result.nwd_per_iteration[i])) throw DivergenceError(run_index, i);
    std::copy_backward(regressor.begin(), regressor.end() - 1, regressor.end());
    regressor[0] = x[i];
    advance(state, regressor, d[i], algorithm);
    for (double w : state.weights) {
      if (!std::isfinite(w)) throw DivergenceError(run_index, i);
    }
  }
  result.final_weights = std::move(state.weights);
  return result;
}

EnsembleResult run_ensemble(const ExperimentSpec& spec, const HarnessOptions& options) {
  spec.validate();
  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(spec.n_runs)));

  EnsembleAccumulator acc(spec.n_iterations);
  EnsembleResult out;
  out.run_tail_means.reserve(spec.n_runs);
  out.run_seeds.reserve(spec.n_runs);
  std::vector<std::size_t> divergent;

  struct Slot {
    std::optional<RunResult> result;
    bool diverged = false;
    std::exception_ptr error;
  };

  // Batches of `workers` runs, folded in run order once the batch joins.
  for (std::size_t begin = 0; begin < spec.n_runs; begin += workers) {
    const std::size_t end = std::min(spec.n_runs, begin + workers);
    std::vector<Slot> slots(end - begin);
    auto work = [&](std::size_t run) {
      Slot& slot = slots[run - begin];
      try {
        slot.result = run_single(spec, run);
      } catch (const DivergenceError&) {
        slot.diverged = true;
      } catch (...) {
        slot.error = std::current_exception();
      }
    };
    if (workers == 1) {
      work(begin);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(end - begin);
      for (std::size_t run = begin; run < end; ++run) threads.emplace_back(work, run);
    }
    for (std::size_t run = begin; run < end; ++run) {
      Slot& slot = slots[run - begin];
      if (slot.error) std::rethrow_exception(slot.error);
      if (slot.diverged) {
        divergent.push_back(run);
        continue;
      }
      acc.add(slot.result->nwd_per_iteration);
      out.run_tail_means.push_back(tail_mean(slot.result->nwd_per_iteration, options.window_fraction));
      out.run_seeds.push_back(slot.result->seed_used);
    }
  }
  if (!divergent.empty()) throw EnsembleDivergenceError(std::move(divergent));
  out.curve = acc.mean();
  return out;
}

NwdCurve run_monte_carlo(const ExperimentSpec& spec, const HarnessOptions& options) {
  return run_ensemble(spec, options).curve;
}

double steady_state_standard_error_db(const EnsembleResult& result) {
  const auto& t = result.run_tail_means;
  if (t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  CompensatedSum sum;
  for (double v : t) sum.add(v);
  const double mean = sum.value() / static_cast<double>(t.size());
  CompensatedSum sq;
  for (double v : t) sq.add((v - mean) * (v - mean));
  const double sd = std::sqrt(sq.value() / static_cast<double>(t.size() - 1));
  const double se = sd / std::sqrt(static_cast<double>(t.size()));
  return kDbScale / std::numbers::ln10 * se / mean;
}

bool SuiteReport::any_diverged() const noexcept {
  return std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.diverged(); });
}

SuiteReport run_protocol_suite(const ProtocolSuite& suite, const HarnessOptions& options) {
  suite.validate();
  SuiteReport report;
  report.suite = suite;
  for (const auto& entry : suite.entries) {
    SummaryRow row;
    row.label = entry.label;
    row.algorithm = entry.spec.algorithm.kind;
    row.mu = entry.spec.algorithm.mu;
    row.snr_db = entry.spec.channel.snr_db;
    row.n_runs = entry.spec.n_runs;
    row.n_iterations = entry.spec.n_iterations;
    EnsembleResult result;
    try {
      result = run_ensemble(entry.spec, options);
      row.steady_state_db = steady_state_db(result.curve, options.window_fraction);
      row.steady_state_se_db = steady_state_standard_error_db(result);
      row.convergence_point =
          result.curve.n_iterations() >= 10 ? convergence_point(result.curve, options.tol_db) : std::nullopt;
    } catch (const EnsembleDivergenceError& e) {
      row.divergent_runs = e.runs();
      row.steady_state_db = std::numeric_limits<double>::quiet_NaN();
      row.steady_state_se_db = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(std::move(row));
    report.results.push_back(std::move(result));
  }
  return report;
}

}  // namespace eqlms
