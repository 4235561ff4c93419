#include "eqlms/eqlms.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqlms/bench.hpp"
#include "eqlms/config.hpp"
#include "eqlms/errors.hpp"
#include "eqlms/filters.hpp"
#include "eqlms/report.hpp"
#include "eqlms/signal.hpp"

struct eqlms_filter {
  eqlms::AlgorithmSpec spec;
  eqlms::FilterState state;
};

struct eqlms_report {
  eqlms::RunConfig config;
  std::string effective_config;
  std::vector<eqlms::ProtocolSuite> suites;
  std::vector<eqlms::SuiteReport> results;
  std::vector<std::pair<std::size_t, std::size_t>> row_index;  // (suite, row)
  std::string table;
};

namespace {

thread_local std::string g_last_error;

eqlms_status to_status(eqlms::ErrorCode code) {
  switch (code) {
    case eqlms::ErrorCode::kDimension: return EQLMS_ERR_DIMENSION;
    case eqlms::ErrorCode::kDomain: return EQLMS_ERR_DOMAIN;
    case eqlms::ErrorCode::kNumeric: return EQLMS_ERR_NUMERIC;
    case eqlms::ErrorCode::kParameter: return EQLMS_ERR_PARAMETER;
    case eqlms::ErrorCode::kDegenerate: return EQLMS_ERR_DEGENERATE;
    case eqlms::ErrorCode::kIndex: return EQLMS_ERR_INDEX;
    case eqlms::ErrorCode::kDivergence: return EQLMS_ERR_DIVERGENCE;
    case eqlms::ErrorCode::kIo: return EQLMS_ERR_IO;
    case eqlms::ErrorCode::kConfig: return EQLMS_ERR_CONFIG;
  }
  return EQLMS_ERR_INTERNAL;
}

eqlms_status fail(eqlms_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
eqlms_status guarded(F&& body) {
  try {
    return body();
  } catch (const eqlms::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EQLMS_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(EQLMS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EQLMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EQLMS_ERR_INTERNAL, "unknown error");
  }
}

eqlms_status null_arg(const char* what) { return fail(EQLMS_ERR_NULL, std::string(what) + " is NULL"); }

bool valid_kind(eqlms_algorithm kind) { return kind >= EQLMS_LMS && kind <= EQLMS_EQLMS; }

}  // namespace

extern "C" {

const char* eqlms_version(void) { return eqlms::kLibraryVersion; }

const char* eqlms_last_error(void) { return g_last_error.c_str(); }

const char* eqlms_status_name(eqlms_status status) {
  switch (status) {
    case EQLMS_OK: return "ok";
    case EQLMS_ERR_DIMENSION: return "dimension error";
    case EQLMS_ERR_DOMAIN: return "domain error";
    case EQLMS_ERR_NUMERIC: return "numeric error";
    case EQLMS_ERR_PARAMETER: return "parameter error";
    case EQLMS_ERR_DEGENERATE: return "degenerate input";
    case EQLMS_ERR_INDEX: return "index error";
    case EQLMS_ERR_DIVERGENCE: return "divergence";
    case EQLMS_ERR_IO: return "I/O error";
    case EQLMS_ERR_CONFIG: return "configuration error";
    case EQLMS_ERR_NULL: return "null argument";
    case EQLMS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

eqlms_status eqlms_algorithm_params_default(eqlms_algorithm kind, eqlms_algorithm_params* out) {
  if (!out) return null_arg("out");
  if (!valid_kind(kind)) return fail(EQLMS_ERR_PARAMETER, "unknown algorithm kind");
  const eqlms::AlgorithmSpec spec;
  *out = eqlms_algorithm_params{kind, spec.mu, nullptr, 0, spec.beta, spec.gamma, spec.zeta, *spec.lambda_max};
  return EQLMS_OK;
}

eqlms_status eqlms_filter_create(const eqlms_algorithm_params* params, size_t taps, eqlms_filter** out) {
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!valid_kind(params->kind)) return fail(EQLMS_ERR_PARAMETER, "unknown algorithm kind");
  if (params->q_fixed_len > 0 && !params->q_fixed) return null_arg("q_fixed");
  return guarded([&] {
    auto filter = std::make_unique<eqlms_filter>();
    filter->spec.kind = static_cast<eqlms::Algorithm>(params->kind);
    filter->spec.mu = params->mu;
    if (params->q_fixed_len > 0) filter->spec.q_fixed.assign(params->q_fixed, params->q_fixed + params->q_fixed_len);
    filter->spec.beta = params->beta;
    filter->spec.gamma = params->gamma;
    filter->spec.zeta = params->zeta;
    filter->spec.lambda_max = params->lambda_max;
    filter->spec.validate(taps);
    filter->state = eqlms::FilterState::zeros(taps);
    *out = filter.release();
    return EQLMS_OK;
  });
}

void eqlms_filter_destroy(eqlms_filter* filter) { delete filter; }

eqlms_status eqlms_filter_step(eqlms_filter* filter, const double* x, size_t n, double d, double* y, double* e) {
  if (!filter) return null_arg("filter");
  if (!x && n > 0) return null_arg("x");
  return guarded([&] {
    eqlms::FilterState next = filter->state;
    const auto in = eqlms::advance(next, std::span<const double>(x, n), d, filter->spec);
    filter->state = std::move(next);
    if (y) *y = in.y;
    if (e) *e = in.e;
    return EQLMS_OK;
  });
}

eqlms_status eqlms_filter_predict(const eqlms_filter* filter, const double* x, size_t n, double* y) {
  if (!filter) return null_arg("filter");
  if (!x && n > 0) return null_arg("x");
  if (!y) return null_arg("y");
  return guarded([&] {
    *y = eqlms::predict(filter->state, std::span<const double>(x, n));
    return EQLMS_OK;
  });
}

size_t eqlms_filter_taps(const eqlms_filter* filter) { return filter ? filter->state.taps() : 0; }

namespace {

eqlms_status copy_out(const std::vector<double>& src, double* out, size_t n) {
  if (!out) return null_arg("out");
  if (n != src.size()) {
    return fail(EQLMS_ERR_DIMENSION, "buffer holds " + std::to_string(n) + " values, filter has " +
                                         std::to_string(src.size()) + " taps");
  }
  std::memcpy(out, src.data(), n * sizeof(double));
  return EQLMS_OK;
}

}  // namespace

eqlms_status eqlms_filter_weights(const eqlms_filter* filter, double* out, size_t n) {
  if (!filter) return null_arg("filter");
  return copy_out(filter->state.weights, out, n);
}

eqlms_status eqlms_filter_q_vector(const eqlms_filter* filter, double* out, size_t n) {
  if (!filter) return null_arg("filter");
  return copy_out(filter->state.q_vector, out, n);
}

eqlms_status eqlms_filter_set_q_vector(eqlms_filter* filter, const double* q, size_t n) {
  if (!filter) return null_arg("filter");
  if (!q) return null_arg("q");
  if (n != filter->state.taps()) return fail(EQLMS_ERR_DIMENSION, "q-vector length must equal the tap count");
  for (size_t k = 0; k < n; ++k) {
    if (!(q[k] > 0.0) || !std::isfinite(q[k])) return fail(EQLMS_ERR_PARAMETER, "q-vector entries must be positive");
  }
  filter->state.q_vector.assign(q, q + n);
  return EQLMS_OK;
}

eqlms_status eqlms_filter_psi(const eqlms_filter* filter, double* out) {
  if (!filter) return null_arg("filter");
  if (!out) return null_arg("out");
  *out = filter->state.psi;
  return EQLMS_OK;
}

eqlms_status eqlms_filter_iteration(const eqlms_filter* filter, uint64_t* out) {
  if (!filter) return null_arg("filter");
  if (!out) return null_arg("out");
  *out = filter->state.iteration;
  return EQLMS_OK;
}

eqlms_status eqlms_estimate_lambda_max(const double* samples, size_t n, size_t taps, double* out) {
  if (!samples && n > 0) return null_arg("samples");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = eqlms::estimate_lambda_max(std::span<const double>(samples, n), taps);
    return EQLMS_OK;
  });
}

eqlms_status eqlms_generate_input(size_t n, uint64_t seed, double variance, double* out) {
  if (!out && n > 0) return null_arg("out");
  return guarded([&] {
    const auto x = eqlms::generate_input({n, seed, variance});
    if (n > 0) std::memcpy(out, x.data(), n * sizeof(double));
    return EQLMS_OK;
  });
}

eqlms_status eqlms_signal_dump(const char* path, const double* samples, size_t n, uint64_t seed, double variance) {
  if (!path) return null_arg("path");
  if (!samples && n > 0) return null_arg("samples");
  return guarded([&] {
    eqlms::dump_signal(path, std::span<const double>(samples, n), {n, seed, variance});
    return EQLMS_OK;
  });
}

eqlms_status eqlms_signal_load(const char* path, double** out, size_t* n) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  if (!n) return null_arg("n");
  *out = nullptr;
  *n = 0;
  return guarded([&] {
    const auto data = eqlms::load_signal(path);
    auto* buf = static_cast<double*>(std::malloc(std::max<size_t>(1, data.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    if (!data.empty()) std::memcpy(buf, data.data(), data.size() * sizeof(double));
    *out = buf;
    *n = data.size();
    return EQLMS_OK;
  });
}

void eqlms_free(void* p) { std::free(p); }

eqlms_status eqlms_report_create(const char* config_json, eqlms_report** out) {
  if (!config_json) return null_arg("config_json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto report = std::make_unique<eqlms_report>();
    report->config = eqlms::config_from_json(nlohmann::json::parse(config_json));
    report->effective_config = eqlms::config_to_json(report->config).dump();
    report->suites = eqlms::plan_suites(report->config);
    *out = report.release();
    return EQLMS_OK;
  });
}

void eqlms_report_destroy(eqlms_report* report) { delete report; }

const char* eqlms_config_keys(void) {
  static const std::string joined = [] {
    std::string s;
    for (const auto& k : eqlms::config_keys()) s += (s.empty() ? "" : ",") + k;
    return s;
  }();
  return joined.c_str();
}

const char* eqlms_report_effective_config(const eqlms_report* report) {
  return report ? report->effective_config.c_str() : "";
}

eqlms_status eqlms_report_execute(eqlms_report* report, unsigned workers) {
  if (!report) return null_arg("report");
  return guarded([&] {
    eqlms::HarnessOptions options;
    options.workers = workers != 0 ? workers : report->config.workers;
    options.window_fraction = report->config.window;
    options.tol_db = report->config.tol_db;
    std::vector<eqlms::SuiteReport> results;
    for (const auto& suite : report->suites) results.push_back(eqlms::run_protocol_suite(suite, options));
    report->results = std::move(results);
    report->row_index.clear();
    std::vector<std::string> divergent;
    for (std::size_t s = 0; s < report->results.size(); ++s) {
      for (std::size_t r = 0; r < report->results[s].rows.size(); ++r) {
        report->row_index.emplace_back(s, r);
        const auto& row = report->results[s].rows[r];
        if (row.diverged()) divergent.push_back(report->results[s].suite.name + "/" + row.label);
      }
    }
    report->table = eqlms::render_table(report->results);
    if (!divergent.empty()) {
      std::string msg = "diverged:";
      for (const auto& d : divergent) msg += " " + d;
      return fail(EQLMS_ERR_DIVERGENCE, msg);
    }
    return EQLMS_OK;
  });
}

size_t eqlms_report_row_count(const eqlms_report* report) { return report ? report->row_index.size() : 0; }

eqlms_status eqlms_report_row(const eqlms_report* report, size_t index, eqlms_summary_row* out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  if (index >= report->row_index.size()) return fail(EQLMS_ERR_INDEX, "row index out of range");
  const auto [s, r] = report->row_index[index];
  const auto& suite = report->results[s];
  const auto& row = suite.rows[r];
  out->suite = suite.suite.name.c_str();
  out->label = row.label.c_str();
  out->algorithm = static_cast<eqlms_algorithm>(row.algorithm);
  out->mu = row.mu;
  out->snr_db = row.snr_db;
  out->n_runs = row.n_runs;
  out->n_iterations = row.n_iterations;
  out->steady_state_db = row.steady_state_db;
  out->steady_state_se_db = row.steady_state_se_db;
  out->convergence_point = row.convergence_point ? static_cast<int64_t>(*row.convergence_point) : -1;
  out->n_divergent_runs = row.divergent_runs.size();
  return EQLMS_OK;
}

eqlms_status eqlms_report_curve(const eqlms_report* report, size_t index, const double** values, size_t* n) {
  if (!report) return null_arg("report");
  if (!values) return null_arg("values");
  if (!n) return null_arg("n");
  if (index >= report->row_index.size()) return fail(EQLMS_ERR_INDEX, "row index out of range");
  const auto [s, r] = report->row_index[index];
  const auto& curve = report->results[s].results[r].curve.values;
  *values = curve.data();
  *n = curve.size();
  return EQLMS_OK;
}

const char* eqlms_report_table(const eqlms_report* report) { return report ? report->table.c_str() : ""; }

eqlms_status eqlms_report_export(const eqlms_report* report, const char* dir) {
  if (!report) return null_arg("report");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    eqlms::export_results(report->results, dir, nlohmann::json::parse(report->effective_config));
    return EQLMS_OK;
  });
}

}  // extern "C"
