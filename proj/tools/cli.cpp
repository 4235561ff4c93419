#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "eqlms/eqlms.h"

namespace eqlms_cli {

using nlohmann::json;

namespace {

std::set<std::string> known_keys() {
  std::set<std::string> keys;
  std::stringstream ss(eqlms_config_keys());
  for (std::string k; std::getline(ss, k, ',');) keys.insert(k);
  return keys;
}

int exit_code_for(eqlms_status status) {
  switch (status) {
    case EQLMS_OK: return kExitOk;
    case EQLMS_ERR_CONFIG:
    case EQLMS_ERR_PARAMETER: return kExitConfig;
    case EQLMS_ERR_DIVERGENCE: return kExitDivergence;
    case EQLMS_ERR_IO: return kExitIo;
    default: return kExitInternal;
  }
}

struct ExperimentFlags {
  std::vector<std::string> algo;
  double mu = 0.1;
  std::vector<double> q;
  double beta = 0.9;
  double gamma = 0.1;
  double zeta = 1e-6;
  std::vector<double> snr;
  std::size_t iters = 10000;
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  std::string lambda_max = "1";
  int protocol = 1;
  std::string mode = "convergence";
  unsigned workers = 0;
  std::string q_init = "ones";
  double window = 0.1;
  double tol_db = 1.0;
  std::string config;
  std::vector<std::string> overrides;
};

// Options whose value goes into the config under `key` when given.
struct Bound {
  CLI::Option* option;
  std::string key;
  std::function<json()> value;
};

void add_experiment_flags(CLI::App* sub, ExperimentFlags& f, std::string& out, bool& full_scale,
                          std::vector<Bound>& bound, bool with_algorithm, bool with_protocol) {
  auto bind = [&](CLI::Option* o, std::string key, std::function<json()> value) {
    bound.push_back({o, std::move(key), std::move(value)});
  };
  if (with_algorithm) {
    bind(sub->add_option("--algo", f.algo, "Algorithm: lms, nlms, qlms, qnlms, tvqlms, eqlms (run default: eqlms; "
                                           "compare default: all; repeatable for compare)")
             ->check(CLI::IsMember({"lms", "nlms", "qlms", "qnlms", "tvqlms", "eqlms"})),
         "algo", [&] { return f.algo.size() == 1 ? json(f.algo[0]) : json(f.algo); });
    bind(sub->add_option("--mu", f.mu, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str(), "mu",
         [&] { return json(f.mu); });
    bind(sub->add_option("--q", f.q, "q-LMS / q-NLMS q: one value, or one per tap (repeatable) [2]")
             ->delimiter(',')
             ->check(CLI::PositiveNumber),
         "q", [&] { return json(f.q); });
  }
  if (with_protocol) {
    bind(sub->add_option("--protocol", f.protocol, "Evaluation protocol preset (1: mu~1e-1, 2: ~1e-2, 3: ~1e-3)")
             ->check(CLI::Range(1, 3))
             ->capture_default_str(),
         "protocol", [&] { return json(f.protocol); });
    bind(sub->add_option("--mode", f.mode, "Preset calibration: convergence or steady-state")
             ->check(CLI::IsMember({"convergence", "steady-state"}))
             ->capture_default_str(),
         "mode", [&] { return json(f.mode); });
  }
  bind(sub->add_option("--beta", f.beta, "Time-varying q-LMS forgetting factor, in (0,1)")
           ->check(CLI::Range(0.0, 1.0))
           ->capture_default_str(),
       "beta", [&] { return json(f.beta); });
  bind(sub->add_option("--gamma", f.gamma, "Time-varying q-LMS error weight")->check(CLI::PositiveNumber)
           ->capture_default_str(),
       "gamma", [&] { return json(f.gamma); });
  bind(sub->add_option("--zeta", f.zeta, "NLMS / q-NLMS regularizer")->check(CLI::NonNegativeNumber)
           ->capture_default_str(),
       "zeta", [&] { return json(f.zeta); });
  bind(sub->add_option("--snr", f.snr, "SNR in dB, repeatable (run default: 20; suite/compare: 10,20,30)")
           ->delimiter(','),
       "snr", [&] { return json(f.snr); });
  bind(sub->add_option("--iters", f.iters, "Iterations per run (suite default: protocol preset)")
           ->check(CLI::PositiveNumber)
           ->capture_default_str(),
       "iters", [&] { return json(f.iters); });
  bind(sub->add_option("--runs", f.runs, "Independent Monte-Carlo runs")->check(CLI::PositiveNumber)
           ->capture_default_str(),
       "runs", [&] { return json(f.runs); });
  bind(sub->add_option("--seed", f.seed, "Base seed")->capture_default_str(), "seed", [&] { return json(f.seed); });
  bind(sub->add_option("--lambda-max", f.lambda_max, "Largest input autocorrelation eigenvalue, or 'estimate'")
           ->check([](const std::string& v) -> std::string {
             if (v == "estimate") return {};
             try {
               std::size_t used = 0;
               const double d = std::stod(v, &used);
               if (used == v.size() && d > 0.0) return {};
             } catch (const std::exception&) {
             }
             return "must be a positive number or 'estimate'";
           })
           ->capture_default_str(),
       "lambda_max", [&] { return f.lambda_max == "estimate" ? json("estimate") : json(std::stod(f.lambda_max)); });
  bind(sub->add_option("--workers", f.workers, "Concurrent runs (0: all cores)")->capture_default_str(), "workers",
       [&] { return json(f.workers); });
  bind(sub->add_option("--q-init", f.q_init, "Eq-LMS q-vector start: ones or seeded-uniform")
           ->check(CLI::IsMember({"ones", "seeded-uniform"}))
           ->capture_default_str(),
       "q_init", [&] { return json(f.q_init); });
  bind(sub->add_option("--window", f.window, "Steady-state tail fraction, in (0,1]")
           ->check(CLI::Range(0.0, 1.0))
           ->capture_default_str(),
       "window", [&] { return json(f.window); });
  bind(sub->add_option("--tol-db", f.tol_db, "Convergence band above steady state, dB")
           ->check(CLI::PositiveNumber)
           ->capture_default_str(),
       "tol_db", [&] { return json(f.tol_db); });
  bind(sub->add_option("--out", out, "Output directory")->capture_default_str(), "out", [&] { return json(out); });
  bind(sub->add_flag("--full-scale", full_scale, "1000 runs instead of the desk-scale 200"), "full_scale",
       [&] { return json(full_scale); });
  sub->add_option("--config", f.config, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  sub->add_option("--set", f.overrides, "Config override key=value (repeatable)");
}

}  // namespace

ParseResult parse_invocation(const std::vector<std::string>& argv) {
  CLI::App app{"LMS-family adaptive filter experiments (LMS, NLMS, q-LMS, q-NLMS, TV-qLMS, Eq-LMS)", "eqlms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", eqlms_version());

  ExperimentFlags run_flags, suite_flags, compare_flags;
  std::string run_out = "results", suite_out = "results", compare_out = "results";
  bool run_full = false, suite_full = false, compare_full = false;
  std::vector<Bound> run_bound, suite_bound, compare_bound;

  CLI::App* run = app.add_subcommand("run", "Monte-Carlo ensemble of a single algorithm");
  add_experiment_flags(run, run_flags, run_out, run_full, run_bound, true, false);
  CLI::App* suite = app.add_subcommand("suite", "Built-in protocol preset across SNRs");
  add_experiment_flags(suite, suite_flags, suite_out, suite_full, suite_bound, false, true);
  CLI::App* compare = app.add_subcommand("compare", "Several algorithms at one learning rate");
  add_experiment_flags(compare, compare_flags, compare_out, compare_full, compare_bound, true, false);

  CliInvocation est;
  CLI::App* estimate = app.add_subcommand("estimate-lambda", "Largest eigenvalue of the input autocorrelation");
  estimate->add_option("--samples", est.samples, "Generated samples")->check(CLI::PositiveNumber)
      ->capture_default_str();
  estimate->add_option("--taps", est.taps, "Autocorrelation matrix size")->check(CLI::PositiveNumber)
      ->capture_default_str();
  estimate->add_option("--seed", est.seed, "Generator seed")->capture_default_str();
  estimate->add_option("--variance", est.variance, "Generated input variance")->check(CLI::PositiveNumber)
      ->capture_default_str();
  std::string input, dump;
  CLI::Option* input_opt = estimate->add_option("--input", input, "Read samples from a float64 dump instead");
  CLI::Option* dump_opt = estimate->add_option("--dump", dump, "Write the samples used as a float64 dump");

  ParseResult result;
  std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    result.exit_code = app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    result.output = out.str() + err.str();
    return result;
  }

  CliInvocation inv;
  if (estimate->parsed()) {
    inv = est;
    inv.command = "estimate-lambda";
    if (input_opt->count() > 0) inv.input_path = input;
    if (dump_opt->count() > 0) inv.dump_path = dump;
    result.invocation = inv;
    return result;
  }

  CLI::App* sub = run->parsed() ? run : suite->parsed() ? suite : compare;
  ExperimentFlags& f = run->parsed() ? run_flags : suite->parsed() ? suite_flags : compare_flags;
  std::vector<Bound>& bound = run->parsed() ? run_bound : suite->parsed() ? suite_bound : compare_bound;
  inv.command = sub->get_name();
  for (const auto& b : bound) {
    if (b.option->count() > 0) inv.flags[b.key] = b.value();
  }
  if (!f.config.empty()) inv.config_path = f.config;

  const std::set<std::string> keys = known_keys();
  for (const auto& text : f.overrides) {
    const auto eq = text.find('=');
    std::string key = eq == std::string::npos ? "" : text.substr(0, eq);
    for (char& c : key) {
      if (c == '-') c = '_';
    }
    if (key.empty() || !keys.contains(key) || key == "command") {
      result.exit_code = kExitUsage;
      result.output = "malformed override '" + text + "': expected key=value with key one of " +
                      std::string(eqlms_config_keys()) + "\n";
      return result;
    }
    const std::string raw = text.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    inv.overrides.emplace_back(key, value);
  }
  inv.output_dir = run->parsed() ? run_out : suite->parsed() ? suite_out : compare_out;
  inv.full_scale = run->parsed() ? run_full : suite->parsed() ? suite_full : compare_full;
  result.invocation = inv;
  return result;
}

json merged_config(const CliInvocation& inv) {
  json config = json::object();
  if (inv.config_path) {
    std::ifstream in(*inv.config_path);
    if (!in) throw std::runtime_error("cannot read config file " + *inv.config_path);
    config = json::parse(in);
    if (!config.is_object()) throw json::type_error::create(302, "config file must hold a JSON object", nullptr);
  }
  for (const auto& [key, value] : inv.overrides) config[key] = value;
  for (const auto& [key, value] : inv.flags.items()) config[key] = value;
  config["command"] = inv.command;
  return config;
}

namespace {

int estimate_lambda(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  std::vector<double> samples;
  eqlms_status status = EQLMS_OK;
  if (inv.input_path) {
    double* data = nullptr;
    std::size_t n = 0;
    status = eqlms_signal_load(inv.input_path->c_str(), &data, &n);
    if (status == EQLMS_OK) {
      samples.assign(data, data + n);
      eqlms_free(data);
    }
  } else {
    samples.resize(inv.samples);
    status = eqlms_generate_input(inv.samples, inv.seed, inv.variance, samples.data());
  }
  if (status == EQLMS_OK && inv.dump_path) {
    status = eqlms_signal_dump(inv.dump_path->c_str(), samples.data(), samples.size(), inv.seed, inv.variance);
  }
  double lambda = 0.0;
  if (status == EQLMS_OK) status = eqlms_estimate_lambda_max(samples.data(), samples.size(), inv.taps, &lambda);
  if (status != EQLMS_OK) {
    err << "eqlms: " << eqlms_status_name(status) << ": " << eqlms_last_error() << "\n";
    return exit_code_for(status);
  }
  out.precision(10);
  out << "lambda_max " << lambda << "\n";
  return kExitOk;
}

}  // namespace

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.command == "estimate-lambda") return estimate_lambda(inv, out, err);

  json config;
  try {
    config = merged_config(inv);
  } catch (const json::exception& e) {
    err << "eqlms: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "eqlms: I/O error: " << e.what() << "\n";
    return kExitIo;
  }

  eqlms_report* report = nullptr;
  eqlms_status status = eqlms_report_create(config.dump().c_str(), &report);
  if (status != EQLMS_OK) {
    err << "eqlms: " << eqlms_status_name(status) << ": " << eqlms_last_error() << "\n";
    return exit_code_for(status);
  }
  const std::unique_ptr<eqlms_report, decltype(&eqlms_report_destroy)> guard(report, &eqlms_report_destroy);

  const eqlms_status run_status = eqlms_report_execute(report, 0);
  if (run_status != EQLMS_OK && run_status != EQLMS_ERR_DIVERGENCE) {
    err << "eqlms: " << eqlms_status_name(run_status) << ": " << eqlms_last_error() << "\n";
    return exit_code_for(run_status);
  }
  const std::string divergence = run_status == EQLMS_OK ? "" : eqlms_last_error();
  out << eqlms_report_table(report);

  const std::string dir = json::parse(eqlms_report_effective_config(report)).at("out").get<std::string>();
  status = eqlms_report_export(report, dir.c_str());
  if (status != EQLMS_OK) {
    err << "eqlms: " << eqlms_status_name(status) << ": " << eqlms_last_error() << "\n";
    return exit_code_for(status);
  }
  out << "results written to " << dir << "\n";
  if (run_status == EQLMS_ERR_DIVERGENCE) {
    err << "eqlms: divergence: " << divergence << "\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  const ParseResult parsed = parse_invocation(args);
  if (!parsed.invocation) {
    (parsed.exit_code == kExitOk ? std::cout : std::cerr) << parsed.output;
    return parsed.exit_code;
  }
  return execute(*parsed.invocation, std::cout, std::cerr);
}

}  // namespace eqlms_cli
