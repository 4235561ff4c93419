#include "eqlms/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "eqlms/errors.hpp"

namespace eqlms {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

double positive(const json& v, const std::string& key) {
  const double d = v.get<double>();
  if (!(d > 0.0) || !std::isfinite(d)) config_error(key + " must be positive");
  return d;
}

std::size_t positive_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 1) config_error(key + " must be a positive integer");
  return v.get<std::size_t>();
}

std::vector<double> number_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  return {v.get<double>()};
}

Algorithm algorithm_from(const json& v) {
  const auto name = v.get<std::string>();
  const auto kind = parse_algorithm(name);
  if (!kind) config_error("unknown algorithm '" + name + "'");
  return *kind;
}

std::optional<double> lambda_from(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() != "estimate") config_error("lambda_max must be a positive number or \"estimate\"");
    return std::nullopt;
  }
  return positive(v, "lambda_max");
}

json lambda_to(const std::optional<double>& v) { return v ? json(*v) : json("estimate"); }

QInitPolicy q_init_from(const std::string& s) {
  if (s == "ones") return QInitPolicy::kOnes;
  if (s == "seeded-uniform") return QInitPolicy::kSeededUniform;
  config_error("q_init must be \"ones\" or \"seeded-uniform\"");
}

std::string q_init_to(QInitPolicy p) { return p == QInitPolicy::kOnes ? "ones" : "seeded-uniform"; }

void check_q(const std::vector<double>& q) {
  if (q.empty()) config_error("q must not be empty");
  for (double v : q) {
    if (!(v > 0.0) || !std::isfinite(v)) config_error("q entries must be positive");
  }
}

EntryConfig entry_from(const json& j) {
  if (!j.is_object()) config_error("entries must be objects");
  EntryConfig e;
  bool has_label = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "label") {
      e.label = v.get<std::string>();
      has_label = true;
    } else if (key == "algo") {
      e.algo = algorithm_from(v);
    } else if (key == "mu") {
      e.mu = positive(v, "mu");
    } else if (key == "q") {
      e.q = number_list(v);
      check_q(e.q);
    } else if (key == "beta") {
      e.beta = v.get<double>();
    } else if (key == "gamma") {
      e.gamma = v.get<double>();
    } else if (key == "zeta") {
      e.zeta = v.get<double>();
    } else {
      config_error("unknown entry key '" + key + "'");
    }
  }
  if (!has_label) config_error("every entry needs a label");
  return e;
}

json entry_to(const EntryConfig& e) {
  json j = {{"label", e.label}, {"algo", algorithm_name(e.algo)}, {"mu", e.mu}, {"q", e.q}};
  if (e.beta) j["beta"] = *e.beta;
  if (e.gamma) j["gamma"] = *e.gamma;
  if (e.zeta) j["zeta"] = *e.zeta;
  return j;
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command",
       [](RunConfig& c, const json& v) {
         c.command = v.get<std::string>();
         if (c.command != "run" && c.command != "suite" && c.command != "compare") {
           config_error("command must be run, suite or compare");
         }
       }},
      {"algo",
       [](RunConfig& c, const json& v) {
         c.algo.clear();
         if (v.is_array()) {
           for (const auto& a : v) c.algo.push_back(algorithm_from(a));
         } else {
           c.algo.push_back(algorithm_from(v));
         }
       }},
      {"mu",
       [](RunConfig& c, const json& v) {
         c.mu = v.is_null() ? std::nullopt : std::optional<double>(positive(v, "mu"));
       }},
      {"q",
       [](RunConfig& c, const json& v) {
         c.q = number_list(v);
         check_q(c.q);
       }},
      {"beta",
       [](RunConfig& c, const json& v) {
         c.beta = v.get<double>();
         if (!(c.beta > 0.0 && c.beta < 1.0)) config_error("beta must lie in (0, 1)");
       }},
      {"gamma", [](RunConfig& c, const json& v) { c.gamma = positive(v, "gamma"); }},
      {"zeta",
       [](RunConfig& c, const json& v) {
         c.zeta = v.get<double>();
         if (!(c.zeta >= 0.0) || !std::isfinite(c.zeta)) config_error("zeta must be nonnegative");
       }},
      {"snr",
       [](RunConfig& c, const json& v) {
         c.snr = number_list(v);
         for (double s : c.snr) {
           if (!std::isfinite(s)) config_error("snr must be finite");
         }
       }},
      {"iters",
       [](RunConfig& c, const json& v) {
         c.iters = v.is_null() ? std::nullopt : std::optional<std::size_t>(positive_count(v, "iters"));
       }},
      {"runs",
       [](RunConfig& c, const json& v) {
         c.runs = v.is_null() ? std::nullopt : std::optional<std::size_t>(positive_count(v, "runs"));
       }},
      {"seed",
       [](RunConfig& c, const json& v) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
           config_error("seed must be a nonnegative integer");
         }
         c.seed = v.get<std::uint64_t>();
       }},
      {"lambda_max", [](RunConfig& c, const json& v) { c.lambda_max = lambda_from(v); }},
      {"protocol",
       [](RunConfig& c, const json& v) {
         if (!v.is_number_integer()) config_error("protocol must be 1, 2 or 3");
         c.protocol = v.get<int>();
         if (c.protocol < 1 || c.protocol > 3) config_error("protocol must be 1, 2 or 3");
       }},
      {"mode",
       [](RunConfig& c, const json& v) {
         c.mode = v.get<std::string>();
         if (!parse_mode(c.mode)) config_error("mode must be \"convergence\" or \"steady-state\"");
       }},
      {"out", [](RunConfig& c, const json& v) { c.out = v.get<std::string>(); }},
      {"full_scale", [](RunConfig& c, const json& v) { c.full_scale = v.get<bool>(); }},
      {"workers",
       [](RunConfig& c, const json& v) {
         if (!v.is_number_integer() || v.get<long long>() < 0) config_error("workers must be >= 0");
         c.workers = v.get<unsigned>();
       }},
      {"q_init",
       [](RunConfig& c, const json& v) {
         c.q_init = v.get<std::string>();
         q_init_from(c.q_init);
       }},
      {"window",
       [](RunConfig& c, const json& v) {
         c.window = v.get<double>();
         if (!(c.window > 0.0 && c.window <= 1.0)) config_error("window must lie in (0, 1]");
       }},
      {"tol_db", [](RunConfig& c, const json& v) { c.tol_db = positive(v, "tol_db"); }},
      {"entries",
       [](RunConfig& c, const json& v) {
         if (!v.is_array()) config_error("entries must be an array");
         c.entries.clear();
         for (const auto& e : v) c.entries.push_back(entry_from(e));
       }},
  };
  return table;
}

// Fill command-dependent defaults and reject combinations that make no sense.
RunConfig resolve(const RunConfig& in) {
  RunConfig c = in;
  if (c.full_scale && c.runs && *c.runs != kFullScaleRuns) {
    config_error("full_scale fixes runs at " + std::to_string(kFullScaleRuns));
  }
  c.runs = c.full_scale ? kFullScaleRuns : c.runs.value_or(kDeskRuns);
  if (c.q.empty()) c.q = {kPresetQ};

  if (c.command == "suite") {
    if (!c.algo.empty() || c.mu) {
      config_error("suite takes algorithms and learning rates from the protocol presets; use compare or entries");
    }
    if (c.snr.empty()) c.snr.assign(kPresetSnrsDb.begin(), kPresetSnrsDb.end());
  } else {
    if (!c.entries.empty()) config_error("entries are only valid for the suite command");
    if (c.command == "run") {
      if (c.algo.empty()) c.algo = {Algorithm::kEqlms};
      if (c.algo.size() != 1) config_error("run takes a single algorithm; use compare for several");
      if (c.snr.empty()) c.snr = {20.0};
    } else {
      if (c.algo.empty()) c.algo.assign(std::begin(kAllAlgorithms), std::end(kAllAlgorithms));
      if (c.snr.empty()) c.snr.assign(kPresetSnrsDb.begin(), kPresetSnrsDb.end());
    }
    if (!c.mu) c.mu = 0.1;
    if (!c.iters) c.iters = 10000;
  }
  return c;
}

std::string snr_label(double snr) {
  json j = snr;
  return j.dump() + "dB";
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig merge_config(const RunConfig& base, const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  RunConfig c = base;
  for (const auto& [key, value] : j.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) config_error("unknown config key '" + key + "'");
    try {
      it->second(c, value);
    } catch (const json::exception& e) {
      config_error("bad value for '" + key + "': " + e.what());
    }
  }
  return c;
}

RunConfig config_from_json(const json& j) { return merge_config(RunConfig{}, j); }

json config_to_json(const RunConfig& in) {
  const RunConfig c = resolve(in);
  json j;
  j["command"] = c.command;
  json algos = json::array();
  for (Algorithm a : c.algo) algos.push_back(algorithm_name(a));
  j["algo"] = algos;
  j["mu"] = c.mu ? json(*c.mu) : json(nullptr);
  j["q"] = c.q;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["zeta"] = c.zeta;
  j["snr"] = c.snr;
  j["iters"] = c.iters ? json(*c.iters) : json(nullptr);
  j["runs"] = *c.runs;
  j["seed"] = c.seed;
  j["lambda_max"] = lambda_to(c.lambda_max);
  j["protocol"] = c.protocol;
  j["mode"] = c.mode;
  j["out"] = c.out;
  j["full_scale"] = c.full_scale;
  j["workers"] = c.workers;
  j["q_init"] = c.q_init;
  j["window"] = c.window;
  j["tol_db"] = c.tol_db;
  json entries = json::array();
  for (const auto& e : c.entries) entries.push_back(entry_to(e));
  j["entries"] = entries;
  return j;
}

std::vector<ProtocolSuite> plan_suites(const RunConfig& in) {
  const RunConfig c = resolve(in);
  const QInitPolicy q_init = q_init_from(c.q_init);
  std::vector<ProtocolSuite> suites;

  ExperimentSpec base;
  base.n_runs = *c.runs;
  base.base_seed = c.seed;
  base.q_init = q_init;
  base.algorithm.q_fixed = c.q;
  base.algorithm.beta = c.beta;
  base.algorithm.gamma = c.gamma;
  base.algorithm.zeta = c.zeta;
  base.algorithm.lambda_max = c.lambda_max;

  for (double snr : c.snr) {
    ProtocolSuite suite;
    if (c.command == "suite" && c.entries.empty()) {
      PresetOptions options;
      options.n_runs = *c.runs;
      options.base_seed = c.seed;
      options.beta = c.beta;
      options.gamma = c.gamma;
      options.zeta = c.zeta;
      options.lambda_max = c.lambda_max;
      options.q_init = q_init;
      options.n_iterations = c.iters;
      suite = preset_suite(c.protocol, *parse_mode(c.mode), snr, options);
    } else if (c.command == "suite") {
      suite.name = "custom-" + snr_label(snr);
      suite.group = "Custom suite";
      suite.mode = *parse_mode(c.mode);
      for (const auto& e : c.entries) {
        ExperimentSpec spec = base;
        spec.channel = ChannelModel::reference(snr);
        spec.n_iterations = c.iters.value_or(10000);
        spec.algorithm.kind = e.algo;
        spec.algorithm.mu = e.mu;
        spec.algorithm.q_fixed = e.q;
        if (e.beta) spec.algorithm.beta = *e.beta;
        if (e.gamma) spec.algorithm.gamma = *e.gamma;
        if (e.zeta) spec.algorithm.zeta = *e.zeta;
        suite.entries.push_back({e.label, std::move(spec)});
      }
    } else {
      suite.name = c.command + "-" + snr_label(snr);
      suite.group = c.command == "run" ? "Single experiment" : "Comparison";
      for (Algorithm a : c.algo) {
        ExperimentSpec spec = base;
        spec.channel = ChannelModel::reference(snr);
        spec.n_iterations = *c.iters;
        spec.algorithm.kind = a;
        spec.algorithm.mu = *c.mu;
        suite.entries.push_back({std::string(algorithm_name(a)), std::move(spec)});
      }
    }
    suite.validate();
    suites.push_back(std::move(suite));
  }
  std::set<std::string> names;
  for (const auto& s : suites) {
    if (!names.insert(s.name).second) config_error("duplicate SNR value produces suite '" + s.name + "' twice");
  }
  return suites;
}

json spec_to_json(const ExperimentSpec& spec) {
  const auto& a = spec.algorithm;
  return json{
      {"algorithm",
       {{"kind", algorithm_name(a.kind)},
        {"mu", a.mu},
        {"q_fixed", a.q_fixed},
        {"beta", a.beta},
        {"gamma", a.gamma},
        {"zeta", a.zeta},
        {"lambda_max", lambda_to(a.lambda_max)}}},
      {"channel", {{"h", spec.channel.h}, {"snr_db", spec.channel.snr_db}}},
      {"n_iterations", spec.n_iterations},
      {"n_runs", spec.n_runs},
      {"base_seed", spec.base_seed},
      {"q_init", q_init_to(spec.q_init)},
      {"lambda_warmup", spec.lambda_warmup},
  };
}

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) config_error(what + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) config_error("unknown " + what + " key '" + key + "'");
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) config_error(what + " is missing '" + key + "'");
  }
}

}  // namespace

ExperimentSpec spec_from_json(const json& j) {
  try {
    require_keys(j, {"algorithm", "channel", "n_iterations", "n_runs", "base_seed", "q_init", "lambda_warmup"},
                 "experiment");
    const json& a = j.at("algorithm");
    require_keys(a, {"kind", "mu", "q_fixed", "beta", "gamma", "zeta", "lambda_max"}, "algorithm");
    const json& ch = j.at("channel");
    require_keys(ch, {"h", "snr_db"}, "channel");
    ExperimentSpec spec;
    spec.algorithm.kind = algorithm_from(a.at("kind"));
    spec.algorithm.mu = a.at("mu").get<double>();
    spec.algorithm.q_fixed = a.at("q_fixed").get<std::vector<double>>();
    spec.algorithm.beta = a.at("beta").get<double>();
    spec.algorithm.gamma = a.at("gamma").get<double>();
    spec.algorithm.zeta = a.at("zeta").get<double>();
    spec.algorithm.lambda_max = lambda_from(a.at("lambda_max"));
    spec.channel.h = ch.at("h").get<std::vector<double>>();
    spec.channel.snr_db = ch.at("snr_db").get<double>();
    spec.n_iterations = j.at("n_iterations").get<std::size_t>();
    spec.n_runs = j.at("n_runs").get<std::size_t>();
    spec.base_seed = j.at("base_seed").get<std::uint64_t>();
    spec.q_init = q_init_from(j.at("q_init").get<std::string>());
    spec.lambda_warmup = j.at("lambda_warmup").get<std::size_t>();
    return spec;
  } catch (const json::exception& e) {
    config_error(std::string("malformed experiment: ") + e.what());
  }
}

json suite_to_json(const ProtocolSuite& suite) {
  json entries = json::array();
  for (const auto& e : suite.entries) entries.push_back({{"label", e.label}, {"spec", spec_to_json(e.spec)}});
  return json{{"name", suite.name}, {"group", suite.group}, {"mode", mode_name(suite.mode)}, {"entries", entries}};
}

ProtocolSuite suite_from_json(const json& j) {
  try {
    require_keys(j, {"name", "group", "mode", "entries"}, "suite");
    ProtocolSuite suite;
    suite.name = j.at("name").get<std::string>();
    suite.group = j.at("group").get<std::string>();
    const auto mode = parse_mode(j.at("mode").get<std::string>());
    if (!mode) config_error("suite mode must be \"convergence\" or \"steady-state\"");
    suite.mode = *mode;
    for (const auto& e : j.at("entries")) {
      require_keys(e, {"label", "spec"}, "suite entry");
      suite.entries.push_back({e.at("label").get<std::string>(), spec_from_json(e.at("spec"))});
    }
    return suite;
  } catch (const json::exception& e) {
    config_error(std::string("malformed suite: ") + e.what());
  }
}

}  // namespace eqlms
