#include "eqlms/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "eqlms/errors.hpp"
#include "eqlms/presets.hpp"

namespace eqlms {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string slugify(const std::string& label) {
  std::string out;
  bool dash = false;
  for (char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
      dash = false;
    } else if (!dash && !out.empty()) {
      out += '-';
      dash = true;
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "entry" : out;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_table(const std::vector<SuiteReport>& reports) {
  // Group suites, keeping first-seen order for groups, columns and labels.
  std::vector<std::string> groups;
  std::map<std::string, std::vector<const SuiteReport*>> by_group;
  for (const auto& r : reports) {
    if (!by_group.contains(r.suite.group)) groups.push_back(r.suite.group);
    by_group[r.suite.group].push_back(&r);
  }

  std::ostringstream os;
  for (const auto& group : groups) {
    const auto& members = by_group[group];
    std::vector<double> snrs;
    std::vector<std::string> labels;
    std::map<std::pair<std::string, double>, const SummaryRow*> cells;
    std::size_t runs = 0;
    for (const SuiteReport* r : members) {
      for (const auto& row : r->rows) {
        if (std::find(snrs.begin(), snrs.end(), row.snr_db) == snrs.end()) snrs.push_back(row.snr_db);
        if (std::find(labels.begin(), labels.end(), row.label) == labels.end()) labels.push_back(row.label);
        cells[{row.label, row.snr_db}] = &row;
        runs = std::max(runs, row.n_runs);
      }
    }
    std::size_t label_width = 9;
    for (const auto& l : labels) label_width = std::max(label_width, l.size());
    constexpr std::size_t kCol = 12;

    auto header = [&](const std::string& title) {
      os << title << "\n" << pad_right("Algorithm", label_width);
      for (double snr : snrs) os << " |" << pad_left(fixed(snr, 0) + " dB SNR", kCol);
      os << "\n" << std::string(label_width, '-');
      for (std::size_t i = 0; i < snrs.size(); ++i) os << "-+" << std::string(kCol, '-');
      os << "\n";
    };
    auto body = [&](auto&& format) {
      for (const auto& label : labels) {
        os << pad_right(label, label_width);
        for (double snr : snrs) {
          const auto it = cells.find({label, snr});
          std::string text = "-";
          if (it != cells.end()) text = it->second->diverged() ? "diverged" : format(*it->second);
          os << " |" << pad_left(text, kCol);
        }
        os << "\n";
      }
    };

    os << "== " << group << " (" << runs << " runs) ==\n";
    header("Steady-state NWD (dB)");
    body([](const SummaryRow& r) { return fixed(r.steady_state_db, 2); });
    os << "\n";
    header("Convergence point (iterations x1000)");
    body([](const SummaryRow& r) {
      return r.convergence_point ? fixed(static_cast<double>(*r.convergence_point) / 1000.0, 3) : std::string("n/c");
    });
    os << "\n";
  }
  return os.str();
}

namespace {

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

void export_results(const std::vector<SuiteReport>& reports, const fs::path& dir, const json& effective_config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  json files = json::array();
  json suites = json::array();

  const fs::path summary_path = dir / "summary.csv";
  std::ofstream summary = open_for_write(summary_path);
  summary << "label,mu,snr_db,steady_state_db,convergence_point\n";
  files.push_back("summary.csv");

  std::set<std::string> stems;
  for (const auto& report : reports) {
    suites.push_back(suite_to_json(report.suite));
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const SummaryRow& row = report.rows[i];
      summary << row.label << ',' << format_double(row.mu) << ',' << format_double(row.snr_db) << ',';
      if (row.diverged()) {
        summary << "diverged,diverged\n";
        continue;
      }
      summary << format_double(row.steady_state_db) << ','
              << (row.convergence_point ? std::to_string(*row.convergence_point) : std::string("not_converged"))
              << '\n';

      std::string stem = report.suite.name + "__" + slugify(row.label);
      for (int n = 2; !stems.insert(stem).second; ++n) {
        stem = report.suite.name + "__" + slugify(row.label) + "-" + std::to_string(n);
      }

      for (const char* sub : {"curves", "runs"}) {
        fs::create_directories(dir / sub, ec);
        if (ec) throw Error(ErrorCode::kIo, "cannot create " + (dir / sub).string() + ": " + ec.message());
      }
      const EnsembleResult& result = report.results[i];
      const fs::path curve_path = dir / "curves" / (stem + ".csv");
      std::ofstream curve = open_for_write(curve_path);
      curve << "iteration,nwd_mean,nwd_db\n";
      for (std::size_t t = 0; t < result.curve.values.size(); ++t) {
        const double v = result.curve.values[t];
        curve << t << ',' << format_double(v) << ',' << (v > 0.0 ? format_double(to_db(v)) : "-inf") << '\n';
      }
      finish(curve, curve_path);
      files.push_back("curves/" + stem + ".csv");

      const fs::path runs_path = dir / "runs" / (stem + ".csv");
      std::ofstream runs = open_for_write(runs_path);
      runs << "run_index,input_seed,tail_mean_nwd\n";
      for (std::size_t r = 0; r < result.run_tail_means.size(); ++r) {
        runs << r << ',' << result.run_seeds[r] << ',' << format_double(result.run_tail_means[r]) << '\n';
      }
      finish(runs, runs_path);
      files.push_back("runs/" + stem + ".csv");
    }
  }
  finish(summary, summary_path);

  json manifest = {
      {"generator", std::string("eqlms ") + kLibraryVersion},
      {"effective_config", effective_config},
      {"conventions",
       {{"nwd", "|h - w| / |h|, curve index i = weights after i updates"},
        {"db", "20*log10"},
        {"steady_state", "mean of the final ceil(window * n) ensemble values, then dB"},
        {"convergence_point", "first index after which the curve stays within tol_db of the steady state"},
        {"seed_derivation",
         "s = splitmix64(base + (run + 1) * 0x9E3779B97F4A7C15); "
         "seed = splitmix64(s ^ (stream * 0xD1B54A32D192ED03)); stream: input=1 noise=2 q_init=3"}}},
      {"suites", suites},
      {"files", files},
  };
  const fs::path manifest_path = dir / "manifest.json";
  std::ofstream out = open_for_write(manifest_path);
  out << manifest.dump(2) << '\n';
  finish(out, manifest_path);
}

}  // namespace eqlms
