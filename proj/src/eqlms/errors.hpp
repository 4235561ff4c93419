#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqlms {

// Stable categories; the C API maps each one to a status code.
enum class ErrorCode {
  kDimension = 1,
  kDomain,
  kNumeric,
  kParameter,
  kDegenerate,
  kIndex,
  kDivergence,
  kIo,
  kConfig,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A single run produced a non-finite weight.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t run_index, std::size_t iteration)
      : Error(ErrorCode::kDivergence,
              "run " + std::to_string(run_index) + " diverged at iteration " + std::to_string(iteration)),
        run_index_(run_index),
        iteration_(iteration) {}
  std::size_t run_index() const noexcept { return run_index_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t run_index_;
  std::size_t iteration_;
};

// One or more runs of an ensemble diverged.
class EnsembleDivergenceError : public Error {
 public:
  explicit EnsembleDivergenceError(std::vector<std::size_t> runs)
      : Error(ErrorCode::kDivergence, describe(runs)), runs_(std::move(runs)) {}
  const std::vector<std::size_t>& runs() const noexcept { return runs_; }

 private:
  static std::string describe(const std::vector<std::size_t>& runs) {
    std::string s = std::to_string(runs.size()) + " run(s) diverged:";
    for (std::size_t i = 0; i < runs.size() && i < 16; ++i) s += " " + std::to_string(runs[i]);
    if (runs.size() > 16) s += " ...";
    return s;
  }
  std::vector<std::size_t> runs_;
};

}  // namespace eqlms
