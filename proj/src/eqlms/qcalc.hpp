#pragma once

// Jackson q-derivative and q-gradient.
//
// D_q f(x) = [f(qx) - f(x)] / ((q - 1) x), which tends to the ordinary
// derivative as q -> 1. These are used to cross-check the gain factors that
// appear in the q-LMS family of update rules.

#include <functional>
#include <span>
#include <vector>

namespace eqlms::qcalc {

// Below this distance from 1 the classical branch is taken.
inline constexpr double kNearOneGuard = 1e-12;

class QParam {
 public:
  // Throws Error(kDomain) unless value is finite and > 0.
  explicit QParam(double value);

  double value() const noexcept { return value_; }
  bool classical() const noexcept;

 private:
  double value_;
};

// D_q x^n = ((q^n - 1) / (q - 1)) x^(n-1); n x^(n-1) on the classical branch.
double q_power_derivative(double x, unsigned n, QParam q);

using ScalarField = std::function<double(std::span<const double>)>;

// Per-coordinate Jackson quotient. Coordinates with q == 1 use a central
// difference with step max(1e-6, 1e-6 |x_k|).
// Throws Error(kDomain) if x_k == 0 where q_k != 1, Error(kDimension) on
// length mismatch.
std::vector<double> q_gradient(const ScalarField& f, std::span<const double> x, std::span<const QParam> q);

}  // namespace eqlms::qcalc
