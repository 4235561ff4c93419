#include "eqlms/qcalc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqlms/errors.hpp"

namespace eqlms::qcalc {

QParam::QParam(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw Error(ErrorCode::kDomain, "q must be finite and positive, got " + std::to_string(value));
  }
}

bool QParam::classical() const noexcept { return std::abs(value_ - 1.0) < kNearOneGuard; }

double q_power_derivative(double x, unsigned n, QParam q) {
  if (n == 0) return 0.0;
  const double tail = std::pow(x, static_cast<double>(n - 1));
  if (q.classical()) return static_cast<double>(n) * tail;
  // (q^n - 1)/(q - 1) via expm1/log1p keeps precision close to q = 1.
  const double dq = q.value() - 1.0;
  const double ratio = std::expm1(static_cast<double>(n) * std::log1p(dq)) / dq;
  return ratio * tail;
}

std::vector<double> q_gradient(const ScalarField& f, std::span<const double> x, std::span<const QParam> q) {
  if (x.size() != q.size()) {
    throw Error(ErrorCode::kDimension, "q_gradient: x has " + std::to_string(x.size()) + " components, q has " +
                                           std::to_string(q.size()));
  }
  std::vector<double> probe(x.begin(), x.end());
  const double base = f(probe);
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double xk = x[k];
    if (q[k].classical()) {
      const double h = std::max(1e-6, 1e-6 * std::abs(xk));
      probe[k] = xk + h;
      const double up = f(probe);
      probe[k] = xk - h;
      const double down = f(probe);
      grad[k] = (up - down) / (2.0 * h);
    } else {
      if (xk == 0.0) {
        throw Error(ErrorCode::kDomain, "q_gradient: component " + std::to_string(k) + " is zero with q != 1");
      }
      probe[k] = q[k].value() * xk;
      grad[k] = (f(probe) - base) / ((q[k].value() - 1.0) * xk);
    }
    probe[k] = xk;
  }
  return grad;
}

}  // namespace eqlms::qcalc
