#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eqlms/errors.hpp"
#include "eqlms/filters.hpp"
#include "oracle_steps.hpp"

using namespace eqlms;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eqlms::Error");
  return ErrorCode::kDomain;
}

AlgorithmSpec make(Algorithm kind, double mu) {
  AlgorithmSpec s;
  s.kind = kind;
  s.mu = mu;
  return s;
}

FilterState with_weights(std::vector<double> w) {
  FilterState s = FilterState::zeros(w.size());
  s.weights = std::move(w);
  return s;
}

oracle::Vec to_eigen(const std::vector<double>& v) { return Eigen::Map<const oracle::Vec>(v.data(), v.size()); }

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK_FALSE(parse_algorithm("rls").has_value());
}

TEST_CASE("predict is the inner product") {
  const std::vector<double> x5{0.3, -1.0, 2.0, 4.0, 0.5};
  CHECK(predict(FilterState::zeros(5), x5) == 0.0);
  CHECK(predict(with_weights({1.0, 2.0}), std::vector<double>{3.0, 4.0}) == 11.0);
  CHECK(predict(with_weights({-2, -1, 0, 1, 2}), std::vector<double>(5, 1.0)) == 0.0);
  CHECK(code_of([] { predict(FilterState::zeros(3), std::vector<double>{1.0, 2.0}); }) == ErrorCode::kDimension);
}

TEST_CASE("lms examples") {
  const auto out = lms_step(FilterState::zeros(5), std::vector<double>{1, 0, 0, 0, 0}, 1.0, make(Algorithm::kLms, 0.5));
  CHECK(out.y == 0.0);
  CHECK(out.e == 1.0);
  CHECK(out.new_state.weights == std::vector<double>{0.5, 0, 0, 0, 0});
  CHECK(out.new_state.iteration == 1);

  const auto s = with_weights({0.2, -0.7, 1.1});
  const std::vector<double> x{0.4, 0.9, -1.3};
  const auto fixed = lms_step(s, x, predict(s, x), make(Algorithm::kLms, 0.3));
  CHECK(fixed.e == 0.0);
  CHECK(fixed.new_state.weights == s.weights);

  const auto one = lms_step(with_weights({1.0}), std::vector<double>{2.0}, 0.0, make(Algorithm::kLms, 0.1));
  CHECK(one.y == 2.0);
  CHECK(one.e == -2.0);
  CHECK(one.new_state.weights[0] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("non-finite inputs raise numeric errors") {
  const auto spec = make(Algorithm::kLms, 0.1);
  CHECK(code_of([&] { lms_step(FilterState::zeros(2), std::vector<double>{NAN, 0.0}, 1.0, spec); }) ==
        ErrorCode::kNumeric);
  CHECK(code_of([&] { lms_step(FilterState::zeros(2), std::vector<double>{1.0, 0.0}, INFINITY, spec); }) ==
        ErrorCode::kNumeric);
  CHECK(code_of([&] { lms_step(FilterState::zeros(2), std::vector<double>{1.0}, 1.0, spec); }) ==
        ErrorCode::kDimension);
}

TEST_CASE("kind-specific steps reject a mismatched spec") {
  CHECK(code_of([] { nlms_step(FilterState::zeros(1), std::vector<double>{1.0}, 1.0, make(Algorithm::kLms, 0.1)); }) ==
        ErrorCode::kParameter);
}

TEST_CASE("nlms examples") {
  auto spec = make(Algorithm::kNlms, 1.0);
  spec.zeta = 0.0;
  const std::vector<double> x{1.0, 0.0};
  const auto out = nlms_step(FilterState::zeros(2), x, 1.0, spec);
  CHECK(out.new_state.weights == std::vector<double>{1.0, 0.0});
  CHECK(predict(out.new_state, x) == 1.0);

  spec.zeta = 1e-6;
  const auto s = with_weights({0.3, -0.2});
  CHECK(nlms_step(s, std::vector<double>{0.0, 0.0}, 5.0, spec).new_state.weights == s.weights);

  spec.mu = 0.5;
  spec.zeta = 0.0;
  CHECK(nlms_step(FilterState::zeros(1), std::vector<double>{2.0}, 1.0, spec).new_state.weights[0] == 0.25);
  CHECK(code_of([&] { nlms_step(FilterState::zeros(2), std::vector<double>{0.0, 0.0}, 1.0, spec); }) ==
        ErrorCode::kNumeric);
}

TEST_CASE("qlms examples") {
  auto spec = make(Algorithm::kQlms, 0.1);
  spec.q_fixed = {3.0};
  CHECK(qlms_step(FilterState::zeros(1), std::vector<double>{1.0}, 1.0, spec).new_state.weights[0] ==
        doctest::Approx(0.2).epsilon(1e-15));
  spec.q_fixed = {2.0};
  CHECK(qlms_step(FilterState::zeros(1), std::vector<double>{1.0}, 1.0, spec).new_state.weights[0] ==
        doctest::Approx(0.15).epsilon(1e-15));

  spec.q_fixed = {1.0, 3.0};
  const auto per_tap = qlms_step(FilterState::zeros(2), std::vector<double>{1.0, 1.0}, 1.0, spec);
  CHECK(per_tap.new_state.weights[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(per_tap.new_state.weights[1] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("qnlms examples") {
  auto spec = make(Algorithm::kQnlms, 1.0);
  spec.q_fixed = {3.0};
  spec.zeta = 0.0;
  CHECK(qnlms_step(FilterState::zeros(1), std::vector<double>{1.0}, 1.0, spec).new_state.weights[0] == 1.0);
  CHECK(code_of([&] { qnlms_step(FilterState::zeros(1), std::vector<double>{0.0}, 1.0, spec); }) ==
        ErrorCode::kNumeric);

  spec.zeta = 1e-6;
  const auto s = with_weights({0.1, 0.2, 0.3});
  CHECK(qnlms_step(s, std::vector<double>{0.0, 0.0, 0.0}, 2.0, spec).new_state.weights == s.weights);
}

TEST_CASE("fixed q = 1 reduces the q variants to their classical forms") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  auto lms = make(Algorithm::kLms, 0.05);
  auto qlms = make(Algorithm::kQlms, 0.05);
  qlms.q_fixed = {1.0};
  auto nlms = make(Algorithm::kNlms, 0.5);
  auto qnlms = make(Algorithm::kQnlms, 0.5);
  qnlms.q_fixed = std::vector<double>(4, 1.0);
  FilterState a = FilterState::zeros(4), b = a, c = a, d = a;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(4);
    for (auto& v : x) v = g(rng);
    const double target = g(rng);
    a = lms_step(a, x, target, lms).new_state;
    b = qlms_step(b, x, target, qlms).new_state;
    c = nlms_step(c, x, target, nlms).new_state;
    d = qnlms_step(d, x, target, qnlms).new_state;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(a.weights[k] - b.weights[k]) <= 1e-15);
    CHECK(std::abs(c.weights[k] - d.weights[k]) <= 1e-15);
  }
}

TEST_CASE("time-varying q recursion examples") {
  auto spec = make(Algorithm::kTvqlms, 0.1);
  spec.beta = 0.9;
  spec.gamma = 0.1;
  spec.lambda_max = 1.0;

  const std::vector<double> x{1.0, 0.0, 0.0, 0.0, 0.0};
  const auto out = tvq_step(FilterState::zeros(5), x, 2.0, spec);
  CHECK(out.new_state.psi == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(out.new_state.q_vector[0] == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(out.new_state.weights[0] == doctest::Approx(0.1 * 2.0 * 1.15).epsilon(1e-15));

  FilterState low = FilterState::zeros(5);
  low.psi = 0.5 / 0.9;
  const auto floor = tvq_step(low, x, 0.0, spec);
  CHECK(floor.new_state.psi == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(floor.new_state.q_vector == std::vector<double>(5, 1.0));

  FilterState high = FilterState::zeros(5);
  high.psi = 25.0 / 0.9;
  const auto ceiling = tvq_step(high, x, 0.0, spec);
  CHECK(ceiling.new_state.psi == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(ceiling.new_state.q_vector == std::vector<double>(5, 20.0));

  spec.lambda_max = 0.0;
  CHECK(code_of([&] { tvq_step(FilterState::zeros(5), x, 1.0, spec); }) == ErrorCode::kParameter);
  spec.lambda_max = std::nullopt;
  CHECK(code_of([&] { tvq_step(FilterState::zeros(5), x, 1.0, spec); }) == ErrorCode::kParameter);
}

TEST_CASE("enhanced q update examples") {
  auto spec = make(Algorithm::kEqlms, 0.1);
  spec.lambda_max = 1.0;
  const std::vector<double> x{1.0, 0.0, 0.0, 0.0, 0.0};

  const auto big = eqlms_step(FilterState::zeros(5), x, 2.0, spec);
  CHECK(big.e == 2.0);
  CHECK(big.new_state.q_vector == std::vector<double>(5, 1.0));

  const auto small = eqlms_step(FilterState::zeros(5), x, 0.4, spec);
  CHECK(small.new_state.q_vector[0] == doctest::Approx(0.9).epsilon(1e-15));
  for (std::size_t k = 1; k < 5; ++k) CHECK(small.new_state.q_vector[k] == 1.0);

  FilterState s = FilterState::zeros(5);
  s.q_vector.assign(5, 0.8);
  const auto zero = eqlms_step(s, x, 0.0, spec);
  CHECK(zero.new_state.q_vector[0] == doctest::Approx(0.8 * 5.0 / 6.0).epsilon(1e-15));
  CHECK(zero.new_state.q_vector[0] < 0.8);
  double prev_max = 0.8;
  for (int i = 0; i < 200; ++i) s = eqlms_step(s, x, 0.0, spec).new_state;
  for (double q : s.q_vector) {
    CHECK(q > 0.0);
    CHECK(q < prev_max);
  }

  FilterState w = FilterState::zeros(2);
  w.q_vector = {0.5, 2.0};
  auto wide = make(Algorithm::kEqlms, 0.1);
  wide.lambda_max = 0.25;
  const auto first = eqlms_step(w, std::vector<double>{1.0, 1.0}, 1.0, wide);
  CHECK(first.new_state.weights[0] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(first.new_state.weights[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(first.new_state.q_vector[0] == doctest::Approx(3.5 / 3.0).epsilon(1e-15));
  CHECK(first.new_state.q_vector[1] == 0.5);

  spec.lambda_max = -1.0;
  CHECK(code_of([&] { eqlms_step(FilterState::zeros(5), x, 1.0, spec); }) == ErrorCode::kParameter);
}

TEST_CASE("enhanced q-vector stays in (0, 1/lambda] and shifts exactly") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (double lambda : {0.5, 1.0, 2.0, 7.5}) {
    auto spec = make(Algorithm::kEqlms, 0.01);
    spec.lambda_max = lambda;
    FilterState s = FilterState::zeros(5);
    for (auto& q : s.q_vector) q = u(rng);
    for (int i = 0; i < 5000; ++i) {
      std::vector<double> x(5);
      for (auto& v : x) v = 3.0 * g(rng);
      const auto before = s.q_vector;
      s = eqlms_step(s, x, 5.0 * g(rng), spec).new_state;
      for (std::size_t k = 1; k < 5; ++k) REQUIRE(s.q_vector[k] == before[k - 1]);
      REQUIRE(s.q_vector[0] > 0.0);
      REQUIRE(s.q_vector[0] <= 1.0 / lambda + 1e-12);
    }
    for (double q : s.q_vector) CHECK(q <= 1.0 / lambda + 1e-12);
  }
}

TEST_CASE("time-varying q always lies in [1, q_upper]") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g;
  auto spec = make(Algorithm::kTvqlms, 0.02);
  spec.lambda_max = 1.0;
  const double q_upper = 2.0 / (0.02 * 1.0);
  FilterState s = FilterState::zeros(5);
  for (int i = 0; i < 5000; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = g(rng);
    // Occasional outliers drive psi past the upper bound.
    const double d = (i % 97 == 0 ? 200.0 : 1.0) * g(rng);
    s = tvq_step(s, x, d, spec).new_state;
    // Only the q recursion is under test; keep the weights bounded.
    std::fill(s.weights.begin(), s.weights.end(), 0.0);
    REQUIRE(s.q_vector[0] >= 1.0);
    REQUIRE(s.q_vector[0] <= q_upper);
  }
}

TEST_CASE("nlms contracts the error on a re-presented sample") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> mus(0.01, 1.99);
  for (int trial = 0; trial < 1000; ++trial) {
    auto spec = make(Algorithm::kNlms, mus(rng));
    spec.zeta = 1e-6;
    FilterState s = FilterState::zeros(5);
    for (auto& w : s.weights) w = g(rng);
    std::vector<double> x(5);
    for (auto& v : x) v = g(rng);
    const double d = g(rng);
    const auto out = nlms_step(s, x, d, spec);
    const double after = d - predict(out.new_state, x);
    CHECK(std::abs(after) <= std::abs(out.e));
  }
}

TEST_CASE("step is pure and reports e = d - y") {
  auto spec = make(Algorithm::kEqlms, 0.1);
  FilterState s = with_weights({0.1, 0.2, 0.3});
  const FilterState copy = s;
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto out = step(s, x, 0.7, spec);
  CHECK(s.weights == copy.weights);
  CHECK(s.q_vector == copy.q_vector);
  CHECK(s.iteration == copy.iteration);
  CHECK(out.e == 0.7 - out.y);
  CHECK(out.y == predict(s, x));
}

TEST_CASE("spec validation") {
  auto spec = make(Algorithm::kTvqlms, 0.1);
  CHECK_NOTHROW(spec.validate(5));
  spec.beta = 1.0;
  CHECK(code_of([&] { spec.validate(5); }) == ErrorCode::kParameter);
  spec.beta = 0.9;
  spec.gamma = 0.0;
  CHECK(code_of([&] { spec.validate(5); }) == ErrorCode::kParameter);
  auto q = make(Algorithm::kQlms, 0.1);
  q.q_fixed = {1.0, 2.0};
  CHECK(code_of([&] { q.validate(5); }) == ErrorCode::kParameter);
  q.q_fixed = {0.0};
  CHECK(code_of([&] { q.validate(5); }) == ErrorCode::kParameter);
  auto l = make(Algorithm::kLms, 0.0);
  CHECK(code_of([&] { l.validate(5); }) == ErrorCode::kParameter);
  l.mu = 0.1;
  l.zeta = -1.0;
  CHECK(code_of([&] { l.validate(5); }) == ErrorCode::kParameter);
}

TEST_CASE("single steps agree with dense transliterations") {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t m = 5;
  for (Algorithm kind : kAllAlgorithms) {
    CAPTURE(algorithm_name(kind));
    for (int trial = 0; trial < 1000; ++trial) {
      AlgorithmSpec spec;
      spec.kind = kind;
      spec.mu = 0.001 + 0.5 * u(rng);
      spec.zeta = 1e-6 + 1e-3 * u(rng);
      spec.beta = 0.05 + 0.9 * u(rng);
      spec.gamma = 0.01 + 2.0 * u(rng);
      spec.lambda_max = 0.2 + 3.0 * u(rng);
      spec.q_fixed.resize(m);
      for (auto& q : spec.q_fixed) q = 0.1 + 4.0 * u(rng);

      FilterState s = FilterState::zeros(m);
      for (auto& w : s.weights) w = g(rng);
      if (kind == Algorithm::kEqlms) {
        for (auto& q : s.q_vector) q = 0.05 + u(rng);
      }
      s.psi = 5.0 * u(rng);
      std::vector<double> x(m);
      for (auto& v : x) v = 2.0 * g(rng);
      const double d = 3.0 * g(rng);

      oracle::State o{to_eigen(s.weights), to_eigen(s.q_vector), s.psi};
      const oracle::Vec xv = to_eigen(x);
      const oracle::Vec qf = to_eigen(spec.q_fixed);
      const double lambda = *spec.lambda_max;
      switch (kind) {
        case Algorithm::kLms: o = oracle::lms(o, xv, d, spec.mu); break;
        case Algorithm::kNlms: o = oracle::nlms(o, xv, d, spec.mu, spec.zeta); break;
        case Algorithm::kQlms: o = oracle::qlms(o, xv, d, spec.mu, qf); break;
        case Algorithm::kQnlms: o = oracle::qnlms(o, xv, d, spec.mu, qf, spec.zeta); break;
        case Algorithm::kTvqlms: o = oracle::tvqlms(o, xv, d, spec.mu, spec.beta, spec.gamma, lambda); break;
        case Algorithm::kEqlms: o = oracle::eqlms(o, xv, d, spec.mu, lambda); break;
      }
      const auto out = step(s, x, d, spec);
      for (std::size_t k = 0; k < m; ++k) {
        REQUIRE(out.new_state.weights[k] == doctest::Approx(o.w(k)).epsilon(1e-12));
        if (kind == Algorithm::kTvqlms || kind == Algorithm::kEqlms) {
          REQUIRE(out.new_state.q_vector[k] == doctest::Approx(o.q(k)).epsilon(1e-12));
        }
      }
      if (kind == Algorithm::kTvqlms) REQUIRE(out.new_state.psi == doctest::Approx(o.psi).epsilon(1e-12));
    }
  }
}

TEST_CASE("lambda_max of white input matches a full eigendecomposition") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> x(100000);
  for (auto& v : x) v = g(rng);
  const double got = estimate_lambda_max(x, 5);
  CHECK(got == doctest::Approx(1.0).epsilon(0.05));
  // The eigenvalues of white-input R are clustered, which caps what power
  // iteration can resolve; the Rayleigh quotient never overshoots.
  const double exact = oracle::lambda_max(x, 5);
  CHECK(got == doctest::Approx(exact).epsilon(1e-3));
  CHECK(got <= exact * (1.0 + 1e-12));
}

TEST_CASE("lambda_max of correlated input matches a full eigendecomposition") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<double> x(20000);
  double prev = 0.0;
  for (auto& v : x) v = prev = 0.9 * prev + g(rng);
  for (int taps : {2, 5, 8}) {
    CHECK(estimate_lambda_max(x, taps) == doctest::Approx(oracle::lambda_max(x, taps)).epsilon(1e-6));
  }
}

TEST_CASE("lambda_max of a constant sequence") {
  const double c = 1.7;
  const std::size_t n = 1000;
  const std::vector<double> x(n, c);
  const double got = estimate_lambda_max(x, 2);
  // Biased lag-1 estimate is c^2 (N-1)/N, so the eigenvalue is c^2 (2N-1)/N.
  CHECK(got == doctest::Approx(c * c * (2.0 * n - 1.0) / n).epsilon(1e-10));
  CHECK(got == doctest::Approx(oracle::lambda_max(x, 2)).epsilon(1e-10));
  CHECK(std::abs(got - 2.0 * c * c) <= c * c / n + 1e-12);
}

TEST_CASE("lambda_max with one tap is the mean square") {
  const std::vector<double> x{1, -2, 3, 0.5, -1, 2, 2, -3, 1, 4};
  double ms = 0.0;
  for (double v : x) ms += v * v;
  ms /= static_cast<double>(x.size());
  CHECK(estimate_lambda_max(x, 1) == doctest::Approx(ms).epsilon(1e-14));
}

TEST_CASE("lambda_max of an alternating sequence") {
  std::vector<double> x(500);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 == 0 ? 1.0 : -1.0;
  CHECK(estimate_lambda_max(x, 4) == doctest::Approx(oracle::lambda_max(x, 4)).epsilon(1e-8));
}

TEST_CASE("lambda_max error cases") {
  CHECK(code_of([] { estimate_lambda_max(std::vector<double>(49, 1.0), 5); }) == ErrorCode::kDimension);
  CHECK(code_of([] { estimate_lambda_max(std::vector<double>(100, 0.0), 5); }) == ErrorCode::kDegenerate);
}
