// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "hqmc/errors.hpp"
#include "hqmc/expansion.hpp"
#include "hqmc/hermite.hpp"
#include "hqmc/pointset.hpp"

using namespace hqmc;

TEST_CASE("small Gauss-Hermite rules") {
  const auto r1 = gauss_hermite_rule(1);
  REQUIRE(r1.order() == 1);
  CHECK(std::abs(r1.nodes[0]) < 1e-15);
  CHECK(r1.weights[0] == doctest::Approx(1.0));

  const auto r2 = gauss_hermite_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(0.5).epsilon(1e-14));

  const auto r3 = gauss_hermite_rule(3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(r3.nodes[1]) < 1e-15);
  CHECK(r3.nodes[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r3.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(r3.weights[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  CHECK_THROWS_AS(gauss_hermite_rule(0), DomainError);
  CHECK_THROWS_AS(gauss_hermite_rule(257), DomainError);
}

TEST_CASE("rules integrate Gaussian moments exactly") {
  for (std::size_t n : {1u, 2u, 5u, 10u, 20u}) {
    const auto rule = gauss_hermite_rule(n);
    CHECK(std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    double double_fact = 1.0;  // (p-1)!! for even p
    for (std::size_t p = 0; p <= 2 * n - 1; ++p) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(p));
      if (p % 2 == 1) {
        CHECK(std::abs(m) <= 1e-12 * std::max(1.0, double_fact * static_cast<double>(p)));
      } else {
        if (p > 0) double_fact *= static_cast<double>(p - 1);
        CHECK(m == doctest::Approx(double_fact).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("quadrature rule CSV") {
  const auto text = to_csv(gauss_hermite_rule(2));
  CHECK(text.rfind("# hermite-qmc v1\nnode,weight\n", 0) == 0);
}

TEST_CASE("estimate_coeffs examples") {
  const auto c = estimate_coeffs([](std::span<const double>) { return 7.0; }, 2, 3, 8);
  CHECK(c.size() == 10);
  CHECK(c.at(MultiIndex{0, 0}) == doctest::Approx(7.0).epsilon(1e-14));
  for (const auto& [k, v] : c.entries()) {
    if (!k.is_zero()) CHECK(std::abs(v) <= 1e-13);
  }
  CHECK(c.provenance() == Provenance::Quadrature);

  const MultiIndex target{2, 1};
  const auto h = estimate_coeffs([&](std::span<const double> x) { return hermite_eval_multi(target, x); }, 2, 4, 8);
  for (const auto& [k, v] : h.entries()) CHECK(std::abs(v - (k == target ? 1.0 : 0.0)) <= 1e-12);

  const auto e = estimate_coeffs([](std::span<const double> x) { return std::exp(x[0]); }, 1, 10, 64);
  double fact = 1.0;
  for (std::uint32_t k = 0; k <= 10; ++k) {
    if (k > 0) fact *= k;
    CHECK(e.at(MultiIndex{k}) == doctest::Approx(std::exp(0.5) / std::sqrt(fact)).epsilon(1e-12));
  }
}

TEST_CASE("estimate_coeffs errors") {
  CHECK_THROWS_AS(estimate_coeffs([](std::span<const double>) { return 1.0; }, 6, 2, 30), SizeError);
  CHECK_THROWS_AS(estimate_coeffs([](std::span<const double> x) { return x[0] > 1.0 ? std::nan("") : 1.0; }, 1, 2, 3),
                  ComputationError);
}

TEST_CASE("polynomial exactness of quadrature estimates") {
  for_each_up_to_degree(3, 4, [&](const MultiIndex& target) {
    const auto c = estimate_coeffs([&](std::span<const double> x) { return hermite_eval_multi(target, x); },
                                   3, 4, 6);
    for (const auto& [k, v] : c.entries()) CHECK(std::abs(v - (k == target ? 1.0 : 0.0)) <= 1e-12);
  });
}

TEST_CASE("quadrature agrees with analytic exp coefficients") {
  const std::vector<std::vector<double>> ws = {{0.8}, {0.3, -0.6}, {0.5, 0.2, -0.4}};
  for (const auto& w : ws) {
    const std::size_t d = w.size();
    const std::uint64_t m = d == 3 ? 6 : 10;
    const std::size_t n = d == 3 ? 40 : 64;
    const auto f = [&](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
      return std::exp(s);
    };
    const auto q = estimate_coeffs(f, d, m, n);
    const auto a = analytic_coeffs_exp(w, m);
    for (const auto& [k, v] : q.entries()) CHECK(std::abs(v - a.at(k)) <= 1e-8);
  }
}

TEST_CASE("thread count does not change estimates") {
  const auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(0.3 * x[1]); };
  const auto a = estimate_coeffs(f, 2, 6, 24, 1);
  const auto b = estimate_coeffs(f, 2, 6, 24, 4);
  CHECK(a.entries() == b.entries());
}

TEST_CASE("analytic exp coefficients") {
  const auto zero = analytic_coeffs_exp(std::vector<double>{0.0, 0.0}, 5);
  CHECK(zero.at(MultiIndex{0, 0}) == 1.0);
  for (const auto& [k, v] : zero.entries()) {
    if (!k.is_zero()) CHECK(v == 0.0);
  }
  for (std::size_t d : {1u, 3u, 5u}) {
    const std::vector<double> w(d, 1.0 / std::sqrt(static_cast<double>(d)));
    const auto c = analytic_coeffs_exp(w, 5);
    for (const auto& [k, v] : c.entries()) {
      const double expected =
          std::exp(0.5) / std::sqrt(factorial_product(k) * std::pow(static_cast<double>(d), k.degree()));
      CHECK(v == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  const auto one = analytic_coeffs_exp(std::vector<double>{1.0}, 30);
  CHECK(std::abs(one.l2_mass() - std::exp(2.0)) <= 1e-10);
}

TEST_CASE("Parseval for exp coefficients") {
  for (const auto& w : {std::vector<double>{1.0}, std::vector<double>{0.6, -0.8},
                        std::vector<double>{0.3, 0.4, -0.5}}) {
    double ww = 0.0;
    for (double v : w) ww += v * v;
    double mass = 0.0;
    visit_exp_coeffs(w, 40, [&](const MultiIndex&, double v) { mass += v * v; });
    CHECK(mass == doctest::Approx(std::exp(2.0 * ww)).epsilon(1e-8));
  }
}

TEST_CASE("analytic polynomial coefficients") {
  CoeffMap::Storage s;
  s.emplace(MultiIndex{2}, std::sqrt(2.0));
  s.emplace(MultiIndex{0}, 1.0);
  const auto sq = analytic_coeffs_polynomial(1, std::move(s));
  for (double x : {-1.5, 0.0, 0.7, 2.0}) {
    CHECK(eval_expansion(sq, std::vector<double>{x}) == doctest::Approx(x * x).epsilon(1e-14));
  }
  CoeffMap::Storage bad;
  bad.emplace(MultiIndex{1}, INFINITY);
  CHECK_THROWS_AS(analytic_coeffs_polynomial(1, std::move(bad)), DomainError);
}

TEST_CASE("eval_expansion") {
  CoeffMap::Storage s;
  s.emplace(MultiIndex{1, 1}, 2.0);
  const CoeffMap c(2, std::move(s));
  CHECK(eval_expansion(c, std::vector<double>{3.0, 4.0}) == 24.0);
  CHECK_THROWS_AS(eval_expansion(c, std::vector<double>{3.0}), DimensionError);
  const auto e = analytic_coeffs_exp(std::vector<double>{1.0}, 40);
  CHECK(std::abs(eval_expansion(e, std::vector<double>{1.0}) - std::exp(1.0)) <= 1e-8);
}

TEST_CASE("expansion round trip for polynomials") {
  // f(x) = 1 + x1 x2^2 - 3 x3^4 x1 + x2^6, degree 6 in d = 3.
  const auto f = [](std::span<const double> x) {
    return 1.0 + x[0] * x[1] * x[1] - 3.0 * std::pow(x[2], 4) * x[0] + std::pow(x[1], 6);
  };
  const auto c = estimate_coeffs(f, 3, 6, 8);
  const auto pts = pointset_gaussian_iid(100, 3, 11);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(eval_expansion(c, pts[i]) == doctest::Approx(f(pts[i])).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("exp norm closed forms") {
  const auto espec = WeightSpec::exponential({0.5, 0.3}, {1.0, 0.5});
  const std::vector<double> w = {0.7, -0.4};
  double truncated = 0.0;
  visit_exp_coeffs(w, 60, [&](const MultiIndex& k, double v) { truncated += v * v / weight_value(espec, k); });
  CHECK(exp_function_norm_squared(espec, w) == doctest::Approx(truncated).epsilon(1e-8));

  const auto pspec = WeightSpec::polynomial({2.0, 3.0}, {1.0, 0.25});
  truncated = 0.0;
  visit_exp_coeffs(w, 60, [&](const MultiIndex& k, double v) { truncated += v * v / weight_value(pspec, k); });
  CHECK(exp_function_norm_squared(pspec, w) == doctest::Approx(truncated).epsilon(1e-8));

  CHECK_THROWS_AS(exp_function_norm_squared(WeightSpec::polynomial({2.5}, {1}), std::vector<double>{1.0}),
                  DomainError);
}

TEST_CASE("coefficient shift identity") {
  const auto x_case = coeff_shift_check([](double x) { return x; }, [](double x) { return 1.0 - x * x; }, 0, 16);
  CHECK(std::abs(x_case.lhs) <= 1e-14);
  CHECK(std::abs(x_case.residual) <= 1e-14);

  const auto sq = coeff_shift_check([](double x) { return x * x; },
                                    [](double x) { return 2.0 * x - x * x * x; }, 1, 16);
  CHECK(std::abs(sq.residual) <= 1e-12);

  const auto ex = coeff_shift_check([](double x) { return std::exp(x); },
                                    [](double x) { return std::exp(x) * (1.0 - x); }, 3, 64);
  CHECK(std::abs(ex.residual) <= 1e-8);
  CHECK(ex.lhs == doctest::Approx(std::exp(0.5) / std::sqrt(6.0)).epsilon(1e-12));
}

TEST_CASE("coefficient shift on x^p e^{sx}") {
  for (int p = 0; p <= 3; ++p) {
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const auto f = [p, s](double x) { return std::pow(x, p) * std::exp(s * x); };
      // D f = f' - x f
      const auto df = [p, s](double x) {
        const double dp = p == 0 ? 0.0 : p * std::pow(x, p - 1);
        return (dp + s * std::pow(x, p) - std::pow(x, p + 1)) * std::exp(s * x);
      };
      for (std::uint64_t k = 0; k <= 10; ++k) {
        CHECK(std::abs(coeff_shift_check(f, df, k, 64).residual) <= 1e-8);
      }
    }
  }
}
