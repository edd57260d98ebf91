// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "hqmc/errors.hpp"
#include "hqmc/expansion.hpp"
#include "hqmc/hermite.hpp"
#include "hqmc/multi_index.hpp"

using namespace hqmc;

namespace {

// Explicit low-degree polynomials, H_k = He_k / sqrt(k!).
double explicit_hermite(int k, double x) {
  switch (k) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return (x * x - 1.0) / std::sqrt(2.0);
    case 3: return (x * x * x - 3.0 * x) / std::sqrt(6.0);
    case 4: return (x * x * x * x - 6.0 * x * x + 3.0) / std::sqrt(24.0);
    case 5: return (std::pow(x, 5) - 10.0 * std::pow(x, 3) + 15.0 * x) / std::sqrt(120.0);
  }
  return NAN;
}

}  // namespace

TEST_CASE("hermite_eval small values") {
  CHECK(hermite_eval(0, 3.7) == 1.0);
  CHECK(hermite_eval(1, 2.0) == 2.0);
  CHECK(hermite_eval(2, 2.0) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-15));
  for (int k = 0; k <= 5; ++k) {
    for (double x : {-2.5, -1.0, 0.0, 0.3, 1.7, 3.0}) {
      CHECK(hermite_eval(k, x) == doctest::Approx(explicit_hermite(k, x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("hermite_table agrees with hermite_eval") {
  const auto t = hermite_table(30, 1.3);
  REQUIRE(t.size() == 31);
  for (std::uint64_t k = 0; k <= 30; ++k) CHECK(t[k] == hermite_eval(k, 1.3));
}

TEST_CASE("multivariate evaluation") {
  CHECK(hermite_eval_multi(MultiIndex{0, 0}, std::vector<double>{5.1, -2.3}) == 1.0);
  CHECK(hermite_eval_multi(MultiIndex{1, 1}, std::vector<double>{2.0, 3.0}) == 6.0);
  CHECK(std::abs(hermite_eval_multi(MultiIndex{2, 1}, std::vector<double>{1.0, 1.0})) < 1e-15);
  CHECK_THROWS_AS(hermite_eval_multi(MultiIndex{1, 1}, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("derivatives") {
  CHECK(hermite_deriv_multi(MultiIndex{3}, MultiIndex{4}, std::vector<double>{0.5}) == 0.0);
  CHECK(hermite_deriv_multi(MultiIndex{2}, MultiIndex{1}, std::vector<double>{2.0}) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(hermite_deriv_multi(MultiIndex{1, 1}, MultiIndex{1, 1}, std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(hermite_deriv_multi(MultiIndex{1, 1}, MultiIndex{1}, std::vector<double>{0.0, 0.0}),
                  DimensionError);
}

TEST_CASE("derivative matches central differences") {
  const double h = 1e-5;
  const std::vector<double> x0 = {0.37, -0.81, 1.12};
  for_each_up_to_degree(3, 8, [&](const MultiIndex& k) {
    for (std::size_t i = 0; i < 3; ++i) {
      const auto ei = MultiIndex::unit(3, i);
      auto xp = x0, xm = x0;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (hermite_eval_multi(k, xp) - hermite_eval_multi(k, xm)) / (2.0 * h);
      const double exact = hermite_deriv_multi(k, ei, x0);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  });
}

TEST_CASE("generating function") {
  for (double t : {-0.5, -0.2, 0.1, 0.5}) {
    for (double x : {-2.0, -0.7, 0.0, 1.4, 2.0}) {
      const auto table = hermite_table(40, x);
      double sum = 0.0;
      double scale = 1.0;  // t^k / sqrt(k!)
      for (int k = 0; k <= 40; ++k) {
        if (k > 0) scale *= t / std::sqrt(static_cast<double>(k));
        sum += table[k] * scale;
      }
      CHECK(std::abs(sum - std::exp(x * t - 0.5 * t * t)) <= 1e-10);
    }
  }
}

TEST_CASE("orthonormality under 64-node quadrature") {
  const auto rule = gauss_hermite_rule(64);
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.order(); ++q) {
        acc += rule.weights[q] * hermite_eval(i, rule.nodes[q]) * hermite_eval(j, rule.nodes[q]);
      }
      worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("Cramer bound on a coarse grid") {
  const double bound = 1.086435 * std::pow(2.0 * M_PI, -0.25);
  for (double x = -10.0; x <= 10.0; x += 0.05) {
    const auto t = hermite_table(100, x);
    const double damp = std::pow(2.0 * M_PI, -0.25) * std::exp(-0.25 * x * x);
    for (double v : t) CHECK(std::abs(v) * damp <= bound);
  }
}

TEST_CASE("multi-index arithmetic") {
  const MultiIndex a{2, 0, 1};
  const MultiIndex b{1, 0, 1};
  CHECK(a.degree() == 3);
  CHECK(b.dominated_by(a));
  CHECK_FALSE(a.dominated_by(b));
  CHECK(a + b == MultiIndex{3, 0, 2});
  CHECK(a - b == MultiIndex{1, 0, 0});
  CHECK_THROWS_AS(b - a, DomainError);
  CHECK(MultiIndex(3).is_zero());
  CHECK(monomial(MultiIndex{2, 1}, std::vector<double>{3.0, 2.0}) == 18.0);
  CHECK(exact_factorial_product(MultiIndex{3, 2}).value() == 12);
  CHECK(factorial_product(MultiIndex{3, 2}) == 12.0);
  CHECK(!exact_factorial_product(MultiIndex{15, 6}).has_value());
  CHECK(log_factorial_product(MultiIndex{15, 6}) ==
        doctest::Approx(std::lgamma(16.0) + std::lgamma(7.0)).epsilon(1e-14));
  CHECK(to_string(MultiIndex{1, 0, 2}) == "(1,0,2)");
}

TEST_CASE("graded order") {
  GradedOrder less;
  CHECK(less(MultiIndex{0, 0}, MultiIndex{1, 0}));
  CHECK(less(MultiIndex{1, 0}, MultiIndex{0, 1}));
  CHECK(less(MultiIndex{0, 1}, MultiIndex{2, 0}));
  CHECK(less(MultiIndex{2, 0}, MultiIndex{1, 1}));
  CHECK(less(MultiIndex{1, 1}, MultiIndex{0, 2}));
  CHECK_FALSE(less(MultiIndex{1, 1}, MultiIndex{1, 1}));
}

TEST_CASE("enumerate_degree") {
  const auto s1 = enumerate_degree(1, 2);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0] == MultiIndex{0});
  CHECK(s1[1] == MultiIndex{1});
  CHECK(s1[2] == MultiIndex{2});
  const auto s2 = enumerate_degree(2, 1);
  REQUIRE(s2.size() == 3);
  CHECK(s2[0] == MultiIndex{0, 0});
  CHECK(s2[1] == MultiIndex{1, 0});
  CHECK(s2[2] == MultiIndex{0, 1});
  CHECK(enumerate_degree(3, 4).size() == 35);
  CHECK_THROWS_AS(enumerate_degree(20, 40), SizeError);
}

TEST_CASE("enumeration is sorted, complete and counted") {
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::uint64_t m = 0; m <= 7; ++m) {
      const auto set = enumerate_degree(d, m);
      CHECK(set.size() == count_up_to_degree(d, m).value());
      for (std::size_t i = 1; i < set.size(); ++i) CHECK(GradedOrder{}(set[i - 1], set[i]));
      std::uint64_t of_degree = 0;
      for (const auto& k : set) of_degree += k.degree() == m;
      CHECK(of_degree == count_of_degree(d, m).value());
    }
  }
}

TEST_CASE("s_multiplicity examples and brute force") {
  CHECK(s_multiplicity(MultiIndex{2, 0}).exact.value() == 1);
  CHECK(s_multiplicity(MultiIndex{1, 1}).exact.value() == 2);
  CHECK(s_multiplicity(MultiIndex{2, 1, 1}).exact.value() == 12);
  for (std::size_t d = 1; d <= 4; ++d) {
    for (std::size_t m = 0; m <= 6; ++m) {
      std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
      std::vector<std::size_t> beta(m, 0);
      while (true) {
        std::vector<std::uint32_t> k(d, 0);
        for (auto b : beta) ++k[b];
        ++counts[k];
        std::size_t pos = 0;
        while (pos < m && ++beta[pos] == d) beta[pos++] = 0;
        if (pos == m) break;
      }
      for (const auto& [k, c] : counts) {
        const auto mult = s_multiplicity(MultiIndex(k));
        CHECK(mult.exact.value() == c);
        CHECK(mult.value == static_cast<double>(c));
      }
    }
  }
}

TEST_CASE("s_multiplicity above the exact limit") {
  const auto m = s_multiplicity(MultiIndex{12, 12});
  CHECK_FALSE(m.exact.has_value());
  CHECK(m.value == doctest::Approx(2704156.0).epsilon(1e-10));
}
