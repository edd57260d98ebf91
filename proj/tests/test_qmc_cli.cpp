// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqmc/cli.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/expansion.hpp"
#include "hqmc/kernel.hpp"
#include "hqmc/pointset.hpp"
#include "hqmc/qmc.hpp"
#include "hqmc/transform.hpp"

using namespace hqmc;

namespace {

using Vec = std::vector<double>;

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("hqmc_cli_test_" + std::to_string(std::hash<const void*>{}(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("inverse_normal_cdf") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(normal_cdf(1.959964)) == doctest::Approx(1.959964).epsilon(1e-12));
  CHECK(std::abs(inverse_normal_cdf(0.975) - 1.959963984540054) <= 1e-9);
  for (double u : {0x1p-40, 0x1p-10, 0.001, 0.1, 0.3, 0.49}) CHECK(std::abs(inverse_normal_cdf(u) + inverse_normal_cdf(1.0 - u)) <= 1e-12);
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
  CHECK_THROWS_AS(inverse_normal_cdf(std::nan("")), DomainError);
}

TEST_CASE("inverse_normal_cdf accuracy against the CDF") {
  // Forward check x = Phi^{-1}(u) through Phi, relative in the tails.
  for (double e = -300.0; e <= -1.0; e += 0.5) {
    const double u = std::pow(10.0, e);
    const double x = inverse_normal_cdf(u);
    CHECK(std::abs(normal_cdf(x) - u) <= 1e-12 * u);
  }
  for (double u = 0.01; u < 1.0; u += 0.01) {
    const double x = inverse_normal_cdf(u);
    CHECK(std::abs(normal_cdf(x) - u) <= 1e-15 + 1e-9 * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
  }
  const double top = inverse_normal_cdf(1.0 - 1e-16);
  CHECK(std::isfinite(top));
  CHECK(top > 8.0);
}

TEST_CASE("Halton-mapped points") {
  const auto one = pointset_halton_mapped(1, 1);
  CHECK(one[0][0] == 0.0);
  const auto p = pointset_halton_mapped(3, 2);
  CHECK(p[0][0] == 0.0);
  CHECK(p[1][0] == doctest::Approx(inverse_normal_cdf(0.25)).epsilon(1e-15));
  CHECK(p[2][0] == doctest::Approx(inverse_normal_cdf(0.75)).epsilon(1e-15));
  CHECK(p[0][1] == doctest::Approx(inverse_normal_cdf(1.0 / 3.0)).epsilon(1e-15));
  CHECK(p[1][1] == doctest::Approx(inverse_normal_cdf(2.0 / 3.0)).epsilon(1e-15));
  CHECK(p[2][1] == doctest::Approx(inverse_normal_cdf(1.0 / 9.0)).epsilon(1e-15));
  CHECK(pointset_halton_mapped(50, 7, 3) == pointset_halton_mapped(50, 7, 3));
  const auto skipped = pointset_halton_mapped(2, 2, 1);
  CHECK(skipped[0][0] == p[1][0]);
  CHECK(skipped[0][1] == p[1][1]);
  CHECK_THROWS_AS(pointset_halton_mapped(4, 65), DimensionError);
  CHECK(radical_inverse(6, 2) == 0.375);
}

TEST_CASE("grid points") {
  const auto g = pointset_grid_mapped(3, 2);
  CHECK(g.size() == 9);
  CHECK(std::abs(g[4][0]) <= 1e-15);
  CHECK(std::abs(g[4][1]) <= 1e-15);
}

TEST_CASE("iid Gaussian points") {
  CHECK(pointset_gaussian_iid(20, 3, 9) == pointset_gaussian_iid(20, 3, 9));
  CHECK_FALSE(pointset_gaussian_iid(20, 3, 9) == pointset_gaussian_iid(20, 3, 10));
  const auto p = pointset_gaussian_iid(1000000, 1, 2024);
  double mean = 0.0;
  for (double x : p.coords()) mean += x;
  mean /= 1e6;
  double var = 0.0;
  for (double x : p.coords()) var += (x - mean) * (x - mean);
  var /= 1e6 - 1.0;
  CHECK(std::abs(mean) <= 4e-3);
  CHECK(std::abs(var - 1.0) <= 6e-3);
}

TEST_CASE("point CSV round trip") {
  const auto p = pointset_halton_mapped(10, 3, 2);
  const auto back = point_set_from_csv(to_csv(p));
  CHECK(back.coords() == p.coords());
  CHECK(back.dim() == 3);
  CHECK_THROWS_AS(point_set_from_csv("# hermite-qmc v1\n"), FormatError);
  CHECK_THROWS_AS(point_set_from_csv("# hermite-qmc v1\n1,2\n3\n"), FormatError);
  CHECK_THROWS_AS(point_set_from_csv("# hermite-qmc v1\n1,inf\n"), FormatError);
}

TEST_CASE("qmc_integrate") {
  const auto p = pointset_gaussian_iid(17, 3, 4);
  CHECK(qmc_integrate([](std::span<const double>) { return 2.5; }, p) == 2.5);
  const PointSet pair(2, {0.3, -1.2, -0.3, 1.2}, Generator::FromFile);
  CHECK(qmc_integrate([](std::span<const double> x) { return x[0]; }, pair) == 0.0);
  // Reference errors from an independent double-precision evaluation of the
  // same point set; the deficit is the unsampled upper tail.
  auto e1 = [](std::span<const double> x) { return std::exp(x[0]); };
  CHECK(qmc_integrate(e1, pointset_halton_mapped(1u << 14, 1)) - std::exp(0.5) ==
        doctest::Approx(-0.0022171071117882413).epsilon(1e-7));
  CHECK(std::abs(qmc_integrate(e1, pointset_halton_mapped(1u << 17, 1)) - std::exp(0.5)) <= 5e-4);
  auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(x[1]); };
  const auto q = pointset_halton_mapped(999, 2);
  CHECK(qmc_integrate(f, q, 1) == qmc_integrate(f, q, 3));
  try {
    qmc_integrate([](std::span<const double> x) { return x[0] > 0.5 ? std::nan("") : 0.0; }, pointset_halton_mapped(8, 1));
    FAIL("expected ComputationError");
  } catch (const ComputationError& e) {
    CHECK(std::string(e.what()).find("point 2") != std::string::npos);
  }
}

TEST_CASE("integration error stays below norm times worst-case error") {
  const auto spec = WeightSpec::exponential({0.5, 0.5}, {0.9, 0.9});
  const Vec w = {0.6, -0.3};
  const double fnorm = std::sqrt(exp_function_norm_squared(spec, w));
  const double exact = std::exp(0.5 * (w[0] * w[0] + w[1] * w[1]));
  auto f = [&](std::span<const double> x) { return std::exp(w[0] * x[0] + w[1] * x[1]); };
  for (std::size_t n : {16u, 64u, 256u}) {
    for (const auto& p : {pointset_halton_mapped(n, 2), pointset_gaussian_iid(n, 2, n)}) {
      const double wce = worst_case_error(spec, p, KernelMode::mehler()).value;
      CHECK(std::abs(qmc_integrate(f, p) - exact) <= fnorm * wce + 1e-6);
    }
  }
}

TEST_CASE("convergence slope for exp(x1)") {
  for (std::size_t d : {1u, 8u}) {
    const auto u = orthogonal_from_construction(construction_matrix(ConstructionKind::BrownianBridge, d));
    auto f = [&](std::span<const double> x) {
      // f_d(Ux) with f_d = exp(d^{-1/2} sum_j y_j).
      double y = 0.0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) y += u(i, j) * x[j];
      return std::exp(y / std::sqrt(double(d)));
    };
    std::vector<double> lx, ly;
    for (int e = 7; e <= 14; ++e) {
      const auto p = pointset_halton_mapped(std::size_t{1} << e, d);
      lx.push_back(std::log(std::ldexp(1.0, e)));
      ly.push_back(std::log(std::abs(qmc_integrate(f, p) - std::exp(0.5))));
    }
    CHECK(slope(lx, ly) <= -0.35);
  }
}

TEST_CASE("forward versus bridge experiment") {
  auto cfg = ExperimentConfig::defaults();
  cfg.dims = {1, 2, 8};
  cfg.ns = {128, 512};
  const auto rows = run_forward_vs_bb_experiment(cfg);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].d == 1);
  CHECK(rows[0].n == 128);
  CHECK(rows[0].norm_forward == doctest::Approx(rows[0].norm_bb).epsilon(1e-12));
  const double bb = std::sqrt(std::exp(1.0) * (1.0 + 2.0 * std::exp(1.0)));
  for (const auto& r : rows) {
    CHECK(r.norm_bb == doctest::Approx(bb).epsilon(1e-10));
    CHECK(r.norm_forward >= r.lower_bound_forward);
    CHECK(r.norm_forward_truncated == doctest::Approx(r.norm_forward).epsilon(1e-6));
    CHECK(r.rms_bound > 0.0);
  }
  const auto& d8 = rows[4];
  CHECK(d8.d == 8);
  CHECK(d8.lower_bound_forward * d8.lower_bound_forward ==
        doctest::Approx(std::exp(1.0) * 40320.0 * 40320.0 / std::pow(8.0, 8)).epsilon(1e-12));
  CHECK(d8.qmc_err_forward >= 0.0);
  CHECK(d8.qmc_err_bb == doctest::Approx(rows[0].qmc_err_forward).epsilon(1e-9));

  const auto back = experiment_rows_from_csv(to_csv(rows));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].d == rows[i].d);
    CHECK(back[i].norm_forward == rows[i].norm_forward);
    CHECK(back[i].qmc_err_bb == rows[i].qmc_err_bb);
    CHECK(back[i].norm_forward_truncated == rows[i].norm_forward_truncated);
  }
  CHECK_THROWS_AS(experiment_rows_from_csv("# hermite-qmc v1\nd,n\n1,2\n"), FormatError);
}

TEST_CASE("truncated exp norm matches explicit coefficients") {
  const auto spec = WeightSpec::polynomial({2.0, 3.0, 2.0}, {1.0, 0.5, 0.25});
  const Vec w = {0.4, -0.2, 0.3};
  for (std::uint64_t m : {0u, 1u, 5u, 12u}) {
    const auto c = analytic_coeffs_exp(w, m);
    CHECK(truncated_exp_norm_squared(spec, w, m) == doctest::Approx(norm(spec, c).squared()).epsilon(1e-12));
  }
}

TEST_CASE("cli rms and norm") {
  TempDir dir;
  const auto spec = dir.write("exp.json", R"({"family":"exponential","omega":[0.5],"gamma":[1]})");
  auto r = run({"rms", "--spec", spec, "--n", "100"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "0.1\n");
  const auto coeffs = dir.write("c.csv", "# hermite-qmc v1\n0,3\n2,4\n");
  r = run({"norm", "--spec", spec, "--coeffs", coeffs});
  CHECK(r.code == kExitOk);
  CHECK(std::stod(r.out) == doctest::Approx(std::sqrt(9.0 + 16.0 * 4.0)).epsilon(1e-12));
  const auto out_path = (dir.path / "rms.txt").string();
  r = run({"--out", out_path, "rms", "--spec", spec, "--n", "4"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(out_path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "0.5");
}

TEST_CASE("cli usage errors") {
  TempDir dir;
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"rms", "--n", "3"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  const auto spec = dir.write("exp.json", R"({"family":"exponential","omega":[0.5],"gamma":[1]})");
  const auto empty = dir.write("p.csv", "");
  const auto r = run({"wce", "--spec", spec, "--points", empty});
  CHECK(r.code == kExitUsage);
  CHECK_FALSE(r.err.empty());
  const auto bad = dir.write("bad.json", R"({"family":"exponential","omega":[1.5],"gamma":[1]})");
  CHECK(run({"rms", "--spec", bad, "--n", "3"}).code == kExitComputation);
  CHECK(run({"rms", "--spec", (dir.path / "missing.json").string(), "--n", "3"}).code != kExitOk);
}

TEST_CASE("cli wce report") {
  TempDir dir;
  const auto spec = dir.write("exp.json", R"({"family":"exponential","omega":[0.5],"gamma":[1]})");
  const auto pts = dir.write("p.csv", "# hermite-qmc v1\n0\n");
  auto r = run({"wce", "--spec", spec, "--points", pts});
  REQUIRE(r.code == kExitOk);
  const auto report = error_report_from_json(r.out);
  CHECK(report.wce == doctest::Approx(std::sqrt(1.0 / std::sqrt(0.75) - 1.0)).epsilon(1e-13));
  r = run({"wce", "--spec", spec, "--generator", "halton", "--n", "32", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  CHECK(error_report_from_csv(r.out).n == 32);
}

TEST_CASE("cli transform concentrates the bridge example") {
  TempDir dir;
  auto r = run({"--max-degree", "5", "coeffs", "--function", "exp-sum", "--dim", "4"});
  REQUIRE(r.code == kExitOk);
  const auto input = dir.write("fwd.csv", r.out);
  r = run({"transform", "--transform", "bb", "--dim", "4", "--coeffs", input});
  REQUIRE(r.code == kExitOk);
  const auto out = coeff_map_from_csv(r.out);
  double off = 0.0;
  for (const auto& [k, v] : out.entries()) {
    if (k[1] + k[2] + k[3] == 0) {
      CHECK(v == doctest::Approx(analytic_coeffs_exp(Vec{1.0}, 5).at(MultiIndex{k[0]})).epsilon(1e-10));
    } else {
      off = std::max(off, std::abs(v));
    }
  }
  CHECK(off <= 1e-12);
  CHECK(run({"transform", "--transform", "bb", "--dim", "3", "--coeffs", input}).code == kExitUsage);
  CHECK(run({"transform", "--transform", "mystery", "--coeffs", input}).code == kExitUsage);
}

TEST_CASE("cli integrate and bounds") {
  auto r = run({"integrate", "--function", "exp-first", "--generator", "halton", "--n", "1024", "--dim", "2"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("mean").get<double>() == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
  CHECK(j.at("abs_error").get<double>() == doctest::Approx(0.018305223023753037).epsilon(1e-7));
  r = run({"bounds", "--family", "polynomial", "--gamma-rule", "pow:2", "--horizon", "1000"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("strong") != std::string::npos);
}

TEST_CASE("cli experiment output parses") {
  const auto r = run({"paper-example", "--dims", "1,4", "--ns", "128,256"});
  REQUIRE(r.code == kExitOk);
  const auto rows = experiment_rows_from_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].d == 4);
}
