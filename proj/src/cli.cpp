// SPDX-License-Identifier: Apache-2.0
#include "hqmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/expansion.hpp"
#include "hqmc/kernel.hpp"
#include "hqmc/parallel.hpp"
#include "hqmc/pointset.hpp"
#include "hqmc/qmc.hpp"
#include "hqmc/transform.hpp"
#include "hqmc/weights.hpp"

namespace hqmc {

namespace {

struct Globals {
  std::string out_path;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_degree;
  std::size_t quad_order = 20;
  int threads = 1;
};

struct PointOptions {
  std::string points_path;
  std::string generator = "halton";
  std::size_t n = 1024;
  std::size_t dim = 0;
  std::uint64_t skip = 0;
  std::size_t per_dim = 0;
};

// Built-in integrands exp(w^T x) with known mean e^{w.w/2}.
std::vector<double> builtin_direction(const std::string& id, std::size_t d) {
  if (d == 0) throw DimensionError("--dim is required for built-in functions");
  if (id == "exp-sum") return std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d)));
  if (id == "exp-first") {
    std::vector<double> w(d, 0.0);
    w[0] = 1.0;
    return w;
  }
  throw DimensionError("unknown function '" + id + "' (expected exp-sum or exp-first)");
}

OrthoMatrix parse_transform(const std::string& flag, std::size_t d, const CoeffMap* coeffs,
                            std::string& note) {
  if (flag == "identity") return OrthoMatrix::identity(d);
  if (flag == "bb") {
    return orthogonal_from_construction(construction_matrix(ConstructionKind::BrownianBridge, d));
  }
  if (flag == "pca") return orthogonal_from_construction(construction_matrix(ConstructionKind::PCA, d));
  if (flag == "householder") {
    if (coeffs == nullptr) throw DimensionError("--transform householder needs --coeffs");
    auto reg = regression_transform(*coeffs);
    note = "linear-part=" + to_string(reg.source);
    return std::move(reg.u);
  }
  if (flag.rfind("file:", 0) == 0) {
    auto u = load_ortho_matrix(flag.substr(5));
    if (u.dim() != d) {
      throw DimensionError("transform file has dimension " + std::to_string(u.dim()) + ", expected " +
                           std::to_string(d));
    }
    return u;
  }
  throw DimensionError("unknown --transform '" + flag + "' (identity|bb|pca|householder|file:<path>)");
}

PointSet make_points(const PointOptions& p, std::uint64_t seed) {
  if (!p.points_path.empty()) return load_point_set(p.points_path);
  if (p.dim == 0) throw DimensionError("--dim is required unless --points is given");
  if (p.generator == "halton") return pointset_halton_mapped(p.n, p.dim, p.skip);
  if (p.generator == "iid") return pointset_gaussian_iid(p.n, p.dim, seed);
  if (p.generator == "grid") return pointset_grid_mapped(p.per_dim ? p.per_dim : p.n, p.dim);
  throw DimensionError("unknown --generator '" + p.generator + "' (halton|iid|grid)");
}

void add_point_options(CLI::App* sub, PointOptions& p, bool allow_file) {
  if (allow_file) sub->add_option("--points", p.points_path, "Point CSV file");
  sub->add_option("--generator", p.generator, "halton | iid | grid")->capture_default_str();
  sub->add_option("--n", p.n, "Number of points")->capture_default_str();
  sub->add_option("--dim", p.dim, "Dimension (wce: defaults to the spec dimension)");
  sub->add_option("--skip", p.skip, "Halton sequence offset")->capture_default_str();
  sub->add_option("--per-dim", p.per_dim, "Grid points per coordinate (default --n)");
}

// "const:c", "pow:p[:c]" for c j^{-p}, "geom:q[:c]" for c q^{j-1}.
std::function<double(std::size_t)> parse_rule(const std::string& text) {
  std::vector<double> args;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ':')) args.push_back(csv::parse_double(item));
  }
  const auto need = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw FormatError("malformed rule '" + text + "'");
  };
  if (name == "const") {
    need(1, 1);
    const double c = args[0];
    return [c](std::size_t) { return c; };
  }
  if (name == "pow") {
    need(1, 2);
    const double p = args[0];
    const double c = args.size() > 1 ? args[1] : 1.0;
    return [p, c](std::size_t j) { return c * std::pow(static_cast<double>(j), -p); };
  }
  if (name == "geom") {
    need(1, 2);
    const double q = args[0];
    const double c = args.size() > 1 ? args[1] : 1.0;
    return [q, c](std::size_t j) { return c * std::pow(q, static_cast<double>(j) - 1.0); };
  }
  throw FormatError("unknown rule '" + text + "' (const:c | pow:p[:c] | geom:q[:c])");
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(csv::parse_unsigned(item)));
  if (out.empty()) throw FormatError("empty list '" + text + "'");
  return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Hermite spaces: norms, QMC error analysis and orthogonal transforms", "hqmc"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.threads = default_thread_count();
  app.add_option("--out", g.out_path, "Write the result to this file instead of stdout");
  app.add_option("--seed", g.seed, "Seed for random generators")->capture_default_str();
  app.add_option("--max-degree", g.max_degree, "Total-degree truncation");
  app.add_option("--quad-order", g.quad_order, "Gauss-Hermite nodes per coordinate")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default $HQMC_THREADS or 1)");

  std::function<std::string()> action;

  // norm
  std::string spec_path, coeffs_path;
  auto* norm_cmd = app.add_subcommand("norm", "Weighted norm of a coefficient file");
  norm_cmd->add_option("--spec", spec_path, "Weight spec JSON")->required();
  norm_cmd->add_option("--coeffs", coeffs_path, "Coefficient CSV")->required();
  norm_cmd->callback([&] {
    action = [&] {
      const auto spec = load_weight_spec(spec_path);
      const auto coeffs = load_coeff_map(coeffs_path);
      const auto r = norm(spec, coeffs);
      if (r.overflow) {
        err << "norm overflow at index " << (r.offending ? to_string(*r.offending) : "?") << '\n';
      }
      return csv::format_double(r.value) + '\n';
    };
  });

  // rms
  std::uint64_t rms_n = 0;
  auto* rms_cmd = app.add_subcommand("rms", "Gaussian root-mean-square worst-case error");
  rms_cmd->add_option("--spec", spec_path, "Weight spec JSON")->required();
  rms_cmd->add_option("--n", rms_n, "Number of points")->required();
  rms_cmd->callback([&] {
    action = [&] { return csv::format_double(rms_error(load_weight_spec(spec_path), rms_n)) + '\n'; };
  });

  // wce
  PointOptions wce_points;
  std::string kernel_flag, format = "json";
  auto* wce_cmd = app.add_subcommand("wce", "Worst-case error report for a point set");
  wce_cmd->add_option("--spec", spec_path, "Weight spec JSON")->required();
  add_point_options(wce_cmd, wce_points, true);
  wce_cmd->add_option("--kernel", kernel_flag, "mehler | series (default by family)");
  wce_cmd->add_option("--format", format, "json | csv")->capture_default_str();
  wce_cmd->callback([&] {
    action = [&] {
      const auto spec = load_weight_spec(spec_path);
      if (wce_points.dim == 0) wce_points.dim = spec.dim();
      const auto points = make_points(wce_points, g.seed);
      KernelMode mode = KernelMode::default_for(spec);
      if (kernel_flag == "mehler") {
        mode = KernelMode::mehler();
      } else if (kernel_flag == "series") {
        mode = KernelMode::series(g.max_degree.value_or(kDefaultKernelDegree));
      } else if (!kernel_flag.empty()) {
        throw DimensionError("unknown --kernel '" + kernel_flag + "'");
      }
      const auto report = make_error_report(spec, points, mode, g.threads);
      if (format == "csv") return to_csv(report);
      if (format != "json") throw DimensionError("unknown --format '" + format + "'");
      return to_json(report) + '\n';
    };
  });

  // bounds
  std::string family = "polynomial", gamma_rule = "pow:2";
  std::optional<double> decay;
  std::size_t horizon = 1000;
  double epsilon = 0.1;
  auto* bounds_cmd = app.add_subcommand("bounds", "Finite-horizon tractability diagnostics");
  bounds_cmd->add_option("--family", family, "polynomial | exponential")->capture_default_str();
  bounds_cmd->add_option("--gamma-rule", gamma_rule, "const:c | pow:p[:c] | geom:q[:c]")->capture_default_str();
  bounds_cmd->add_option("--decay", decay, "alpha (polynomial, default 2) or omega (exponential, default 0.5)");
  bounds_cmd->add_option("--horizon", horizon, "Largest dimension examined")->capture_default_str();
  bounds_cmd->add_option("--epsilon", epsilon, "Target error")->capture_default_str();
  bounds_cmd->callback([&] {
    action = [&] {
      SequenceRules rules;
      if (family == "polynomial") {
        rules.family = WeightFamily::Polynomial;
      } else if (family == "exponential") {
        rules.family = WeightFamily::Exponential;
      } else {
        throw DimensionError("unknown --family '" + family + "'");
      }
      rules.gamma = parse_rule(gamma_rule);
      const double p = decay.value_or(rules.family == WeightFamily::Polynomial ? 2.0 : 0.5);
      rules.decay = [p](std::size_t) { return p; };
      return to_json(tractability_report(rules, horizon, epsilon)) + '\n';
    };
  });

  // coeffs
  std::string function_id = "exp-sum", method = "analytic";
  std::size_t coeff_dim = 0;
  auto* coeffs_cmd = app.add_subcommand("coeffs", "Hermite coefficients of a built-in function");
  coeffs_cmd->add_option("--function", function_id, "exp-sum | exp-first")->capture_default_str();
  coeffs_cmd->add_option("--dim", coeff_dim, "Dimension")->required();
  coeffs_cmd->add_option("--method", method, "analytic | quadrature")->capture_default_str();
  coeffs_cmd->callback([&] {
    action = [&] {
      const auto w = builtin_direction(function_id, coeff_dim);
      const std::uint64_t m = g.max_degree.value_or(6);
      if (method == "analytic") return to_csv(analytic_coeffs_exp(w, m));
      if (method != "quadrature") throw DimensionError("unknown --method '" + method + "'");
      const ScalarField f = [w](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
        return std::exp(s);
      };
      return to_csv(estimate_coeffs(f, coeff_dim, m, g.quad_order, g.threads));
    };
  });

  // transform
  std::string transform_flag;
  std::size_t transform_dim = 0;
  auto* transform_cmd = app.add_subcommand("transform", "Coefficients of x -> f(Ux)");
  transform_cmd->add_option("--coeffs", coeffs_path, "Coefficient CSV")->required();
  transform_cmd->add_option("--transform", transform_flag, "identity | bb | pca | householder | file:<path>")
      ->required();
  transform_cmd->add_option("--dim", transform_dim, "Expected dimension");
  transform_cmd->callback([&] {
    action = [&] {
      auto coeffs = load_coeff_map(coeffs_path);
      if (transform_dim != 0 && transform_dim != coeffs.dim()) {
        throw DimensionError("--dim " + std::to_string(transform_dim) + " but coefficients have dimension " +
                             std::to_string(coeffs.dim()));
      }
      if (g.max_degree) {
        CoeffMap::Storage kept;
        for (const auto& [k, v] : coeffs.entries()) {
          if (k.degree() <= *g.max_degree) kept.emplace(k, v);
        }
        coeffs = CoeffMap(coeffs.dim(), std::move(kept), coeffs.provenance());
      }
      std::string note;
      const auto u = parse_transform(transform_flag, coeffs.dim(), &coeffs, note);
      const auto result = apply_transform(u, coeffs, coeffs.max_degree(), g.threads);
      std::string text = to_csv(result);
      const auto eol = text.find('\n');
      std::string meta = "# transform=" + transform_flag + '\n';
      if (!note.empty()) meta += "# " + note + '\n';
      text.insert(eol + 1, meta);
      return text;
    };
  });

  // integrate
  PointOptions int_points;
  std::string int_function, int_coeffs, int_transform = "identity";
  auto* integrate_cmd = app.add_subcommand("integrate", "QMC estimate of a built-in or expanded function");
  integrate_cmd->add_option("--function", int_function, "exp-sum | exp-first");
  integrate_cmd->add_option("--coeffs", int_coeffs, "Coefficient CSV to integrate instead");
  integrate_cmd->add_option("--transform", int_transform, "Integrate x -> f(Ux)")->capture_default_str();
  add_point_options(integrate_cmd, int_points, true);
  integrate_cmd->callback([&] {
    action = [&] {
      if (int_function.empty() == int_coeffs.empty()) {
        throw DimensionError("give exactly one of --function and --coeffs");
      }
      const auto points = make_points(int_points, g.seed);
      const std::size_t d = points.dim();
      ScalarField f;
      double mean = 0.0;
      std::optional<CoeffMap> coeffs;
      if (!int_function.empty()) {
        const auto w = builtin_direction(int_function, d);
        f = [w](std::span<const double> x) {
          double s = 0.0;
          for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
          return std::exp(s);
        };
        double ww = 0.0;
        for (double v : w) ww += v * v;
        mean = std::exp(0.5 * ww);
      } else {
        coeffs = load_coeff_map(int_coeffs);
        if (coeffs->dim() != d) throw DimensionError("coefficient and point dimensions differ");
        const CoeffMap& c = *coeffs;
        f = [&c](std::span<const double> x) { return eval_expansion(c, x); };
        mean = c.at(MultiIndex(d));
      }
      std::string note;
      const auto u = parse_transform(int_transform, d, coeffs ? &*coeffs : nullptr, note);
      const Eigen::MatrixXd um = u.matrix();
      const ScalarField fu = [&f, &um](std::span<const double> x) {
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        const Eigen::VectorXd y = um * xv;
        return f(std::span<const double>(y.data(), x.size()));
      };
      const double estimate = qmc_integrate(fu, points, g.threads);
      nlohmann::ordered_json j;
      j["estimate"] = estimate;
      j["mean"] = mean;
      j["abs_error"] = std::abs(estimate - mean);
      j["n"] = points.size();
      j["d"] = d;
      j["transform"] = int_transform;
      return j.dump(2) + '\n';
    };
  });

  // forward vs bridge experiment
  std::string dims_list, ns_list;
  std::uint64_t exp_skip = 0;
  auto* example_cmd = app.add_subcommand("paper-example",
                                         "Forward vs Brownian bridge on exp(d^{-1/2} sum x_j)");
  example_cmd->add_option("--dims", dims_list, "Comma-separated dimensions (default 1,2,4,...,64)");
  example_cmd->add_option("--ns", ns_list, "Comma-separated point counts (default 2^7..2^14)");
  example_cmd->add_option("--skip", exp_skip, "Halton sequence offset")->capture_default_str();
  example_cmd->callback([&] {
    action = [&] {
      auto config = ExperimentConfig::defaults();
      if (!dims_list.empty()) config.dims = parse_list<std::size_t>(dims_list);
      if (!ns_list.empty()) config.ns = parse_list<std::uint64_t>(ns_list);
      if (g.max_degree) config.truncation_degree = *g.max_degree;
      config.skip = exp_skip;
      config.threads = g.threads;
      return to_csv(run_forward_vs_bb_experiment(config));
    };
  });

  // points
  PointOptions gen_points;
  auto* points_cmd = app.add_subcommand("points", "Generate a point set CSV");
  add_point_options(points_cmd, gen_points, false);
  points_cmd->callback([&] { action = [&] { return to_csv(make_points(gen_points, g.seed)); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g.threads < 1) throw DimensionError("--threads must be positive");
    const std::string text = action();
    if (g.out_path.empty()) {
      out << text;
    } else {
      csv::write_file(g.out_path, text);
    }
    return kExitOk;
  } catch (const FormatError& e) {
    err << "hqmc: input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "hqmc: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "hqmc: error: " << e.what() << '\n';
    return kExitComputation;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace hqmc
