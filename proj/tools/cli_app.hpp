#ifndef KFPCA_TOOLS_CLI_APP_HPP
#define KFPCA_TOOLS_CLI_APP_HPP

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kfpca/kfpca.hpp"
#include "kfpca/scenario_io.hpp"

namespace kfpca::cli {

enum ExitCode : int { ok = 0, input_error = 2, numerical_error = 3 };

namespace detail {

inline std::size_t thread_count() {
  if (const char* env = std::getenv("KFPCA_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

/// "3" is a component count; "0.95" is an FVE threshold.
inline ComponentSelection parse_ncomp(const std::string& text) {
  if (text.find_first_of(".eE") == std::string::npos) {
    std::size_t pos = 0;
    const long n = std::stol(text, &pos);
    if (pos != text.size() || n < 1) throw ConfigurationError("--ncomp must be a positive integer or a fraction");
    return ComponentSelection::fixed(static_cast<std::size_t>(n));
  }
  std::size_t pos = 0;
  const double f = std::stod(text, &pos);
  if (pos != text.size()) throw ConfigurationError("--ncomp must be a positive integer or a fraction");
  return ComponentSelection::fve(f);
}

inline Bandwidth parse_bandwidth(const std::string& text) {
  if (text == "auto") return Bandwidth::automatic();
  std::size_t pos = 0;
  double h = 0.0;
  try {
    h = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || pos == 0) throw ConfigurationError("bandwidth must be a positive number or 'auto'");
  return Bandwidth::fixed(h);
}

inline std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  for (auto cell : csv::split(text)) {
    double v;
    if (!csv::parse_double(cell, v) || v < 2 || v != std::floor(v))
      throw InputError("--sizes must be a comma-separated list of integers >= 2");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.size() < 3) throw InputError("--sizes needs at least 3 sample sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw InputError("--sizes must be increasing");
  return sizes;
}

inline std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> methods;
  for (auto cell : csv::split(text)) {
    auto m = parse_method(cell);
    if (!m) throw ConfigurationError("unknown method '" + std::string(cell) + "' (valid: kfpca, cov)");
    methods.push_back(*m);
  }
  if (methods.empty()) throw ConfigurationError("--methods is empty");
  return methods;
}

/// Scenario flags shared by simulate, rate and generate.
struct ScenarioFlags {
  int case_id = 1;
  std::string dist = "gaussian";
  std::size_t n = 100;
  std::size_t grid = 51;
  double sigma2 = 0.25;
  double lambda1 = 16.0;
  double lambda2 = 9.0;
  std::size_t runs = 100;
  std::uint64_t seed = SimulationScenario{}.seed;
  std::string scenario_file;

  void add_to(CLI::App& app, bool with_runs) {
    app.add_option("--scenario", scenario_file, "JSON scenario file; explicit flags override its fields");
    app.add_option("--case", case_id, "eigenfunction case (1 or 2)");
    app.add_option("--dist", dist, std::string("score distribution: ") + kDistributionNames);
    app.add_option("--n", n, "subjects per sample");
    app.add_option("--grid", grid, "grid points on [0, 10]");
    app.add_option("--sigma2", sigma2, "measurement error variance");
    app.add_option("--lambda1", lambda1, "first eigenvalue");
    app.add_option("--lambda2", lambda2, "second eigenvalue");
    if (with_runs) app.add_option("--runs", runs, "Monte Carlo runs");
    app.add_option("--seed", seed, "master seed");
  }

  SimulationScenario resolve(const CLI::App& app) const {
    SimulationScenario s;
    if (!scenario_file.empty()) {
      std::ifstream in(scenario_file);
      if (!in) throw InputError(scenario_file + ": cannot open file");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw InputError(scenario_file + ": " + e.what());
      }
      s = scenario_from_json(j);
    }
    const auto set = [&](const char* flag) { return app.count(flag) > 0 || scenario_file.empty(); };
    if (set("--case")) s.case_id = case_id;
    if (set("--dist")) {
      auto d = parse_distribution(dist);
      if (!d) throw ConfigurationError("unknown distribution '" + dist + "' (valid: " + kDistributionNames + ")");
      s.distribution = *d;
    }
    if (set("--n")) s.n = n;
    if (set("--grid")) s.d = grid;
    if (set("--sigma2")) s.sigma2 = sigma2;
    if (set("--lambda1")) s.lambdas[0] = lambda1;
    if (set("--lambda2")) s.lambdas[1] = lambda2;
    if (app.get_option_no_throw("--runs") && set("--runs")) s.runs = runs;
    if (set("--seed")) s.seed = seed;
    s.validate();
    return s;
  }
};

}  // namespace detail

/// Runs the command-line tool with `args` (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Kendall's tau functional principal component analysis"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to a dataset CSV");
  std::string fit_input, fit_out, fit_method = "kfpca", fit_ncomp = "0.95", fit_pre_bw = "auto", fit_eig_bw = "auto";
  bool fit_presmooth = false, fit_eigen_smooth = false;
  double fit_tol = 1e-12;
  fit_cmd->add_option("input", fit_input, "dataset CSV")->required();
  fit_cmd->add_option("--method", fit_method, "kfpca or cov");
  fit_cmd->add_option("--ncomp", fit_ncomp, "component count, or FVE threshold in (0, 1)");
  fit_cmd->add_flag("--presmooth", fit_presmooth, "smooth each curve before estimation");
  fit_cmd->add_option("--presmooth-bandwidth", fit_pre_bw, "bandwidth or 'auto'");
  fit_cmd->add_flag("--eigen-smooth", fit_eigen_smooth, "smooth the eigenfunctions");
  fit_cmd->add_option("--eigen-bandwidth", fit_eig_bw, "bandwidth or 'auto'");
  fit_cmd->add_option("--degenerate-tol", fit_tol, "relative tolerance for identical curve pairs");
  fit_cmd->add_option("--out", fit_out, "model JSON path")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo scenario and write a results table");
  detail::ScenarioFlags sim_flags;
  std::string sim_methods = "kfpca,cov", sim_out;
  bool sim_append = false;
  sim_flags.add_to(*sim_cmd, true);
  sim_cmd->add_option("--methods", sim_methods, "comma-separated methods");
  sim_cmd->add_option("--out", sim_out, "results CSV path")->required();
  sim_cmd->add_flag("--append", sim_append, "append rows to an existing results table");

  // mean-band
  auto* band_cmd = app.add_subcommand("mean-band", "bootstrap confidence band for the mean curve");
  std::string band_input, band_out;
  double band_level = 0.9;
  std::size_t band_reps = 1000;
  std::uint64_t band_seed = 1;
  band_cmd->add_option("input", band_input, "dataset CSV")->required();
  band_cmd->add_option("--level", band_level, "confidence level in (0, 1)");
  band_cmd->add_option("--reps", band_reps, "bootstrap replicates (>= 100)");
  band_cmd->add_option("--seed", band_seed, "bootstrap seed");
  band_cmd->add_option("--out", band_out, "band CSV path")->required();

  // rate
  auto* rate_cmd = app.add_subcommand("rate", "empirical sup-norm convergence rate of the Kendall's tau estimate");
  detail::ScenarioFlags rate_flags;
  std::string rate_sizes = "50,100,200,400", rate_out;
  std::size_t rate_reps = 20;
  rate_flags.add_to(*rate_cmd, false);
  rate_cmd->add_option("--sizes", rate_sizes, "comma-separated increasing sample sizes");
  rate_cmd->add_option("--reps", rate_reps, "replicates per size");
  rate_cmd->add_option("--out", rate_out, "rate CSV path")->required();

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "write one simulated sample as a dataset CSV");
  detail::ScenarioFlags gen_flags;
  std::size_t gen_run = 0;
  std::string gen_out;
  gen_flags.add_to(*gen_cmd, true);
  gen_cmd->add_option("--run", gen_run, "run index within the scenario");
  gen_cmd->add_option("--out", gen_out, "dataset CSV path")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    if (*fit_cmd) {
      FunctionalSample sample = read_dataset(fit_input);
      FitConfig config;
      try {
        auto method = parse_method(fit_method);
        if (!method) throw ConfigurationError("unknown method '" + fit_method + "' (valid: kfpca, cov)");
        config.method = *method;
        config.n_components = detail::parse_ncomp(fit_ncomp);
        config.presmooth = fit_presmooth;
        config.presmooth_bandwidth = detail::parse_bandwidth(fit_pre_bw);
        config.eigen_smooth = fit_eigen_smooth;
        config.eigen_bandwidth = detail::parse_bandwidth(fit_eig_bw);
        config.degenerate_tol = fit_tol;
      } catch (const std::invalid_argument&) {
        throw ConfigurationError("--ncomp must be a positive integer or a fraction");
      }
      std::optional<FpcaModel> fitted;
      try {
        fitted.emplace(fit(sample, config));
      } catch (const Error& e) {
        err << "fit failed: " << e.what() << '\n';
        return numerical_error;
      }
      const FpcaModel& model = *fitted;
      csv::atomic_write(fit_out, serialize_model(model).dump(1) + "\n");
      out << "method: " << to_string(model.method()) << '\n'
          << "K: " << model.components() << '\n'
          << "FVE: " << std::setprecision(6) << model.fve << '\n'
          << "component_variances:";
      for (Eigen::Index k = 0; k < model.component_variances.size(); ++k) out << ' ' << model.component_variances[k];
      out << '\n';
      return ok;
    }

    if (*sim_cmd) {
      const SimulationScenario scenario = sim_flags.resolve(*sim_cmd);
      const std::vector<Method> methods = detail::parse_methods(sim_methods);
      std::vector<ResultRow> rows;
      for (const auto& result : run_monte_carlo(scenario, methods, detail::thread_count())) {
        auto r = result_rows(result);
        rows.insert(rows.end(), r.begin(), r.end());
      }
      std::string content = format_results(rows);
      if (sim_append && std::filesystem::exists(sim_out)) {
        std::ifstream prev(sim_out);
        read_results(prev, sim_out);  // validates the existing table
        std::ostringstream buf;
        prev.clear();
        prev.seekg(0);
        buf << prev.rdbuf();
        content = buf.str() + format_results(rows, false);
      }
      csv::atomic_write(sim_out, content);
      out << format_results(rows);
      return ok;
    }

    if (*band_cmd) {
      const FunctionalSample sample = read_dataset(band_input);
      const MeanBand band = bootstrap_mean_band(sample, band_level, band_reps, band_seed);
      csv::atomic_write(band_out, format_band(band));
      out << "mean band: level " << band.level << ", " << band.replicates << " replicates, " << sample.points()
          << " grid points\n";
      return ok;
    }

    if (*rate_cmd) {
      const SimulationScenario scenario = rate_flags.resolve(*rate_cmd);
      const std::vector<std::size_t> sizes = detail::parse_sizes(rate_sizes);
      if (rate_reps < 1) throw InputError("--reps must be at least 1");
      const RateDiagnostic rate = convergence_rate(scenario, sizes, rate_reps);
      csv::atomic_write(rate_out, format_rate(rate));
      out << format_rate(rate);
      return ok;
    }

    if (*gen_cmd) {
      const SimulationScenario scenario = gen_flags.resolve(*gen_cmd);
      csv::atomic_write(gen_out, format_dataset(generate(scenario, gen_run).sample));
      return ok;
    }
  } catch (const EstimationError& e) {
    err << e.what() << '\n';
    return numerical_error;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return numerical_error;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  }
  return input_error;
}

}  // namespace kfpca::cli

#endif  // KFPCA_TOOLS_CLI_APP_HPP
