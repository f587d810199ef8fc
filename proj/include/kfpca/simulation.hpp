#ifndef KFPCA_SIMULATION_HPP
#define KFPCA_SIMULATION_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "kfpca/metrics.hpp"
#include "kfpca/model.hpp"
#include "kfpca/simgen.hpp"

namespace kfpca {

struct MonteCarloResult {
  SimulationScenario scenario;
  Method method;
  std::vector<RunMetrics> runs;
  MetricSummary summary;
};

/// One row of the results table: a (scenario, method, metric) cell.
struct ResultRow {
  int case_id;
  ScoreDistribution distribution;
  Method method;
  std::string metric;  // IMSE1, IMSE2, MSE1, MSE2
  double mean;
  double sd;
  std::size_t runs;
  std::uint64_t seed;
};

/// Runs every replicate of a scenario and fits each method with two
/// components. Replicates are independent, so they are spread over `threads`
/// workers; results are stored by run index and do not depend on scheduling.
inline std::vector<MonteCarloResult> run_monte_carlo(const SimulationScenario& scenario,
                                                     const std::vector<Method>& methods, std::size_t threads = 1) {
  scenario.validate();
  if (methods.empty()) throw ConfigurationError("no methods selected");
  const std::size_t runs = scenario.runs;
  std::vector<std::vector<RunMetrics>> per_method(methods.size(), std::vector<RunMetrics>(runs));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      try {
        const TruthBundle truth = generate(scenario, r);
        for (std::size_t m = 0; m < methods.size(); ++m) {
          FitConfig config;
          config.method = methods[m];
          config.n_components = ComponentSelection::fixed(2);
          config.seed = scenario.seed;
          per_method[m][r] = evaluate_run(fit(truth.sample, config), truth, scenario, r);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = runs;
      }
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(runs, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<MonteCarloResult> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MetricSummary summary = aggregate(per_method[m]);
    out.push_back({scenario, methods[m], std::move(per_method[m]), std::move(summary)});
  }
  return out;
}

inline std::vector<ResultRow> result_rows(const MonteCarloResult& result) {
  std::vector<ResultRow> rows;
  const auto add = [&](const std::string& name, const Vector& mean, const Vector& sd) {
    for (Eigen::Index k = 0; k < mean.size(); ++k)
      rows.push_back({result.scenario.case_id, result.scenario.distribution, result.method,
                      name + std::to_string(k + 1), mean[k], sd[k], result.summary.runs, result.scenario.seed});
  };
  add("IMSE", result.summary.imse_mean, result.summary.imse_sd);
  add("MSE", result.summary.mse_mean, result.summary.mse_sd);
  return rows;
}

}  // namespace kfpca

#endif  // KFPCA_SIMULATION_HPP
