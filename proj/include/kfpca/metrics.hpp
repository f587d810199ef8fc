#ifndef KFPCA_METRICS_HPP
#define KFPCA_METRICS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "kfpca/estimators.hpp"
#include "kfpca/model.hpp"
#include "kfpca/rng.hpp"
#include "kfpca/simgen.hpp"

namespace kfpca {

/// +1 when ⟨estimated, truth⟩ ≥ 0, otherwise −1. Ties keep the input sign.
inline double alignment_sign(const Curve& estimated, const Curve& truth) {
  return inner_product(estimated, truth) < 0.0 ? -1.0 : 1.0;
}

inline Curve align_sign(const Curve& estimated, const Curve& truth) {
  return alignment_sign(estimated, truth) * estimated;
}

/// ‖φ̂ − φ‖² after aligning the sign of φ̂ to φ.
inline double imse(const Curve& estimated, const Curve& truth) {
  return sq_norm(align_sign(estimated, truth) - truth);
}

/// (1/N) Σ (s·ξ̂_i − ξ_i)², where s is the sign applied to the matching eigenfunction.
inline double score_mse(const Vector& estimated, const Vector& truth, double eigenfunction_sign) {
  if (estimated.size() != truth.size())
    throw DimensionError("score vectors have lengths " + std::to_string(estimated.size()) + " and " +
                         std::to_string(truth.size()));
  if (estimated.size() == 0) throw InputError("score vectors are empty");
  return (eigenfunction_sign * estimated - truth).squaredNorm() / static_cast<double>(truth.size());
}

struct RunMetrics {
  Vector imse;
  Vector mse;
  std::size_t run_index = 0;
  SimulationScenario scenario;
  Method method = Method::kfpca;
};

struct MetricSummary {
  Vector imse_mean, imse_sd;
  Vector mse_mean, mse_sd;
  std::size_t runs = 0;
};

/// Mean and sample standard deviation (divisor runs − 1; zero for one run).
inline MetricSummary aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw InputError("cannot aggregate an empty list of runs");
  const RunMetrics& first = runs.front();
  const Eigen::Index k = first.imse.size();
  Vector imse_sum = Vector::Zero(k), mse_sum = Vector::Zero(k);
  for (const RunMetrics& r : runs) {
    if (!(r.scenario == first.scenario) || r.method != first.method)
      throw InputError("runs mix different scenarios or methods");
    if (r.imse.size() != k || r.mse.size() != k) throw DimensionError("runs report different component counts");
    imse_sum += r.imse;
    mse_sum += r.mse;
  }
  const double n = static_cast<double>(runs.size());
  MetricSummary out{imse_sum / n, Vector::Zero(k), mse_sum / n, Vector::Zero(k), runs.size()};
  if (runs.size() > 1) {
    for (const RunMetrics& r : runs) {
      out.imse_sd += (r.imse - out.imse_mean).cwiseAbs2();
      out.mse_sd += (r.mse - out.mse_mean).cwiseAbs2();
    }
    out.imse_sd = (out.imse_sd / (n - 1.0)).cwiseSqrt();
    out.mse_sd = (out.mse_sd / (n - 1.0)).cwiseSqrt();
  }
  return out;
}

/// Evaluates the first `truth.true_eigenfunctions.size()` components of a
/// fitted model. Each eigenfunction and its score column flip together.
inline RunMetrics evaluate_run(const FpcaModel& model, const TruthBundle& truth, const SimulationScenario& scenario,
                               std::size_t run_index) {
  const std::size_t k = truth.true_eigenfunctions.size();
  if (model.components() < k) throw ConfigurationError("model has fewer components than the truth");
  RunMetrics out{Vector(static_cast<Eigen::Index>(k)), Vector(static_cast<Eigen::Index>(k)), run_index, scenario,
                 model.method()};
  for (std::size_t c = 0; c < k; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const double sign = alignment_sign(model.eigenfunctions[c], truth.true_eigenfunctions[c]);
    out.imse[ci] = sq_norm(sign * model.eigenfunctions[c] - truth.true_eigenfunctions[c]);
    out.mse[ci] = score_mse(model.scores.col(ci), truth.true_scores.col(ci), sign);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence rate of the Kendall's tau estimate in the sup norm

struct RateDiagnostic {
  std::vector<std::size_t> sample_sizes;
  std::vector<double> sup_errors;
  double fitted_slope = 0.0;
  std::size_t reference_size = 0;
};

/// Least-squares slope of log(y) on log(x).
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope needs at least two matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// For each sample size, the mean over `reps` noiseless replicates of
/// sup_{s,t} |K̂(s,t) − K_ref(s,t)|, where K_ref is the estimate from one
/// sample of 20 × max(sizes) curves. Reports the log-log slope against N.
inline RateDiagnostic convergence_rate(const SimulationScenario& scenario, const std::vector<std::size_t>& sample_sizes,
                                       std::size_t reps) {
  if (sample_sizes.size() < 3) throw InputError("the rate diagnostic needs at least 3 sample sizes");
  for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
    if (sample_sizes[i] < 2) throw InputError("sample sizes must be at least 2");
    if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) throw InputError("sample sizes must be increasing");
  }
  if (reps < 1) throw InputError("the rate diagnostic needs at least one replicate");

  SimulationScenario noiseless = scenario;
  noiseless.sigma2 = 0.0;

  SimulationScenario reference = noiseless;
  reference.n = 20 * sample_sizes.back();
  reference.runs = 1;
  reference.seed = derive_key(scenario.seed, {static_cast<std::uint64_t>(StreamPurpose::reference)});
  const Matrix k_ref = kendall_tau_hat(generate(reference, 0).sample).matrix();

  RateDiagnostic out;
  out.sample_sizes = sample_sizes;
  out.reference_size = reference.n;
  SimulationScenario rep_scenario = noiseless;
  rep_scenario.runs = reps * sample_sizes.size();
  rep_scenario.seed = derive_key(scenario.seed, {static_cast<std::uint64_t>(StreamPurpose::rate)});
  std::vector<double> sizes;
  for (std::size_t a = 0; a < sample_sizes.size(); ++a) {
    rep_scenario.n = sample_sizes[a];
    double total = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Matrix k_hat = kendall_tau_hat(generate(rep_scenario, a * reps + r).sample).matrix();
      total += (k_hat - k_ref).cwiseAbs().maxCoeff();
    }
    out.sup_errors.push_back(total / static_cast<double>(reps));
    sizes.push_back(static_cast<double>(sample_sizes[a]));
  }
  out.fitted_slope = log_log_slope(sizes, out.sup_errors);
  return out;
}

}  // namespace kfpca

#endif  // KFPCA_METRICS_HPP
