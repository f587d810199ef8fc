#ifndef KFPCA_SIMGEN_HPP
#define KFPCA_SIMGEN_HPP

#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kfpca/grid.hpp"
#include "kfpca/rng.hpp"

namespace kfpca {

enum class ScoreDistribution { gaussian, mix_gaussian, ec2, skew_t };

inline std::string_view to_string(ScoreDistribution d) {
  switch (d) {
    case ScoreDistribution::gaussian: return "gaussian";
    case ScoreDistribution::mix_gaussian: return "mix_gaussian";
    case ScoreDistribution::ec2: return "ec2";
    case ScoreDistribution::skew_t: return "skew_t";
  }
  return "?";
}

/// Accepts both `_` and `-` spellings ("skew_t", "skew-t").
inline std::optional<ScoreDistribution> parse_distribution(std::string_view s) {
  std::string name(s);
  for (char& c : name)
    if (c == '-') c = '_';
  if (name == "gaussian") return ScoreDistribution::gaussian;
  if (name == "mix_gaussian") return ScoreDistribution::mix_gaussian;
  if (name == "ec2") return ScoreDistribution::ec2;
  if (name == "skew_t") return ScoreDistribution::skew_t;
  return std::nullopt;
}

inline constexpr const char* kDistributionNames = "gaussian, mix_gaussian, ec2, skew_t";

// ---------------------------------------------------------------------------
// Azzalini skew-t

/// Slant α and degrees of freedom ν of a standard (location 0, scale 1)
/// Azzalini skew-t. `df` may be +inf, which is the skew-normal.
struct SkewTParams {
  double slant;
  double df;
};

struct SkewTMoments {
  double mean;
  double variance;
  double skewness;
  double excess_kurtosis;
};

namespace detail {

inline double delta_from_slant(double slant) { return slant / std::sqrt(1.0 + slant * slant); }

/// E[T] / δ = sqrt(ν/π) Γ((ν−1)/2) / Γ(ν/2), with its ν → ∞ limit sqrt(2/π).
inline double skew_t_b(double df) {
  if (std::isinf(df)) return std::sqrt(2.0 / std::numbers::pi);
  return std::sqrt(df / std::numbers::pi) * boost::math::tgamma_delta_ratio(0.5 * (df - 1.0), 0.5);
}

inline SkewTMoments skew_t_moments_delta(double delta, double df) {
  const double mu = skew_t_b(df) * delta;
  const double mu2 = mu * mu;
  const double d2 = delta * delta;
  if (std::isinf(df)) {
    // Skew-normal.
    const double var = 1.0 - mu2;
    const double skew = 0.5 * (4.0 - std::numbers::pi) * mu2 * mu / std::pow(var, 1.5);
    const double kurt = 2.0 * (std::numbers::pi - 3.0) * mu2 * mu2 / (var * var);
    return {mu, var, skew, kurt};
  }
  const double nu = df;
  const double var = nu / (nu - 2.0) - mu2;
  const double third = mu * (nu * (3.0 - d2) / (nu - 3.0) - 3.0 * nu / (nu - 2.0) + 2.0 * mu2);
  const double fourth = 3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0)) - 4.0 * mu2 * nu * (3.0 - d2) / (nu - 3.0) +
                        6.0 * mu2 * nu / (nu - 2.0) - 3.0 * mu2 * mu2;
  return {mu, var, third / std::pow(var, 1.5), fourth / (var * var) - 3.0};
}

template <typename F>
double bisect_decreasing(F&& f, double lo, double hi) {
  // f(lo) > 0 > f(hi)
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

template <typename F>
double bisect_increasing(F&& f, double lo, double hi) {
  return bisect_decreasing([&](double x) { return -f(x); }, lo, hi);
}

}  // namespace detail

/// Standardized moments of the standard skew-t with the given slant and df (df > 4).
inline SkewTMoments skew_t_moments(SkewTParams p) {
  if (!(p.df > 4.0)) throw DomainError("skew-t kurtosis is finite only for df > 4");
  return detail::skew_t_moments_delta(detail::delta_from_slant(p.slant), p.df);
}

/// Finds (slant, df) whose skewness and excess kurtosis hit the targets.
///
/// For a fixed skewness the solution set is a curve in (δ, ν), δ = α/√(1+α²);
/// along it the kurtosis falls monotonically as δ grows. The inner bisection
/// solves skewness for log(ν − 4) given δ, the outer one solves kurtosis for δ.
inline SkewTParams solve_skew_t_params(double target_skewness, double target_excess_kurtosis) {
  if (!std::isfinite(target_skewness) || !std::isfinite(target_excess_kurtosis))
    throw DomainError("skew-t targets must be finite");
  const double g1 = std::abs(target_skewness);
  const double g2 = target_excess_kurtosis;
  const double sign = target_skewness < 0.0 ? -1.0 : 1.0;

  if (g1 == 0.0) {
    if (g2 < 0.0) throw DomainError("symmetric t laws have excess kurtosis >= 0; feasible region is df > 4");
    if (g2 == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
    return {0.0, 4.0 + 6.0 / g2};
  }

  using detail::skew_t_moments_delta;
  constexpr double log_lo = -40.0;  // ν − 4 ≈ 4e-18
  constexpr double log_hi = 40.0;   // ν ≈ 2e17
  const auto df_of = [](double x) { return 4.0 + std::exp(x); };
  constexpr double delta_max = 1.0 - 1e-15;

  // Largest skewness for any δ is reached as ν → 4 and δ → 1.
  const auto skew_at_df4 = [&](double delta) { return skew_t_moments_delta(delta, 4.0).skewness; };
  if (skew_at_df4(delta_max) <= g1)
    throw DomainError("skewness " + std::to_string(target_skewness) +
                      " is beyond the skew-t family with df > 4 (|skewness| < " +
                      std::to_string(skew_at_df4(delta_max)) + ")");

  const double delta_lo = skew_at_df4(0.0) >= g1
                              ? 0.0
                              : detail::bisect_increasing([&](double d) { return skew_at_df4(d) - g1; }, 0.0, delta_max);
  const auto sn_skew = [&](double d) { return skew_t_moments_delta(d, std::numeric_limits<double>::infinity()).skewness; };
  const double delta_hi =
      sn_skew(delta_max) <= g1 ? delta_max : detail::bisect_increasing([&](double d) { return sn_skew(d) - g1; }, 0.0, delta_max);

  // ν on the skewness level set for a given δ; skewness falls as ν grows.
  const auto level_df = [&](double delta) {
    const auto f = [&](double x) { return skew_t_moments_delta(delta, df_of(x)).skewness - g1; };
    if (f(log_lo) <= 0.0) return df_of(log_lo);
    if (f(log_hi) >= 0.0) return df_of(log_hi);
    return df_of(detail::bisect_decreasing(f, log_lo, log_hi));
  };
  const auto kurt_gap = [&](double delta) {
    return skew_t_moments_delta(delta, level_df(delta)).excess_kurtosis - g2;
  };

  const double inner = delta_lo + 1e-12 * (delta_hi - delta_lo);
  const double outer = delta_hi - 1e-12 * (delta_hi - delta_lo);
  if (kurt_gap(outer) > 0.0)
    throw DomainError("excess kurtosis " + std::to_string(g2) + " is too small for skewness " +
                      std::to_string(target_skewness) + " in the skew-t family (minimum about " +
                      std::to_string(kurt_gap(outer) + g2) + ")");
  if (kurt_gap(inner) < 0.0)
    throw DomainError("excess kurtosis " + std::to_string(g2) + " is too large for skewness " +
                      std::to_string(target_skewness) + " in the skew-t family with df > 4");

  const double delta = detail::bisect_decreasing(kurt_gap, inner, outer);
  const double df = level_df(delta);
  const SkewTMoments m = skew_t_moments_delta(delta, df);
  if (std::abs(m.skewness - g1) > 1e-8 || std::abs(m.excess_kurtosis - g2) > 1e-8)
    throw EstimationError("skew-t moment solve did not reach a 1e-8 residual");
  return {sign * delta / std::sqrt(1.0 - delta * delta), df};
}

/// Targets used by the simulation design and the parameters they solve to.
inline constexpr double kSkewTTargetSkewness = 1.5;
inline constexpr double kSkewTTargetExcessKurtosis = 5.1;
inline constexpr SkewTParams kSkewTParams{3.6733057106176408, 7.1796769832355505};

/// One draw from the standard skew-t: Z / sqrt(V/ν) with Z skew-normal and V ~ χ²_ν.
inline double draw_standard_skew_t(SkewTParams p, Rng& rng) {
  const double delta = detail::delta_from_slant(p.slant);
  std::normal_distribution<double> normal;
  const double z = delta * std::abs(normal(rng)) + std::sqrt(1.0 - delta * delta) * normal(rng);
  if (std::isinf(p.df)) return z;
  std::chi_squared_distribution<double> chi2(p.df);
  return z / std::sqrt(chi2(rng) / p.df);
}

// ---------------------------------------------------------------------------
// Scores and scenarios

/// n i.i.d. scores with mean 0 and variance `lambda` from the chosen law.
inline Vector draw_scores(ScoreDistribution distribution, double lambda, std::size_t n, Rng& rng) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigurationError("score variance must be positive");
  Vector out(static_cast<Eigen::Index>(n));
  const double sd = std::sqrt(lambda);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  std::exponential_distribution<double> expo(1.0);
  switch (distribution) {
    case ScoreDistribution::gaussian:
      for (auto& x : out) x = sd * normal(rng);
      break;
    case ScoreDistribution::mix_gaussian: {
      // Equal mixture of N(±sqrt(λ/2), λ/2).
      const double half = std::sqrt(0.5 * lambda);
      for (auto& x : out) {
        const double centre = coin(rng) ? half : -half;
        x = centre + half * normal(rng);
      }
      break;
    }
    case ScoreDistribution::ec2:
      for (auto& x : out) {
        const double eta = expo(rng);
        const double u = coin(rng) ? 1.0 : -1.0;
        x = sd * eta * u / std::numbers::sqrt2;
      }
      break;
    case ScoreDistribution::skew_t: {
      const SkewTMoments m = skew_t_moments(kSkewTParams);
      const double scale = sd / std::sqrt(m.variance);
      for (auto& x : out) x = scale * (draw_standard_skew_t(kSkewTParams, rng) - m.mean);
      break;
    }
  }
  return out;
}

/// Recipe for one simulation experiment. Defaults follow the reference design.
struct SimulationScenario {
  int case_id = 1;
  ScoreDistribution distribution = ScoreDistribution::gaussian;
  std::size_t n = 100;
  std::size_t d = 51;
  double sigma2 = 0.25;
  std::array<double, 2> lambdas{16.0, 9.0};
  std::size_t runs = 100;
  std::uint64_t seed = 20240101;

  void validate() const {
    if (case_id != 1 && case_id != 2) throw ConfigurationError("case must be 1 or 2");
    if (n < 2) throw ConfigurationError("a scenario needs N >= 2 subjects");
    if (d < 2) throw ConfigurationError("a scenario needs d >= 2 grid points");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw ConfigurationError("sigma2 must be nonnegative");
    for (double l : lambdas)
      if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigurationError("eigenvalues must be nonnegative");
    if (runs < 1) throw ConfigurationError("a scenario needs at least one run");
  }

  friend bool operator==(const SimulationScenario&, const SimulationScenario&) = default;
};

/// The two true eigenfunctions of a case on a grid spanning [0, 10].
///   Case 1: cos(πt/10)/√5, sin(πt/10)/√5
///   Case 2: sin(πt/5)/√5,  cos(πt/5)/√5
inline std::pair<Curve, Curve> true_eigenfunctions(int case_id, const GridPtr& grid) {
  if (std::abs(grid->front()) > 1e-12 || std::abs(grid->back() - 10.0) > 1e-12)
    throw ConfigurationError("true eigenfunctions are defined on a grid spanning [0, 10]");
  const double c = 1.0 / std::sqrt(5.0);
  const double pi = std::numbers::pi;
  switch (case_id) {
    case 1:
      return {Curve::from_function(grid, [&](double t) { return c * std::cos(pi * t / 10.0); }),
              Curve::from_function(grid, [&](double t) { return c * std::sin(pi * t / 10.0); })};
    case 2:
      return {Curve::from_function(grid, [&](double t) { return c * std::sin(pi * t / 5.0); }),
              Curve::from_function(grid, [&](double t) { return c * std::cos(pi * t / 5.0); })};
    default:
      throw ConfigurationError("case must be 1 or 2");
  }
}

struct TruthBundle {
  FunctionalSample sample;  // noisy observations Y_ij
  Matrix true_scores;       // N x 2
  std::vector<Curve> true_eigenfunctions;
  Curve true_mean;
};

/// Y_ij = μ(t_j) + Σ_k ξ_ik φ_k(t_j) + ε_ij with μ ≡ 0 and ε ~ N(0, σ²).
/// Scores of component k come from stream (seed, scores, run, k) and noise
/// from (seed, noise, run), so any run can be regenerated on its own.
inline TruthBundle generate(const SimulationScenario& scenario, std::size_t run_index) {
  scenario.validate();
  if (run_index >= scenario.runs)
    throw ConfigurationError("run index " + std::to_string(run_index) + " out of range (runs = " +
                             std::to_string(scenario.runs) + ")");
  const GridPtr grid = make_regular_grid(0.0, 10.0, scenario.d);
  auto [phi1, phi2] = true_eigenfunctions(scenario.case_id, grid);
  const auto n = static_cast<Eigen::Index>(scenario.n);
  const auto d = static_cast<Eigen::Index>(scenario.d);

  Matrix scores = Matrix::Zero(n, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    if (scenario.lambdas[k] == 0.0) continue;
    Rng rng = make_stream(scenario.seed, {static_cast<std::uint64_t>(StreamPurpose::scores), run_index, k});
    scores.col(static_cast<Eigen::Index>(k)) = draw_scores(scenario.distribution, scenario.lambdas[k], scenario.n, rng);
  }

  Matrix phi(d, 2);
  phi.col(0) = phi1.values();
  phi.col(1) = phi2.values();
  Matrix y = scores * phi.transpose();
  if (scenario.sigma2 > 0.0) {
    Rng rng = make_stream(scenario.seed, {static_cast<std::uint64_t>(StreamPurpose::noise), run_index});
    std::normal_distribution<double> noise(0.0, std::sqrt(scenario.sigma2));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) y(i, j) += noise(rng);
  }
  return TruthBundle{FunctionalSample(grid, std::move(y)), std::move(scores), {std::move(phi1), std::move(phi2)},
                     Curve::zero(grid)};
}

}  // namespace kfpca

#endif  // KFPCA_SIMGEN_HPP
