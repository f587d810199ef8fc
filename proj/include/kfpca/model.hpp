#ifndef KFPCA_MODEL_HPP
#define KFPCA_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfpca/eigen_system.hpp"
#include "kfpca/estimators.hpp"
#include "kfpca/smoothing.hpp"

namespace kfpca {

enum class Method { kfpca, cov };

inline std::string_view to_string(Method m) { return m == Method::kfpca ? "kfpca" : "cov"; }

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "kfpca" || s == "kendall") return Method::kfpca;
  if (s == "cov" || s == "fpca" || s == "covariance") return Method::cov;
  return std::nullopt;
}

/// How many components to keep: a fixed count or the smallest count whose
/// share of the decomposed spectrum reaches a threshold.
class ComponentSelection {
 public:
  static ComponentSelection fixed(std::size_t count) {
    if (count < 1) throw ConfigurationError("n_components must be at least 1");
    return ComponentSelection(count, 0.0);
  }
  static ComponentSelection fve(double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigurationError("FVE threshold must lie in (0, 1)");
    return ComponentSelection(0, threshold);
  }

  bool is_fixed() const noexcept { return count_ > 0; }
  std::size_t count() const noexcept { return count_; }
  double threshold() const noexcept { return threshold_; }

  friend bool operator==(const ComponentSelection&, const ComponentSelection&) = default;

 private:
  ComponentSelection(std::size_t count, double threshold) : count_(count), threshold_(threshold) {}
  std::size_t count_;
  double threshold_;
};

struct FitConfig {
  Method method = Method::kfpca;
  ComponentSelection n_components = ComponentSelection::fve(0.95);
  bool presmooth = false;
  Bandwidth presmooth_bandwidth = Bandwidth::automatic();
  bool eigen_smooth = false;
  Bandwidth eigen_bandwidth = Bandwidth::automatic();
  double degenerate_tol = 1e-12;
  std::uint64_t seed = 0;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct FpcaModel {
  GridPtr grid;
  Curve mean;
  std::vector<Curve> eigenfunctions;
  Vector operator_eigenvalues;  // λ̂⋆ for kfpca, covariance eigenvalues for cov
  Vector component_variances;   // sample variance of each score column
  Matrix scores;                // N x K
  double fve;                   // share of the decomposed spectrum carried by the K components
  FitConfig config;

  Method method() const noexcept { return config.method; }
  std::size_t components() const noexcept { return eigenfunctions.size(); }
  std::size_t subjects() const noexcept { return static_cast<std::size_t>(scores.rows()); }
};

namespace detail {

inline FunctionalSample presmooth_sample(const FunctionalSample& sample, Bandwidth bandwidth) {
  Matrix out(sample.values().rows(), sample.values().cols());
  for (std::size_t i = 0; i < sample.subjects(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = smooth_curve(sample.subject(i), bandwidth).values().transpose();
  return FunctionalSample(sample.grid(), std::move(out));
}

inline Vector column_variances(const Matrix& scores) {
  const Eigen::Index n = scores.rows();
  const Matrix centered = scores.rowwise() - scores.colwise().mean();
  return centered.colwise().squaredNorm().transpose() / static_cast<double>(n - 1);
}

}  // namespace detail

/// Fits the functional PCA model: optional per-curve smoothing, mean,
/// kernel estimate, eigenanalysis, score projection and score variances.
inline FpcaModel fit(const FunctionalSample& raw, const FitConfig& config) {
  if (raw.subjects() < 3) throw InputError("fit needs at least 3 curves");
  if (raw.points() < 4) throw InputError("fit needs at least 4 grid points");
  if (!(config.degenerate_tol >= 0.0)) throw ConfigurationError("degenerate_tol must be nonnegative");
  const std::size_t d = raw.points();
  if (config.n_components.is_fixed() && config.n_components.count() > d)
    throw ConfigurationError("requested " + std::to_string(config.n_components.count()) +
                             " components but the grid has only " + std::to_string(d) + " points");

  const FunctionalSample sample = config.presmooth ? detail::presmooth_sample(raw, config.presmooth_bandwidth) : raw;
  const Curve mean = mean_hat(sample);
  const DiscretizedKernel kernel =
      config.method == Method::kfpca ? kendall_tau_hat(sample, config.degenerate_tol) : covariance_hat(sample);
  EigenSystem full = eigen_decompose(kernel, d, EigenOptions{config.eigen_smooth, config.eigen_bandwidth});

  const Vector spectrum = full.operator_eigenvalues.cwiseMax(0.0);
  const double total = spectrum.sum();
  std::size_t k = 0;
  if (config.n_components.is_fixed()) {
    k = config.n_components.count();
  } else {
    if (!(total > 0.0)) throw ConfigurationError("FVE threshold unreachable: the spectrum is identically zero");
    double cumulative = 0.0;
    while (k < d && cumulative < config.n_components.threshold() * total)
      cumulative += spectrum[static_cast<Eigen::Index>(k++)];
    if (cumulative < config.n_components.threshold() * total)
      throw ConfigurationError("FVE threshold unreachable");
  }
  const double explained = total > 0.0 ? spectrum.head(static_cast<Eigen::Index>(k)).sum() / total : 0.0;

  full.eigenfunctions.erase(full.eigenfunctions.begin() + static_cast<std::ptrdiff_t>(k), full.eigenfunctions.end());
  full.operator_eigenvalues.conservativeResize(static_cast<Eigen::Index>(k));
  Matrix scores = project_scores(sample, mean, full, k);
  Vector variances = detail::column_variances(scores);
  return FpcaModel{sample.grid(), mean, std::move(full.eigenfunctions), std::move(full.operator_eigenvalues),
                   std::move(variances), std::move(scores), explained, config};
}

/// μ̂ + Σ_{k<K} ξ̂_ik φ̂_k for subject i.
inline Curve reconstruct(const FpcaModel& model, std::size_t subject, std::size_t components) {
  if (subject >= model.subjects())
    throw InputError("subject index " + std::to_string(subject) + " out of range (N = " +
                     std::to_string(model.subjects()) + ")");
  if (components > model.components())
    throw ConfigurationError("model has only " + std::to_string(model.components()) + " components");
  Vector v = model.mean.values();
  for (std::size_t k = 0; k < components; ++k)
    v += model.scores(static_cast<Eigen::Index>(subject), static_cast<Eigen::Index>(k)) *
         model.eigenfunctions[k].values();
  return Curve(model.grid, std::move(v));
}

}  // namespace kfpca

#endif  // KFPCA_MODEL_HPP
