#ifndef KFPCA_ESTIMATORS_HPP
#define KFPCA_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kfpca/grid.hpp"
#include "kfpca/rng.hpp"

namespace kfpca {

enum class KernelKind { kendall, covariance };

inline std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::kendall ? "kendall" : "covariance";
}

/// A bivariate kernel function K(s, t) or Γ(s, t) sampled on grid x grid.
class DiscretizedKernel {
 public:
  DiscretizedKernel(GridPtr grid, Matrix matrix, KernelKind kind)
      : grid_(std::move(grid)), matrix_(std::move(matrix)), kind_(kind) {
    if (!grid_) throw InputError("kernel without a grid");
    const auto d = static_cast<Eigen::Index>(grid_->size());
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw DimensionError("kernel matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    if (!matrix_.allFinite()) throw InputError("kernel matrix must be finite");
  }

  const GridPtr& grid() const noexcept { return grid_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  KernelKind kind() const noexcept { return kind_; }

  /// Σ_j w_j M[j, j], the quadrature trace of the induced integral operator.
  double weighted_trace() const { return grid_->weights().dot(matrix_.diagonal()); }

  /// max |M − Mᵀ| relative to max |M|; zero for an exactly symmetric matrix.
  double asymmetry() const {
    const double scale = matrix_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() / scale;
  }

 private:
  GridPtr grid_;
  Matrix matrix_;
  KernelKind kind_;
};

/// Pointwise mean curve across subjects.
inline Curve mean_hat(const FunctionalSample& sample) {
  return Curve(sample.grid(), sample.values().colwise().mean().transpose());
}

/// Kendall's τ function estimate
///
///   K̂(s, t) = 1/M Σ_{i<j} (X_i(s) − X_j(s)) (X_i(t) − X_j(t)) / ‖X_i − X_j‖²
///
/// where the sum runs over the M retained pairs. A pair is dropped when its
/// squared distance is at most `degenerate_tol` times the mean pairwise squared
/// distance, since the spatial sign of a zero difference is undefined.
inline DiscretizedKernel kendall_tau_hat(const FunctionalSample& sample, double degenerate_tol = 1e-12) {
  const Eigen::Index n = sample.values().rows();
  const Eigen::Index d = sample.values().cols();
  if (n < 2) throw InputError("Kendall's tau estimate needs at least 2 curves");
  if (!(degenerate_tol >= 0.0)) throw ConfigurationError("degenerate_tol must be nonnegative");

  const Matrix& x = sample.values();
  const Vector& w = sample.grid()->weights();

  // Σ_{i<j} ‖X_i − X_j‖² = N Σ_i ‖X_i − X̄‖².
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const double spread = (centered.array().square().rowwise() * w.transpose().array()).sum();
  const double mean_pair_sq = 2.0 * spread / static_cast<double>(n - 1);
  const double threshold = degenerate_tol * mean_pair_sq;

  Matrix acc = Matrix::Zero(d, d);
  Matrix block(n, d);
  std::int64_t retained = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Eigen::Index rows = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      block.row(rows) = x.row(i) - x.row(j);
      const double sq = (block.row(rows).array().square() * w.transpose().array()).sum();
      if (sq <= threshold) continue;
      block.row(rows) /= std::sqrt(sq);
      ++rows;
    }
    if (rows == 0) continue;
    retained += rows;
    acc.selfadjointView<Eigen::Lower>().rankUpdate(block.topRows(rows).transpose());
  }
  if (retained == 0) throw EstimationError("every pair of curves is degenerate (identical curves)");

  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  acc /= static_cast<double>(retained);
  return DiscretizedKernel(sample.grid(), std::move(acc), KernelKind::kendall);
}

/// Sample covariance Γ̂(s, t) with divisor N − 1.
inline DiscretizedKernel covariance_hat(const FunctionalSample& sample) {
  const Eigen::Index n = sample.values().rows();
  if (n < 2) throw InputError("covariance estimate needs at least 2 curves");
  const Matrix centered = sample.values().rowwise() - sample.values().colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return DiscretizedKernel(sample.grid(), std::move(cov), KernelKind::covariance);
}

struct MeanBand {
  Curve mean;
  Curve lower;
  Curve upper;
  double level;
  std::size_t replicates;
};

namespace detail {

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Pointwise percentile bootstrap interval for the mean curve. Replicate b
/// draws from its own stream keyed on (seed, b).
inline MeanBand bootstrap_mean_band(const FunctionalSample& sample, double level, std::size_t replicates,
                                    std::uint64_t seed) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigurationError("level must lie in (0, 1)");
  if (replicates < 100) throw ConfigurationError("at least 100 bootstrap replicates are required");

  const Matrix& x = sample.values();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Matrix means(static_cast<Eigen::Index>(replicates), d);
  for (std::size_t b = 0; b < replicates; ++b) {
    Rng rng = make_stream(seed, {static_cast<std::uint64_t>(StreamPurpose::bootstrap), b});
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    Vector sum = Vector::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) sum += x.row(pick(rng)).transpose();
    means.row(static_cast<Eigen::Index>(b)) = (sum / static_cast<double>(n)).transpose();
  }

  const Curve mean = mean_hat(sample);
  Vector lower(d), upper(d);
  std::vector<double> column(replicates);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (std::size_t b = 0; b < replicates; ++b) column[b] = means(static_cast<Eigen::Index>(b), j);
    std::sort(column.begin(), column.end());
    lower[j] = detail::sorted_quantile(column, 0.5 * (1.0 - level));
    upper[j] = detail::sorted_quantile(column, 0.5 * (1.0 + level));
    const double slack = 1e-12 * std::max(1.0, std::abs(mean.values()[j]));
    if (lower[j] > mean.values()[j] + slack || upper[j] < mean.values()[j] - slack)
      throw EstimationError("bootstrap band at t = " + std::to_string(sample.grid()->points()[j]) +
                            " does not contain the point estimate");
    lower[j] = std::min(lower[j], mean.values()[j]);
    upper[j] = std::max(upper[j], mean.values()[j]);
  }
  return MeanBand{mean, Curve(sample.grid(), std::move(lower)), Curve(sample.grid(), std::move(upper)), level,
                  replicates};
}

}  // namespace kfpca

#endif  // KFPCA_ESTIMATORS_HPP
