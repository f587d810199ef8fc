#ifndef KFPCA_SMOOTHING_HPP
#define KFPCA_SMOOTHING_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kfpca/grid.hpp"

namespace kfpca {

/// Either a fixed positive bandwidth or automatic selection by GCV.
class Bandwidth {
 public:
  static Bandwidth automatic() { return Bandwidth(); }
  static Bandwidth fixed(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigurationError("bandwidth must be positive");
    return Bandwidth(h);
  }

  bool is_auto() const noexcept { return !value_; }
  double value() const { return value_.value(); }

  friend bool operator==(const Bandwidth&, const Bandwidth&) = default;

 private:
  Bandwidth() = default;
  explicit Bandwidth(double h) : value_(h) {}
  std::optional<double> value_;
};

/// Hat matrix of the local-linear smoother with a Gaussian kernel, evaluated
/// at the grid points. Row j holds the weights producing the fit at t_j.
inline Matrix local_linear_hat_matrix(const Grid& grid, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ConfigurationError("bandwidth must be positive");
  const Vector& t = grid.points();
  const Eigen::Index d = t.size();
  Matrix hat(d, d);
  Vector k(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Vector dt = t.array() - t[j];
    k = (-0.5 * (dt.array() / bandwidth).square()).exp();
    const double s0 = k.sum();
    const double s1 = k.dot(dt);
    const double s2 = (k.array() * dt.array().square()).sum();
    const double det = s0 * s2 - s1 * s1;
    if (det > 1e-12 * s0 * s2) {
      hat.row(j) = (k.array() * (s2 - dt.array() * s1) / det).transpose();
    } else {
      // Only t_j itself carries weight; fall back to the local-constant fit.
      hat.row(j) = (k / s0).transpose();
    }
  }
  return hat;
}

/// The fixed GCV search set: 20 log-spaced bandwidths from half the mean
/// spacing to a quarter of the domain length.
inline std::vector<double> gcv_candidates(const Grid& grid) {
  constexpr int count = 20;
  const double spacing = grid.length() / static_cast<double>(grid.size() - 1);
  const double lo = std::log(0.5 * spacing);
  const double hi = std::log(0.25 * grid.length());
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(lo + (hi - lo) * i / (count - 1)));
  return out;
}

/// Generalized cross-validation score (1/d)·RSS / (1 − tr(S)/d)².
inline double gcv_score(const Grid& grid, const Vector& y, double bandwidth) {
  const Matrix hat = local_linear_hat_matrix(grid, bandwidth);
  const double d = static_cast<double>(y.size());
  const double rss = (y - hat * y).squaredNorm();
  const double denom = 1.0 - hat.trace() / d;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return rss / d / (denom * denom);
}

inline double select_bandwidth_gcv(const Curve& raw) {
  const Grid& grid = *raw.grid();
  double best_h = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double h : gcv_candidates(grid)) {
    const double score = gcv_score(grid, raw.values(), h);
    if (score < best) {
      best = score;
      best_h = h;
    }
  }
  if (best_h == 0.0) best_h = gcv_candidates(grid).back();
  return best_h;
}

inline Curve smooth_curve(const Curve& raw, Bandwidth bandwidth) {
  const double h = bandwidth.is_auto() ? select_bandwidth_gcv(raw) : bandwidth.value();
  return Curve(raw.grid(), local_linear_hat_matrix(*raw.grid(), h) * raw.values());
}

}  // namespace kfpca

#endif  // KFPCA_SMOOTHING_HPP
