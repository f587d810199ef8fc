#ifndef KFPCA_GRID_HPP
#define KFPCA_GRID_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>

#include "kfpca/errors.hpp"

namespace kfpca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered observation times on the domain together with quadrature weights.
///
/// Points are strictly increasing and all weights positive. Grids are
/// immutable; curves and samples share them through `GridPtr`.
class Grid {
 public:
  Grid(Vector points, Vector weights) : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() < 2) throw ConfigurationError("a grid needs at least 2 points");
    if (weights_.size() != points_.size())
      throw DimensionError("grid has " + std::to_string(points_.size()) + " points but " +
                           std::to_string(weights_.size()) + " weights");
    for (Eigen::Index j = 0; j < points_.size(); ++j) {
      if (!std::isfinite(points_[j])) throw ConfigurationError("grid point is not finite");
      if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
        throw ConfigurationError("grid weights must be positive and finite");
      if (j > 0 && !(points_[j] > points_[j - 1]))
        throw ConfigurationError("grid points must be strictly increasing");
    }
  }

  /// Trapezoidal weights for arbitrary strictly increasing points.
  static Grid trapezoid(Vector points) {
    const Eigen::Index d = points.size();
    if (d < 2) throw ConfigurationError("a grid needs at least 2 points");
    Vector w(d);
    w[0] = 0.5 * (points[1] - points[0]);
    w[d - 1] = 0.5 * (points[d - 1] - points[d - 2]);
    for (Eigen::Index j = 1; j + 1 < d; ++j) w[j] = 0.5 * (points[j + 1] - points[j - 1]);
    return Grid(std::move(points), std::move(w));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.size()); }
  const Vector& points() const noexcept { return points_; }
  const Vector& weights() const noexcept { return weights_; }
  double front() const noexcept { return points_[0]; }
  double back() const noexcept { return points_[points_.size() - 1]; }
  double length() const noexcept { return back() - front(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.points_.size() == b.points_.size() && a.points_ == b.points_ && a.weights_ == b.weights_;
  }

 private:
  Vector points_;
  Vector weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline bool same_grid(const GridPtr& a, const GridPtr& b) {
  return a == b || (a && b && *a == *b);
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b, const char* context) {
  if (!same_grid(a, b)) throw DimensionError(std::string(context) + ": operands live on different grids");
}

/// `d` equally spaced points on [a, b] with trapezoidal weights.
inline GridPtr make_regular_grid(double a, double b, std::size_t d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw ConfigurationError("grid bounds must satisfy a < b");
  if (d < 2) throw ConfigurationError("a grid needs at least 2 points");
  const auto n = static_cast<Eigen::Index>(d);
  const double h = (b - a) / static_cast<double>(d - 1);
  Vector points(n);
  Vector weights = Vector::Constant(n, h);
  for (Eigen::Index j = 0; j < n; ++j) points[j] = a + static_cast<double>(j) * h;
  points[n - 1] = b;
  weights[0] = weights[n - 1] = 0.5 * h;
  return std::make_shared<const Grid>(std::move(points), std::move(weights));
}

/// A function sampled on a grid.
class Curve {
 public:
  Curve(GridPtr grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InputError("curve without a grid");
    if (static_cast<std::size_t>(values_.size()) != grid_->size())
      throw DimensionError("curve has " + std::to_string(values_.size()) + " values on a grid of " +
                           std::to_string(grid_->size()) + " points");
    if (!values_.allFinite()) throw InputError("curve values must be finite");
  }

  static Curve zero(GridPtr grid) {
    const auto d = static_cast<Eigen::Index>(grid->size());
    return Curve(std::move(grid), Vector::Zero(d));
  }

  template <typename F>
  static Curve from_function(GridPtr grid, F&& f) {
    Vector v(grid->points().size());
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = f(grid->points()[j]);
    return Curve(std::move(grid), std::move(v));
  }

  const GridPtr& grid() const noexcept { return grid_; }
  const Vector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t j) const { return values_[static_cast<Eigen::Index>(j)]; }

  Curve operator-() const { return Curve(grid_, -values_); }
  friend Curve operator+(const Curve& f, const Curve& g) {
    require_same_grid(f.grid_, g.grid_, "curve addition");
    return Curve(f.grid_, f.values_ + g.values_);
  }
  friend Curve operator-(const Curve& f, const Curve& g) {
    require_same_grid(f.grid_, g.grid_, "curve subtraction");
    return Curve(f.grid_, f.values_ - g.values_);
  }
  friend Curve operator*(double c, const Curve& f) { return Curve(f.grid_, c * f.values_); }

 private:
  GridPtr grid_;
  Vector values_;
};

/// N curves observed on a shared grid; row i holds subject i.
class FunctionalSample {
 public:
  FunctionalSample(GridPtr grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InputError("sample without a grid");
    if (static_cast<std::size_t>(values_.cols()) != grid_->size())
      throw DimensionError("sample has " + std::to_string(values_.cols()) + " columns on a grid of " +
                           std::to_string(grid_->size()) + " points");
    if (values_.rows() < 1) throw InputError("sample has no subjects");
    if (!values_.allFinite()) throw InputError("sample values must be finite");
  }

  const GridPtr& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return values_; }
  std::size_t subjects() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t points() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  Curve subject(std::size_t i) const {
    if (i >= subjects()) throw InputError("subject index " + std::to_string(i) + " out of range");
    return Curve(grid_, values_.row(static_cast<Eigen::Index>(i)).transpose());
  }

 private:
  GridPtr grid_;
  Matrix values_;
};

/// Quadrature inner product sum_j w_j f(t_j) g(t_j).
inline double inner_product(const Curve& f, const Curve& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return (f.grid()->weights().array() * f.values().array() * g.values().array()).sum();
}

inline double sq_norm(const Curve& f) { return inner_product(f, f); }

}  // namespace kfpca

#endif  // KFPCA_GRID_HPP
