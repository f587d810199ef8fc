#ifndef KFPCA_EIGEN_SYSTEM_HPP
#define KFPCA_EIGEN_SYSTEM_HPP

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

#include "kfpca/estimators.hpp"
#include "kfpca/smoothing.hpp"

namespace kfpca {

/// Leading eigenpairs of a kernel's integral operator.
struct EigenSystem {
  GridPtr grid;
  std::vector<Curve> eigenfunctions;
  Vector operator_eigenvalues;  // descending
  KernelKind kind;

  std::size_t size() const noexcept { return eigenfunctions.size(); }
};

struct EigenOptions {
  bool smooth = false;
  Bandwidth bandwidth = Bandwidth::automatic();
};

/// Flips `values` so that its quadrature integral is nonnegative. When the
/// integral is within 1e-8 of zero the first entry of magnitude above 1e-12
/// is made positive instead.
inline void apply_sign_convention(Vector& values, const Vector& weights) {
  const double integral = weights.dot(values);
  double sign = 1.0;
  if (std::abs(integral) > 1e-8) {
    sign = integral < 0.0 ? -1.0 : 1.0;
  } else {
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      if (std::abs(values[j]) > 1e-12) {
        sign = values[j] < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
  }
  values *= sign;
}

/// Solves ∫ K(s, t) φ(s) ds = λ φ(t) on the grid.
///
/// With W = diag(weights), the symmetric matrix W^½ M W^½ is diagonalized and
/// each eigenvector v is mapped back to φ = W^-½ v, which makes the φ_k
/// orthonormal under the quadrature inner product. Smoothed eigenfunctions are
/// rescaled to unit norm but not re-orthogonalized.
inline EigenSystem eigen_decompose(const DiscretizedKernel& kernel, std::size_t components,
                                   const EigenOptions& options = {}) {
  const GridPtr& grid = kernel.grid();
  const std::size_t d = grid->size();
  if (components < 1) throw ConfigurationError("at least one component is required");
  if (components > d)
    throw ConfigurationError("requested " + std::to_string(components) + " components but the grid has only " +
                             std::to_string(d) + " points");
  if (kernel.asymmetry() > 1e-10) throw InputError("kernel matrix is not symmetric");

  const Vector sqrt_w = grid->weights().cwiseSqrt();
  Matrix sym = sqrt_w.asDiagonal() * kernel.matrix() * sqrt_w.asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw EstimationError("symmetric eigensolver did not converge");

  const auto dd = static_cast<Eigen::Index>(d);
  EigenSystem out{grid, {}, Vector(static_cast<Eigen::Index>(components)), kernel.kind()};
  out.eigenfunctions.reserve(components);
  for (std::size_t k = 0; k < components; ++k) {
    // Eigen returns ascending eigenvalues.
    const Eigen::Index col = dd - 1 - static_cast<Eigen::Index>(k);
    out.operator_eigenvalues[static_cast<Eigen::Index>(k)] = solver.eigenvalues()[col];
    Vector phi = solver.eigenvectors().col(col).cwiseQuotient(sqrt_w);
    if (options.smooth) {
      phi = smooth_curve(Curve(grid, phi), options.bandwidth).values();
      const double norm = std::sqrt(grid->weights().dot(phi.cwiseAbs2()));
      if (!(norm > 0.0)) throw EstimationError("smoothed eigenfunction vanished");
      phi /= norm;
    }
    apply_sign_convention(phi, grid->weights());
    out.eigenfunctions.emplace_back(grid, std::move(phi));
  }
  return out;
}

/// Scores ξ_ik = ∫ (X_i − μ) φ_k, one row per subject.
inline Matrix project_scores(const FunctionalSample& sample, const Curve& mean, const EigenSystem& basis,
                             std::size_t components) {
  require_same_grid(sample.grid(), mean.grid(), "project_scores");
  require_same_grid(sample.grid(), basis.grid, "project_scores");
  if (components > basis.size())
    throw ConfigurationError("requested " + std::to_string(components) + " scores from a basis of " +
                             std::to_string(basis.size()));
  const auto d = static_cast<Eigen::Index>(sample.points());
  Matrix phi_w(d, static_cast<Eigen::Index>(components));
  const Vector& w = sample.grid()->weights();
  for (std::size_t k = 0; k < components; ++k)
    phi_w.col(static_cast<Eigen::Index>(k)) = basis.eigenfunctions[k].values().cwiseProduct(w);
  return (sample.values().rowwise() - mean.values().transpose()) * phi_w;
}

}  // namespace kfpca

#endif  // KFPCA_EIGEN_SYSTEM_HPP
