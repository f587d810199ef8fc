#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kfpca/estimators.hpp"
#include "kfpca/simgen.hpp"
#include "test_support.hpp"

using namespace kfpca;

namespace {

// Textbook pairwise loop, no blocking and no tricks.
Matrix brute_force_kendall(const Matrix& x, const Vector& w, double tol) {
  const Eigen::Index n = x.rows(), d = x.cols();
  double total = 0.0;
  std::size_t pairs = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j, ++pairs) {
      for (Eigen::Index t = 0; t < d; ++t) total += w[t] * std::pow(x(i, t) - x(j, t), 2);
    }
  const double threshold = tol * total / static_cast<double>(pairs);
  Matrix k = Matrix::Zero(d, d);
  std::size_t kept = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sq = 0;
      for (Eigen::Index t = 0; t < d; ++t) sq += w[t] * std::pow(x(i, t) - x(j, t), 2);
      if (sq <= threshold) continue;
      ++kept;
      for (Eigen::Index s = 0; s < d; ++s)
        for (Eigen::Index t = 0; t < d; ++t) k(s, t) += (x(i, s) - x(j, s)) * (x(i, t) - x(j, t)) / sq;
    }
  return k / static_cast<double>(kept);
}

FunctionalSample gaussian_case1(std::size_t n, std::uint64_t seed, std::size_t run = 0, std::size_t runs = 1) {
  SimulationScenario s;
  s.n = n;
  s.seed = seed;
  s.runs = runs;
  return generate(s, run).sample;
}

double min_eigenvalue_ratio(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / std::max(es.eigenvalues().maxCoeff(), 1e-300);
}

}  // namespace

// ---------------------------------------------------------------------------
// mean_hat

TEST(MeanHat, OppositeCurvesAverageToZero) {
  const GridPtr g = make_regular_grid(0.0, 1.0, 5);
  Matrix x(2, 5);
  x.row(0) = g->points().transpose();
  x.row(1) = -g->points().transpose();
  EXPECT_EQ(mean_hat(FunctionalSample(g, x)).values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(MeanHat, IdenticalCurvesGiveThatCurve) {
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  const Curve c = Curve::from_function(g, [](double t) { return std::exp(-t) + 0.3; });
  const Matrix x = c.values().transpose().replicate(7, 1);
  EXPECT_LT((mean_hat(FunctionalSample(g, x)).values() - c.values()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MeanHat, SupErrorBoundHoldsInNinetyNinePercentOfRuns) {
  const double bound = 3.0 * std::sqrt(16.0 + 9.0 + 0.25) / std::sqrt(100.0);
  int inside = 0;
  for (std::size_t run = 0; run < 100; ++run)
    inside += mean_hat(gaussian_case1(100, 77, run, 100)).values().cwiseAbs().maxCoeff() < bound;
  EXPECT_GE(inside, 99);
}

// ---------------------------------------------------------------------------
// kendall_tau_hat

TEST(KendallTau, TwoCurveHandExample) {
  const GridPtr g = make_regular_grid(0.0, 1.0, 3);
  Matrix x = Matrix::Zero(2, 3);
  x.row(0) = g->points().transpose();
  const DiscretizedKernel k = kendall_tau_hat(FunctionalSample(g, x));
  EXPECT_EQ(k.kind(), KernelKind::kendall);
  const Vector& t = g->points();
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) EXPECT_NEAR(k.matrix()(j, l), t[j] * t[l] / 0.375, 1e-14);
  EXPECT_NEAR(k.matrix()(2, 2), 2.6666666666666667, 1e-12);
}

TEST(KendallTau, WeightedTraceSymmetryAndPsd) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial * 5;
    const GridPtr g = make_regular_grid(0.0, 10.0, 51);
    const DiscretizedKernel k = kendall_tau_hat(FunctionalSample(g, oracle::random_matrix(rng, n, 51, 1.0 + trial)));
    EXPECT_NEAR(k.weighted_trace(), 1.0, 1e-8);
    EXPECT_LE(k.asymmetry(), 1e-10);
    EXPECT_GE(min_eigenvalue_ratio(k.matrix()), -1e-8);
  }
}

TEST(KendallTau, MatchesBruteForcePairLoop) {
  std::mt19937_64 rng(22);
  const GridPtr g = make_regular_grid(-2.0, 3.0, 13);
  const Matrix x = oracle::random_matrix(rng, 37, 13);
  const Matrix got = kendall_tau_hat(FunctionalSample(g, x)).matrix();
  const Matrix want = brute_force_kendall(x, g->weights(), 1e-12);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(KendallTau, DuplicateCurvesAreDroppedFromThePairCount) {
  std::mt19937_64 rng(23);
  const GridPtr g = make_regular_grid(0.0, 1.0, 8);
  Matrix x = oracle::random_matrix(rng, 6, 8);
  x.row(4) = x.row(1);
  x.row(5) = x.row(1);
  const Matrix got = kendall_tau_hat(FunctionalSample(g, x)).matrix();
  const Matrix want = brute_force_kendall(x, g->weights(), 1e-12);
  EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-13);
  // 15 pairs, 3 of them tied among rows 1, 4, 5: trace stays 1 because the
  // divisor counts only the 12 retained pairs.
  EXPECT_NEAR(g->weights().dot(got.diagonal()), 1.0, 1e-12);
}

TEST(KendallTau, AffineInvariance) {
  std::mt19937_64 rng(24);
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  const FunctionalSample base = gaussian_case1(60, 5);
  const Matrix k0 = kendall_tau_hat(base).matrix();
  const Vector m = oracle::random_matrix(rng, 51, 1, 3.0);
  for (double c : {-3.0, 0.5, 7.0}) {
    const Matrix x = (c * base.values()).rowwise() + m.transpose();
    const Matrix k1 = kendall_tau_hat(FunctionalSample(g, x)).matrix();
    EXPECT_LT((k1 - k0).cwiseAbs().maxCoeff(), 1e-12) << "c = " << c;
  }
}

TEST(KendallTau, PermutationInvariance) {
  std::mt19937_64 rng(25);
  const FunctionalSample base = gaussian_case1(50, 6);
  std::vector<Eigen::Index> order(50);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix shuffled(50, 51);
  for (Eigen::Index i = 0; i < 50; ++i) shuffled.row(i) = base.values().row(order[static_cast<std::size_t>(i)]);
  const FunctionalSample perm(base.grid(), shuffled);
  EXPECT_LT((kendall_tau_hat(perm).matrix() - kendall_tau_hat(base).matrix()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((covariance_hat(perm).matrix() - covariance_hat(base).matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KendallTau, ErrorPaths) {
  const GridPtr g = make_regular_grid(0.0, 1.0, 4);
  EXPECT_THROW(kendall_tau_hat(FunctionalSample(g, Matrix::Ones(1, 4))), InputError);
  EXPECT_THROW(kendall_tau_hat(FunctionalSample(g, Matrix::Ones(5, 4))), EstimationError);
  EXPECT_THROW(kendall_tau_hat(FunctionalSample(g, Matrix::Random(5, 4)), -1.0), ConfigurationError);
}

// ---------------------------------------------------------------------------
// covariance_hat

TEST(Covariance, IdenticalCurvesGiveZero) {
  const GridPtr g = make_regular_grid(0.0, 1.0, 6);
  const Matrix x = Vector::LinSpaced(6, -1, 2).transpose().replicate(4, 1);
  EXPECT_LT(covariance_hat(FunctionalSample(g, x)).matrix().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Covariance, TwoOppositeCurves) {
  const GridPtr g = make_regular_grid(0.0, 10.0, 11);
  const Vector f = g->points().array().sin();
  Matrix x(2, 11);
  x.row(0) = f.transpose();
  x.row(1) = -f.transpose();
  const Matrix c = covariance_hat(FunctionalSample(g, x)).matrix();
  EXPECT_LT((c - 2.0 * f * f.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Covariance, Equivariance) {
  std::mt19937_64 rng(26);
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  const FunctionalSample base = gaussian_case1(40, 7);
  const Matrix c0 = covariance_hat(base).matrix();
  const Vector m = oracle::random_matrix(rng, 51, 1, 5.0);
  for (double c : {-3.0, 0.5, 7.0}) {
    const Matrix x = (c * base.values()).rowwise() + m.transpose();
    const Matrix c1 = covariance_hat(FunctionalSample(g, x)).matrix();
    EXPECT_LT((c1 - c * c * c0).norm() / (c * c * c0.norm()), 1e-10);
  }
}

TEST(Covariance, WeightedEigenvaluesNearTruthAtN400) {
  const FunctionalSample s = gaussian_case1(400, 8);
  const Vector sw = s.grid()->weights().cwiseSqrt();
  const Matrix sym = sw.asDiagonal() * covariance_hat(s).matrix() * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const Eigen::Index d = sym.rows();
  EXPECT_NEAR(es.eigenvalues()[d - 1], 16.0, 0.25 * 16.0);
  EXPECT_NEAR(es.eigenvalues()[d - 2], 9.0, 0.25 * 9.0);
}

TEST(Covariance, NeedsTwoCurves) {
  EXPECT_THROW(covariance_hat(FunctionalSample(make_regular_grid(0.0, 1.0, 4), Matrix::Ones(1, 4))), InputError);
}

// ---------------------------------------------------------------------------
// bootstrap_mean_band

TEST(MeanBand, IdenticalCurvesGiveZeroWidth) {
  const GridPtr g = make_regular_grid(0.0, 1.0, 5);
  const Vector c{{1.0, -2.0, 0.5, 3.0, 4.0}};
  const MeanBand band = bootstrap_mean_band(FunctionalSample(g, c.transpose().replicate(9, 1)), 0.9, 200, 1);
  EXPECT_EQ(band.lower.values(), c);
  EXPECT_EQ(band.upper.values(), c);
  EXPECT_EQ(band.mean.values(), c);
}

TEST(MeanBand, DeterministicForASeed) {
  const FunctionalSample s = gaussian_case1(30, 9);
  const MeanBand a = bootstrap_mean_band(s, 0.9, 300, 42);
  const MeanBand b = bootstrap_mean_band(s, 0.9, 300, 42);
  EXPECT_EQ(a.lower.values(), b.lower.values());
  EXPECT_EQ(a.upper.values(), b.upper.values());
  const MeanBand c = bootstrap_mean_band(s, 0.9, 300, 43);
  EXPECT_NE(a.lower.values(), c.lower.values());
}

TEST(MeanBand, ContainsPointEstimate) {
  const FunctionalSample s = gaussian_case1(50, 10);
  const MeanBand band = bootstrap_mean_band(s, 0.9, 500, 3);
  EXPECT_TRUE((band.lower.values().array() <= band.mean.values().array()).all());
  EXPECT_TRUE((band.mean.values().array() <= band.upper.values().array()).all());
  EXPECT_DOUBLE_EQ(band.level, 0.9);
  EXPECT_EQ(band.replicates, 500u);
}

TEST(MeanBand, ConfigurationErrors) {
  const FunctionalSample s = gaussian_case1(10, 11);
  EXPECT_THROW(bootstrap_mean_band(s, 0.9, 99, 1), ConfigurationError);
  EXPECT_THROW(bootstrap_mean_band(s, 0.0, 1000, 1), ConfigurationError);
  EXPECT_THROW(bootstrap_mean_band(s, 1.0, 1000, 1), ConfigurationError);
}

TEST(MeanBand, PointwiseCoverageNearNominal) {
  // True mean is zero. Coverage is averaged over runs and grid points.
  std::size_t covered = 0, total = 0;
  for (std::size_t run = 0; run < 200; ++run) {
    const MeanBand band = bootstrap_mean_band(gaussian_case1(100, 12, run, 200), 0.9, 1000, 1000 + run);
    for (Eigen::Index j = 0; j < band.lower.values().size(); ++j, ++total)
      covered += band.lower.values()[j] <= 0.0 && 0.0 <= band.upper.values()[j];
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(total);
  EXPECT_GE(coverage, 0.85);
  EXPECT_LE(coverage, 0.95);
}
