#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "kfpca/simgen.hpp"
#include "test_support.hpp"

using namespace kfpca;

namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

// Standardized moments of the skew-t computed from its density
// 2 t_ν(x) T_{ν+1}(α x sqrt((ν+1)/(ν+x²))) by numerical integration.
SkewTMoments skew_t_moments_by_quadrature(double slant, double df) {
  const boost::math::students_t_distribution<double> t_nu(df), t_nu1(df + 1.0);
  const auto density = [&](double x) {
    return 2.0 * boost::math::pdf(t_nu, x) * boost::math::cdf(t_nu1, slant * x * std::sqrt((df + 1.0) / (df + x * x)));
  };
  boost::math::quadrature::sinh_sinh<double> integrator;
  // Far tails contribute nothing at double precision; pow(x, 4) would overflow.
  const auto moment = [&](int k, double centre) {
    return integrator.integrate([&](double x) { return std::abs(x) > 1e60 ? 0.0 : std::pow(x - centre, k) * density(x); });
  };
  const double mass = moment(0, 0.0);
  const double m1 = moment(1, 0.0) / mass;
  const auto central = [&](int k) { return moment(k, m1) / mass; };
  const double c2 = central(2), c3 = central(3), c4 = central(4);
  return {m1, c2, c3 / std::pow(c2, 1.5), c4 / (c2 * c2) - 3.0};
}

Vector draws(ScoreDistribution dist, double lambda, std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, {99});
  return draw_scores(dist, lambda, n, rng);
}

double mean_of(const Eigen::VectorXd& x) { return oracle::sample_moments(x).mean; }
double var_of(const Eigen::VectorXd& x) { return oracle::sample_moments(x).variance; }
double skew_of(const Eigen::VectorXd& x) { return oracle::sample_moments(x).skewness; }
double kurt_of(const Eigen::VectorXd& x) { return oracle::sample_moments(x).excess_kurtosis; }

}  // namespace

// ---------------------------------------------------------------------------
// true_eigenfunctions

TEST(TrueEigenfunctions, PointValues) {
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  auto [p1, p2] = true_eigenfunctions(1, g);
  EXPECT_NEAR(p1.values()[0], 1.0 / kSqrt5, 1e-15);
  EXPECT_NEAR(p2.values()[0], 0.0, 1e-15);
  const GridPtr g41 = make_regular_grid(0.0, 10.0, 41);
  auto [q1, q2] = true_eigenfunctions(2, g41);
  ASSERT_DOUBLE_EQ(g41->points()[10], 2.5);
  EXPECT_NEAR(q1.values()[10], 1.0 / kSqrt5, 1e-14);
  EXPECT_NEAR(q2.values()[10], 0.0, 1e-14);
}

TEST(TrueEigenfunctions, QuadratureOrthonormality) {
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  for (int c : {1, 2}) {
    auto [p1, p2] = true_eigenfunctions(c, g);
    EXPECT_NEAR(sq_norm(p1), 1.0, 1e-4);
    EXPECT_NEAR(sq_norm(p2), 1.0, 1e-4);
    EXPECT_NEAR(inner_product(p1, p2), 0.0, 1e-6);
  }
  EXPECT_NEAR(oracle::simpson([](double t) { return oracle::case2_phi1(t) * oracle::case2_phi2(t); }, 0, 10), 0.0, 1e-12);
}

TEST(TrueEigenfunctions, WrongSpanOrCase) {
  EXPECT_THROW(true_eigenfunctions(1, make_regular_grid(0.0, 1.0, 11)), ConfigurationError);
  EXPECT_THROW(true_eigenfunctions(3, make_regular_grid(0.0, 10.0, 11)), ConfigurationError);
}

// ---------------------------------------------------------------------------
// draw_scores

TEST(DrawScores, MeanAndVarianceWithinThreeStandardErrors) {
  constexpr std::size_t n = 1'000'000;
  for (ScoreDistribution dist : {ScoreDistribution::gaussian, ScoreDistribution::mix_gaussian, ScoreDistribution::ec2,
                                 ScoreDistribution::skew_t}) {
    for (double lambda : {16.0, 9.0}) {
      const Vector x = draws(dist, lambda, n, 1 + static_cast<std::uint64_t>(dist));
      const auto m = oracle::sample_moments(x);
      const double se_mean = std::sqrt(m.variance / n);
      EXPECT_LT(std::abs(m.mean), 3.0 * se_mean) << to_string(dist);
      const double se_var = oracle::batch_standard_error(x, 100, var_of);
      EXPECT_LT(std::abs(m.variance - lambda), 3.0 * se_var) << to_string(dist) << " var " << m.variance;
      EXPECT_LT(std::abs(m.variance / lambda - 1.0), 0.01) << to_string(dist);
    }
  }
}

TEST(DrawScores, GaussianExample) {
  const auto m = oracle::sample_moments(draws(ScoreDistribution::gaussian, 16.0, 1'000'000, 2));
  EXPECT_GE(m.variance, 15.9);
  EXPECT_LE(m.variance, 16.1);
  EXPECT_LE(std::abs(m.skewness), 0.02);
}

TEST(DrawScores, Ec2IsSymmetricAndHeavyTailed) {
  const Vector x = draws(ScoreDistribution::ec2, 9.0, 1'000'000, 3);
  const auto m = oracle::sample_moments(x);
  EXPECT_GE(m.variance, 8.9);
  EXPECT_LE(m.variance, 9.1);
  EXPECT_LT(std::abs(m.skewness), 3.0 * oracle::batch_standard_error(x, 100, skew_of));
  EXPECT_GT(m.excess_kurtosis, 0.0);
  // E[ξ⁴] = 6λ² gives excess kurtosis 3.
  EXPECT_LT(std::abs(m.excess_kurtosis - 3.0), 3.0 * oracle::batch_standard_error(x, 100, kurt_of));
}

TEST(DrawScores, MixGaussianKurtosis) {
  const Vector x = draws(ScoreDistribution::mix_gaussian, 16.0, 1'000'000, 4);
  const auto m = oracle::sample_moments(x);
  EXPECT_LT(std::abs(m.excess_kurtosis + 0.5), 3.0 * oracle::batch_standard_error(x, 100, kurt_of));
}

TEST(DrawScores, SkewTShapeAtOneMillion) {
  const auto m = oracle::sample_moments(draws(ScoreDistribution::skew_t, 16.0, 1'000'000, 5));
  EXPECT_GE(m.skewness, 1.45);
  EXPECT_LE(m.skewness, 1.55);
  EXPECT_GE(m.excess_kurtosis, 4.6);
  EXPECT_LE(m.excess_kurtosis, 5.6);
}

TEST(DrawScores, SkewTShapeAtTenMillion) {
  const Vector x = draws(ScoreDistribution::skew_t, 1.0, 10'000'000, 6);
  const auto m = oracle::sample_moments(x);
  EXPECT_LT(std::abs(m.skewness - 1.5), 4.0 * oracle::batch_standard_error(x, 100, skew_of));
  // The fourth moment of df ≈ 7.18 has no finite variance, so batch errors
  // understate the spread; use a fixed window instead.
  EXPECT_GE(m.excess_kurtosis, 4.4);
  EXPECT_LE(m.excess_kurtosis, 5.8);
}

TEST(DrawScores, RejectsNonPositiveVariance) {
  Rng rng(1);
  EXPECT_THROW(draw_scores(ScoreDistribution::gaussian, 0.0, 10, rng), ConfigurationError);
  EXPECT_THROW(draw_scores(ScoreDistribution::ec2, -1.0, 10, rng), ConfigurationError);
}

TEST(DrawScores, DistributionNames) {
  for (ScoreDistribution d : {ScoreDistribution::gaussian, ScoreDistribution::mix_gaussian, ScoreDistribution::ec2,
                              ScoreDistribution::skew_t})
    EXPECT_EQ(parse_distribution(to_string(d)), d);
  EXPECT_EQ(parse_distribution("skew-t"), ScoreDistribution::skew_t);
  EXPECT_EQ(parse_distribution("mix-gaussian"), ScoreDistribution::mix_gaussian);
  EXPECT_FALSE(parse_distribution("cauchy").has_value());
}

// ---------------------------------------------------------------------------
// Skew-t moments and solver

TEST(SkewT, ClosedFormMomentsMatchDensityQuadrature) {
  for (auto [slant, df] : {std::pair{0.0, 9.0}, {3.6733057106176408, 7.1796769832355505}, {-2.0, 12.0}, {10.0, 5.5}}) {
    const SkewTMoments closed = skew_t_moments({slant, df});
    const SkewTMoments quad = skew_t_moments_by_quadrature(slant, df);
    EXPECT_NEAR(closed.mean, quad.mean, 1e-8) << slant << " " << df;
    EXPECT_NEAR(closed.variance, quad.variance, 1e-8);
    EXPECT_NEAR(closed.skewness, quad.skewness, 1e-7);
    EXPECT_NEAR(closed.excess_kurtosis, quad.excess_kurtosis, 1e-6);
  }
}

TEST(SkewT, FrozenParametersSolveTheTargets) {
  const SkewTParams p = solve_skew_t_params(kSkewTTargetSkewness, kSkewTTargetExcessKurtosis);
  EXPECT_NEAR(p.slant, kSkewTParams.slant, 1e-8);
  EXPECT_NEAR(p.df, kSkewTParams.df, 1e-8);
  // Independently computed with 30-digit arithmetic.
  EXPECT_NEAR(kSkewTParams.slant, 3.67330571061764085, 1e-12);
  EXPECT_NEAR(kSkewTParams.df, 7.17967698323555051, 1e-12);
  const SkewTMoments m = skew_t_moments_by_quadrature(kSkewTParams.slant, kSkewTParams.df);
  EXPECT_NEAR(m.skewness, 1.5, 1e-6);
  EXPECT_NEAR(m.excess_kurtosis, 5.1, 1e-5);
}

TEST(SkewT, SymmetricLimits) {
  const SkewTParams normal = solve_skew_t_params(0.0, 0.0);
  EXPECT_EQ(normal.slant, 0.0);
  EXPECT_TRUE(std::isinf(normal.df));
  EXPECT_NEAR(skew_t_moments(normal).skewness, 0.0, 1e-6);
  const SkewTParams t10 = solve_skew_t_params(0.0, 1.0);
  EXPECT_EQ(t10.slant, 0.0);
  EXPECT_NEAR(t10.df, 10.0, 1e-12);
  EXPECT_NEAR(skew_t_moments(t10).excess_kurtosis, 1.0, 1e-10);
}

TEST(SkewT, NegativeSkewnessMirrors) {
  const SkewTParams p = solve_skew_t_params(-1.5, 5.1);
  EXPECT_NEAR(p.slant, -kSkewTParams.slant, 1e-8);
  EXPECT_NEAR(p.df, kSkewTParams.df, 1e-8);
}

TEST(SkewT, SolverHitsOtherFeasibleTargets) {
  for (auto [g1, g2] : {std::pair{0.5, 1.0}, {1.0, 3.0}, {0.3, 0.2}, {2.0, 12.0}}) {
    const SkewTMoments m = skew_t_moments(solve_skew_t_params(g1, g2));
    EXPECT_NEAR(m.skewness, g1, 1e-8);
    EXPECT_NEAR(m.excess_kurtosis, g2, 1e-8);
  }
}

TEST(SkewT, InfeasibleTargets) {
  EXPECT_THROW(solve_skew_t_params(10.0, 1.0), DomainError);
  EXPECT_THROW(solve_skew_t_params(1.5, 0.1), DomainError);
  EXPECT_THROW(solve_skew_t_params(0.0, -0.5), DomainError);
  EXPECT_THROW(solve_skew_t_params(NAN, 1.0), DomainError);
  EXPECT_THROW(skew_t_moments({1.0, 4.0}), DomainError);
}

// ---------------------------------------------------------------------------
// generate

TEST(Generate, ZeroVariantIsZeroMatrix) {
  SimulationScenario s;
  s.sigma2 = 0.0;
  s.lambdas = {0.0, 0.0};
  const TruthBundle b = generate(s, 0);
  EXPECT_EQ(b.sample.values().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.true_scores.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generate, NoiselessIsExactlyTheExpansion) {
  SimulationScenario s;
  s.sigma2 = 0.0;
  s.case_id = 2;
  s.distribution = ScoreDistribution::skew_t;
  const TruthBundle b = generate(s, 3);
  Matrix phi(51, 2);
  phi.col(0) = b.true_eigenfunctions[0].values();
  phi.col(1) = b.true_eigenfunctions[1].values();
  EXPECT_LT((b.sample.values() - b.true_scores * phi.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Generate, DeterministicPerRun) {
  SimulationScenario s;
  s.distribution = ScoreDistribution::ec2;
  const TruthBundle a = generate(s, 7), b = generate(s, 7), c = generate(s, 8);
  EXPECT_EQ(a.sample.values(), b.sample.values());
  EXPECT_EQ(a.true_scores, b.true_scores);
  EXPECT_NE(a.sample.values(), c.sample.values());
  EXPECT_THROW(generate(s, s.runs), ConfigurationError);
}

TEST(Generate, DefaultsMatchTheDesign) {
  const SimulationScenario s;
  EXPECT_EQ(s.n, 100u);
  EXPECT_EQ(s.d, 51u);
  EXPECT_EQ(s.sigma2, 0.25);
  EXPECT_EQ(s.lambdas[0], 16.0);
  EXPECT_EQ(s.lambdas[1], 9.0);
  EXPECT_EQ(s.runs, 100u);
  const TruthBundle b = generate(s, 0);
  EXPECT_EQ(b.sample.subjects(), 100u);
  EXPECT_EQ(b.sample.points(), 51u);
  EXPECT_EQ(b.true_mean.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generate, PooledVarianceMatchesDecomposition) {
  SimulationScenario s;
  s.runs = 1000;
  const GridPtr g = make_regular_grid(0.0, 10.0, 51);
  Matrix per_run(1000, 51);
  for (std::size_t r = 0; r < s.runs; ++r) {
    const Matrix y = generate(s, r).sample.values();
    const Matrix c = y.rowwise() - y.colwise().mean();
    per_run.row(static_cast<Eigen::Index>(r)) = c.colwise().squaredNorm() / 99.0;
  }
  for (Eigen::Index j = 0; j < 51; ++j) {
    const double t = g->points()[j];
    const double expected = 16.0 * std::pow(oracle::case1_phi1(t), 2) + 9.0 * std::pow(oracle::case1_phi2(t), 2) + 0.25;
    const Vector col = per_run.col(j);
    const double se = std::sqrt((col.array() - col.mean()).square().sum() / 999.0 / 1000.0);
    EXPECT_LT(std::abs(col.mean() - expected), 4.0 * se) << "t = " << t;
  }
}

TEST(Generate, StreamsAreUncorrelatedAcrossRunsAndComponents) {
  SimulationScenario s;
  s.n = 20000;
  s.runs = 4;
  s.sigma2 = 0.0;
  const double bound = 3.0 / std::sqrt(20000.0);
  const auto corr = [](const Vector& a, const Vector& b) {
    const Vector x = a.array() - a.mean(), y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
  };
  const TruthBundle r0 = generate(s, 0), r1 = generate(s, 1), r2 = generate(s, 2);
  EXPECT_LT(std::abs(corr(r0.true_scores.col(0), r1.true_scores.col(0))), bound);
  EXPECT_LT(std::abs(corr(r1.true_scores.col(0), r2.true_scores.col(0))), bound);
  EXPECT_LT(std::abs(corr(r0.true_scores.col(0), r0.true_scores.col(1))), bound);
  EXPECT_LT(std::abs(corr(r0.true_scores.col(1), r2.true_scores.col(1))), bound);
}

TEST(Generate, ScenarioValidation) {
  SimulationScenario s;
  s.case_id = 3;
  EXPECT_THROW(generate(s, 0), ConfigurationError);
  s = {};
  s.sigma2 = -1.0;
  EXPECT_THROW(generate(s, 0), ConfigurationError);
  s = {};
  s.lambdas = {-1.0, 9.0};
  EXPECT_THROW(generate(s, 0), ConfigurationError);
}
