#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cogbench/errors.hpp"
#include "cogbench/factor_analysis.hpp"
#include "cogbench/varimax.hpp"
#include "oracles.hpp"

namespace cogbench::fa {
namespace {

using cogbench::testing::normal;

// Nine variables, three factors with 4, 3 and 2 indicators of loading
// sqrt(0.7): reduced eigenvalues 2.8, 2.1, 1.4 are distinct, so the
// unrotated solution is identified up to column signs.
Eigen::MatrixXd nine_by_three() {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(9, 3);
  const int owner[9] = {0, 0, 0, 0, 1, 1, 1, 2, 2};
  for (int i = 0; i < 9; ++i) l(i, owner[i]) = std::sqrt(0.7);
  return l;
}

Eigen::MatrixXd model_sigma(const Eigen::MatrixXd& lambda) {
  Eigen::MatrixXd s = lambda * lambda.transpose();
  s.diagonal() = Eigen::VectorXd::Ones(lambda.rows());
  return s;
}

TEST(Correlation, IdenticalColumnsCorrelateOne) {
  Eigen::MatrixXd y(4, 3);
  y << 1, 1, 5, 2, 2, 3, 4, 4, 1, 3, 3, 0;
  const auto c = correlation(y);
  EXPECT_DOUBLE_EQ(c.sigma(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(c.sigma(1, 0), 1.0);
}

TEST(Correlation, PerfectLinearDependence) {
  Eigen::MatrixXd y(3, 2);
  y << 0, 0, 1, 2, 2, 4;
  EXPECT_NEAR(correlation(y).sigma(0, 1), 1.0, 1e-15);
}

TEST(Correlation, IndependentColumnsNearZero) {
  Stream rng(1);
  Eigen::MatrixXd y(10000, 4);
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = normal(rng);
  const auto c = correlation(y);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) EXPECT_LT(std::abs(c.sigma(i, j)), 0.05);
}

TEST(Correlation, Invariants) {
  Stream rng(2);
  Eigen::MatrixXd y(50, 6);
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = normal(rng) + (j > 2 ? y(i, j - 3) : 0.0);
  const auto c = correlation(y);
  EXPECT_LE((c.sigma - c.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(c.sigma(i, i), 1.0);
  EXPECT_LE(c.sigma.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Correlation, DropsConstantColumns) {
  Eigen::MatrixXd y(4, 3);
  y << 1, 7, 2, 2, 7, 1, 3, 7, 5, 4, 7, 3;
  const auto c = correlation(y);
  EXPECT_EQ(c.dropped, (std::vector<std::size_t>{1}));
  EXPECT_EQ(c.kept, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c.sigma.rows(), 2);
}

TEST(Correlation, NeedsTwoRows) {
  EXPECT_THROW(correlation(Eigen::MatrixXd::Ones(1, 3)), InputError);
  EXPECT_THROW(correlation(Eigen::MatrixXd::Ones(5, 3)), InputError);
}

TEST(Extract, IdentityHasNoCommonFactor) {
  const auto m = extract(Eigen::MatrixXd::Identity(5, 5));
  EXPECT_EQ(m.retained, 0);
  EXPECT_TRUE(m.converged);
  EXPECT_NEAR(m.eigenvalues.cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Extract, RecoversKnownLoadings) {
  const Eigen::MatrixXd truth = nine_by_three();
  const auto m = extract(model_sigma(truth));
  ASSERT_EQ(m.retained, 3);
  EXPECT_TRUE(m.converged);
  const auto a = align_columns(m.lambda, truth);
  for (int j = 0; j < 3; ++j) EXPECT_GE(a.congruence(j), 0.98);
  EXPECT_NEAR(m.gamma2.mean(), 0.3, 1e-3);
}

TEST(Extract, RankOneUpdate) {
  // Sigma = 0.64 uu' + 0.36 I: the reduced matrix has one eigenvalue 0.64,
  // below the Kaiser cut, so retention is lowered (or forced) to see it.
  Eigen::VectorXd u(6);
  u << 1, 2, -1, 0.5, 3, -2;
  u.normalize();
  const Eigen::MatrixXd sigma = 0.64 * u * u.transpose() + 0.36 * Eigen::MatrixXd::Identity(6, 6);
  ExtractOptions opts;
  opts.retention = 0.5;
  const auto m = extract(sigma, opts);
  ASSERT_EQ(m.retained, 1);
  EXPECT_TRUE(m.converged);
  const double sign = m.lambda.col(0).dot(u) < 0 ? -1.0 : 1.0;
  EXPECT_LT((sign * m.lambda.col(0) - 0.8 * u).cwiseAbs().maxCoeff(), 1e-5);
  ExtractOptions forced;
  forced.n_factors = 1;
  const auto f = extract(sigma, forced);
  EXPECT_LT((f.lambda.col(0).cwiseAbs() - 0.8 * u.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_EQ(extract(sigma).retained, 0);
}

TEST(Extract, EigenDecompositionContract) {
  Stream rng(3);
  const auto model = cogbench::testing::simple_structure_model(20, 3, rng);
  const auto m = extract(model.sigma);
  const Eigen::MatrixXd& a = m.eigenvectors;
  const auto p = a.rows();
  EXPECT_LE((a.transpose() * a - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::MatrixXd reduced = model.sigma;
  reduced.diagonal() -= m.gamma2;
  EXPECT_LE((a * m.eigenvalues.asDiagonal() * a.transpose() - reduced).norm(), 1e-8);
  for (Eigen::Index i = 1; i < m.eigenvalues.size(); ++i) EXPECT_GE(m.eigenvalues(i - 1), m.eigenvalues(i));
}

TEST(Extract, ModelInvariants) {
  Stream rng(4);
  const auto model = cogbench::testing::simple_structure_model(30, 4, rng);
  const auto y = cogbench::testing::sample_rows(model, 144, rng);
  const auto m = extract(correlation(y).sigma);
  EXPECT_TRUE(m.converged);
  for (Eigen::Index i = 0; i < m.gamma2.size(); ++i) EXPECT_GE(m.gamma2(i), 0.0);
  EXPECT_LE(m.communalities().maxCoeff(), 1.0 + 1e-6);
}

TEST(Extract, Deterministic) {
  Stream rng(5);
  const auto model = cogbench::testing::simple_structure_model(15, 3, rng);
  const auto a = extract(model.sigma);
  const auto b = extract(model.sigma);
  EXPECT_TRUE(a.lambda == b.lambda);
  EXPECT_TRUE(a.gamma2 == b.gamma2);
  EXPECT_TRUE(a.eigenvalues == b.eigenvalues);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Extract, RetainedCountInvariantToColumnPermutation) {
  Stream rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = cogbench::testing::simple_structure_model(24, 2 + trial % 3, rng);
    const auto y = cogbench::testing::sample_rows(model, 144, rng);
    std::vector<int> perm(24);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 23; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    Eigen::MatrixXd yp(y.rows(), y.cols());
    for (int j = 0; j < 24; ++j) yp.col(j) = y.col(perm[j]);
    const auto a = extract(correlation(y).sigma);
    const auto b = extract(correlation(yp).sigma);
    EXPECT_EQ(a.retained, b.retained);
    for (int j = 0; j < 24; ++j)
      EXPECT_NEAR(a.communalities()(perm[j]), b.communalities()(j), 1e-6);
  }
}

TEST(Extract, NonConvergenceFlagged) {
  ExtractOptions opts;
  opts.max_iterations = 1;
  const auto m = extract(model_sigma(nine_by_three()), opts);
  EXPECT_FALSE(m.converged);
  EXPECT_EQ(m.iterations, 1);
}

TEST(Extract, RejectsIndefiniteMatrix) {
  Eigen::MatrixXd s(2, 2);
  s << 1, 2, 2, 1;
  EXPECT_THROW(extract(s), InputError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.1, 1;
  EXPECT_THROW(extract(asym), InputError);
}

TEST(Extract, HeywoodCaseClamped) {
  // A correlation of 0.99 between two indicators drives one uniqueness to the floor.
  Eigen::MatrixXd s(3, 3);
  s << 1, 0.99, 0.5, 0.99, 1, 0.5, 0.5, 0.5, 1;
  ExtractOptions opts;
  opts.n_factors = 2;
  const auto m = extract(s, opts);
  EXPECT_GE(m.gamma2.minCoeff(), 1e-4);
}

TEST(Pca, IdentityRetainsNothing) {
  const auto m = pca(Eigen::MatrixXd::Identity(5, 5));
  EXPECT_EQ(m.method, Method::kPca);
  EXPECT_EQ(m.retained, 0);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(m.eigenvalues(i), 1.0, 1e-12);
}

TEST(Pca, EquicorrelationSpectrum) {
  const double rho = 0.5;
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, rho);
  s.diagonal().setOnes();
  const auto m = pca(s);
  EXPECT_NEAR(m.eigenvalues(0), 1 + 3 * rho, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(m.eigenvalues(i), 1 - rho, 1e-12);
  EXPECT_EQ(m.retained, 1);
}

TEST(Pca, BoundaryEigenvalueNotRetained) {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(5).normalized();
  const Eigen::MatrixXd sigma = 0.64 * u * u.transpose() + 0.36 * Eigen::MatrixXd::Identity(5, 5);
  const auto m = pca(sigma);
  EXPECT_NEAR(m.eigenvalues(0), 1.0, 1e-12);
  EXPECT_EQ(m.retained, 0);
}

TEST(Scores, ZeroRowGivesZeroScores) {
  const Eigen::MatrixXd truth = nine_by_three();
  const Eigen::MatrixXd sigma = model_sigma(truth);
  const auto s = scores(Eigen::MatrixXd::Zero(2, 9), sigma, truth);
  EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Scores, RecoverNoiselessSingleFactor) {
  Stream rng(7);
  const int n = 60;
  Eigen::VectorXd g(n), a(5);
  for (int i = 0; i < n; ++i) g(i) = normal(rng);
  a << 0.9, -0.7, 0.5, 1.2, 0.3;
  const Eigen::MatrixXd y = g * a.transpose();
  const auto c = correlation(y);
  ExtractOptions opts;
  opts.n_factors = 1;
  const auto m = pca(c.sigma, opts);
  const Eigen::VectorXd x = scores(standardize(y, c), c.sigma, m.lambda).col(0);
  const double r = (x.array() - x.mean()).matrix().dot((g.array() - g.mean()).matrix()) /
                   ((x.array() - x.mean()).matrix().norm() * (g.array() - g.mean()).matrix().norm());
  EXPECT_NEAR(std::abs(r), 1.0, 1e-9);
}

TEST(Scores, DuplicatedRowsGiveIdenticalScores) {
  Stream rng(8);
  const auto model = cogbench::testing::simple_structure_model(9, 3, rng);
  Eigen::MatrixXd y = cogbench::testing::sample_rows(model, 40, rng);
  y.row(7) = y.row(3);
  const auto a = analyze(y);
  EXPECT_TRUE(a.scores.row(7) == a.scores.row(3));
}

TEST(Scores, DimensionMismatch) {
  EXPECT_THROW(scores(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 1)),
               ContractViolation);
}

TEST(Confirmatory, NestedModels) {
  const Eigen::MatrixXd sigma = model_sigma(nine_by_three());
  const auto three = confirmatory_fit(sigma, 3);
  const auto one = confirmatory_fit(sigma, 1);
  EXPECT_LT(three.rmsr, 0.01);
  EXPECT_GT(one.rmsr, three.rmsr);
  EXPECT_TRUE(three.converged);
  EXPECT_THROW(confirmatory_fit(sigma, 9), ContractViolation);
  EXPECT_THROW(confirmatory_fit(sigma, 0), ContractViolation);
}

TEST(Confirmatory, IdentityExplainsOneVariableShare) {
  // No common variance: a component carries one variable's worth (1/P);
  // the common-factor fit has nothing to explain.
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(5, 5);
  EXPECT_NEAR(confirmatory_fit(sigma, 1, Method::kPca).explained, 1.0 / 5, 1e-12);
  EXPECT_NEAR(confirmatory_fit(sigma, 1).explained, 0.0, 1e-12);
}

TEST(Congruence, AlignmentUndoesPermutationAndSign) {
  Stream rng(9);
  const auto model = cogbench::testing::simple_structure_model(12, 3, rng);
  Eigen::MatrixXd shuffled(12, 3);
  shuffled.col(0) = -model.lambda.col(2);
  shuffled.col(1) = model.lambda.col(0);
  shuffled.col(2) = model.lambda.col(1);
  const auto a = align_columns(shuffled, model.lambda);
  EXPECT_EQ(a.permutation, (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(a.signs[2], -1.0);
  EXPECT_LE((a.aligned - model.lambda).cwiseAbs().maxCoeff(), 0.0);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(a.congruence(j), 1.0, 1e-12);
}

TEST(Analyze, SyntheticThreeFactorFixture) {
  Stream rng(10);
  const auto model = cogbench::testing::simple_structure_model(27, 3, rng);
  const auto y = cogbench::testing::sample_rows(model, 300, rng);
  const auto a = analyze(y);
  EXPECT_EQ(a.model.retained, 3);
  EXPECT_EQ(a.rotation, Rotation::kVarimax);
  EXPECT_EQ(a.scores.rows(), 300);
  EXPECT_EQ(a.scores.cols(), 3);
  EXPECT_EQ(a.g_score.size(), 300);
  const auto al = align_columns(a.loadings, model.lambda);
  for (int j = 0; j < 3; ++j) EXPECT_GE(al.congruence(j), 0.95);
  // Rotation leaves the common part unchanged.
  EXPECT_LE((a.loadings * a.loadings.transpose() - a.model.lambda * a.model.lambda.transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

}  // namespace
}  // namespace cogbench::fa
