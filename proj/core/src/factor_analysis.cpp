#include "cogbench/factor_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cogbench/errors.hpp"
#include "cogbench/varimax.hpp"

namespace cogbench::fa {
namespace {

constexpr double kSymmetryTolerance = 1e-8;
constexpr double kPsdTolerance = 1e-8;
constexpr double kConditionLimit = 1e12;
constexpr double kRidge = 1e-8;

void check_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw ContractViolation(std::string(what) + ": expected a non-empty square matrix");
}

void validate_sigma(const Eigen::MatrixXd& sigma) {
  check_square(sigma, "sigma");
  if (!sigma.allFinite()) throw InputError("correlation matrix has non-finite entries");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale)
    throw InputError("correlation matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTolerance * scale)
    throw InputError("correlation matrix is not positive semidefinite (min eigenvalue " +
                     std::to_string(es.eigenvalues().minCoeff()) + ")");
}

// Strict comparison; eigenvalues within rounding of the threshold do not count.
constexpr double kRetentionBand = 1e-10;

int count_above(const Eigen::VectorXd& values, double threshold) {
  int n = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) n += values(i) > threshold + kRetentionBand ? 1 : 0;
  return n;
}

Eigen::MatrixXd loadings_from(const SymmetricEigen& eig, int k) {
  Eigen::MatrixXd lambda(eig.vectors.rows(), k);
  for (int j = 0; j < k; ++j)
    lambda.col(j) = eig.vectors.col(j) * std::sqrt(std::max(0.0, eig.values(j)));
  return lambda;
}

int retained_count(const SymmetricEigen& eig, const ExtractOptions& opts) {
  return opts.n_factors ? *opts.n_factors : count_above(eig.values, opts.retention);
}

void check_forced(const ExtractOptions& opts, Eigen::Index p) {
  if (opts.n_factors && (*opts.n_factors < 0 || *opts.n_factors > p))
    throw ContractViolation("n_factors must lie in [0, " + std::to_string(p) + "]");
  if (opts.max_iterations < 1) throw ContractViolation("max_iterations must be >= 1");
}

// 1 / diag(inv(sigma)) computed through the eigendecomposition so singular
// matrices (duplicated columns) give a zero uniqueness instead of NaN.
Eigen::VectorXd smc_uniqueness(const Eigen::MatrixXd& sigma) {
  const SymmetricEigen eig = eigen_symmetric(sigma);
  const double floor = 1e-12 * std::max(1.0, eig.values(0));
  Eigen::VectorXd inv_values = eig.values.unaryExpr([&](double v) { return 1.0 / std::max(v, floor); });
  const Eigen::VectorXd inv_diag =
      (eig.vectors.array().square().rowwise() * inv_values.transpose().array()).rowwise().sum();
  return inv_diag.cwiseInverse();
}

Eigen::MatrixXd residual_of(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& lambda,
                            const Eigen::VectorXd& gamma2) {
  Eigen::MatrixXd r = sigma - lambda * lambda.transpose();
  r.diagonal() -= gamma2;
  return r;
}

}  // namespace

std::string_view to_string(Method method) {
  return method == Method::kPca ? "pca" : "fa";
}

std::string_view to_string(Rotation rotation) {
  return rotation == Rotation::kVarimax ? "varimax" : "none";
}

Eigen::VectorXd FactorModel::communalities() const {
  return lambda.rowwise().squaredNorm();
}

CorrelationMatrix correlation(const Eigen::MatrixXd& y) {
  const Eigen::Index n = y.rows();
  if (n < 2) throw InputError("correlation needs at least 2 observations, got " + std::to_string(n));
  if (!y.allFinite()) throw InputError("performance matrix has non-finite entries");

  CorrelationMatrix out;
  out.stats.resize(static_cast<std::size_t>(y.cols()));
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    const double mean = y.col(c).mean();
    const double ss = (y.col(c).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.stats[static_cast<std::size_t>(c)] = {mean, sd};
    // Relative test so rounding noise on a constant column still counts as constant.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) out.dropped.push_back(static_cast<std::size_t>(c));
    else out.kept.push_back(static_cast<std::size_t>(c));
  }
  if (out.kept.empty()) throw InputError("every column of the performance matrix is constant");

  const Eigen::MatrixXd z = standardize(y, out);
  Eigen::MatrixXd s = z.transpose() * z / static_cast<double>(n - 1);
  s = 0.5 * (s + s.transpose()).eval();
  s = s.cwiseMax(-1.0).cwiseMin(1.0);
  s.diagonal().setOnes();
  out.sigma = std::move(s);
  return out;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& y, const CorrelationMatrix& corr) {
  if (static_cast<std::size_t>(y.cols()) != corr.stats.size())
    throw ContractViolation("standardize: column count differs from the correlation input");
  Eigen::MatrixXd z(y.rows(), static_cast<Eigen::Index>(corr.kept.size()));
  for (std::size_t j = 0; j < corr.kept.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(corr.kept[j]);
    const ColumnStat& st = corr.stats[corr.kept[j]];
    z.col(static_cast<Eigen::Index>(j)) = (y.col(c).array() - st.mean) / st.sd;
  }
  return z;
}

SymmetricEigen eigen_symmetric(const Eigen::MatrixXd& m) {
  check_square(m, "eigen_symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw InternalError("symmetric eigensolver failed");
  const Eigen::Index p = m.rows();
  SymmetricEigen out;
  out.values.resize(p);
  out.vectors.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::Index src = p - 1 - j;
    out.values(j) = es.eigenvalues()(src);
    Eigen::VectorXd v = es.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.vectors.col(j) = v;
  }
  return out;
}

FactorModel extract(const Eigen::MatrixXd& sigma, const ExtractOptions& opts) {
  validate_sigma(sigma);
  check_forced(opts, sigma.rows());
  const Eigen::VectorXd diag = sigma.diagonal();
  auto clamp = [&](Eigen::VectorXd g, int* clamps) {
    for (Eigen::Index p = 0; p < g.size(); ++p) {
      if (g(p) < opts.gamma2_min) {
        if (clamps) ++*clamps;
        g(p) = opts.gamma2_min;
      }
      g(p) = std::min(g(p), std::max(diag(p), opts.gamma2_min));
    }
    return g;
  };

  FactorModel model;
  model.method = Method::kPrincipalAxis;
  model.converged = false;
  Eigen::VectorXd gamma2 = clamp(smc_uniqueness(sigma), nullptr);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::MatrixXd reduced = sigma;
    reduced.diagonal() -= gamma2;
    const SymmetricEigen eig = eigen_symmetric(reduced);
    const Eigen::MatrixXd lambda = loadings_from(eig, retained_count(eig, opts));
    int clamps = 0;
    const Eigen::VectorXd next = clamp(diag - lambda.rowwise().squaredNorm(), &clamps);
    const double delta = (next - gamma2).cwiseAbs().maxCoeff();
    gamma2 = next;
    model.iterations = it;
    model.heywood_clamps = clamps;
    if (delta < opts.tolerance) {
      model.converged = true;
      break;
    }
  }

  // Final decomposition uses the stored uniquenesses so A D A' reproduces
  // sigma - diag(gamma2) exactly.
  Eigen::MatrixXd reduced = sigma;
  reduced.diagonal() -= gamma2;
  SymmetricEigen eig = eigen_symmetric(reduced);
  model.retained = retained_count(eig, opts);
  model.lambda = loadings_from(eig, model.retained);
  model.gamma2 = gamma2;
  model.eigenvalues = std::move(eig.values);
  model.eigenvectors = std::move(eig.vectors);
  model.residual = residual_of(sigma, model.lambda, model.gamma2);
  return model;
}

FactorModel pca(const Eigen::MatrixXd& sigma, const ExtractOptions& opts) {
  validate_sigma(sigma);
  check_forced(opts, sigma.rows());
  SymmetricEigen eig = eigen_symmetric(sigma);
  FactorModel model;
  model.method = Method::kPca;
  model.retained = retained_count(eig, opts);
  model.lambda = loadings_from(eig, model.retained);
  model.gamma2 = Eigen::VectorXd::Zero(sigma.rows());
  model.eigenvalues = std::move(eig.values);
  model.eigenvectors = std::move(eig.vectors);
  model.residual = residual_of(sigma, model.lambda, model.gamma2);
  return model;
}

Eigen::MatrixXd scores(const Eigen::MatrixXd& y_std, const Eigen::MatrixXd& sigma,
                       const Eigen::MatrixXd& lambda) {
  check_square(sigma, "scores");
  if (y_std.cols() != sigma.rows() || lambda.rows() != sigma.rows())
    throw ContractViolation("scores: y_std, sigma and lambda dimensions disagree");
  if (lambda.cols() == 0) return Eigen::MatrixXd(y_std.rows(), 0);

  const SymmetricEigen eig = eigen_symmetric(sigma);
  const double top = eig.values(0);
  const double bottom = eig.values(eig.values.size() - 1);
  Eigen::MatrixXd s = sigma;
  if (!(bottom > 0.0) || top / bottom > kConditionLimit) s.diagonal().array() += kRidge;
  const Eigen::MatrixXd weights = s.ldlt().solve(lambda);
  return y_std * weights;
}

double off_diagonal_rmsr(const Eigen::MatrixXd& residual) {
  const Eigen::Index p = residual.rows();
  if (p < 2) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j) sum += residual(i, j) * residual(i, j);
  return std::sqrt(sum / static_cast<double>(p * (p - 1)));
}

double explained_variance(const FactorModel& model, const Eigen::MatrixXd& sigma) {
  return model.communalities().sum() / sigma.trace();
}

FitReport confirmatory_fit(const Eigen::MatrixXd& sigma, int factors, Method method) {
  check_square(sigma, "confirmatory_fit");
  if (factors < 1 || factors >= sigma.rows())
    throw ContractViolation("hypothesized factor count must lie in [1, P)");
  ExtractOptions opts;
  opts.n_factors = factors;
  const FactorModel model = method == Method::kPca ? pca(sigma, opts) : extract(sigma, opts);
  return {factors, off_diagonal_rmsr(model.residual), explained_variance(model, sigma),
          model.converged};
}

Eigen::MatrixXd congruence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw ContractViolation("congruence: row counts differ");
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const double denom = a.col(i).norm() * b.col(j).norm();
      out(i, j) = denom > 0.0 ? a.col(i).dot(b.col(j)) / denom : 0.0;
    }
  }
  return out;
}

Alignment align_columns(const Eigen::MatrixXd& recovered, const Eigen::MatrixXd& truth) {
  const Eigen::Index k = truth.cols();
  if (recovered.cols() != k || recovered.rows() != truth.rows())
    throw ContractViolation("align_columns: shapes differ");
  if (k > 8) throw ContractViolation("align_columns: at most 8 columns");
  const Eigen::MatrixXd c = congruence(recovered, truth);

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -1.0;
  do {
    double score = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) score += std::abs(c(perm[static_cast<std::size_t>(j)], j));
    if (score > best_score + 1e-15) {
      best_score = score;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Alignment out;
  out.permutation = best;
  out.signs.resize(static_cast<std::size_t>(k));
  out.congruence.resize(k);
  out.aligned.resize(recovered.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const int src = best[static_cast<std::size_t>(j)];
    const double sign = c(src, j) < 0 ? -1.0 : 1.0;
    out.signs[static_cast<std::size_t>(j)] = sign;
    out.congruence(j) = sign * c(src, j);
    out.aligned.col(j) = sign * recovered.col(src);
  }
  return out;
}

Analysis analyze(const Eigen::MatrixXd& y, const AnalysisOptions& opts) {
  Analysis out;
  out.corr = correlation(y);
  const Eigen::MatrixXd& sigma = out.corr.sigma;
  auto run = [&](const ExtractOptions& eo) {
    return opts.method == Method::kPca ? pca(sigma, eo) : extract(sigma, eo);
  };
  out.model = run(opts.extract);
  out.rmsr = off_diagonal_rmsr(out.model.residual);
  out.explained = explained_variance(out.model, sigma);

  out.loadings = out.model.lambda;
  out.rotation_matrix = Eigen::MatrixXd::Identity(out.model.retained, out.model.retained);
  if (opts.rotation == Rotation::kVarimax && out.model.retained >= 2) {
    VarimaxResult vr = varimax(out.model.lambda);
    out.loadings = std::move(vr.loadings);
    out.rotation_matrix = std::move(vr.rotation);
    out.rotation = Rotation::kVarimax;
  }

  const Eigen::MatrixXd z = standardize(y, out.corr);
  out.scores = scores(z, sigma, out.loadings);

  ExtractOptions single = opts.extract;
  single.n_factors = 1;
  const FactorModel g = run(single);
  out.g_loadings = g.lambda.col(0);
  out.g_score = scores(z, sigma, g.lambda).col(0);
  return out;
}

}  // namespace cogbench::fa
