#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cogbench::fa {

enum class Method { kPrincipalAxis, kPca };
enum class Rotation { kNone, kVarimax };

std::string_view to_string(Method method);
std::string_view to_string(Rotation rotation);

struct ColumnStat {
  double mean = 0.0;
  double sd = 0.0;
};

struct CorrelationMatrix {
  Eigen::MatrixXd sigma;               // over kept columns only
  std::vector<ColumnStat> stats;       // one per input column
  std::vector<std::size_t> kept;       // input column indices, ascending
  std::vector<std::size_t> dropped;    // zero-variance input columns
};

// Pearson correlation of the columns of y (rows = observations). Constant
// columns are dropped and listed. Throws InputError when fewer than two rows
// or no varying column remains.
CorrelationMatrix correlation(const Eigen::MatrixXd& y);

// z-scores of the kept columns using the sample sd recorded in `corr`.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& y, const CorrelationMatrix& corr);

// Eigenpairs in descending order; each vector's largest-magnitude entry is
// made positive so the output is fully determined by the input.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
SymmetricEigen eigen_symmetric(const Eigen::MatrixXd& m);

struct ExtractOptions {
  double retention = 1.0;           // strict: eigenvalue > retention
  std::optional<int> n_factors;     // forces the retained count
  double gamma2_min = 1e-4;
  double tolerance = 1e-6;
  int max_iterations = 1000;
};

struct FactorModel {
  Method method = Method::kPrincipalAxis;
  Eigen::MatrixXd lambda;         // P x I, unrotated
  Eigen::VectorXd gamma2;         // uniquenesses; zero for PCA
  Eigen::VectorXd eigenvalues;    // of the final reduced matrix (Sigma for PCA)
  Eigen::MatrixXd eigenvectors;
  int retained = 0;
  Eigen::MatrixXd residual;       // Sigma - lambda lambda' - diag(gamma2)
  bool converged = true;
  int iterations = 0;
  int heywood_clamps = 0;         // uniqueness updates that hit the floor

  Eigen::VectorXd communalities() const;
};

// Iterated principal-axis extraction. Throws InputError when sigma is not a
// symmetric PSD matrix, ContractViolation when n_factors is outside [0, P].
FactorModel extract(const Eigen::MatrixXd& sigma, const ExtractOptions& opts = {});

// Principal components of sigma itself with the same retention rule.
FactorModel pca(const Eigen::MatrixXd& sigma, const ExtractOptions& opts = {});

// Regression scores y_std * inv(sigma) * lambda. A 1e-8 ridge is added when
// the condition number of sigma exceeds 1e12.
Eigen::MatrixXd scores(const Eigen::MatrixXd& y_std, const Eigen::MatrixXd& sigma,
                       const Eigen::MatrixXd& lambda);

// Root mean square of the off-diagonal entries.
double off_diagonal_rmsr(const Eigen::MatrixXd& residual);

// Sum of communalities over trace(sigma).
double explained_variance(const FactorModel& model, const Eigen::MatrixXd& sigma);

struct FitReport {
  int factors = 0;
  double rmsr = 0.0;
  double explained = 0.0;
  bool converged = true;
};

// Extraction with the retained count forced to `factors`; requires
// 1 <= factors < P.
FitReport confirmatory_fit(const Eigen::MatrixXd& sigma, int factors,
                           Method method = Method::kPrincipalAxis);

// Tucker congruence between every column of a and every column of b.
Eigen::MatrixXd congruence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Best column matching of `recovered` to `truth` (same column count, at most
// 8) by exhaustive search over permutations, with per-column sign flips.
struct Alignment {
  std::vector<int> permutation;   // truth column j <- recovered column permutation[j]
  std::vector<double> signs;
  Eigen::VectorXd congruence;     // per truth column, after alignment
  Eigen::MatrixXd aligned;        // recovered, reordered and sign-fixed
};
Alignment align_columns(const Eigen::MatrixXd& recovered, const Eigen::MatrixXd& truth);

struct AnalysisOptions {
  Method method = Method::kPrincipalAxis;
  Rotation rotation = Rotation::kVarimax;
  ExtractOptions extract;
};

struct Analysis {
  CorrelationMatrix corr;
  FactorModel model;
  Rotation rotation = Rotation::kNone;
  Eigen::MatrixXd loadings;        // rotated when requested and retained >= 2
  Eigen::MatrixXd rotation_matrix; // I x I
  Eigen::MatrixXd scores;          // N x I
  Eigen::VectorXd g_loadings;      // forced single-factor solution
  Eigen::VectorXd g_score;
  double rmsr = 0.0;
  double explained = 0.0;
};

Analysis analyze(const Eigen::MatrixXd& y, const AnalysisOptions& opts = {});

}  // namespace cogbench::fa
