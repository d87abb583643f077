#include "cogbench/varimax.hpp"

#include <cmath>

namespace cogbench::fa {

double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const double p = static_cast<double>(loadings.rows());
  if (p == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
    const Eigen::ArrayXd sq = loadings.col(j).array().square();
    const double m = sq.sum() / p;
    total += sq.square().sum() / p - m * m;
  }
  return total;
}

VarimaxResult varimax(const Eigen::MatrixXd& lambda, double tolerance, int max_sweeps) {
  const Eigen::Index p = lambda.rows();
  const Eigen::Index k = lambda.cols();
  VarimaxResult out;
  out.rotation = Eigen::MatrixXd::Identity(k, k);
  if (k < 2) {
    out.loadings = lambda;
    out.criterion.push_back(varimax_criterion(lambda));
    return out;
  }

  // Kaiser normalization; zero rows stay zero.
  const Eigen::VectorXd h = lambda.rowwise().norm();
  Eigen::MatrixXd x = lambda;
  for (Eigen::Index i = 0; i < p; ++i)
    if (h(i) > 0) x.row(i) /= h(i);

  const double n = static_cast<double>(p);
  double current = varimax_criterion(x);
  out.criterion.push_back(current);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index a = 0; a < k - 1; ++a) {
      for (Eigen::Index b = a + 1; b < k; ++b) {
        const Eigen::ArrayXd xa = x.col(a).array();
        const Eigen::ArrayXd xb = x.col(b).array();
        const Eigen::ArrayXd u = xa.square() - xb.square();
        const Eigen::ArrayXd v = 2.0 * xa * xb;
        const double su = u.sum();
        const double sv = v.sum();
        const double num = 2.0 * (u * v).sum() - 2.0 * su * sv / n;
        const double den = (u.square() - v.square()).sum() - (su * su - sv * sv) / n;
        const double phi = 0.25 * std::atan2(num, den);
        if (phi == 0.0) continue;
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        const Eigen::VectorXd ca = x.col(a);
        x.col(a) = c * ca + s * x.col(b);
        x.col(b) = -s * ca + c * x.col(b);
        const Eigen::VectorXd ra = out.rotation.col(a);
        out.rotation.col(a) = c * ra + s * out.rotation.col(b);
        out.rotation.col(b) = -s * ra + c * out.rotation.col(b);
      }
    }
    ++out.sweeps;
    const double next = varimax_criterion(x);
    out.criterion.push_back(next);
    const bool done = next - current < tolerance;
    current = next;
    if (done) break;
  }

  out.loadings = lambda * out.rotation;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    out.loadings.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.loadings(arg, j) < 0) {
      out.loadings.col(j) *= -1.0;
      out.rotation.col(j) *= -1.0;
    }
  }
  return out;
}

}  // namespace cogbench::fa
