#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ergmbf {

/// Multivariate normal over named coefficients. Used both for the
/// unit-information prior and for the Gaussian posterior approximation.
class GaussianDistribution {
 public:
  /// Throws NumericalError if `covariance` is not symmetric (relative 1e-12)
  /// or not positive definite.
  GaussianDistribution(std::vector<std::string> names, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  int dimension() const { return static_cast<int>(mean_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  Eigen::VectorXd standard_deviations() const;
  Eigen::MatrixXd correlation() const;

  /// Lower Cholesky factor L with L L^T = covariance.
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }

  double log_density(const Eigen::VectorXd& x) const;

 private:
  std::vector<std::string> names_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_;
};

}  // namespace ergmbf
