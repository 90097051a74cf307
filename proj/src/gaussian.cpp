#include "ergmbf/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "ergmbf/error.hpp"

namespace ergmbf {

GaussianDistribution::GaussianDistribution(std::vector<std::string> names, Eigen::VectorXd mean,
                                           Eigen::MatrixXd covariance)
    : names_(std::move(names)), mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const auto k = mean_.size();
  if (covariance_.rows() != k || covariance_.cols() != k) throw NumericalError("covariance dimension mismatch");
  if (static_cast<Eigen::Index>(names_.size()) != k) throw NumericalError("coefficient name count mismatch");
  if (!mean_.allFinite() || !covariance_.allFinite()) throw NumericalError("non-finite Gaussian parameters");
  const double scale = std::max(covariance_.cwiseAbs().maxCoeff(), 1e-300);
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalError("covariance matrix is not symmetric");
  }
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance matrix is not positive definite");
  chol_ = llt.matrixL();
}

Eigen::VectorXd GaussianDistribution::standard_deviations() const { return covariance_.diagonal().cwiseSqrt(); }

Eigen::MatrixXd GaussianDistribution::correlation() const {
  const Eigen::VectorXd inv = standard_deviations().cwiseInverse();
  return inv.asDiagonal() * covariance_ * inv.asDiagonal();
}

double GaussianDistribution::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + log_det + static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi));
}

}  // namespace ergmbf
