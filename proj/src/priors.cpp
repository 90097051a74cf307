#include "ergmbf/priors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergmbf/error.hpp"

namespace ergmbf {

GaussianDistribution unit_information_prior(const Network& net, const Model& model, const PriorOptions& options) {
  return unit_information_prior(change_stat_matrix(net, model), model.edges_index(), options);
}

GaussianDistribution unit_information_prior(const ChangeStatMatrix& delta, int edges_index,
                                            const PriorOptions& options) {
  const auto k = static_cast<int>(delta.values.cols());
  const auto dyads = static_cast<double>(delta.values.rows());
  if (edges_index < 0 || edges_index >= k) throw InputError("prior construction needs an edges column");

  std::vector<int> rest;
  for (int c = 0; c < k; ++c) {
    if (c != edges_index) rest.push_back(c);
  }

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  cov(edges_index, edges_index) = options.edges_variance;

  if (!rest.empty()) {
    const auto m = static_cast<Eigen::Index>(rest.size());
    Eigen::MatrixXd x(delta.values.rows(), m);
    for (Eigen::Index c = 0; c < m; ++c) x.col(c) = delta.values.col(rest[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXd gram = x.transpose() * x;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > options.max_condition) {
      // The eigenvector of the smallest eigenvalue names the collinear columns.
      const Eigen::VectorXd v = eig.eigenvectors().col(0);
      std::ostringstream msg;
      msg << "collinear change statistics (condition number "
          << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) << "):";
      const double big = v.cwiseAbs().maxCoeff();
      for (Eigen::Index c = 0; c < m; ++c) {
        if (std::abs(v[c]) > 0.1 * big) msg << ' ' << delta.names[static_cast<std::size_t>(rest[static_cast<std::size_t>(c)])];
      }
      throw NumericalError(msg.str());
    }
    const Eigen::MatrixXd block = dyads * gram.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        cov(rest[static_cast<std::size_t>(a)], rest[static_cast<std::size_t>(b)]) = 0.5 * (block(a, b) + block(b, a));
      }
    }
  }
  return GaussianDistribution(delta.names, Eigen::VectorXd::Zero(k), std::move(cov));
}

}  // namespace ergmbf
