#pragma once

#include "ergmbf/gaussian.hpp"
#include "ergmbf/network.hpp"
#include "ergmbf/statistics.hpp"

namespace ergmbf {

struct PriorOptions {
  /// Variance of the (untestable) edges coefficient.
  double edges_variance = 1e4;
  /// Largest accepted condition number of Delta^T Delta.
  double max_condition = 1e10;
};

/// Unit-information prior N(0, diag(edges_variance, D (Delta^T Delta)^-1)),
/// where Delta is the change-statistic matrix of the observed network without
/// the edges column and D the dyad count.
GaussianDistribution unit_information_prior(const Network& net, const Model& model, const PriorOptions& options = {});

/// Same construction from a precomputed change-statistic matrix.
GaussianDistribution unit_information_prior(const ChangeStatMatrix& delta, int edges_index,
                                            const PriorOptions& options = {});

}  // namespace ergmbf
