#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "ergmbf/network.hpp"
#include "ergmbf/statistics.hpp"

namespace ergmbf {

/// Gibbs tie-toggle chain. One sweep visits every dyad once in a fresh random
/// order and redraws its tie from the full conditional
/// P(Y_ij = 1 | rest) = sigmoid(beta^T delta_ij). Sufficient statistics are
/// tracked incrementally.
class GibbsChain {
 public:
  GibbsChain(const Model& model, const Network& start, std::uint64_t seed);

  void sweep(const Eigen::VectorXd& beta);
  void sweeps(const Eigen::VectorXd& beta, int count);

  /// Restart from `start` with its known sufficient statistics; keeps the RNG stream.
  void reset(const GraphState& start, const Eigen::VectorXd& stats);

  const GraphState& state() const { return state_; }
  const Eigen::VectorXd& stats() const { return stats_; }
  /// Consecutive sweeps that ended on the empty or complete graph.
  int degenerate_run() const { return degenerate_run_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  const Model* model_;
  GraphState state_;
  Eigen::VectorXd stats_;
  std::vector<Dyad> dyads_;
  std::vector<std::uint32_t> order_;
  std::vector<double> delta_;
  std::mt19937_64 rng_;
  long dyad_total_;
  int degenerate_run_ = 0;
};

/// A draw is flagged once the chain has sat on the empty or complete graph for
/// this many consecutive sweeps.
inline constexpr int kDegenerateSweeps = 10;

struct SamplerOptions {
  int count = 1;
  int burn_in = 50;  // sweeps
  int thin = 5;      // sweeps between retained draws (0 behaves as 1)
  std::uint64_t seed = 1;
};

struct NetworkSample {
  std::vector<Network> networks;
  std::vector<Eigen::VectorXd> stats;
  std::vector<bool> degenerate;
};

/// Simulates from the ERGM at `beta`, starting the chain at `start`.
NetworkSample sample_networks(const Eigen::VectorXd& beta, const Model& model, const Network& start,
                              const SamplerOptions& options);

/// All 2^D graphs on the model's node set with exact ERGM probabilities at
/// beta. Graph g has tie d (canonical dyad order) iff bit d of g is set.
class ExactDistribution {
 public:
  static constexpr long kMaxDyads = 20;

  ExactDistribution(const Eigen::VectorXd& beta, const Model& model);

  std::size_t graph_count() const { return static_cast<std::size_t>(stats_->rows()); }
  /// Row g holds s(Y_g).
  const Eigen::MatrixXd& stats() const { return *stats_; }
  const Eigen::VectorXd& probabilities() const { return probabilities_; }
  double log_normalizer() const { return log_normalizer_; }
  const Eigen::VectorXd& beta() const { return beta_; }

  Eigen::VectorXd mean_stats() const;
  Eigen::MatrixXd covariance_stats() const;
  double log_likelihood(const Eigen::VectorXd& observed_stats) const;
  std::size_t index_of(const Network& net) const;
  Network graph(std::size_t index) const;

  /// Same graph space at different coefficients, reusing the statistic table.
  ExactDistribution reweighted(const Eigen::VectorXd& beta) const;

 private:
  ExactDistribution() = default;
  void weigh(const Eigen::VectorXd& beta);

  int n_ = 0;
  bool directed_ = false;
  std::vector<Dyad> dyads_;
  std::shared_ptr<const Eigen::MatrixXd> stats_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd probabilities_;
  double log_normalizer_ = 0.0;
};

ExactDistribution exact_enumeration(const Eigen::VectorXd& beta, const Model& model);

}  // namespace ergmbf
