#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ergmbf/gaussian.hpp"
#include "ergmbf/hypothesis.hpp"

namespace ergmbf {

struct McOptions {
  long draws = 100000;  // total draws, taken as draws/2 antithetic pairs
  std::uint64_t seed = 1;
};

struct ProbabilityEstimate {
  double value = 1.0;
  double mc_se = 0.0;  // 0 for closed-form values
};

/// Density of R_E beta at 0 under g (closed form).
double density_at_null(const GaussianDistribution& g, const Eigen::MatrixXd& equality);

/// P(R_O beta > 0 | R_E beta = 0) under g. Closed form for one order row,
/// antithetic Monte Carlo otherwise.
ProbabilityEstimate conditional_order_prob(const GaussianDistribution& g, const Eigen::MatrixXd& equality,
                                           const Eigen::MatrixXd& order, const McOptions& mc);

/// Extended Savage-Dickey decomposition of BF_tu. The posterior terms measure
/// relative fit, the prior terms relative complexity.
struct BfComponents {
  double posterior_density = 1.0;
  double prior_density = 1.0;
  ProbabilityEstimate posterior_prob;
  ProbabilityEstimate prior_prob;
  double bf = 1.0;
};

BfComponents bf_vs_unconstrained(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                                 const ConstrainedHypothesis& h, const McOptions& mc);

struct ComplementResult {
  bool dropped = false;
  ProbabilityEstimate prior_prob;      // P(beta in complement)
  ProbabilityEstimate posterior_prob;
  double bf = 1.0;
};

inline constexpr double kMinComplementPrior = 1e-6;

/// BF of "none of the stated hypotheses" against the unconstrained model,
/// from joint Monte Carlo membership in the union of the order-only regions.
/// Equality-constrained hypotheses have measure zero and are ignored; with no
/// order regions the complement is the unconstrained model and BF = 1.
ComplementResult complement_bf(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                               const HypothesisSet& hset, const McOptions& mc);

struct EvidenceSummary {
  Eigen::MatrixXd matrix;  // (t, t') = BF_tu / BF_t'u
  std::vector<double> posterior_probs;
};

EvidenceSummary evidence_matrix_and_posteriors(const std::vector<double>& bf_tu, const std::vector<double>& prior_probs);

struct ExploratoryResult {
  std::string name;
  double bf_zero = 1.0;
  double bf_negative = 1.0;
  double bf_positive = 1.0;
  double p_zero = 1.0 / 3.0;
  double p_negative = 1.0 / 3.0;
  double p_positive = 1.0 / 3.0;
};

/// beta_k = 0 vs beta_k < 0 vs beta_k > 0 with equal prior probabilities, for
/// every coefficient except the edges coefficient.
std::vector<ExploratoryResult> exploratory_test(const GaussianDistribution& prior,
                                                const GaussianDistribution& posterior, int edges_index);

enum class RafteryCategory {
  DecisiveAgainst,
  StrongAgainst,
  PositiveAgainst,
  WeakAgainst,
  NoPreference,
  WeakFor,
  PositiveFor,
  StrongFor,
  DecisiveFor,
};

/// Symmetric thresholds 1/150, 1/20, 1/3, 1, 3, 20, 150.
RafteryCategory raftery_label(double bf);
std::string_view to_string(RafteryCategory c);

struct HypothesisResult {
  std::string label;
  std::string text;
  bool complement = false;
  BfComponents components;  // for the complement: prior/posterior region probabilities
};

struct BayesFactorReport {
  std::vector<HypothesisResult> hypotheses;
  Eigen::MatrixXd evidence;
  std::vector<double> prior_probs;
  std::vector<double> posterior_probs;
  McOptions settings;
  std::vector<std::string> notices;

  std::vector<double> bf_vs_unconstrained() const;
};

/// Full confirmatory test: BF_tu for every hypothesis, the complement (dropped
/// with a notice if the stated regions exhaust the space), the evidence matrix
/// and posterior probabilities.
BayesFactorReport test_hypotheses(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                                  const HypothesisSet& hset, const McOptions& mc);

}  // namespace ergmbf
