#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ergmbf/gaussian.hpp"
#include "ergmbf/network.hpp"
#include "ergmbf/statistics.hpp"

namespace ergmbf {

/// Maximum pseudo-likelihood fit with Wald inference.
struct MpleFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd p_values;  // two-sided Wald
  Eigen::MatrixXd covariance;  // inverse observed information
  double log_pseudolikelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  long dyads = 0;
  /// The pseudo-likelihood is the exact likelihood (all terms dyad-independent).
  bool exact_likelihood = false;
};

/// Newton-Raphson logistic regression of the observed tie indicators on the
/// change-statistic rows. Throws NumericalError("pseudolikelihood MLE does not
/// exist ...") on separation or when 100 iterations do not converge.
MpleFit fit_mple(const Network& net, const Model& model);
MpleFit fit_mple(const ChangeStatMatrix& delta, const Eigen::VectorXd& ties);

struct ExchangeOptions {
  int main_iters = 20000;  // retained iterations per chain
  int aux_sweeps = 5;      // Gibbs sweeps for each auxiliary network
  int chains = 1;
  std::uint64_t seed = 1;
  double burn_in_fraction = 0.2;  // extra iterations, discarded
  double target_acceptance = 0.25;
};

struct PosteriorDraws {
  std::vector<std::string> names;
  Eigen::MatrixXd draws;   // M x K
  std::vector<int> chain;  // chain id per row
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr int kMinPosteriorDraws = 1000;

/// Exchange-algorithm MCMC for p(beta | Y) with the given Gaussian prior.
/// Random-walk proposals are adapted (scale and covariance) during burn-in
/// and frozen afterwards. Chains run concurrently and are pooled in chain order.
PosteriorDraws sample_posterior(const Network& net, const Model& model, const GaussianDistribution& prior,
                                const ExchangeOptions& options);

/// N(sample mean, sample covariance with denominator M - 1).
GaussianDistribution gaussian_approx(const PosteriorDraws& draws);

struct InformationCriteria {
  double bic_full = 0.0;
  double bic_null = 0.0;
  double aic_full = 0.0;
  double aic_null = 0.0;
  /// Evidence for the null model over the full model, exp(-(IC_null - IC_full)/2).
  double bic_evidence = 1.0;
  double aic_evidence = 1.0;
  /// False when a dyad-dependent term makes these pseudo-likelihood criteria.
  bool exact_likelihood = false;
};

/// BIC uses log(D) as the sample-size penalty.
InformationCriteria information_criteria(const MpleFit& full, const MpleFit& null_fit);

struct NormalityResult {
  std::string name;
  double ks = 0.0;
  bool flagged = false;
};

inline constexpr double kNormalityThreshold = 0.05;

/// Per-coefficient Kolmogorov-Smirnov distance between the marginal draws and
/// the marginal of `approx`; flagged above 0.05.
std::vector<NormalityResult> normality_check(const PosteriorDraws& draws, const GaussianDistribution& approx);

/// KS distance of a sample against N(mean, sd^2).
double ks_distance_normal(std::vector<double> sample, double mean, double sd);

/// One row per draw, header = coefficient names, %.17g formatting.
void write_draws_csv(const PosteriorDraws& draws, const std::filesystem::path& path);

}  // namespace ergmbf
