#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ergmbf/bayes_factor.hpp"
#include "ergmbf/inference.hpp"

namespace ergmbf {

using ProgressLog = std::function<void(const std::string&)>;

/// Wealth values of the 16 Florentine families, resampled as actor covariates.
std::vector<double> florentine_wealth();

/// Fixed p-value study: networks from {edges, kstar(2), absdiff(wealth)} with
/// the absdiff effect tuned so its two-sided p-value sits near 0.05.
struct JlOptions {
  std::vector<int> sizes{7, 10, 15, 20, 25, 30};
  int replicates = 50;
  double p_low = 0.045;
  double p_high = 0.055;
  int pilot_size = 100;        // networks per bisection step
  int bisection_steps = 16;
  double beta_upper = 0.2;     // bisection bracket is [0, beta_upper]
  long max_attempts = 50000;   // generated networks per size while collecting
  int generation_sweeps = 100;
  double edges = -1.80195;     // Florentine MPLE of the full model
  double kstar2 = -0.129336;
  std::vector<double> wealth = florentine_wealth();
  ExchangeOptions exchange{.main_iters = 20000, .aux_sweeps = 1};
  std::uint64_t seed = 1;
  int workers = 0;             // 0: hardware concurrency
};

struct JlRow {
  int n = 0;
  double beta_absdiff = 0.0;
  int retained = 0;
  long attempts = 0;
  int failed = 0;              // retained networks whose posterior run failed
  double median_mple = 0.0;
  double median_p = 0.0;       // pseudo-likelihood ratio test, the tuning target
  double median_wald_p = 0.0;
  double median_posterior_mean = 0.0;
  double median_bf = 0.0;      // BF of absdiff = 0 against absdiff != 0
  double median_posterior_prob = 0.0;
  double median_bic_evidence = 0.0;
  double median_aic_evidence = 0.0;
};

std::vector<JlRow> simulate_jl(const JlOptions& options, const ProgressLog& log = {});
void write_jl_csv(const std::vector<JlRow>& rows, const std::filesystem::path& path);

/// Directed networks with three standardized dyadic covariates whose effects
/// are (beta, 2 beta, 3 beta); tests the ordering against equality against
/// the complement.
struct OrderOptions {
  std::vector<int> sizes{10, 30};
  std::vector<double> betas{-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};
  int replicates = 50;
  double edges = -2.0;
  double mutual = 1.0;
  double gwesp = 0.3;
  double decay = 0.1;
  int generation_sweeps = 200;
  ExchangeOptions exchange{.main_iters = 20000, .aux_sweeps = 1};
  McOptions mc;
  std::uint64_t seed = 1;
  int workers = 0;
};

inline const std::vector<std::string> kOrderCovariates{"prefsim", "inflattr", "committee"};

struct OrderRow {
  int n = 0;
  double beta = 0.0;
  int used = 0;
  int failed = 0;              // no MPLE, degenerate draw or sampler failure
  bool flagged = false;        // no usable replicate at this grid point
  double median_density = 0.0;
  double median_p_order = 0.0;
  double median_p_equal = 0.0;
  double median_p_complement = 0.0;
  double median_bf_order = 0.0;         // ordering vs unconstrained
  double median_prior_order_prob = 0.0; // prior probability of the ordering
};

std::vector<OrderRow> simulate_order(const OrderOptions& options, const ProgressLog& log = {});
void write_order_csv(const std::vector<OrderRow>& rows, const std::filesystem::path& path);

double median(std::vector<double> values);

}  // namespace ergmbf
