#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ergmbf/bayes_factor.hpp"
#include "ergmbf/gaussian.hpp"
#include "ergmbf/inference.hpp"

namespace ergmbf {

/// Everything `fit` reports: the MPLE next to the Bayesian estimates.
struct FitResult {
  MpleFit mple;
  GaussianDistribution prior;
  PosteriorDraws draws;
  GaussianDistribution posterior;
  std::vector<NormalityResult> normality;
};

nlohmann::ordered_json to_json(const GaussianDistribution& g);
nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const BayesFactorReport& report);
nlohmann::ordered_json to_json(const std::vector<ExploratoryResult>& results);

std::string format_fit(const FitResult& fit);
std::string format_report(const BayesFactorReport& report);
std::string format_exploratory(const std::vector<ExploratoryResult>& results);

}  // namespace ergmbf
