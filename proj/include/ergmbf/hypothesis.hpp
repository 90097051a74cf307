#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ergmbf {

/// H: R_E beta = 0 & R_O beta > 0. Each row is a signed unit vector or a
/// (+1, -1) difference; the edges coefficient never appears.
struct ConstrainedHypothesis {
  std::string label;
  Eigen::MatrixXd equality;  // q_E x K, linearly independent rows
  Eigen::MatrixXd order;     // q_O x K
  std::string source;
  bool complement = false;   // "none of the other hypotheses"

  bool has_equality() const { return equality.rows() > 0; }
  bool has_order() const { return order.rows() > 0; }

  /// Region membership; equalities are tested to within `tol`.
  bool contains(const Eigen::VectorXd& beta, double tol = 1e-9) const;

  /// Canonical text form ("a > b & c = 0"); parses back to the same matrices.
  std::string render(const std::vector<std::string>& names) const;
};

struct HypothesisSet {
  std::vector<std::string> coefficient_names;
  /// Stated hypotheses, then the complement when `include_complement`.
  std::vector<ConstrainedHypothesis> hypotheses;
  bool include_complement = true;
  std::vector<double> prior_probs;

  std::size_t size() const { return hypotheses.size(); }

  /// Index of the first hypothesis containing beta; the complement wins only
  /// when no stated hypothesis does.
  std::optional<std::size_t> region_of(const Eigen::VectorXd& beta, double tol = 1e-9) const;
};

/// Grammar: hypotheses separated by ';', each optionally prefixed "label:";
/// constraints separated by '&' or ','; a constraint is a chain of coefficient
/// names and the literal 0 joined by '=', '<', '>' ("a > b > 0" expands to
/// a - b > 0 and b > 0). A complement hypothesis is appended. Prior
/// probabilities default to equal over all hypotheses including the complement.
HypothesisSet parse_hypotheses(std::string_view text, const std::vector<std::string>& coef_names, int edges_index,
                               std::optional<std::vector<double>> prior_probs = std::nullopt);

}  // namespace ergmbf
