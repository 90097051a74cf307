#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ergmbf/network.hpp"

namespace ergmbf {

enum class StatKind {
  Edges,
  Mutual,
  KStar,
  Triangle,
  Gwesp,
  Gwdsp,
  Gwdegree,
  Nodecov,
  Nodefactor,
  Nodeifactor,
  Nodeofactor,
  Nodematch,
  Nodemix,
  Absdiff,
  Edgecov,
};

std::string_view to_string(StatKind kind);

/// One sufficient statistic. Only the fields relevant to `kind` are read.
struct StatisticSpec {
  StatKind kind = StatKind::Edges;
  int k = 2;                    // kstar
  double decay = 0.0;           // gwesp, gwdsp, gwdegree (fixed)
  std::string attribute;        // nodal terms
  std::string level;            // nodefactor, nodeifactor, nodeofactor
  std::pair<std::string, std::string> levels;  // nodemix
  std::string covariate;        // edgecov
  bool standardized = false;    // edgecov
  std::string name;             // optional coefficient name override

  /// Coefficient name, e.g. "kstar2", "gwesp.fixed.0.1", "edgecov.prefsim".
  std::string coefficient_name() const;
};

/// Ordered list of statistics. Serialized as
/// {"terms":[{"kind":"edges"},{"kind":"gwesp","decay":0.1}, ...]}.
struct ModelSpec {
  std::vector<StatisticSpec> terms;

  static ModelSpec parse_json(std::string_view text);
  static ModelSpec load(const std::filesystem::path& path);
  std::string to_json() const;
};

/// Mutable graph with bitset neighbourhoods for O(n/64) shared-partner counts.
class GraphState {
 public:
  explicit GraphState(const Network& net);
  GraphState(int n, bool directed);

  int size() const { return n_; }
  bool directed() const { return directed_; }
  bool has(int i, int j) const { return test(out_, i, j); }
  void set(int i, int j, bool present);

  int out_degree(int i) const { return out_deg_[static_cast<std::size_t>(i)]; }
  int in_degree(int i) const { return in_deg_[static_cast<std::size_t>(i)]; }
  /// Undirected degree (same as out_degree for undirected graphs).
  int degree(int i) const { return out_deg_[static_cast<std::size_t>(i)]; }
  long tie_count() const { return ties_; }

  /// |{k : i->k and k->j}|; for undirected graphs the common-neighbour count.
  int two_paths(int i, int j) const;
  /// |{k : i->k and j->k}|
  int common_out(int i, int j) const;
  /// |{k : k->i and k->j}|
  int common_in(int i, int j) const;

  /// Calls f(k) for every k with the given bit pattern.
  template <class F>
  void for_each_two_path(int i, int j, F&& f) const { each_and(out_, i, in_, j, f); }
  template <class F>
  void for_each_common_out(int i, int j, F&& f) const { each_and(out_, i, out_, j, f); }
  template <class F>
  void for_each_common_in(int i, int j, F&& f) const { each_and(in_, i, in_, j, f); }
  template <class F>
  void for_each_out(int i, F&& f) const { each_and(out_, i, out_, i, f); }
  template <class F>
  void for_each_in(int i, F&& f) const { each_and(in_, i, in_, i, f); }

  Network to_network() const;

 private:
  using Bits = std::vector<std::uint64_t>;
  const std::uint64_t* row(const Bits& b, int i) const { return b.data() + static_cast<std::size_t>(i) * words_; }
  bool test(const Bits& b, int i, int j) const {
    return (row(b, i)[static_cast<std::size_t>(j) >> 6] >> (static_cast<unsigned>(j) & 63U)) & 1U;
  }
  void assign(Bits& b, int i, int j, bool v);
  int popcount_and(const Bits& a, int i, const Bits& b, int j) const;

  template <class F>
  void each_and(const Bits& a, int i, const Bits& b, int j, F&& f) const {
    const auto* ra = row(a, i);
    const auto* rb = row(b, j);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = ra[w] & rb[w];
      while (bits != 0) {
        const int bit = __builtin_ctzll(bits);
        f(static_cast<int>(w * 64 + static_cast<std::size_t>(bit)));
        bits &= bits - 1;
      }
    }
  }

  int n_;
  bool directed_;
  std::size_t words_;
  Bits out_;
  Bits in_;  // mirrors out_ for undirected graphs
  std::vector<int> out_deg_;
  std::vector<int> in_deg_;
  long ties_ = 0;
};

class Term;

/// A ModelSpec bound to a network shape and its covariate data. Validation and
/// edge-covariate standardization happen here, so every later statistic is
/// computed against the same design.
class Model {
 public:
  Model(ModelSpec spec, int n, bool directed, const AttributeTable& attributes = {},
        const CovariateSet& covariates = {});
  Model(ModelSpec spec, const Network& net, const AttributeTable& attributes = {},
        const CovariateSet& covariates = {})
      : Model(std::move(spec), net.size(), net.directed(), attributes, covariates) {}

  int size() const { return static_cast<int>(terms_.size()); }
  int nodes() const { return n_; }
  bool directed() const { return directed_; }
  int edges_index() const { return edges_index_; }
  const ModelSpec& spec() const { return spec_; }
  const std::vector<std::string>& names() const { return names_; }
  int index_of(const std::string& name) const;  // -1 if absent

  /// True when every term's change statistic is constant in Y.
  bool dyad_independent() const;
  bool term_dyad_independent(int k) const;

  /// Change statistics for toggling dyad (i, j) on, computed with the rest of
  /// `g` held fixed. Independent of the current value of the (i, j) tie.
  void change_stats(const GraphState& g, int i, int j, std::span<double> out) const;
  Eigen::VectorXd sufficient_stats(const GraphState& g) const;

  /// Copy of this model restricted to a subset of coefficient names (in the
  /// original order). Used for nested fits.
  Model drop(const std::vector<std::string>& names_to_drop) const;

 private:
  Model() = default;
  void check_network(int n, bool directed) const;

  ModelSpec spec_;
  int n_ = 0;
  bool directed_ = false;
  int edges_index_ = -1;
  std::vector<std::string> names_;
  std::vector<std::shared_ptr<const Term>> terms_;

  friend Eigen::VectorXd sufficient_stats(const Network&, const Model&);
};

/// s(Y, X).
Eigen::VectorXd sufficient_stats(const Network& net, const Model& model);

/// delta_(ij)(Y, X) = s(Y+_(ij)) - s(Y-_(ij)).
Eigen::VectorXd change_stats_dyad(const Network& net, const Model& model, int i, int j);

/// D x K matrix of change statistics, rows in canonical dyad order, each row
/// relative to the observed network.
struct ChangeStatMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;
  std::vector<Dyad> dyads;
};

ChangeStatMatrix change_stat_matrix(const Network& net, const Model& model);

/// Observed tie indicators in canonical dyad order.
Eigen::VectorXd tie_indicators(const Network& net);

}  // namespace ergmbf
