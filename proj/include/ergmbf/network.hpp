#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergmbf {

/// An ordered node pair. For undirected networks i < j always.
struct Dyad {
  int i;
  int j;
  friend bool operator==(const Dyad&, const Dyad&) = default;
};

/// Binary network on n >= 2 actors without self-ties. Undirected networks
/// store a symmetric adjacency relation. Immutable after construction.
class Network {
 public:
  /// `adjacency` is row-major n x n. The diagonal must be zero and, if the
  /// network is undirected, the matrix symmetric; violations throw InputError.
  Network(int n, bool directed, std::vector<std::uint8_t> adjacency,
          std::vector<std::string> labels = {});

  static Network empty(int n, bool directed);

  int size() const { return n_; }
  bool directed() const { return directed_; }
  bool has_tie(int i, int j) const { return adjacency_[index(i, j)] != 0; }

  /// Number of ties: unordered pairs if undirected, ordered pairs if directed.
  long tie_count() const;
  double density() const;

  const std::vector<std::uint8_t>& adjacency() const { return adjacency_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Copy with the tie for dyad (i, j) set to `present` (both directions when
  /// undirected).
  Network with_tie(int i, int j, bool present) const;

  friend bool operator==(const Network& a, const Network& b) {
    return a.n_ == b.n_ && a.directed_ == b.directed_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_;
  bool directed_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::string> labels_;
};

/// D: n(n-1) for directed networks, n(n-1)/2 for undirected ones.
long dyad_count(const Network& net);
long dyad_count(int n, bool directed);

/// Lexicographic dyad order: (i, j) with i < j when undirected, i != j when
/// directed. Row order of every change-statistic matrix.
std::vector<Dyad> canonical_dyads(int n, bool directed);

enum class NetworkFormat { EdgeList, Adjacency };

struct NetworkLoadOptions {
  bool directed = false;
  NetworkFormat format = NetworkFormat::Adjacency;
  /// Edge lists only. Required to represent isolates beyond the largest index.
  std::optional<int> node_count;
  /// Edge lists only. When set, endpoints must be one of these labels.
  std::vector<std::string> labels;
};

struct LoadedNetwork {
  Network network;
  int dropped_self_ties = 0;
};

/// Edge list: CSV with header `from,to`; endpoints are 1-based indices or node
/// labels. Undirected edge lists are symmetrized by logical OR. Adjacency:
/// headerless square 0/1 CSV; an asymmetric matrix declared undirected is an
/// error. Self-ties are dropped and counted in both formats.
LoadedNetwork load_network(const std::filesystem::path& path, const NetworkLoadOptions& options);

/// Writes `from,to` rows with 1-based indices, each undirected tie once.
void write_edge_list(const Network& net, const std::filesystem::path& path);

enum class AttributeKind { Numeric, Categorical };

struct AttributeColumn {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  std::vector<double> numeric;
  std::vector<std::string> labels;  // categorical values per node
  std::vector<std::string> levels;  // sorted distinct labels
  std::string reference;            // reference level, defaults to levels.front()
};

/// Per-node attribute columns. Every column holds exactly `rows()` entries.
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(int rows) : rows_(rows) {}

  int rows() const { return rows_; }
  void add_numeric(std::string name, std::vector<double> values);
  void add_categorical(std::string name, std::vector<std::string> values,
                       std::optional<std::string> reference = std::nullopt);

  bool contains(const std::string& name) const;
  const AttributeColumn& column(const std::string& name) const;
  const std::vector<AttributeColumn>& columns() const { return columns_; }

 private:
  int rows_ = 0;
  std::vector<AttributeColumn> columns_;
};

/// Columns absent from `schema` are typed numeric when every entry parses as a
/// number and categorical otherwise.
AttributeTable load_node_attributes(const std::filesystem::path& path,
                                    const std::map<std::string, AttributeKind>& schema,
                                    int expected_rows);

/// Dyadic covariate matrix, row-major n x n, diagonal stored as 0.
struct DyadCovariate {
  std::string name;
  int n = 0;
  std::vector<double> values;

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
  }
};

DyadCovariate make_dyad_covariate(std::string name, int n, std::vector<double> values);

/// Headerless square numeric CSV. `expected_n`, when given, must match.
DyadCovariate load_dyad_covariate(const std::filesystem::path& path, std::string name,
                                  std::optional<int> expected_n = std::nullopt);

using CovariateSet = std::map<std::string, DyadCovariate>;

}  // namespace ergmbf
