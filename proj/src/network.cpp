#include "ergmbf/network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ergmbf/error.hpp"

namespace ergmbf {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(split_csv(line));
  }
  return rows;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long> parse_index(const std::string& s) {
  if (s.empty()) return std::nullopt;
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + " (row " + std::to_string(row + 1) + ")";
}

}  // namespace

Network::Network(int n, bool directed, std::vector<std::uint8_t> adjacency,
                 std::vector<std::string> labels)
    : n_(n), directed_(directed), adjacency_(std::move(adjacency)), labels_(std::move(labels)) {
  if (n_ < 2) throw InputError("a network needs at least 2 nodes, got " + std::to_string(n_));
  const auto cells = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  if (adjacency_.size() != cells) throw InputError("adjacency size does not match n*n");
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(n_)) {
    throw InputError("label count does not match node count");
  }
  for (int i = 0; i < n_; ++i) {
    if (adjacency_[index(i, i)] != 0) throw InputError("self-tie at node " + std::to_string(i + 1));
    for (int j = 0; j < n_; ++j) {
      auto& v = adjacency_[index(i, j)];
      if (v > 1) throw InputError("adjacency entries must be 0 or 1");
      if (!directed_ && v != adjacency_[index(j, i)]) {
        throw InputError("undirected adjacency is not symmetric at (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")");
      }
    }
  }
}

Network Network::empty(int n, bool directed) {
  return Network(n, directed, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0));
}

long Network::tie_count() const {
  long total = 0;
  for (auto v : adjacency_) total += v;
  return directed_ ? total : total / 2;
}

double Network::density() const {
  return static_cast<double>(tie_count()) / static_cast<double>(dyad_count(*this));
}

Network Network::with_tie(int i, int j, bool present) const {
  if (i == j) throw InputError("with_tie: i == j");
  auto adj = adjacency_;
  adj[index(i, j)] = present ? 1 : 0;
  if (!directed_) adj[index(j, i)] = present ? 1 : 0;
  return Network(n_, directed_, std::move(adj), labels_);
}

long dyad_count(int n, bool directed) {
  const long nn = n;
  return directed ? nn * (nn - 1) : nn * (nn - 1) / 2;
}

long dyad_count(const Network& net) { return dyad_count(net.size(), net.directed()); }

std::vector<Dyad> canonical_dyads(int n, bool directed) {
  std::vector<Dyad> out;
  out.reserve(static_cast<std::size_t>(dyad_count(n, directed)));
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i != j) out.push_back({i, j});
    }
  }
  return out;
}

LoadedNetwork load_network(const std::filesystem::path& path, const NetworkLoadOptions& options) {
  auto rows = read_rows(path);
  int dropped = 0;

  if (options.format == NetworkFormat::Adjacency) {
    const auto n = rows.size();
    if (n < 2) throw InputError(path.string() + ": network needs at least 2 nodes");
    std::vector<std::uint8_t> adj(n * n, 0);
    for (std::size_t r = 0; r < n; ++r) {
      if (rows[r].size() != n) {
        throw InputError(where(path, r) + ": adjacency matrix is not square (" + std::to_string(rows[r].size()) +
                         " columns, " + std::to_string(n) + " rows)");
      }
      for (std::size_t c = 0; c < n; ++c) {
        const auto& tok = rows[r][c];
        if (tok != "0" && tok != "1") throw InputError(where(path, r) + ": entry '" + tok + "' is not 0/1");
        if (r == c) {
          if (tok == "1") ++dropped;
          continue;
        }
        adj[r * n + c] = tok == "1" ? 1 : 0;
      }
    }
    for (std::size_t r = 0; r < n && !options.directed; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) {
        if (adj[r * n + c] != adj[c * n + r]) {
          throw InputError(path.string() + ": undirected adjacency is asymmetric at (" + std::to_string(r + 1) + "," +
                           std::to_string(c + 1) + ")");
        }
      }
    }
    return {Network(static_cast<int>(n), options.directed, std::move(adj), options.labels), dropped};
  }

  if (rows.empty()) throw InputError(path.string() + ": missing header `from,to`");
  if (rows[0].size() != 2 || rows[0][0] != "from" || rows[0][1] != "to") {
    throw InputError(path.string() + ": edge list header must be `from,to`");
  }
  rows.erase(rows.begin());

  std::vector<std::string> labels = options.labels;
  std::unordered_map<std::string, int> by_label;
  for (std::size_t k = 0; k < labels.size(); ++k) by_label.emplace(labels[k], static_cast<int>(k));

  bool numeric = labels.empty();
  for (const auto& row : rows) {
    if (row.size() != 2) throw InputError(path.string() + ": edge list rows must have two fields");
    for (const auto& tok : row) {
      auto v = parse_index(tok);
      if (!v || *v < 1) numeric = false;
    }
  }

  std::vector<std::pair<int, int>> ties;
  int max_index = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int ends[2];
    for (int e = 0; e < 2; ++e) {
      const auto& tok = rows[r][e];
      if (numeric) {
        ends[e] = static_cast<int>(*parse_index(tok)) - 1;
      } else {
        auto it = by_label.find(tok);
        if (it == by_label.end()) {
          if (!options.labels.empty()) throw InputError(where(path, r + 1) + ": unknown node label '" + tok + "'");
          it = by_label.emplace(tok, static_cast<int>(labels.size())).first;
          labels.push_back(tok);
        }
        ends[e] = it->second;
      }
      max_index = std::max(max_index, ends[e] + 1);
    }
    ties.emplace_back(ends[0], ends[1]);
  }

  int n = numeric ? max_index : static_cast<int>(labels.size());
  if (options.node_count) {
    if (*options.node_count < n) {
      throw InputError(path.string() + ": edge list references " + std::to_string(n) +
                       " nodes but node count is " + std::to_string(*options.node_count));
    }
    n = *options.node_count;
  }
  if (n < 2) throw InputError(path.string() + ": network needs at least 2 nodes");
  if (!numeric && labels.size() < static_cast<std::size_t>(n)) {
    for (int k = static_cast<int>(labels.size()); k < n; ++k) labels.push_back(std::to_string(k + 1));
  }

  const auto nn = static_cast<std::size_t>(n);
  std::vector<std::uint8_t> adj(nn * nn, 0);
  for (auto [i, j] : ties) {
    if (i == j) {
      ++dropped;
      continue;
    }
    adj[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)] = 1;
    if (!options.directed) adj[static_cast<std::size_t>(j) * nn + static_cast<std::size_t>(i)] = 1;
  }
  return {Network(n, options.directed, std::move(adj), numeric ? options.labels : labels), dropped};
}

void write_edge_list(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path.string());
  out << "from,to\n";
  for (const auto& d : canonical_dyads(net.size(), net.directed())) {
    if (net.has_tie(d.i, d.j)) out << d.i + 1 << ',' << d.j + 1 << '\n';
  }
}

void AttributeTable::add_numeric(std::string name, std::vector<double> values) {
  if (static_cast<int>(values.size()) != rows_) {
    throw InputError("attribute '" + name + "' has " + std::to_string(values.size()) + " entries, expected " +
                     std::to_string(rows_));
  }
  if (contains(name)) throw InputError("duplicate attribute column '" + name + "'");
  AttributeColumn col;
  col.name = std::move(name);
  col.kind = AttributeKind::Numeric;
  col.numeric = std::move(values);
  columns_.push_back(std::move(col));
}

void AttributeTable::add_categorical(std::string name, std::vector<std::string> values,
                                     std::optional<std::string> reference) {
  if (static_cast<int>(values.size()) != rows_) {
    throw InputError("attribute '" + name + "' has " + std::to_string(values.size()) + " entries, expected " +
                     std::to_string(rows_));
  }
  if (contains(name)) throw InputError("duplicate attribute column '" + name + "'");
  std::set<std::string> distinct;
  for (const auto& v : values) {
    if (v.empty()) throw InputError("attribute '" + name + "' has an empty categorical level");
    distinct.insert(v);
  }
  AttributeColumn col;
  col.name = std::move(name);
  col.kind = AttributeKind::Categorical;
  col.labels = std::move(values);
  col.levels.assign(distinct.begin(), distinct.end());
  if (col.levels.empty()) throw InputError("attribute '" + col.name + "' has no levels");
  if (reference) {
    if (!distinct.contains(*reference)) {
      throw InputError("reference level '" + *reference + "' not present in attribute '" + col.name + "'");
    }
    col.reference = *reference;
  } else {
    col.reference = col.levels.front();
  }
  columns_.push_back(std::move(col));
}

bool AttributeTable::contains(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.name == name; });
}

const AttributeColumn& AttributeTable::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw InputError("unknown node attribute '" + name + "'");
}

AttributeTable load_node_attributes(const std::filesystem::path& path,
                                    const std::map<std::string, AttributeKind>& schema, int expected_rows) {
  auto rows = read_rows(path);
  if (rows.empty()) throw InputError(path.string() + ": missing header row");
  const auto header = rows.front();
  rows.erase(rows.begin());
  if (static_cast<int>(rows.size()) != expected_rows) {
    throw InputError(path.string() + ": " + std::to_string(rows.size()) + " attribute rows but the network has " +
                     std::to_string(expected_rows) + " nodes");
  }
  for (const auto& [name, kind] : schema) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw InputError(path.string() + ": schema column '" + name + "' not in header");
    }
  }

  AttributeTable table(expected_rows);
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::vector<std::string> cells;
    cells.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != header.size()) throw InputError(where(path, r + 1) + ": wrong number of fields");
      cells.push_back(rows[r][c]);
    }

    AttributeKind kind;
    if (auto it = schema.find(header[c]); it != schema.end()) {
      kind = it->second;
    } else {
      kind = std::all_of(cells.begin(), cells.end(), [](const auto& s) { return parse_double(s).has_value(); })
                 ? AttributeKind::Numeric
                 : AttributeKind::Categorical;
    }

    if (kind == AttributeKind::Numeric) {
      std::vector<double> values;
      values.reserve(cells.size());
      for (std::size_t r = 0; r < cells.size(); ++r) {
        auto v = parse_double(cells[r]);
        if (!v || !std::isfinite(*v)) {
          throw InputError(where(path, r + 1) + ": non-numeric value '" + cells[r] + "' in numeric column '" +
                           header[c] + "'");
        }
        values.push_back(*v);
      }
      table.add_numeric(header[c], std::move(values));
    } else {
      table.add_categorical(header[c], std::move(cells));
    }
  }
  return table;
}

DyadCovariate make_dyad_covariate(std::string name, int n, std::vector<double> values) {
  const auto nn = static_cast<std::size_t>(n);
  if (values.size() != nn * nn) throw InputError("dyad covariate '" + name + "' is not " + std::to_string(n) + "x" + std::to_string(n));
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      if (i == j) {
        values[i * nn + j] = 0.0;
      } else if (!std::isfinite(values[i * nn + j])) {
        throw InputError("dyad covariate '" + name + "' has a non-finite entry at (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")");
      }
    }
  }
  return DyadCovariate{std::move(name), n, std::move(values)};
}

DyadCovariate load_dyad_covariate(const std::filesystem::path& path, std::string name, std::optional<int> expected_n) {
  auto rows = read_rows(path);
  const auto n = rows.size();
  if (n < 2) throw InputError(path.string() + ": dyad covariate needs at least 2 rows");
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      throw InputError(where(path, r) + ": dyad covariate is not square (" + std::to_string(rows[r].size()) +
                       " columns, " + std::to_string(n) + " rows)");
    }
    for (const auto& tok : rows[r]) {
      auto v = parse_double(tok);
      if (!v) throw InputError(where(path, r) + ": non-numeric entry '" + tok + "'");
      if (!std::isfinite(*v)) throw InputError(where(path, r) + ": NaN/Inf entry '" + tok + "'");
      values.push_back(*v);
    }
  }
  if (expected_n && static_cast<int>(n) != *expected_n) {
    throw InputError(path.string() + ": dyad covariate is " + std::to_string(n) + "x" + std::to_string(n) +
                     " but the network has " + std::to_string(*expected_n) + " nodes");
  }
  return make_dyad_covariate(std::move(name), static_cast<int>(n), std::move(values));
}

}  // namespace ergmbf
