#include "ergmbf/statistics.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "ergmbf/error.hpp"

namespace ergmbf {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Term naming and serialization

namespace {

const std::map<std::string, StatKind, std::less<>>& kind_table() {
  static const std::map<std::string, StatKind, std::less<>> table{
      {"edges", StatKind::Edges},         {"mutual", StatKind::Mutual},
      {"kstar", StatKind::KStar},         {"triangle", StatKind::Triangle},
      {"gwesp", StatKind::Gwesp},         {"gwdsp", StatKind::Gwdsp},
      {"gwdegree", StatKind::Gwdegree},   {"nodecov", StatKind::Nodecov},
      {"nodefactor", StatKind::Nodefactor}, {"nodeifactor", StatKind::Nodeifactor},
      {"nodeofactor", StatKind::Nodeofactor}, {"nodematch", StatKind::Nodematch},
      {"nodemix", StatKind::Nodemix},     {"absdiff", StatKind::Absdiff},
      {"edgecov", StatKind::Edgecov},
  };
  return table;
}

std::string format_decay(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

template <class T>
T required(const json& j, const char* key, StatKind kind) {
  if (!j.contains(key)) {
    throw InputError("model term '" + std::string(to_string(kind)) + "' requires field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("model term '" + std::string(to_string(kind)) + "': field '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string_view to_string(StatKind kind) {
  for (const auto& [name, k] : kind_table()) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string StatisticSpec::coefficient_name() const {
  if (!name.empty()) return name;
  switch (kind) {
    case StatKind::Edges: return "edges";
    case StatKind::Mutual: return "mutual";
    case StatKind::KStar: return "kstar" + std::to_string(k);
    case StatKind::Triangle: return "triangle";
    case StatKind::Gwesp: return "gwesp.fixed." + format_decay(decay);
    case StatKind::Gwdsp: return "gwdsp.fixed." + format_decay(decay);
    case StatKind::Gwdegree: return "gwdegree.fixed." + format_decay(decay);
    case StatKind::Nodecov: return "nodecov." + attribute;
    case StatKind::Nodefactor: return "nodefactor." + attribute + "." + level;
    case StatKind::Nodeifactor: return "nodeifactor." + attribute + "." + level;
    case StatKind::Nodeofactor: return "nodeofactor." + attribute + "." + level;
    case StatKind::Nodematch: return "nodematch." + attribute;
    case StatKind::Nodemix: return "mix." + attribute + "." + levels.first + "." + levels.second;
    case StatKind::Absdiff: return "absdiff." + attribute;
    case StatKind::Edgecov: return "edgecov." + covariate;
  }
  return "unknown";
}

ModelSpec ModelSpec::parse_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("terms") || !doc["terms"].is_array()) {
    throw InputError("model JSON must be an object with a \"terms\" array");
  }
  ModelSpec spec;
  for (const auto& t : doc["terms"]) {
    if (!t.is_object() || !t.contains("kind") || !t["kind"].is_string()) {
      throw InputError("every model term needs a string \"kind\"");
    }
    const auto kind_name = t["kind"].get<std::string>();
    auto it = kind_table().find(kind_name);
    if (it == kind_table().end()) throw InputError("unknown statistic kind '" + kind_name + "'");
    StatisticSpec s;
    s.kind = it->second;
    switch (s.kind) {
      case StatKind::KStar: s.k = required<int>(t, "k", s.kind); break;
      case StatKind::Gwesp:
      case StatKind::Gwdsp:
      case StatKind::Gwdegree: s.decay = required<double>(t, "decay", s.kind); break;
      case StatKind::Nodecov:
      case StatKind::Nodematch:
      case StatKind::Absdiff: s.attribute = required<std::string>(t, "attr", s.kind); break;
      case StatKind::Nodefactor:
      case StatKind::Nodeifactor:
      case StatKind::Nodeofactor:
        s.attribute = required<std::string>(t, "attr", s.kind);
        s.level = required<std::string>(t, "level", s.kind);
        break;
      case StatKind::Nodemix: {
        s.attribute = required<std::string>(t, "attr", s.kind);
        auto lv = required<std::vector<std::string>>(t, "levels", s.kind);
        if (lv.size() != 2) throw InputError("nodemix \"levels\" must list exactly two levels");
        s.levels = {lv[0], lv[1]};
        break;
      }
      case StatKind::Edgecov:
        s.covariate = required<std::string>(t, "name", s.kind);
        s.standardized = t.value("standardized", false);
        break;
      default: break;
    }
    if (t.contains("label")) s.name = t["label"].get<std::string>();
    spec.terms.push_back(std::move(s));
  }
  return spec;
}

ModelSpec ModelSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::string ModelSpec::to_json() const {
  json terms = json::array();
  for (const auto& s : this->terms) {
    json t{{"kind", std::string(ergmbf::to_string(s.kind))}};
    switch (s.kind) {
      case StatKind::KStar: t["k"] = s.k; break;
      case StatKind::Gwesp:
      case StatKind::Gwdsp:
      case StatKind::Gwdegree: t["decay"] = s.decay; break;
      case StatKind::Nodecov:
      case StatKind::Nodematch:
      case StatKind::Absdiff: t["attr"] = s.attribute; break;
      case StatKind::Nodefactor:
      case StatKind::Nodeifactor:
      case StatKind::Nodeofactor:
        t["attr"] = s.attribute;
        t["level"] = s.level;
        break;
      case StatKind::Nodemix:
        t["attr"] = s.attribute;
        t["levels"] = {s.levels.first, s.levels.second};
        break;
      case StatKind::Edgecov:
        t["name"] = s.covariate;
        t["standardized"] = s.standardized;
        break;
      default: break;
    }
    if (!s.name.empty()) t["label"] = s.name;
    terms.push_back(std::move(t));
  }
  return json{{"terms", terms}}.dump();
}

// ---------------------------------------------------------------------------
// GraphState

GraphState::GraphState(int n, bool directed)
    : n_(n),
      directed_(directed),
      words_((static_cast<std::size_t>(n) + 63) / 64),
      out_(static_cast<std::size_t>(n) * words_, 0),
      in_(static_cast<std::size_t>(n) * words_, 0),
      out_deg_(static_cast<std::size_t>(n), 0),
      in_deg_(static_cast<std::size_t>(n), 0) {}

GraphState::GraphState(const Network& net) : GraphState(net.size(), net.directed()) {
  for (int i = 0; i < n_; ++i) {
    for (int j = directed_ ? 0 : i + 1; j < n_; ++j) {
      if (i != j && net.has_tie(i, j)) set(i, j, true);
    }
  }
}

void GraphState::assign(Bits& b, int i, int j, bool v) {
  auto& word = b[static_cast<std::size_t>(i) * words_ + (static_cast<std::size_t>(j) >> 6)];
  const std::uint64_t mask = std::uint64_t{1} << (static_cast<unsigned>(j) & 63U);
  word = v ? (word | mask) : (word & ~mask);
}

void GraphState::set(int i, int j, bool present) {
  if (has(i, j) == present) return;
  const int delta = present ? 1 : -1;
  assign(out_, i, j, present);
  assign(in_, j, i, present);
  out_deg_[static_cast<std::size_t>(i)] += delta;
  in_deg_[static_cast<std::size_t>(j)] += delta;
  if (!directed_) {
    assign(out_, j, i, present);
    assign(in_, i, j, present);
    out_deg_[static_cast<std::size_t>(j)] += delta;
    in_deg_[static_cast<std::size_t>(i)] += delta;
  }
  ties_ += delta;
}

int GraphState::popcount_and(const Bits& a, int i, const Bits& b, int j) const {
  const auto* ra = row(a, i);
  const auto* rb = row(b, j);
  int c = 0;
  for (std::size_t w = 0; w < words_; ++w) c += __builtin_popcountll(ra[w] & rb[w]);
  return c;
}

int GraphState::two_paths(int i, int j) const { return popcount_and(out_, i, in_, j); }
int GraphState::common_out(int i, int j) const { return popcount_and(out_, i, out_, j); }
int GraphState::common_in(int i, int j) const { return popcount_and(in_, i, in_, j); }

Network GraphState::to_network() const {
  const auto nn = static_cast<std::size_t>(n_);
  std::vector<std::uint8_t> adj(nn * nn, 0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (has(i, j)) adj[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)] = 1;
    }
  }
  return Network(n_, directed_, std::move(adj));
}

// ---------------------------------------------------------------------------
// Terms

class Term {
 public:
  virtual ~Term() = default;
  virtual double value(const GraphState& g) const = 0;
  virtual double change(const GraphState& g, int i, int j) const = 0;
  virtual bool dyad_independent() const { return false; }
};

namespace {

/// Sum of f(i, j) over present ties (each undirected tie once).
template <class F>
double sum_over_ties(const GraphState& g, F&& f) {
  double total = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    g.for_each_out(i, [&](int j) {
      if (g.directed() || i < j) total += f(i, j);
    });
  }
  return total;
}

/// Dyad-independent term: s = sum over ties of a fixed weight.
class DyadicTerm : public Term {
 public:
  double value(const GraphState& g) const override {
    return sum_over_ties(g, [&](int i, int j) { return change(g, i, j); });
  }
  bool dyad_independent() const override { return true; }
};

class EdgesTerm final : public DyadicTerm {
 public:
  double change(const GraphState&, int, int) const override { return 1.0; }
};

class MutualTerm final : public Term {
 public:
  double value(const GraphState& g) const override {
    return sum_over_ties(g, [&](int i, int j) { return (i < j && g.has(j, i)) ? 1.0 : 0.0; });
  }
  double change(const GraphState& g, int i, int j) const override { return g.has(j, i) ? 1.0 : 0.0; }
};

double binom(int n, int k) {
  if (k < 0 || n < k) return 0.0;
  double r = 1.0;
  for (int t = 1; t <= k; ++t) r = r * static_cast<double>(n - k + t) / static_cast<double>(t);
  return r;
}

class KStarTerm final : public Term {
 public:
  explicit KStarTerm(int k) : k_(k) {}
  double value(const GraphState& g) const override {
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) total += binom(g.degree(i), k_);
    return total;
  }
  double change(const GraphState& g, int i, int j) const override {
    const int tie = g.has(i, j) ? 1 : 0;
    return binom(g.degree(i) - tie, k_ - 1) + binom(g.degree(j) - tie, k_ - 1);
  }

 private:
  int k_;
};

class TriangleTerm final : public Term {
 public:
  double value(const GraphState& g) const override {
    if (!g.directed()) {
      return sum_over_ties(g, [&](int i, int j) { return static_cast<double>(g.two_paths(i, j)); }) / 3.0;
    }
    const double transitive = sum_over_ties(g, [&](int a, int c) { return static_cast<double>(g.two_paths(a, c)); });
    const double cyclic = sum_over_ties(g, [&](int a, int b) { return static_cast<double>(g.two_paths(b, a)); }) / 3.0;
    return transitive + cyclic;
  }
  double change(const GraphState& g, int i, int j) const override {
    if (!g.directed()) return g.two_paths(i, j);
    return static_cast<double>(g.two_paths(i, j) + g.common_out(i, j) + g.common_in(i, j) + g.two_paths(j, i));
  }
};

/// Geometric weight e^t (1 - (1 - e^-t)^k) shared by the gw* statistics.
class GeometricWeights {
 public:
  explicit GeometricWeights(double decay) : scale_(std::exp(decay)), ratio_(1.0 - std::exp(-decay)) {
    table_.resize(kTabled);
    for (int k = 0; k < kTabled; ++k) table_[static_cast<std::size_t>(k)] = exact(k);
  }
  double operator()(int k) const {
    if (k <= 0) return 0.0;
    return k < kTabled ? table_[static_cast<std::size_t>(k)] : exact(k);
  }
  double step(int k) const { return (*this)(k + 1) - (*this)(k); }

 private:
  static constexpr int kTabled = 1024;
  double exact(int k) const { return k <= 0 ? 0.0 : scale_ * (1.0 - std::pow(ratio_, k)); }

  double scale_;
  double ratio_;
  std::vector<double> table_;
};

class GwespTerm final : public Term {
 public:
  explicit GwespTerm(double decay) : w_(decay) {}
  double value(const GraphState& g) const override {
    return sum_over_ties(g, [&](int i, int j) { return w_(g.two_paths(i, j)); });
  }
  double change(const GraphState& g, int i, int j) const override {
    const int tie = g.has(i, j) ? 1 : 0;
    double c = w_(g.two_paths(i, j));
    if (!g.directed()) {
      g.for_each_two_path(i, j, [&](int h) {
        c += w_.step(g.two_paths(i, h) - tie);
        c += w_.step(g.two_paths(j, h) - tie);
      });
      return c;
    }
    // i->j becomes a partner of i->h (via j->h) and of h->j (via h->i).
    g.for_each_common_out(i, j, [&](int h) { c += w_.step(g.two_paths(i, h) - tie); });
    g.for_each_common_in(i, j, [&](int h) { c += w_.step(g.two_paths(h, j) - tie); });
    return c;
  }

 private:
  GeometricWeights w_;
};

class GwdspTerm final : public Term {
 public:
  explicit GwdspTerm(double decay) : w_(decay) {}
  double value(const GraphState& g) const override {
    double total = 0.0;
    for (int a = 0; a < g.size(); ++a) {
      for (int b = g.directed() ? 0 : a + 1; b < g.size(); ++b) {
        if (a != b) total += w_(g.two_paths(a, b));
      }
    }
    return total;
  }
  double change(const GraphState& g, int i, int j) const override {
    const int tie = g.has(i, j) ? 1 : 0;
    double c = 0.0;
    if (!g.directed()) {
      g.for_each_out(j, [&](int h) {
        if (h != i) c += w_.step(g.two_paths(i, h) - tie);
      });
      g.for_each_out(i, [&](int h) {
        if (h != j) c += w_.step(g.two_paths(j, h) - tie);
      });
      return c;
    }
    g.for_each_out(j, [&](int h) {
      if (h != i) c += w_.step(g.two_paths(i, h) - tie);
    });
    g.for_each_in(i, [&](int h) {
      if (h != j) c += w_.step(g.two_paths(h, j) - tie);
    });
    return c;
  }

 private:
  GeometricWeights w_;
};

class GwdegreeTerm final : public Term {
 public:
  explicit GwdegreeTerm(double decay) : w_(decay) {}
  double value(const GraphState& g) const override {
    double total = 0.0;
    for (int i = 0; i < g.size(); ++i) total += w_(g.degree(i));
    return total;
  }
  double change(const GraphState& g, int i, int j) const override {
    const int tie = g.has(i, j) ? 1 : 0;
    return w_.step(g.degree(i) - tie) + w_.step(g.degree(j) - tie);
  }

 private:
  GeometricWeights w_;
};

/// Dyad-independent term with a precomputed n x n weight table.
class WeightTableTerm final : public DyadicTerm {
 public:
  WeightTableTerm(int n, std::vector<double> weights) : n_(static_cast<std::size_t>(n)), w_(std::move(weights)) {}
  double change(const GraphState&, int i, int j) const override {
    return w_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
  }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Model binding

namespace {

const AttributeColumn& attribute_of(const AttributeTable& attrs, const StatisticSpec& s, AttributeKind kind, int n) {
  if (!attrs.contains(s.attribute)) {
    throw InputError("statistic '" + s.coefficient_name() + "' references missing attribute '" + s.attribute + "'");
  }
  if (attrs.rows() != n) throw InputError("attribute table rows do not match the network size");
  const auto& col = attrs.column(s.attribute);
  if (col.kind != kind) {
    throw InputError("statistic '" + s.coefficient_name() + "' needs a " +
                     (kind == AttributeKind::Numeric ? "numeric" : "categorical") + " attribute");
  }
  return col;
}

void require_level(const AttributeColumn& col, const std::string& level) {
  if (std::find(col.levels.begin(), col.levels.end(), level) == col.levels.end()) {
    throw InputError("attribute '" + col.name + "' has no level '" + level + "'");
  }
}

template <class F>
std::vector<double> weight_table(int n, bool directed, F&& f) {
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> w(nn * nn, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // Undirected terms read the canonical (min, max) orientation.
      const int a = directed ? i : std::min(i, j);
      const int b = directed ? j : std::max(i, j);
      w[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)] = f(a, b);
    }
  }
  return w;
}

std::vector<double> standardize_offdiagonal(const DyadCovariate& cov) {
  const int n = cov.n;
  double sum = 0.0;
  double count = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) {
        sum += cov.at(i, j);
        count += 1.0;
      }
    }
  }
  const double mean = sum / count;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) ss += (cov.at(i, j) - mean) * (cov.at(i, j) - mean);
    }
  }
  const double sd = std::sqrt(ss / (count - 1.0));
  if (!(sd > 0.0)) throw InputError("cannot standardize constant dyad covariate '" + cov.name + "'");
  std::vector<double> out(cov.values.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) out[static_cast<std::size_t>(i * n + j)] = (cov.at(i, j) - mean) / sd;
    }
  }
  return out;
}

std::shared_ptr<const Term> make_term(const StatisticSpec& s, int n, bool directed, const AttributeTable& attrs,
                                      const CovariateSet& covs) {
  const auto name = s.coefficient_name();
  auto directed_only = [&] {
    if (!directed) throw InputError("statistic '" + name + "' is only defined for directed networks");
  };
  auto undirected_only = [&] {
    if (directed) throw InputError("statistic '" + name + "' is only defined for undirected networks");
  };
  auto positive_decay = [&] {
    if (!(s.decay > 0.0) || !std::isfinite(s.decay)) throw InputError("statistic '" + name + "' needs decay > 0");
  };

  switch (s.kind) {
    case StatKind::Edges: return std::make_shared<EdgesTerm>();
    case StatKind::Mutual: directed_only(); return std::make_shared<MutualTerm>();
    case StatKind::KStar:
      undirected_only();
      if (s.k < 1) throw InputError("kstar needs k >= 1");
      return std::make_shared<KStarTerm>(s.k);
    case StatKind::Triangle: return std::make_shared<TriangleTerm>();
    case StatKind::Gwesp: positive_decay(); return std::make_shared<GwespTerm>(s.decay);
    case StatKind::Gwdsp: positive_decay(); return std::make_shared<GwdspTerm>(s.decay);
    case StatKind::Gwdegree:
      undirected_only();
      positive_decay();
      return std::make_shared<GwdegreeTerm>(s.decay);
    case StatKind::Nodecov: {
      const auto& x = attribute_of(attrs, s, AttributeKind::Numeric, n).numeric;
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        return x[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(j)];
      }));
    }
    case StatKind::Absdiff: {
      const auto& x = attribute_of(attrs, s, AttributeKind::Numeric, n).numeric;
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        return std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
      }));
    }
    case StatKind::Nodefactor:
    case StatKind::Nodeifactor:
    case StatKind::Nodeofactor: {
      if (s.kind != StatKind::Nodefactor) directed_only();
      const auto& col = attribute_of(attrs, s, AttributeKind::Categorical, n);
      require_level(col, s.level);
      const auto& c = col.labels;
      const auto kind = s.kind;
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        const double from = c[static_cast<std::size_t>(i)] == s.level ? 1.0 : 0.0;
        const double to = c[static_cast<std::size_t>(j)] == s.level ? 1.0 : 0.0;
        if (kind == StatKind::Nodeofactor) return from;
        if (kind == StatKind::Nodeifactor) return to;
        return from + to;
      }));
    }
    case StatKind::Nodematch: {
      const auto& c = attribute_of(attrs, s, AttributeKind::Categorical, n).labels;
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        return c[static_cast<std::size_t>(i)] == c[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
      }));
    }
    case StatKind::Nodemix: {
      const auto& col = attribute_of(attrs, s, AttributeKind::Categorical, n);
      require_level(col, s.levels.first);
      require_level(col, s.levels.second);
      const auto& c = col.labels;
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        const auto& a = c[static_cast<std::size_t>(i)];
        const auto& b = c[static_cast<std::size_t>(j)];
        const bool forward = a == s.levels.first && b == s.levels.second;
        const bool backward = a == s.levels.second && b == s.levels.first;
        return (forward || (!directed && backward)) ? 1.0 : 0.0;
      }));
    }
    case StatKind::Edgecov: {
      auto it = covs.find(s.covariate);
      if (it == covs.end()) {
        throw InputError("statistic '" + name + "' references missing dyad covariate '" + s.covariate + "'");
      }
      const auto& cov = it->second;
      if (cov.n != n) throw InputError("dyad covariate '" + s.covariate + "' does not match the network size");
      const auto values = s.standardized ? standardize_offdiagonal(cov) : cov.values;
      const auto nn = static_cast<std::size_t>(n);
      return std::make_shared<WeightTableTerm>(n, weight_table(n, directed, [&](int i, int j) {
        return values[static_cast<std::size_t>(i) * nn + static_cast<std::size_t>(j)];
      }));
    }
  }
  throw InputError("unsupported statistic");
}

}  // namespace

Model::Model(ModelSpec spec, int n, bool directed, const AttributeTable& attributes, const CovariateSet& covariates)
    : spec_(std::move(spec)), n_(n), directed_(directed) {
  if (n < 2) throw InputError("model needs a network with at least 2 nodes");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < spec_.terms.size(); ++k) {
    const auto& s = spec_.terms[k];
    auto name = s.coefficient_name();
    if (!seen.insert(name).second) throw InputError("duplicate statistic name '" + name + "'");
    if (s.kind == StatKind::Edges) {
      if (edges_index_ >= 0) throw InputError("model must contain exactly one edges term");
      edges_index_ = static_cast<int>(k);
    }
    terms_.push_back(make_term(s, n, directed, attributes, covariates));
    names_.push_back(std::move(name));
  }
  if (edges_index_ < 0) throw InputError("model must contain exactly one edges term");
}

int Model::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < names_.size(); ++k) {
    if (names_[k] == name) return static_cast<int>(k);
  }
  return -1;
}

bool Model::dyad_independent() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t->dyad_independent(); });
}

bool Model::term_dyad_independent(int k) const { return terms_[static_cast<std::size_t>(k)]->dyad_independent(); }

void Model::check_network(int n, bool directed) const {
  if (n != n_ || directed != directed_) {
    throw InputError("network (n=" + std::to_string(n) + (directed ? ", directed" : ", undirected") +
                     ") does not match the model's bound network shape");
  }
}

void Model::change_stats(const GraphState& g, int i, int j, std::span<double> out) const {
  for (std::size_t k = 0; k < terms_.size(); ++k) out[k] = terms_[k]->change(g, i, j);
}

Eigen::VectorXd Model::sufficient_stats(const GraphState& g) const {
  check_network(g.size(), g.directed());
  Eigen::VectorXd s(size());
  for (std::size_t k = 0; k < terms_.size(); ++k) s[static_cast<Eigen::Index>(k)] = terms_[k]->value(g);
  return s;
}

Model Model::drop(const std::vector<std::string>& names_to_drop) const {
  Model m;
  m.n_ = n_;
  m.directed_ = directed_;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (std::find(names_to_drop.begin(), names_to_drop.end(), names_[k]) != names_to_drop.end()) {
      if (static_cast<int>(k) == edges_index_) throw InputError("cannot drop the edges term");
      continue;
    }
    if (static_cast<int>(k) == edges_index_) m.edges_index_ = static_cast<int>(m.terms_.size());
    m.spec_.terms.push_back(spec_.terms[k]);
    m.names_.push_back(names_[k]);
    m.terms_.push_back(terms_[k]);
  }
  for (const auto& name : names_to_drop) {
    if (index_of(name) < 0) throw InputError("cannot drop unknown statistic '" + name + "'");
  }
  return m;
}

Eigen::VectorXd sufficient_stats(const Network& net, const Model& model) {
  return model.sufficient_stats(GraphState(net));
}

Eigen::VectorXd change_stats_dyad(const Network& net, const Model& model, int i, int j) {
  if (i == j) throw InputError("change statistics need i != j");
  if (i < 0 || j < 0 || i >= net.size() || j >= net.size()) throw InputError("dyad index out of range");
  GraphState g(net);
  if (g.size() != model.nodes() || g.directed() != model.directed()) {
    throw InputError("network does not match the model's bound network shape");
  }
  Eigen::VectorXd out(model.size());
  model.change_stats(g, i, j, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

ChangeStatMatrix change_stat_matrix(const Network& net, const Model& model) {
  GraphState g(net);
  if (g.size() != model.nodes() || g.directed() != model.directed()) {
    throw InputError("network does not match the model's bound network shape");
  }
  ChangeStatMatrix m;
  m.names = model.names();
  m.dyads = canonical_dyads(net.size(), net.directed());
  const auto rows = static_cast<Eigen::Index>(m.dyads.size());
  m.values.resize(rows, model.size());
  std::vector<double> buf(static_cast<std::size_t>(model.size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& d = m.dyads[static_cast<std::size_t>(r)];
    model.change_stats(g, d.i, d.j, buf);
    for (int k = 0; k < model.size(); ++k) m.values(r, k) = buf[static_cast<std::size_t>(k)];
  }
  return m;
}

Eigen::VectorXd tie_indicators(const Network& net) {
  const auto dyads = canonical_dyads(net.size(), net.directed());
  Eigen::VectorXd y(static_cast<Eigen::Index>(dyads.size()));
  for (std::size_t r = 0; r < dyads.size(); ++r) {
    y[static_cast<Eigen::Index>(r)] = net.has_tie(dyads[r].i, dyads[r].j) ? 1.0 : 0.0;
  }
  return y;
}

}  // namespace ergmbf
