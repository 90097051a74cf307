#include "ergmbf/hypothesis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "ergmbf/error.hpp"

namespace ergmbf {
namespace {

enum class Rel { Eq, Lt, Gt };

struct Token {
  enum Kind { Name, Zero, Op, Sep, End } kind;
  std::string text;
  Rel rel = Rel::Eq;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t p = 0;
  while (p < s.size()) {
    const char c = s[p];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++p;
    } else if (name_start(c)) {
      std::size_t q = p;
      while (q < s.size() && name_char(s[q])) ++q;
      out.push_back({Token::Name, std::string(s.substr(p, q - p))});
      p = q;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      std::size_t q = p + 1;
      while (q < s.size() && (std::isdigit(static_cast<unsigned char>(s[q])) || s[q] == '.')) ++q;
      const auto lit = std::string(s.substr(p, q - p));
      char* end = nullptr;
      const double v = std::strtod(lit.c_str(), &end);
      if (end != lit.c_str() + lit.size() || v != 0.0) {
        throw InputError("only the constant 0 may appear in a constraint, got '" + lit + "'");
      }
      out.push_back({Token::Zero, lit});
      p = q;
    } else if (c == '=' || c == '<' || c == '>') {
      Token t{Token::Op, std::string(1, c)};
      t.rel = c == '=' ? Rel::Eq : (c == '<' ? Rel::Lt : Rel::Gt);
      ++p;
      if (c == '=' && p < s.size() && s[p] == '=') ++p;
      if (p < s.size() && s[p] == '=') {
        throw InputError("'" + std::string(1, c) + "=' is not supported; use strict order constraints or '='");
      }
      out.push_back(t);
    } else if (c == '&' || c == ',') {
      out.push_back({Token::Sep, std::string(1, c)});
      ++p;
    } else {
      throw InputError(std::string("unexpected character '") + c + "' in hypothesis");
    }
  }
  out.push_back({Token::End, ""});
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[static_cast<std::size_t>(a)] != a) {
      parent_[static_cast<std::size_t>(a)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(a)])];
      a = parent_[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }

 private:
  std::vector<int> parent_;
};

// Feasibility of {x_a = x_b, x_a > x_b, x_a > 0, ...}: with a zero node, this
// is a difference-constraint system with strict inequalities, feasible iff no
// strict edge lies inside an equality class and the class graph is acyclic.
bool feasible(const Eigen::MatrixXd& eq, const Eigen::MatrixXd& ord) {
  const int k = static_cast<int>(std::max(eq.cols(), ord.cols()));
  const int zero = k;
  auto endpoints = [&](const Eigen::RowVectorXd& r) {
    int plus = zero;
    int minus = zero;
    for (int c = 0; c < k; ++c) {
      if (r[c] > 0.5) plus = c;
      if (r[c] < -0.5) minus = c;
    }
    return std::pair{plus, minus};  // row means x_plus - x_minus
  };
  UnionFind uf(k + 1);
  for (Eigen::Index r = 0; r < eq.rows(); ++r) {
    auto [a, b] = endpoints(eq.row(r));
    uf.unite(a, b);
  }
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(k + 1));
  for (Eigen::Index r = 0; r < ord.rows(); ++r) {
    auto [a, b] = endpoints(ord.row(r));  // x_a > x_b
    const int ca = uf.find(a);
    const int cb = uf.find(b);
    if (ca == cb) return false;
    succ[static_cast<std::size_t>(cb)].push_back(ca);
  }
  std::vector<int> color(static_cast<std::size_t>(k + 1), 0);
  // Iterative DFS cycle check.
  for (int s = 0; s <= k; ++s) {
    if (color[static_cast<std::size_t>(s)] != 0) continue;
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    color[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& out = succ[static_cast<std::size_t>(v)];
      if (next < out.size()) {
        const int w = out[next++];
        if (color[static_cast<std::size_t>(w)] == 1) return false;
        if (color[static_cast<std::size_t>(w)] == 0) {
          color[static_cast<std::size_t>(w)] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        color[static_cast<std::size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::RowVectorXd>& rows, int k) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r];
  return m;
}

struct Operand {
  bool zero;
  int index;
  std::string text;
};

class Parser {
 public:
  Parser(const std::vector<std::string>& names, int edges_index) : names_(names), edges_(edges_index) {}

  ConstrainedHypothesis parse(const std::string& text, const std::string& label) {
    toks_ = tokenize(text);
    pos_ = 0;
    const int k = static_cast<int>(names_.size());
    std::vector<Eigen::RowVectorXd> eq;
    std::vector<Eigen::RowVectorXd> ord;
    while (true) {
      Operand lhs = operand();
      if (peek().kind != Token::Op) throw InputError("expected '=', '<' or '>' after '" + lhs.text + "' in '" + text + "'");
      while (peek().kind == Token::Op) {
        const Rel rel = toks_[pos_++].rel;
        Operand rhs = operand();
        link(lhs, rel, rhs, eq, ord, text);
        lhs = rhs;
      }
      if (peek().kind == Token::Sep) {
        ++pos_;
        continue;
      }
      if (peek().kind == Token::End) break;
      throw InputError("unexpected '" + peek().text + "' in '" + text + "'");
    }

    ConstrainedHypothesis h;
    h.label = label;
    h.source = text;
    h.equality = independent_rows(eq, k);
    h.order = unique_rows(ord, k);
    if (!feasible(h.equality, h.order)) throw InputError("hypothesis '" + text + "' is internally contradictory");
    return h;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  Operand operand() {
    const Token& t = peek();
    if (t.kind == Token::Zero) {
      ++pos_;
      return {true, -1, t.text};
    }
    if (t.kind != Token::Name) throw InputError("expected a coefficient name or 0, got '" + t.text + "'");
    ++pos_;
    auto it = std::find(names_.begin(), names_.end(), t.text);
    if (it == names_.end()) throw InputError("unknown coefficient '" + t.text + "'");
    const int idx = static_cast<int>(it - names_.begin());
    if (idx == edges_) {
      throw InputError("the edges coefficient '" + t.text + "' cannot be tested (its prior is effectively flat)");
    }
    return {false, idx, t.text};
  }

  void link(const Operand& a, Rel rel, const Operand& b, std::vector<Eigen::RowVectorXd>& eq,
            std::vector<Eigen::RowVectorXd>& ord, const std::string& text) const {
    if (a.zero && b.zero) throw InputError("constraint compares 0 with 0 in '" + text + "'");
    if (!a.zero && !b.zero && a.index == b.index) {
      if (rel == Rel::Eq) throw InputError("constraint '" + a.text + " = " + b.text + "' is vacuous");
      throw InputError("hypothesis '" + text + "' is internally contradictory");
    }
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(names_.size()));
    // Row encodes (greater side) - (smaller side), or a - b for equalities.
    const Operand& hi = rel == Rel::Lt ? b : a;
    const Operand& lo = rel == Rel::Lt ? a : b;
    if (!hi.zero) row[hi.index] += 1.0;
    if (!lo.zero) row[lo.index] -= 1.0;
    (rel == Rel::Eq ? eq : ord).push_back(row);
  }

  static Eigen::MatrixXd independent_rows(std::vector<Eigen::RowVectorXd> rows, int k) {
    std::vector<Eigen::RowVectorXd> kept;
    for (auto& r : rows) {
      for (Eigen::Index c = 0; c < r.size(); ++c) {
        if (r[c] != 0.0) {
          if (r[c] < 0.0) r = -r;
          break;
        }
      }
      kept.push_back(r);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(stack_rows(kept, k));
      if (lu.rank() < static_cast<Eigen::Index>(kept.size())) kept.pop_back();
    }
    return stack_rows(kept, k);
  }

  static Eigen::MatrixXd unique_rows(const std::vector<Eigen::RowVectorXd>& rows, int k) {
    std::vector<Eigen::RowVectorXd> kept;
    for (const auto& r : rows) {
      if (std::none_of(kept.begin(), kept.end(), [&](const auto& q) { return q == r; })) kept.push_back(r);
    }
    return stack_rows(kept, k);
  }

  const std::vector<std::string>& names_;
  int edges_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.emplace_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string row_text(const Eigen::RowVectorXd& r, const std::vector<std::string>& names, const char* rel) {
  std::string plus;
  std::string minus;
  for (Eigen::Index c = 0; c < r.size(); ++c) {
    if (r[c] > 0.5) plus = names[static_cast<std::size_t>(c)];
    if (r[c] < -0.5) minus = names[static_cast<std::size_t>(c)];
  }
  if (plus.empty()) return minus + (std::string(rel) == "=" ? " = 0" : " < 0");
  return plus + " " + rel + " " + (minus.empty() ? "0" : minus);
}

}  // namespace

bool ConstrainedHypothesis::contains(const Eigen::VectorXd& beta, double tol) const {
  if (complement) return false;
  if (has_equality() && (equality * beta).cwiseAbs().maxCoeff() > tol) return false;
  if (has_order() && !((order * beta).array() > 0.0).all()) return false;
  return true;
}

std::string ConstrainedHypothesis::render(const std::vector<std::string>& names) const {
  if (complement) return "complement";
  std::vector<std::string> parts;
  for (Eigen::Index r = 0; r < equality.rows(); ++r) parts.push_back(row_text(equality.row(r), names, "="));
  for (Eigen::Index r = 0; r < order.rows(); ++r) parts.push_back(row_text(order.row(r), names, ">"));
  std::string out;
  for (std::size_t p = 0; p < parts.size(); ++p) out += (p ? " & " : "") + parts[p];
  return out;
}

std::optional<std::size_t> HypothesisSet::region_of(const Eigen::VectorXd& beta, double tol) const {
  for (std::size_t t = 0; t < hypotheses.size(); ++t) {
    if (!hypotheses[t].complement && hypotheses[t].contains(beta, tol)) return t;
  }
  for (std::size_t t = 0; t < hypotheses.size(); ++t) {
    if (hypotheses[t].complement) return t;
  }
  return std::nullopt;
}

HypothesisSet parse_hypotheses(std::string_view text, const std::vector<std::string>& coef_names, int edges_index,
                               std::optional<std::vector<double>> prior_probs) {
  if (trim(text).empty()) throw InputError("hypothesis text is empty");
  HypothesisSet set;
  set.coefficient_names = coef_names;
  Parser parser(coef_names, edges_index);
  std::set<std::string> labels;

  for (const auto& piece : split(text, ';')) {
    auto body = trim(piece);
    if (body.empty()) throw InputError("empty hypothesis between ';' separators");
    std::string label = "H" + std::to_string(set.hypotheses.size() + 1);
    if (auto colon = body.find(':'); colon != std::string::npos) {
      label = trim(std::string_view(body).substr(0, colon));
      body = trim(std::string_view(body).substr(colon + 1));
      if (label.empty()) throw InputError("empty hypothesis label");
    }
    if (!labels.insert(label).second) throw InputError("duplicate hypothesis label '" + label + "'");
    set.hypotheses.push_back(parser.parse(body, label));
  }

  ConstrainedHypothesis complement;
  complement.label = labels.contains("complement") ? "Hc" : "complement";
  if (labels.contains(complement.label)) throw InputError("duplicate hypothesis label '" + complement.label + "'");
  complement.source = "complement";
  complement.complement = true;
  complement.equality.resize(0, static_cast<Eigen::Index>(coef_names.size()));
  complement.order.resize(0, static_cast<Eigen::Index>(coef_names.size()));
  set.hypotheses.push_back(std::move(complement));
  set.include_complement = true;

  const auto t = set.hypotheses.size();
  if (prior_probs) {
    if (prior_probs->size() != t) {
      throw InputError("expected " + std::to_string(t) + " prior probabilities (including the complement)");
    }
    double total = 0.0;
    for (double p : *prior_probs) {
      if (!(p > 0.0)) throw InputError("prior probabilities must be positive");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("prior probabilities must sum to 1");
    set.prior_probs = *prior_probs;
  } else {
    set.prior_probs.assign(t, 1.0 / static_cast<double>(t));
  }
  return set;
}

}  // namespace ergmbf
