#include "ergmbf/bayes_factor.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ergmbf/error.hpp"
#include "ergmbf/kernels.hpp"

namespace ergmbf {
namespace {

constexpr std::size_t kBlockPairs = 4096;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

void check_columns(const GaussianDistribution& g, const Eigen::MatrixXd& r) {
  if (r.cols() != g.dimension()) throw InputError("constraint matrix has the wrong number of columns");
}

/// PSD square root factor via eigendecomposition; tolerates rank deficiency.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

/// Monte Carlo with antithetic pairs over z = offset + B e, e ~ N(0, I_cols).
/// `hit(mask)` decides membership from the row sign mask.
template <class Hit>
ProbabilityEstimate antithetic_mc(const Eigen::MatrixXd& b, const Eigen::VectorXd& offset, const McOptions& mc,
                                  Hit&& hit) {
  const auto rows = static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(b.cols());
  if (rows > 64) throw InputError("at most 64 order constraints are supported in one Monte Carlo evaluation");
  if (mc.draws < 2) throw InputError("Monte Carlo needs at least 2 draws");
  const auto pairs = static_cast<std::size_t>(mc.draws / 2);

  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> brow = b;
  std::mt19937_64 rng(mc.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(cols * kBlockPairs);
  std::vector<std::uint64_t> plus(kBlockPairs);
  std::vector<std::uint64_t> minus(kBlockPairs);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t done = 0; done < pairs;) {
    const std::size_t n = std::min(kBlockPairs, pairs - done);
    for (std::size_t d = 0; d < n; ++d) {
      for (std::size_t k = 0; k < cols; ++k) z[k * kBlockPairs + d] = normal(rng);
    }
    kernels::active().affine_sign_masks(brow.data(), offset.data(), rows, cols, z.data(), kBlockPairs, n,
                                        plus.data(), minus.data());
    for (std::size_t d = 0; d < n; ++d) {
      const double v = 0.5 * ((hit(plus[d]) ? 1.0 : 0.0) + (hit(minus[d]) ? 1.0 : 0.0));
      sum += v;
      sum_sq += v * v;
    }
    done += n;
  }
  const auto np = static_cast<double>(pairs);
  const double mean = sum / np;
  const double var = pairs > 1 ? std::max(0.0, (sum_sq - np * mean * mean) / (np - 1.0)) : 0.0;
  return {mean, std::sqrt(var / np)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint64_t out[1];
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  out[0] = (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
  return out[0];
}

}  // namespace

double density_at_null(const GaussianDistribution& g, const Eigen::MatrixXd& equality) {
  check_columns(g, equality);
  const auto q = equality.rows();
  if (q == 0) throw InputError("density_at_null needs at least one equality row");
  const Eigen::VectorXd m = equality * g.mean();
  const Eigen::MatrixXd s = equality * g.covariance() * equality.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (s + s.transpose()));
  if (llt.info() != Eigen::Success) throw NumericalError("equality constraints give a rank-deficient covariance");
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  if (!std::isfinite(log_det) || l.diagonal().minCoeff() <= 0.0) {
    throw NumericalError("equality constraints give a rank-deficient covariance");
  }
  const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(m);
  return std::exp(-0.5 * (z.squaredNorm() + log_det + static_cast<double>(q) * std::log(2.0 * std::numbers::pi)));
}

ProbabilityEstimate conditional_order_prob(const GaussianDistribution& g, const Eigen::MatrixXd& equality,
                                           const Eigen::MatrixXd& order, const McOptions& mc) {
  check_columns(g, order);
  if (order.rows() == 0) throw InputError("conditional_order_prob needs at least one order row");
  const Eigen::MatrixXd& sigma = g.covariance();
  Eigen::VectorXd mean = order * g.mean();
  Eigen::MatrixXd cov = order * sigma * order.transpose();
  if (equality.rows() > 0) {
    check_columns(g, equality);
    const Eigen::MatrixXd sww = equality * sigma * equality.transpose();
    const Eigen::MatrixXd szw = order * sigma * equality.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sww);
    if (ldlt.info() != Eigen::Success) throw NumericalError("equality constraints give a rank-deficient covariance");
    mean -= szw * ldlt.solve(equality * g.mean());
    cov -= szw * ldlt.solve(szw.transpose());
  }
  const Eigen::VectorXd unconditional = (order * sigma * order.transpose()).diagonal();
  for (Eigen::Index r = 0; r < cov.rows(); ++r) {
    if (!(cov(r, r) > 1e-12 * unconditional[r])) {
      throw NumericalError("order constraint is degenerate given the equality constraints");
    }
  }
  if (order.rows() == 1) return {normal_cdf(mean[0] / std::sqrt(cov(0, 0))), 0.0};

  const std::uint64_t all = order.rows() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << order.rows()) - 1;
  return antithetic_mc(psd_factor(cov), mean, mc, [all](std::uint64_t m) { return m == all; });
}

BfComponents bf_vs_unconstrained(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                                 const ConstrainedHypothesis& h, const McOptions& mc) {
  if (prior.names() != posterior.names()) throw InputError("prior and posterior coefficients differ");
  if (h.complement) throw InputError("use complement_bf for the complement hypothesis");
  BfComponents c;
  if (h.has_equality()) {
    c.posterior_density = density_at_null(posterior, h.equality);
    c.prior_density = density_at_null(prior, h.equality);
  }
  if (h.has_order()) {
    c.posterior_prob = conditional_order_prob(posterior, h.equality, h.order, {mc.draws, derive_seed(mc.seed, 1)});
    c.prior_prob = conditional_order_prob(prior, h.equality, h.order, {mc.draws, derive_seed(mc.seed, 2)});
  }
  if (!(c.prior_prob.value > 0.0)) throw NumericalError("order constraints have zero prior probability");
  c.bf = (c.posterior_density / c.prior_density) * (c.posterior_prob.value / c.prior_prob.value);
  return c;
}

ComplementResult complement_bf(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                               const HypothesisSet& hset, const McOptions& mc) {
  std::vector<std::pair<int, int>> ranges;  // [begin, end) rows per order-only region
  std::vector<Eigen::RowVectorXd> rows;
  for (const auto& h : hset.hypotheses) {
    if (h.complement || h.has_equality() || !h.has_order()) continue;
    const int begin = static_cast<int>(rows.size());
    for (Eigen::Index r = 0; r < h.order.rows(); ++r) rows.emplace_back(h.order.row(r));
    ranges.emplace_back(begin, static_cast<int>(rows.size()));
  }
  ComplementResult out;
  if (ranges.empty()) {
    out.prior_prob = {1.0, 0.0};
    out.posterior_prob = {1.0, 0.0};
    out.bf = 1.0;
    return out;
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), prior.dimension());
  for (std::size_t r = 0; r < rows.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows[r];

  std::vector<std::uint64_t> masks;
  for (auto [b, e] : ranges) {
    masks.push_back(((e - b) == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (e - b)) - 1)) << b);
  }
  auto in_union = [&](std::uint64_t m) {
    for (auto mask : masks) {
      if ((m & mask) == mask) return true;
    }
    return false;
  };
  auto union_prob = [&](const GaussianDistribution& g, std::uint64_t stream) {
    return antithetic_mc(a * g.cholesky_factor(), a * g.mean(), {mc.draws, derive_seed(mc.seed, stream)}, in_union);
  };
  const auto prior_union = union_prob(prior, 3);
  const auto post_union = union_prob(posterior, 4);
  out.prior_prob = {1.0 - prior_union.value, prior_union.mc_se};
  out.posterior_prob = {1.0 - post_union.value, post_union.mc_se};
  if (out.prior_prob.value < kMinComplementPrior) {
    out.dropped = true;
    out.bf = 0.0;
    return out;
  }
  out.bf = out.posterior_prob.value / out.prior_prob.value;
  return out;
}

EvidenceSummary evidence_matrix_and_posteriors(const std::vector<double>& bf_tu,
                                               const std::vector<double>& prior_probs) {
  if (bf_tu.size() != prior_probs.size() || bf_tu.empty()) {
    throw InputError("need one prior probability per Bayes factor");
  }
  double prior_total = 0.0;
  for (double p : prior_probs) {
    if (!(p > 0.0)) throw InputError("prior probabilities must be positive");
    prior_total += p;
  }
  if (std::abs(prior_total - 1.0) > 1e-9) throw InputError("prior probabilities must sum to 1");
  for (double b : bf_tu) {
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("Bayes factors must be positive and finite");
  }
  const auto t = static_cast<Eigen::Index>(bf_tu.size());
  EvidenceSummary s;
  s.matrix.resize(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      s.matrix(i, j) = i == j ? 1.0 : bf_tu[static_cast<std::size_t>(i)] / bf_tu[static_cast<std::size_t>(j)];
    }
  }
  // Normalize relative to the largest term so that huge or tiny BFs do not overflow.
  double top = 0.0;
  for (std::size_t i = 0; i < bf_tu.size(); ++i) top = std::max(top, prior_probs[i] * bf_tu[i]);
  double total = 0.0;
  s.posterior_probs.resize(bf_tu.size());
  for (std::size_t i = 0; i < bf_tu.size(); ++i) {
    s.posterior_probs[i] = prior_probs[i] * bf_tu[i] / top;
    total += s.posterior_probs[i];
  }
  for (auto& p : s.posterior_probs) p /= total;
  return s;
}

std::vector<ExploratoryResult> exploratory_test(const GaussianDistribution& prior,
                                                const GaussianDistribution& posterior, int edges_index) {
  if (prior.names() != posterior.names()) throw InputError("prior and posterior coefficients differ");
  const Eigen::VectorXd prior_sd = prior.standard_deviations();
  const Eigen::VectorXd post_sd = posterior.standard_deviations();
  std::vector<ExploratoryResult> out;
  for (int k = 0; k < prior.dimension(); ++k) {
    if (k == edges_index) continue;
    ExploratoryResult r;
    r.name = prior.names()[static_cast<std::size_t>(k)];
    const double m1 = posterior.mean()[k];
    const double m0 = prior.mean()[k];
    r.bf_zero = normal_pdf(0.0, m1, post_sd[k]) / normal_pdf(0.0, m0, prior_sd[k]);
    r.bf_negative = normal_cdf(-m1 / post_sd[k]) / normal_cdf(-m0 / prior_sd[k]);
    r.bf_positive = normal_cdf(m1 / post_sd[k]) / normal_cdf(m0 / prior_sd[k]);
    const double total = r.bf_zero + r.bf_negative + r.bf_positive;
    r.p_zero = r.bf_zero / total;
    r.p_negative = r.bf_negative / total;
    r.p_positive = r.bf_positive / total;
    out.push_back(r);
  }
  return out;
}

RafteryCategory raftery_label(double bf) {
  if (!(bf > 0.0)) throw InputError("Bayes factor must be positive");
  if (std::abs(std::log(bf)) < 1e-12) return RafteryCategory::NoPreference;
  if (bf >= 150.0) return RafteryCategory::DecisiveFor;
  if (bf >= 20.0) return RafteryCategory::StrongFor;
  if (bf >= 3.0) return RafteryCategory::PositiveFor;
  if (bf > 1.0) return RafteryCategory::WeakFor;
  if (bf <= 1.0 / 150.0) return RafteryCategory::DecisiveAgainst;
  if (bf <= 1.0 / 20.0) return RafteryCategory::StrongAgainst;
  if (bf <= 1.0 / 3.0) return RafteryCategory::PositiveAgainst;
  return RafteryCategory::WeakAgainst;
}

std::string_view to_string(RafteryCategory c) {
  switch (c) {
    case RafteryCategory::DecisiveAgainst: return "decisive evidence against";
    case RafteryCategory::StrongAgainst: return "strong evidence against";
    case RafteryCategory::PositiveAgainst: return "positive evidence against";
    case RafteryCategory::WeakAgainst: return "weak evidence against";
    case RafteryCategory::NoPreference: return "no preference";
    case RafteryCategory::WeakFor: return "weak evidence for";
    case RafteryCategory::PositiveFor: return "positive evidence for";
    case RafteryCategory::StrongFor: return "strong evidence for";
    case RafteryCategory::DecisiveFor: return "decisive evidence for";
  }
  return "unknown";
}

std::vector<double> BayesFactorReport::bf_vs_unconstrained() const {
  std::vector<double> out;
  for (const auto& h : hypotheses) out.push_back(h.components.bf);
  return out;
}

BayesFactorReport test_hypotheses(const GaussianDistribution& prior, const GaussianDistribution& posterior,
                                  const HypothesisSet& hset, const McOptions& mc) {
  BayesFactorReport report;
  report.settings = mc;
  std::vector<double> priors;
  for (std::size_t t = 0; t < hset.hypotheses.size(); ++t) {
    const auto& h = hset.hypotheses[t];
    HypothesisResult r;
    r.label = h.label;
    r.complement = h.complement;
    r.text = h.complement ? "complement" : h.render(hset.coefficient_names);
    if (h.complement) {
      const auto c = complement_bf(prior, posterior, hset, {mc.draws, derive_seed(mc.seed, 1000 + t)});
      if (c.dropped) {
        report.notices.push_back("complement dropped: the stated hypotheses cover the parameter space (prior "
                                 "probability of the complement < 1e-6)");
        continue;
      }
      r.components.posterior_prob = c.posterior_prob;
      r.components.prior_prob = c.prior_prob;
      r.components.bf = c.bf;
    } else {
      r.components = bf_vs_unconstrained(prior, posterior, h, {mc.draws, derive_seed(mc.seed, t)});
    }
    report.hypotheses.push_back(std::move(r));
    priors.push_back(hset.prior_probs[t]);
  }
  double total = 0.0;
  for (double p : priors) total += p;
  for (auto& p : priors) p /= total;
  report.prior_probs = priors;

  auto bfs = report.bf_vs_unconstrained();
  for (auto& b : bfs) {
    // A posterior with no mass in a region gives BF 0; floor it so the
    // evidence matrix stays finite.
    b = std::max(b, std::numeric_limits<double>::min());
  }
  const auto summary = evidence_matrix_and_posteriors(bfs, priors);
  report.evidence = summary.matrix;
  report.posterior_probs = summary.posterior_probs;
  return report;
}

}  // namespace ergmbf
