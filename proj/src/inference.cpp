#include "ergmbf/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include "ergmbf/error.hpp"
#include "ergmbf/kernels.hpp"
#include "ergmbf/sampler.hpp"

namespace ergmbf {
namespace {

constexpr int kMaxNewtonIterations = 100;

double log1pexp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.col(c).data(), static_cast<std::size_t>(m.rows())};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct LogisticState {
  Eigen::VectorXd eta;
  Eigen::VectorXd prob;
  Eigen::VectorXd weight;
  double loglik = 0.0;
};

LogisticState evaluate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  LogisticState s;
  const auto n = x.rows();
  s.eta = Eigen::VectorXd::Zero(n);
  std::span<double> eta(s.eta.data(), static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < x.cols(); ++c) kernels::axpy(beta[c], column(x, c), eta);
  s.prob.resize(n);
  s.weight.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double e = s.eta[r];
    s.prob[r] = 1.0 / (1.0 + std::exp(-e));
    s.weight[r] = s.prob[r] * (1.0 - s.prob[r]);
    s.loglik += y[r] * e - log1pexp(e);
  }
  return s;
}

Eigen::MatrixXd information(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  const auto k = x.cols();
  Eigen::MatrixXd h(k, k);
  std::span<const double> ws(w.data(), static_cast<std::size_t>(w.size()));
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      h(a, b) = h(b, a) = kernels::weighted_dot(column(x, a), column(x, b), ws);
    }
  }
  return h;
}

[[noreturn]] void no_mle(const std::string& why) {
  throw NumericalError("pseudolikelihood MLE does not exist: " + why);
}

}  // namespace

MpleFit fit_mple(const Network& net, const Model& model) {
  auto fit = fit_mple(change_stat_matrix(net, model), tie_indicators(net));
  fit.exact_likelihood = model.dyad_independent();
  return fit;
}

MpleFit fit_mple(const ChangeStatMatrix& delta, const Eigen::VectorXd& ties) {
  const Eigen::MatrixXd& x = delta.values;
  const auto k = x.cols();
  const auto n = x.rows();
  if (ties.size() != n) throw InputError("fit_mple: tie vector length does not match the design");
  const double total = ties.sum();
  if (total <= 0.0 || total >= static_cast<double>(n)) {
    no_mle(total <= 0.0 ? "the network has no ties (complete separation)" : "the network is complete (complete separation)");
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  LogisticState state = evaluate(x, ties, beta);
  MpleFit fit;
  fit.names = delta.names;
  fit.dyads = static_cast<long>(n);

  std::span<const double> resid_span;
  for (int it = 1; it <= kMaxNewtonIterations; ++it) {
    const Eigen::VectorXd resid = ties - state.prob;
    resid_span = {resid.data(), static_cast<std::size_t>(n)};
    Eigen::VectorXd grad(k);
    for (Eigen::Index c = 0; c < k; ++c) grad[c] = kernels::dot(column(x, c), resid_span);
    const Eigen::MatrixXd info = information(x, state.weight);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
      no_mle("singular information matrix (separation or collinear statistics)");
    }
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) no_mle("non-finite Newton step");

    double t = 1.0;
    LogisticState next = evaluate(x, ties, beta + step);
    while (!(next.loglik >= state.loglik - 1e-12 * std::abs(state.loglik)) && t > 1e-8) {
      t *= 0.5;
      next = evaluate(x, ties, beta + t * step);
    }
    beta += t * step;
    state = std::move(next);
    fit.iterations = it;

    if (beta.cwiseAbs().maxCoeff() > 1e3 || state.loglik > -1e-10) {
      no_mle("coefficients diverge (separation)");
    }
    if ((t * step).cwiseAbs().maxCoeff() < 1e-11 * (1.0 + beta.cwiseAbs().maxCoeff())) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) no_mle("Newton-Raphson did not converge in " + std::to_string(kMaxNewtonIterations) + " iterations");

  const Eigen::MatrixXd info = information(x, state.weight);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
  const double lo = eig.eigenvalues().minCoeff();
  if (!(lo > 0.0) || eig.eigenvalues().maxCoeff() / lo > 1e14) {
    no_mle("information matrix is numerically singular at the optimum (quasi-separation)");
  }
  fit.coefficients = beta;
  fit.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.covariance = 0.5 * (fit.covariance + fit.covariance.transpose()).eval();
  fit.standard_errors = fit.covariance.diagonal().cwiseSqrt();
  fit.p_values.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double z = beta[c] / fit.standard_errors[c];
    fit.p_values[c] = std::erfc(std::abs(z) / std::sqrt(2.0));
  }
  fit.log_pseudolikelihood = state.loglik;
  return fit;
}

// ---------------------------------------------------------------------------
// Exchange algorithm

namespace {

struct ChainResult {
  Eigen::MatrixXd draws;
  long accepted = 0;
  long proposals = 0;
};

Eigen::MatrixXd covariance_of(const std::vector<Eigen::VectorXd>& xs, std::size_t from) {
  const auto k = xs.front().size();
  const auto m = static_cast<double>(xs.size() - from);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (std::size_t i = from; i < xs.size(); ++i) mean += xs[i];
  mean /= m;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = from; i < xs.size(); ++i) cov += (xs[i] - mean) * (xs[i] - mean).transpose();
  return cov / (m - 1.0);
}

ChainResult run_chain(const Network& net, const Model& model, const GaussianDistribution& prior,
                      const ExchangeOptions& opt, const Eigen::VectorXd& start, const Eigen::MatrixXd& start_cov,
                      int chain_id) {
  const auto k = static_cast<Eigen::Index>(model.size());
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffU), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(chain_id), 0x6578U};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const GraphState observed(net);
  const Eigen::VectorXd observed_stats = model.sufficient_stats(observed);
  GibbsChain aux(model, net, rng());

  const int burn_in = static_cast<int>(std::ceil(opt.burn_in_fraction * opt.main_iters));
  const int total = burn_in + opt.main_iters;

  Eigen::MatrixXd prop_chol;
  auto set_proposal = [&](const Eigen::MatrixXd& cov) {
    const double scale = std::max(cov.diagonal().maxCoeff(), 1e-12);
    Eigen::LLT<Eigen::MatrixXd> llt(cov + 1e-8 * scale * Eigen::MatrixXd::Identity(k, k));
    if (llt.info() == Eigen::Success) prop_chol = llt.matrixL();
  };
  set_proposal(start_cov);
  double log_scale = std::log(2.38 * 2.38 / static_cast<double>(k));

  Eigen::VectorXd beta = start;
  double log_prior = prior.log_density(beta);
  ChainResult out;
  out.draws.resize(opt.main_iters, k);
  std::vector<Eigen::VectorXd> history;
  history.reserve(static_cast<std::size_t>(burn_in));
  long batch_accepted = 0;
  int batch_size = 0;
  int batch_index = 0;

  for (int it = 0; it < total; ++it) {
    Eigen::VectorXd z(k);
    for (Eigen::Index c = 0; c < k; ++c) z[c] = normal(rng);
    const Eigen::VectorXd proposal = beta + std::exp(0.5 * log_scale) * (prop_chol * z);
    const double log_prior_prop = prior.log_density(proposal);

    aux.reset(observed, observed_stats);
    aux.sweeps(proposal, opt.aux_sweeps);
    const double log_alpha = (beta - proposal).dot(aux.stats() - observed_stats) + log_prior_prop - log_prior;
    const bool accept = std::log(unif(rng)) < log_alpha;
    if (accept) {
      beta = proposal;
      log_prior = log_prior_prop;
    }

    if (it < burn_in) {
      history.push_back(beta);
      batch_accepted += accept ? 1 : 0;
      if (++batch_size == 50) {
        const double rate = static_cast<double>(batch_accepted) / 50.0;
        log_scale += (rate - opt.target_acceptance) * 2.0 / std::sqrt(static_cast<double>(++batch_index));
        batch_accepted = 0;
        batch_size = 0;
        // Re-estimate the proposal shape from the later half of the burn-in so far.
        if (history.size() >= static_cast<std::size_t>(std::max<Eigen::Index>(200, 10 * k))) {
          set_proposal(covariance_of(history, history.size() / 2));
        }
      }
    } else {
      out.draws.row(it - burn_in) = beta.transpose();
      out.accepted += accept ? 1 : 0;
      ++out.proposals;
    }
  }
  return out;
}

}  // namespace

PosteriorDraws sample_posterior(const Network& net, const Model& model, const GaussianDistribution& prior,
                                const ExchangeOptions& options) {
  if (options.main_iters < kMinPosteriorDraws) {
    throw InputError("main_iters must be at least " + std::to_string(kMinPosteriorDraws));
  }
  if (options.aux_sweeps < 1) throw InputError("aux_sweeps must be at least 1");
  if (options.chains < 1) throw InputError("chains must be at least 1");
  if (prior.dimension() != model.size() || prior.names() != model.names()) {
    throw InputError("prior does not match the model's coefficients");
  }

  const auto k = static_cast<Eigen::Index>(model.size());
  Eigen::VectorXd start = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd start_cov;
  try {
    const MpleFit mple = fit_mple(net, model);
    start = mple.coefficients;
    start_cov = mple.covariance;
  } catch (const NumericalError&) {
    const double rho = std::clamp(net.density(), 0.5 / static_cast<double>(dyad_count(net)), 0.5);
    start[model.edges_index()] = std::log(rho / (1.0 - rho));
    start_cov = 0.01 * Eigen::MatrixXd::Identity(k, k);
  }

  std::vector<ChainResult> results(static_cast<std::size_t>(options.chains));
  if (options.chains == 1) {
    results[0] = run_chain(net, model, prior, options, start, start_cov, 0);
  } else {
    std::vector<std::exception_ptr> errors(results.size());
    std::vector<std::thread> workers;
    for (int c = 0; c < options.chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          results[static_cast<std::size_t>(c)] = run_chain(net, model, prior, options, start, start_cov, c);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  PosteriorDraws out;
  out.names = model.names();
  out.seed = options.seed;
  out.draws.resize(static_cast<Eigen::Index>(options.chains) * options.main_iters, k);
  long accepted = 0;
  long proposals = 0;
  for (int c = 0; c < options.chains; ++c) {
    const auto& r = results[static_cast<std::size_t>(c)];
    out.draws.middleRows(static_cast<Eigen::Index>(c) * options.main_iters, options.main_iters) = r.draws;
    out.chain.insert(out.chain.end(), static_cast<std::size_t>(options.main_iters), c);
    accepted += r.accepted;
    proposals += r.proposals;
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(proposals);
  if (out.acceptance_rate < 0.01) {
    throw NumericalError("exchange sampler tuning failure: acceptance rate " + std::to_string(out.acceptance_rate) +
                         " after adaptation");
  }
  return out;
}

GaussianDistribution gaussian_approx(const PosteriorDraws& draws) {
  const auto m = draws.draws.rows();
  if (m < kMinPosteriorDraws) {
    throw InputError("gaussian_approx needs at least " + std::to_string(kMinPosteriorDraws) + " draws");
  }
  const Eigen::VectorXd mean = draws.draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.draws.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(eig.eigenvalues().minCoeff() > 1e-12 * hi)) {
    throw NumericalError("posterior draws have a rank-deficient sample covariance");
  }
  return GaussianDistribution(draws.names, mean, 0.5 * (cov + cov.transpose()));
}

InformationCriteria information_criteria(const MpleFit& full, const MpleFit& null_fit) {
  if (!full.converged || !null_fit.converged) throw InputError("information criteria need converged fits");
  if (full.dyads != null_fit.dyads) throw InputError("information criteria need fits on the same network");
  if (null_fit.names.size() > full.names.size()) throw InputError("null model must be nested in the full model");
  for (const auto& name : null_fit.names) {
    if (std::find(full.names.begin(), full.names.end(), name) == full.names.end()) {
      throw InputError("models are not nested: '" + name + "' is not in the full model");
    }
  }
  const double log_d = std::log(static_cast<double>(full.dyads));
  const auto k_full = static_cast<double>(full.names.size());
  const auto k_null = static_cast<double>(null_fit.names.size());
  InformationCriteria ic;
  ic.bic_full = -2.0 * full.log_pseudolikelihood + k_full * log_d;
  ic.bic_null = -2.0 * null_fit.log_pseudolikelihood + k_null * log_d;
  ic.aic_full = -2.0 * full.log_pseudolikelihood + 2.0 * k_full;
  ic.aic_null = -2.0 * null_fit.log_pseudolikelihood + 2.0 * k_null;
  ic.bic_evidence = std::exp(-(ic.bic_null - ic.bic_full) / 2.0);
  ic.aic_evidence = std::exp(-(ic.aic_null - ic.aic_full) / 2.0);
  ic.exact_likelihood = full.exact_likelihood && null_fit.exact_likelihood;
  return ic;
}

double ks_distance_normal(std::vector<double> sample, double mean, double sd) {
  std::sort(sample.begin(), sample.end());
  const auto m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf((sample[i] - mean) / sd);
    d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
  }
  return d;
}

std::vector<NormalityResult> normality_check(const PosteriorDraws& draws, const GaussianDistribution& approx) {
  std::vector<NormalityResult> out;
  const Eigen::VectorXd sd = approx.standard_deviations();
  for (Eigen::Index c = 0; c < draws.draws.cols(); ++c) {
    std::vector<double> col(draws.draws.col(c).data(), draws.draws.col(c).data() + draws.draws.rows());
    NormalityResult r;
    r.name = draws.names[static_cast<std::size_t>(c)];
    r.ks = ks_distance_normal(std::move(col), approx.mean()[c], sd[c]);
    r.flagged = r.ks > kNormalityThreshold;
    out.push_back(r);
  }
  return out;
}

void write_draws_csv(const PosteriorDraws& draws, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path.string());
  for (std::size_t c = 0; c < draws.names.size(); ++c) out << (c ? "," : "") << draws.names[c];
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < draws.draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws.draws.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", draws.draws(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace ergmbf
