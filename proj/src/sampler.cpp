#include "ergmbf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergmbf/error.hpp"

namespace ergmbf {

GibbsChain::GibbsChain(const Model& model, const Network& start, std::uint64_t seed)
    : model_(&model),
      state_(start),
      stats_(model.sufficient_stats(state_)),
      dyads_(canonical_dyads(start.size(), start.directed())),
      order_(dyads_.size()),
      delta_(static_cast<std::size_t>(model.size())),
      rng_(seed),
      dyad_total_(dyad_count(start)) {
  std::iota(order_.begin(), order_.end(), 0U);
}

void GibbsChain::reset(const GraphState& start, const Eigen::VectorXd& stats) {
  state_ = start;
  stats_ = stats;
  degenerate_run_ = 0;
}

void GibbsChain::sweep(const Eigen::VectorXd& beta) {
  std::shuffle(order_.begin(), order_.end(), rng_);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto k = static_cast<std::size_t>(model_->size());
  for (auto idx : order_) {
    const auto& d = dyads_[idx];
    model_->change_stats(state_, d.i, d.j, delta_);
    double eta = 0.0;
    for (std::size_t c = 0; c < k; ++c) eta += beta[static_cast<Eigen::Index>(c)] * delta_[c];
    if (!std::isfinite(eta)) throw NumericalError("non-finite conditional log-odds in the Gibbs sampler");
    const double p = 1.0 / (1.0 + std::exp(-eta));
    const bool present = unif(rng_) < p;
    if (present != state_.has(d.i, d.j)) {
      state_.set(d.i, d.j, present);
      const double sign = present ? 1.0 : -1.0;
      for (std::size_t c = 0; c < k; ++c) stats_[static_cast<Eigen::Index>(c)] += sign * delta_[c];
    }
  }
  const long ties = state_.tie_count();
  degenerate_run_ = (ties == 0 || ties == dyad_total_) ? degenerate_run_ + 1 : 0;
}

void GibbsChain::sweeps(const Eigen::VectorXd& beta, int count) {
  for (int s = 0; s < count; ++s) sweep(beta);
}

NetworkSample sample_networks(const Eigen::VectorXd& beta, const Model& model, const Network& start,
                              const SamplerOptions& options) {
  if (options.count < 1) throw InputError("sample_networks: count must be >= 1");
  if (options.burn_in < 0 || options.thin < 0) throw InputError("sample_networks: burn_in and thin must be >= 0");
  if (beta.size() != model.size()) throw InputError("sample_networks: coefficient vector length mismatch");
  if (!beta.allFinite()) throw InputError("sample_networks: non-finite coefficients");

  GibbsChain chain(model, start, options.seed);
  chain.sweeps(beta, options.burn_in);
  NetworkSample out;
  const int spacing = std::max(options.thin, 1);
  for (int c = 0; c < options.count; ++c) {
    chain.sweeps(beta, spacing);
    out.networks.push_back(chain.state().to_network());
    out.stats.push_back(chain.stats());
    out.degenerate.push_back(chain.degenerate_run() >= kDegenerateSweeps);
  }
  return out;
}

ExactDistribution::ExactDistribution(const Eigen::VectorXd& beta, const Model& model)
    : n_(model.nodes()), directed_(model.directed()), dyads_(canonical_dyads(n_, directed_)) {
  const auto d = static_cast<long>(dyads_.size());
  if (d > kMaxDyads) {
    throw InputError("exact enumeration needs D <= " + std::to_string(kMaxDyads) + ", got " + std::to_string(d));
  }
  if (beta.size() != model.size()) throw InputError("exact enumeration: coefficient vector length mismatch");
  const std::size_t count = std::size_t{1} << d;
  auto table = std::make_shared<Eigen::MatrixXd>(static_cast<Eigen::Index>(count), model.size());
  for (std::size_t g = 0; g < count; ++g) {
    GraphState state(n_, directed_);
    for (long b = 0; b < d; ++b) {
      if ((g >> b) & 1U) state.set(dyads_[static_cast<std::size_t>(b)].i, dyads_[static_cast<std::size_t>(b)].j, true);
    }
    table->row(static_cast<Eigen::Index>(g)) = model.sufficient_stats(state).transpose();
  }
  stats_ = std::move(table);
  weigh(beta);
}

void ExactDistribution::weigh(const Eigen::VectorXd& beta) {
  beta_ = beta;
  const Eigen::VectorXd logw = (*stats_) * beta;
  const double top = logw.maxCoeff();
  const Eigen::VectorXd w = (logw.array() - top).exp().matrix();
  const double total = w.sum();
  log_normalizer_ = top + std::log(total);
  probabilities_ = w / total;
}

ExactDistribution ExactDistribution::reweighted(const Eigen::VectorXd& beta) const {
  if (beta.size() != stats_->cols()) throw InputError("reweighted: coefficient vector length mismatch");
  ExactDistribution out;
  out.n_ = n_;
  out.directed_ = directed_;
  out.dyads_ = dyads_;
  out.stats_ = stats_;
  out.weigh(beta);
  return out;
}

Eigen::VectorXd ExactDistribution::mean_stats() const { return stats_->transpose() * probabilities_; }

Eigen::MatrixXd ExactDistribution::covariance_stats() const {
  const Eigen::VectorXd mu = mean_stats();
  const Eigen::MatrixXd centered = stats_->rowwise() - mu.transpose();
  return centered.transpose() * probabilities_.asDiagonal() * centered;
}

double ExactDistribution::log_likelihood(const Eigen::VectorXd& observed_stats) const {
  return beta_.dot(observed_stats) - log_normalizer_;
}

std::size_t ExactDistribution::index_of(const Network& net) const {
  if (net.size() != n_ || net.directed() != directed_) throw InputError("network does not match the enumerated space");
  std::size_t g = 0;
  for (std::size_t b = 0; b < dyads_.size(); ++b) {
    if (net.has_tie(dyads_[b].i, dyads_[b].j)) g |= std::size_t{1} << b;
  }
  return g;
}

Network ExactDistribution::graph(std::size_t index) const {
  GraphState state(n_, directed_);
  for (std::size_t b = 0; b < dyads_.size(); ++b) {
    if ((index >> b) & 1U) state.set(dyads_[b].i, dyads_[b].j, true);
  }
  return state.to_network();
}

ExactDistribution exact_enumeration(const Eigen::VectorXd& beta, const Model& model) {
  return ExactDistribution(beta, model);
}

}  // namespace ergmbf
