#include "ergmbf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "ergmbf/error.hpp"
#include "ergmbf/priors.hpp"
#include "ergmbf/sampler.hpp"
#include "ergmbf/statistics.hpp"

namespace ergmbf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (auto t : tags) {
    words.push_back(static_cast<std::uint32_t>(t));
    words.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Runs f(i) for i in [0, count) on `workers` threads; results land by index.
template <class F>
void parallel_for(int count, int workers, F&& f) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

void say(const ProgressLog& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Network draw_network(const Eigen::VectorXd& beta, const Model& model, int sweeps, std::uint64_t seed) {
  SamplerOptions so;
  so.count = 1;
  so.burn_in = sweeps;
  so.seed = seed;
  return sample_networks(beta, model, Network::empty(model.nodes(), model.directed()), so).networks.front();
}

// ---- Jeffreys-Lindley study ----

ModelSpec jl_spec() {
  return ModelSpec::parse_json(
      R"({"terms":[{"kind":"edges"},{"kind":"kstar","k":2},{"kind":"absdiff","attr":"wealth"}]})");
}

struct JlDraw {
  Network net;
  AttributeTable attrs;
  double p = kNaN;       // pseudo-likelihood ratio test
  double wald_p = kNaN;
  double mple = kNaN;
};

/// One generated network with freshly resampled wealth; p is NaN if either
/// MPLE fails. The ratio test is used because the Wald p-value is not
/// monotone in the effect once small networks approach separation.
JlDraw jl_draw(const JlOptions& o, int n, double beta_absdiff, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, o.wealth.size() - 1);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = o.wealth[pick(rng)];
  AttributeTable attrs(n);
  attrs.add_numeric("wealth", w);
  Model model(jl_spec(), n, false, attrs);
  Eigen::VectorXd beta(3);
  beta << o.edges, o.kstar2, beta_absdiff;
  JlDraw d{draw_network(beta, model, o.generation_sweeps, rng()), attrs};
  try {
    const auto fit = fit_mple(d.net, model);
    const auto null_fit = fit_mple(d.net, model.drop({"absdiff.wealth"}));
    const double lr = std::max(0.0, 2.0 * (fit.log_pseudolikelihood - null_fit.log_pseudolikelihood));
    d.p = std::erfc(std::sqrt(0.5 * lr));
    d.wald_p = fit.p_values[2];
    d.mple = fit.coefficients[2];
  } catch (const NumericalError&) {
  }
  return d;
}

double pilot_median_p(const JlOptions& o, int n, double beta, std::uint64_t seed) {
  std::vector<double> ps;
  for (int r = 0; r < o.pilot_size; ++r) {
    const double p = jl_draw(o, n, beta, stream_seed(seed, {static_cast<std::uint64_t>(r)})).p;
    if (std::isfinite(p)) ps.push_back(p);
  }
  if (ps.size() < static_cast<std::size_t>(o.pilot_size) / 2) return kNaN;
  return median(ps);
}

struct JlReplicate {
  bool ok = false;
  double post_mean = kNaN, bf = kNaN, prob = kNaN, bic = kNaN, aic = kNaN;
};

JlReplicate jl_replicate(const JlOptions& o, const JlDraw& d, std::uint64_t seed) {
  JlReplicate r;
  try {
    Model full(jl_spec(), d.net, d.attrs);
    Model null_model = full.drop({"absdiff.wealth"});
    const auto full_fit = fit_mple(d.net, full);
    const auto null_fit = fit_mple(d.net, null_model);
    const auto ic = information_criteria(full_fit, null_fit);
    const auto prior = unit_information_prior(d.net, full);
    ExchangeOptions eo = o.exchange;
    eo.seed = seed;
    const auto post = gaussian_approx(sample_posterior(d.net, full, prior, eo));
    Eigen::MatrixXd r_e = Eigen::MatrixXd::Zero(1, 3);
    r_e(0, 2) = 1.0;
    r.bf = density_at_null(post, r_e) / density_at_null(prior, r_e);
    r.prob = r.bf / (1.0 + r.bf);
    r.post_mean = post.mean()[2];
    r.bic = ic.bic_evidence;
    r.aic = ic.aic_evidence;
    r.ok = true;
  } catch (const NumericalError&) {
  }
  return r;
}

JlRow jl_size(const JlOptions& o, int n, const ProgressLog& log) {
  const auto size_seed = stream_seed(o.seed, {1, static_cast<std::uint64_t>(n)});
  const auto pilot_seed = stream_seed(size_seed, {1});

  // Bisection on the absdiff coefficient for a pilot-median p of 0.05. The
  // pilot reuses its seeds at every step so the median is a smooth function.
  double lo = 0.0;
  double hi = o.beta_upper;
  const double target = 0.5 * (o.p_low + o.p_high);
  for (int step = 0; step < o.bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double p = pilot_median_p(o, n, mid, pilot_seed);
    if (!std::isfinite(p) || p < target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double beta = 0.5 * (lo + hi);
  say(log, "jl n=" + std::to_string(n) + fmt(": absdiff effect %.6g", beta));

  JlRow row;
  row.n = n;
  row.beta_absdiff = beta;
  std::vector<JlDraw> kept;
  const auto collect_seed = stream_seed(size_seed, {2});
  while (static_cast<int>(kept.size()) < o.replicates) {
    if (row.attempts >= o.max_attempts) {
      throw NumericalError("could not tune networks of size " + std::to_string(n) + " into the p-value window after " +
                           std::to_string(o.max_attempts) + " attempts");
    }
    auto d = jl_draw(o, n, beta, stream_seed(collect_seed, {static_cast<std::uint64_t>(row.attempts)}));
    ++row.attempts;
    if (std::isfinite(d.p) && d.p > o.p_low && d.p < o.p_high) kept.push_back(std::move(d));
  }
  row.retained = static_cast<int>(kept.size());

  std::vector<JlReplicate> reps(kept.size());
  const auto post_seed = stream_seed(size_seed, {3});
  parallel_for(static_cast<int>(kept.size()), o.workers, [&](int i) {
    reps[static_cast<std::size_t>(i)] =
        jl_replicate(o, kept[static_cast<std::size_t>(i)], stream_seed(post_seed, {static_cast<std::uint64_t>(i)}));
  });

  std::vector<double> mple, p, wald, pm, bf, prob, bic, aic;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    mple.push_back(kept[i].mple);
    p.push_back(kept[i].p);
    wald.push_back(kept[i].wald_p);
    if (!reps[i].ok) {
      ++row.failed;
      continue;
    }
    pm.push_back(reps[i].post_mean);
    bf.push_back(reps[i].bf);
    prob.push_back(reps[i].prob);
    bic.push_back(reps[i].bic);
    aic.push_back(reps[i].aic);
  }
  row.median_mple = median(mple);
  row.median_p = median(p);
  row.median_wald_p = median(wald);
  row.median_posterior_mean = median(pm);
  row.median_bf = median(bf);
  row.median_posterior_prob = median(prob);
  row.median_bic_evidence = median(bic);
  row.median_aic_evidence = median(aic);
  say(log, "jl n=" + std::to_string(n) + fmt(": median BF %.4g, BIC %.4g, AIC %.4g", row.median_bf,
                                            row.median_bic_evidence, row.median_aic_evidence));
  return row;
}

// ---- order study ----

ModelSpec order_spec(double decay) {
  ModelSpec spec;
  auto add = [&spec](StatKind kind) -> StatisticSpec& {
    spec.terms.emplace_back();
    spec.terms.back().kind = kind;
    return spec.terms.back();
  };
  add(StatKind::Edges);
  add(StatKind::Mutual);
  for (const auto& c : kOrderCovariates) {
    auto& t = add(StatKind::Edgecov);
    t.covariate = c;
    t.standardized = true;
  }
  add(StatKind::Gwesp).decay = decay;
  return spec;
}

CovariateSet order_covariates(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CovariateSet covs;
  for (const auto& name : kOrderCovariates) {
    std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (auto& x : v) x = normal(rng);
    covs.emplace(name, make_dyad_covariate(name, n, v));
  }
  return covs;
}

struct OrderReplicate {
  bool ok = false;
  double density = kNaN, p1 = kNaN, p2 = kNaN, p3 = kNaN, bf = kNaN, prior_prob = kNaN;
};

OrderReplicate order_replicate(const OrderOptions& o, const Model& model, const HypothesisSet& hset,
                               const Eigen::VectorXd& beta, std::uint64_t seed) {
  OrderReplicate r;
  try {
    std::mt19937_64 rng(seed);
    const Network net = draw_network(beta, model, o.generation_sweeps, rng());
    r.density = net.density();
    if (net.tie_count() == 0 || net.tie_count() == dyad_count(net)) return r;
    fit_mple(net, model);  // throws when the MLE does not exist
    const auto prior = unit_information_prior(net, model);
    ExchangeOptions eo = o.exchange;
    eo.seed = rng();
    const auto post = gaussian_approx(sample_posterior(net, model, prior, eo));
    const auto report = test_hypotheses(prior, post, hset, {o.mc.draws, rng()});
    if (report.hypotheses.size() != 3) return r;
    r.p1 = report.posterior_probs[0];
    r.p2 = report.posterior_probs[1];
    r.p3 = report.posterior_probs[2];
    r.bf = report.hypotheses[0].components.bf;
    r.prior_prob = report.hypotheses[0].components.prior_prob.value;
    r.ok = true;
  } catch (const NumericalError&) {
  }
  return r;
}

}  // namespace

std::vector<double> florentine_wealth() {
  return {10, 36, 55, 44, 20, 32, 8, 42, 103, 48, 49, 3, 27, 10, 146, 48};
}

double median(std::vector<double> values) {
  if (values.empty()) return kNaN;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<JlRow> simulate_jl(const JlOptions& o, const ProgressLog& log) {
  if (o.sizes.empty()) throw InputError("the network size grid is empty");
  if (o.replicates < 1) throw InputError("replicates must be positive");
  if (o.wealth.empty()) throw InputError("no wealth values to resample");
  for (int n : o.sizes) {
    if (n < 3) throw InputError("network sizes must be at least 3");
  }
  std::vector<JlRow> rows;
  for (int n : o.sizes) rows.push_back(jl_size(o, n, log));
  return rows;
}

std::vector<OrderRow> simulate_order(const OrderOptions& o, const ProgressLog& log) {
  if (o.sizes.empty() || o.betas.empty()) throw InputError("the simulation grid is empty");
  if (o.replicates < 1) throw InputError("replicates must be positive");
  std::vector<OrderRow> rows;
  for (int n : o.sizes) {
    if (n < 3) throw InputError("network sizes must be at least 3");
    const auto size_seed = stream_seed(o.seed, {2, static_cast<std::uint64_t>(n)});
    const Model model(order_spec(o.decay), n, true, {}, order_covariates(n, stream_seed(size_seed, {0})));
    const auto& names = model.names();
    const std::string a = names[2], b = names[3], c = names[4];
    const auto hset = parse_hypotheses(a + " < " + b + " < " + c + "; " + a + " = " + b + " = " + c, names,
                                       model.edges_index());
    for (std::size_t g = 0; g < o.betas.size(); ++g) {
      const double bv = o.betas[g];
      Eigen::VectorXd beta(6);
      beta << o.edges, o.mutual, bv, 2.0 * bv, 3.0 * bv, o.gwesp;
      // Seeds depend on the grid value, not its position, so grids can be split.
      const auto point_seed = stream_seed(size_seed, {1, static_cast<std::uint64_t>(std::llround(bv * 1e6))});
      std::vector<OrderReplicate> reps(static_cast<std::size_t>(o.replicates));
      parallel_for(o.replicates, o.workers, [&](int i) {
        reps[static_cast<std::size_t>(i)] =
            order_replicate(o, model, hset, beta, stream_seed(point_seed, {static_cast<std::uint64_t>(i)}));
      });
      OrderRow row;
      row.n = n;
      row.beta = bv;
      std::vector<double> dens, p1, p2, p3, bf, pp;
      for (const auto& r : reps) {
        if (std::isfinite(r.density)) dens.push_back(r.density);
        if (!r.ok) {
          ++row.failed;
          continue;
        }
        ++row.used;
        p1.push_back(r.p1);
        p2.push_back(r.p2);
        p3.push_back(r.p3);
        bf.push_back(r.bf);
        pp.push_back(r.prior_prob);
      }
      row.flagged = row.used == 0;
      row.median_density = median(dens);
      row.median_p_order = median(p1);
      row.median_p_equal = median(p2);
      row.median_p_complement = median(p3);
      row.median_bf_order = median(bf);
      row.median_prior_order_prob = median(pp);
      say(log, "order n=" + std::to_string(n) + fmt(" beta=%.3g: P(order) %.3f, P(equal) %.3f", bv,
                                                   row.median_p_order, row.median_p_equal) +
                   fmt(", P(complement) %.3f", row.median_p_complement) +
                   (row.flagged ? " (no usable replicate)" : ""));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_jl_csv(const std::vector<JlRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "n,beta_absdiff,retained,attempts,failed,median_mple,median_p,median_wald_p,median_posterior_mean,median_bf_null,"
         "median_posterior_prob_null,median_bic_evidence_null,median_aic_evidence_null\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%d,%ld,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.n,
                  r.beta_absdiff, r.retained, r.attempts, r.failed, r.median_mple, r.median_p, r.median_wald_p,
                  r.median_posterior_mean, r.median_bf, r.median_posterior_prob, r.median_bic_evidence,
                  r.median_aic_evidence);
    out << buf;
  }
}

void write_order_csv(const std::vector<OrderRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "n,beta,used,failed,flagged,median_density,median_p_order,median_p_equal,median_p_complement,"
         "median_bf_order,median_prior_order_prob\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%d,%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.n, r.beta, r.used,
                  r.failed, r.flagged ? 1 : 0, r.median_density, r.median_p_order, r.median_p_equal,
                  r.median_p_complement, r.median_bf_order, r.median_prior_order_prob);
    out << buf;
  }
}

}  // namespace ergmbf
