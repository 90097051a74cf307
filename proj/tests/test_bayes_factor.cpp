#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ergmbf/bayes_factor.hpp"
#include "ergmbf/error.hpp"

using namespace ergmbf;

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

GaussianDistribution gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  std::vector<std::string> names{"edges"};
  for (Eigen::Index k = 1; k < mean.size(); ++k) names.push_back(std::string(1, static_cast<char>('a' + k - 1)));
  return GaussianDistribution(names, mean, cov);
}

GaussianDistribution iid(int k, double sd = 1.0, double shift = 0.0) {
  return gaussian(Eigen::VectorXd::Constant(k, shift), Eigen::MatrixXd::Identity(k, k) * sd * sd);
}

/// 1-D variable at coordinate 1 with density `d` at zero: N(0, 1/(d sqrt(2 pi))^2).
GaussianDistribution with_density_at_zero(double d) {
  const double sd = kInvSqrt2Pi / d;
  Eigen::Vector2d mean(0.0, 0.0);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  cov(1, 1) = sd * sd;
  return gaussian(mean, cov);
}

ConstrainedHypothesis hyp(const std::string& text, int k) {
  std::vector<std::string> names{"edges"};
  for (int c = 1; c < k; ++c) names.push_back(std::string(1, static_cast<char>('a' + c - 1)));
  return parse_hypotheses(text, names, 0).hypotheses[0];
}

HypothesisSet hset(const std::string& text, int k) {
  std::vector<std::string> names{"edges"};
  for (int c = 1; c < k; ++c) names.push_back(std::string(1, static_cast<char>('a' + c - 1)));
  return parse_hypotheses(text, names, 0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x, double m, double sd) {
  const double z = (x - m) / sd;
  return kInvSqrt2Pi / sd * std::exp(-0.5 * z * z);
}

/// Rejection sampling of P(R beta > 0) under N(mean, cov).
std::pair<double, double> rejection(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, const Eigen::MatrixXd& r,
                                    long draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const Eigen::MatrixXd l = cov.llt().matrixL();
  long hits = 0;
  Eigen::VectorXd e(mean.size());
  for (long d = 0; d < draws; ++d) {
    for (auto& v : e) v = z(rng);
    if (((r * (mean + l * e)).array() > 0.0).all()) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(draws);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(draws))};
}

}  // namespace

TEST_CASE("density at the null") {
  CHECK(density_at_null(iid(2), hyp("a = 0", 2).equality) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  CHECK(density_at_null(iid(2), hyp("a = 0", 2).equality) == doctest::Approx(0.39894).epsilon(1e-5));
  CHECK(density_at_null(with_density_at_zero(2.04), hyp("a = 0", 2).equality) == doctest::Approx(2.04).epsilon(1e-13));

  // Rank-deficient R_E Sigma R_E^T.
  Eigen::Matrix3d cov;
  cov << 1, 0, 0, 0, 1, 1, 0, 1, 1 + 1e-300;
  Eigen::Matrix3d ok = cov;
  ok(2, 2) = 2.0;
  Eigen::MatrixXd diff(1, 3);
  diff << 0, 1, -1;
  auto g = gaussian(Eigen::Vector3d::Zero(), ok);
  CHECK(density_at_null(g, diff) == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
}

TEST_CASE("density at the null matches a Monte Carlo density estimate") {
  Eigen::Vector3d mean(0.0, 0.3, -0.2);
  Eigen::Matrix3d cov;
  cov << 1, 0, 0, 0, 0.8, 0.3, 0, 0.3, 0.5;
  auto g = gaussian(mean, cov);
  auto h = hyp("a = 0 & b = a", 3);
  REQUIRE(h.equality.rows() == 2);
  const double exact = density_at_null(g, h.equality);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> z(0.0, 1.0);
  const Eigen::Matrix2d l = cov.bottomRightCorner(2, 2).llt().matrixL();
  const double half = 0.05;
  long inside = 0;
  const long draws = 2000000;
  for (long d = 0; d < draws; ++d) {
    const Eigen::Vector2d b = mean.tail(2) + l * Eigen::Vector2d(z(rng), z(rng));
    if (std::abs(b[0]) < half && std::abs(b[1] - b[0]) < half) ++inside;
  }
  const double kde = static_cast<double>(inside) / static_cast<double>(draws) / (4 * half * half);
  CHECK(std::abs(kde / exact - 1.0) < 0.05);
}

TEST_CASE("Savage-Dickey ratio fixture") {
  auto prior = with_density_at_zero(0.387);
  auto post = with_density_at_zero(2.04);
  auto c = bf_vs_unconstrained(prior, post, hyp("a = 0", 2), {});
  CHECK(std::abs(c.bf - 2.04 / 0.387) < 1e-10);
  CHECK(std::abs(c.bf - 5.2713) < 1e-4);
  CHECK(c.posterior_density == doctest::Approx(2.04));
  CHECK(c.prior_density == doctest::Approx(0.387));
  CHECK(c.posterior_prob.value == 1.0);
  CHECK(c.prior_prob.value == 1.0);
  CHECK(raftery_label(c.bf) == RafteryCategory::PositiveFor);
}

TEST_CASE("conditional order probabilities") {
  McOptions mc{100000, 3};
  auto one = conditional_order_prob(iid(4), Eigen::MatrixXd(0, 4), hyp("b > 0", 4).order, mc);
  CHECK(one.value == 0.5);
  CHECK(one.mc_se == 0.0);

  auto ordering = conditional_order_prob(iid(4), Eigen::MatrixXd(0, 4), hyp("a < b < c", 4).order, mc);
  CHECK(std::abs(ordering.value - 1.0 / 6.0) < 0.005);
  CHECK(ordering.mc_se > 0.0);
  CHECK(ordering.mc_se < 0.002);

  // One order row under an equality: closed form after conditioning.
  // (a, b) iid N(0,1) given a - b = 0: a | . ~ N(0, 1/2), so P(a > 0) = 1/2; with
  // a mean of (1, 0) the conditional mean of a is 1/2.
  auto g = gaussian(Eigen::Vector3d(0, 1, 0), Eigen::Matrix3d::Identity());
  auto h = hyp("a = b & a > 0", 3);
  auto cond = conditional_order_prob(g, h.equality, h.order, mc);
  CHECK(cond.value == doctest::Approx(normal_cdf(0.5 / std::sqrt(0.5))).epsilon(1e-12));
}

TEST_CASE("order probability against a rejection-sampling oracle") {
  Eigen::Vector4d mean(0.0, 0.4, 0.1, -0.3);
  Eigen::Matrix4d cov;
  cov << 1, 0, 0, 0,
         0, 1.0, 0.5, 0.2,
         0, 0.5, 0.8, -0.3,
         0, 0.2, -0.3, 1.5;
  auto g = gaussian(mean, cov);
  auto h = hyp("a > b & c < a", 4);
  REQUIRE(h.order.rows() == 2);
  auto est = conditional_order_prob(g, Eigen::MatrixXd(0, 4), h.order, {100000, 11});
  auto [p, se] = rejection(mean, cov, h.order, 1000000, 5);
  CHECK(std::abs(est.value - p) < 3.0 * std::hypot(est.mc_se, se));

  // With an equality: condition analytically, then reject.
  auto he = hyp("c = 0 & a > b > 0", 4);
  auto est2 = conditional_order_prob(g, he.equality, he.order, {100000, 12});
  const Eigen::MatrixXd re = he.equality;
  const Eigen::MatrixXd s = re * cov * re.transpose();
  const Eigen::MatrixXd k = cov * re.transpose() * s.inverse();
  const Eigen::VectorXd cm = mean - k * (re * mean);
  Eigen::MatrixXd cc = cov - k * re * cov;
  // Project out the conditioned direction exactly and regularise for the Cholesky.
  cc = 0.5 * (cc + cc.transpose()) + 1e-12 * Eigen::MatrixXd::Identity(4, 4);
  auto [p2, se2] = rejection(cm, cc, he.order, 1000000, 6);
  CHECK(std::abs(est2.value - p2) < 3.0 * std::hypot(est2.mc_se, se2));
}

TEST_CASE("Monte Carlo estimates are seeded") {
  auto h = hyp("a < b < c", 4);
  auto a = conditional_order_prob(iid(4), Eigen::MatrixXd(0, 4), h.order, {20000, 1});
  auto b = conditional_order_prob(iid(4), Eigen::MatrixXd(0, 4), h.order, {20000, 1});
  auto c = conditional_order_prob(iid(4), Eigen::MatrixXd(0, 4), h.order, {20000, 2});
  CHECK(a.value == b.value);
  CHECK(a.value != c.value);
}

TEST_CASE("degenerate conditioning is an error") {
  // b is a deterministic copy of a: given a = 0 the order variable b has no variance.
  Eigen::Matrix3d cov;
  cov << 1, 0, 0, 0, 1, 1, 0, 1, 1 + 1e-14;
  auto g = gaussian(Eigen::Vector3d::Zero(), cov);
  auto h = hyp("a = 0 & b > 0", 3);
  CHECK_THROWS_AS(conditional_order_prob(g, h.equality, h.order, {}), NumericalError);
}

TEST_CASE("identical prior and posterior give BF 1") {
  Eigen::Vector4d mean(0, 0.2, -0.1, 0.4);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
  cov(1, 2) = cov(2, 1) = 0.3;
  auto g = gaussian(mean, cov);
  for (const char* text : {"a = 0", "a > 0", "a = b", "a = 0 & b > 0", "a = b = c"}) {
    CAPTURE(text);
    CHECK(bf_vs_unconstrained(g, g, hyp(text, 4), {}).bf == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(bf_vs_unconstrained(g, g, hyp("a > b > c", 4), {}).bf == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("Occam saturation") {
  auto prior = iid(4, 3.0);
  const double prior_prob = bf_vs_unconstrained(prior, prior, hyp("a < b < c", 4), {100000, 1}).prior_prob.value;
  double last = 0.0;
  for (double step : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    auto post = gaussian(Eigen::Vector4d(0, step, 2 * step, 3 * step), Eigen::Matrix4d::Identity() * 0.25);
    auto c = bf_vs_unconstrained(prior, post, hyp("a < b < c", 4), {100000, 1});
    // Bounded by 1/prior probability, within Monte Carlo error.
    const double bound = 1.0 / c.prior_prob.value;
    const double bound_se = c.prior_prob.mc_se / (c.prior_prob.value * c.prior_prob.value);
    CHECK(c.bf <= bound + 3.0 * bound_se);
    CHECK(c.bf >= last);
    last = c.bf;
  }
  CHECK(std::abs(last * prior_prob - 1.0) < 0.05);
  CHECK(std::abs(last - 6.0) < 0.3);
}

TEST_CASE("BF is monotone as the posterior moves into the region") {
  auto prior = iid(4);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity() * 0.3;
  cov(1, 3) = cov(3, 1) = 0.1;
  for (const char* text : {"a > 0", "a < b < c", "b = 0 & c > a"}) {
    CAPTURE(text);
    auto h = hyp(text, 4);
    double last = 0.0;
    for (double s = -1.0; s <= 3.0; s += 0.25) {
      // Direction (0, 1, 2, 3) is inside every region above when b's equality is respected.
      Eigen::Vector4d mean(0, s, 2 * s, 3 * s);
      if (h.has_equality()) mean << 0, s, 0, 3 * s;
      auto c = bf_vs_unconstrained(prior, gaussian(mean, cov), h, {20000, 4});
      if (!h.has_equality()) {
        CHECK(c.bf >= last);
        last = c.bf;
      } else {
        CHECK(c.posterior_prob.value >= last);
        last = c.posterior_prob.value;
      }
    }
  }
}

TEST_CASE("conjugate Gaussian location problem") {
  // x_i ~ N(mu, sigma^2), prior mu ~ N(0, tau^2).
  const double sigma = 2.0, tau = 1.5, xbar = 0.7;
  const int n = 12;
  const double v = sigma * sigma / n;
  const double post_var = 1.0 / (1.0 / v + 1.0 / (tau * tau));
  const double post_mean = post_var * xbar / v;
  auto prior = gaussian(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, tau * tau).asDiagonal());
  auto post = gaussian(Eigen::Vector2d(0, post_mean), Eigen::Vector2d(1, post_var).asDiagonal());
  const double sd = bf_vs_unconstrained(prior, post, hyp("a = 0", 2), {}).bf;
  const double analytic = normal_pdf(xbar, 0.0, std::sqrt(v)) / normal_pdf(xbar, 0.0, std::sqrt(tau * tau + v));
  CHECK(std::abs(sd - analytic) < 1e-10);
}

TEST_CASE("complement hypothesis") {
  McOptions mc{200000, 8};
  // Binary partition.
  auto prior = iid(2);
  auto post = gaussian(Eigen::Vector2d(0, 0.3), Eigen::Matrix2d::Identity());
  auto binary = complement_bf(prior, post, hset("a > 0", 2), mc);
  CHECK_FALSE(binary.dropped);
  const double want = normal_cdf(-0.3) / 0.5;
  CHECK(std::abs(binary.bf - want) < 4.0 * (binary.posterior_prob.mc_se / 0.5 + want * binary.prior_prob.mc_se / 0.5) + 1e-3);

  // Two disjoint orderings of three coefficients, posterior close to the prior.
  auto p3 = iid(4);
  auto q3 = iid(4, 1.05);
  auto two = complement_bf(p3, q3, hset("a < b < c; c < b < a", 4), mc);
  CHECK(std::abs(two.prior_prob.value - 4.0 / 6.0) < 0.005);
  CHECK(std::abs(two.posterior_prob.value - 4.0 / 6.0) < 0.005);
  CHECK(two.bf == doctest::Approx(1.0).epsilon(0.02));

  // Overlapping regions are counted once: a > 0 and b > 0 leave the (-,-) quadrant.
  auto overlap = complement_bf(iid(3), iid(3), hset("a > 0; b > 0", 3), mc);
  CHECK(std::abs(overlap.prior_prob.value - 0.25) < 0.005);

  // Equality-only hypotheses: the complement is the unconstrained model.
  auto eq = complement_bf(p3, q3, hset("a = b; c = 0", 4), mc);
  CHECK(eq.bf == 1.0);

  // All six orderings exhaust the space.
  auto all = complement_bf(p3, q3, hset("a<b<c; a<c<b; b<a<c; b<c<a; c<a<b; c<b<a", 4), mc);
  CHECK(all.dropped);
}

TEST_CASE("full test drops an exhausted complement and renormalises") {
  auto set = hset("a<b<c; a<c<b; b<a<c; b<c<a; c<a<b; c<b<a", 4);
  auto post = gaussian(Eigen::Vector4d(0, 0.1, 0.2, 0.3), Eigen::Matrix4d::Identity() * 0.5);
  auto report = test_hypotheses(iid(4), post, set, {50000, 2});
  CHECK(report.hypotheses.size() == 6);
  CHECK(report.notices.size() == 1);
  for (double p : report.prior_probs) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  double total = std::accumulate(report.posterior_probs.begin(), report.posterior_probs.end(), 0.0);
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("full test with equality, order and complement") {
  auto set = hset("a = b = c; a < b < c", 4);
  auto post = gaussian(Eigen::Vector4d(-2, 1.0, 2.0, 3.0), Eigen::Matrix4d::Identity() * 0.04);
  auto report = test_hypotheses(iid(4), post, set, {100000, 5});
  REQUIRE(report.hypotheses.size() == 3);
  CHECK(report.hypotheses[2].complement);
  CHECK(report.evidence.rows() == 3);
  CHECK(report.posterior_probs[1] > 0.9);
  double total = std::accumulate(report.posterior_probs.begin(), report.posterior_probs.end(), 0.0);
  CHECK(std::abs(total - 1.0) < 1e-12);
  auto again = test_hypotheses(iid(4), post, set, {100000, 5});
  CHECK(again.bf_vs_unconstrained() == report.bf_vs_unconstrained());
}

TEST_CASE("evidence matrix and posterior probabilities") {
  auto two = evidence_matrix_and_posteriors({5.2, 1.0}, {0.5, 0.5});
  CHECK(two.posterior_probs[0] == doctest::Approx(5.2 / 6.2).epsilon(1e-14));
  CHECK(std::abs(two.posterior_probs[0] - 0.839) < 0.005);
  CHECK(std::abs(two.posterior_probs[1] - 0.161) < 0.005);

  auto ratio = evidence_matrix_and_posteriors({2.04 / 0.387, 1.0}, {0.5, 0.5});
  CHECK(std::abs(ratio.posterior_probs[0] - 0.8405) < 1e-4);

  auto flat = evidence_matrix_and_posteriors({3.3, 3.3, 3.3, 3.3}, {0.25, 0.25, 0.25, 0.25});
  for (double p : flat.posterior_probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-14));

  // BF_32 = 5, BF_21 = 10 gives BF_31 = 50.
  auto chain = evidence_matrix_and_posteriors({1.0, 10.0, 50.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(chain.matrix(2, 1) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(chain.matrix(1, 0) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(chain.matrix(2, 0) == doctest::Approx(50.0).epsilon(1e-14));

  CHECK_THROWS_AS(evidence_matrix_and_posteriors({1.0, 0.0}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(evidence_matrix_and_posteriors({1.0, -2.0}, {0.5, 0.5}), InputError);
  CHECK_THROWS_AS(evidence_matrix_and_posteriors({1.0, 2.0}, {0.5, 0.6}), InputError);
  CHECK_THROWS_AS(evidence_matrix_and_posteriors({1.0, 2.0}, {1.0}), InputError);
}

TEST_CASE("evidence algebra on random inputs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> logbf(-30.0, 30.0);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int t = 2 + rep % 6;
    std::vector<double> bf(static_cast<std::size_t>(t)), pr(static_cast<std::size_t>(t));
    for (auto& b : bf) b = std::exp(logbf(rng));
    double total = 0.0;
    for (auto& p : pr) total += (p = u(rng));
    for (auto& p : pr) p /= total;
    auto s = evidence_matrix_and_posteriors(bf, pr);
    for (int a = 0; a < t; ++a) {
      CHECK(s.matrix(a, a) == 1.0);
      for (int b = 0; b < t; ++b) {
        CHECK(std::abs(s.matrix(a, b) * s.matrix(b, a) - 1.0) < 1e-12);
        for (int c = 0; c < t; ++c) CHECK(std::abs(s.matrix(a, b) * s.matrix(b, c) / s.matrix(a, c) - 1.0) < 1e-12);
      }
    }
    double sum = 0.0;
    for (double p : s.posterior_probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);

    std::vector<double> scaled = bf;
    for (auto& b : scaled) b *= 1e-7;
    auto r = evidence_matrix_and_posteriors(scaled, pr);
    for (int a = 0; a < t; ++a) CHECK(std::abs(r.posterior_probs[a] - s.posterior_probs[a]) < 1e-12);
  }
}

TEST_CASE("exploratory test") {
  auto prior = iid(3, 2.0);
  auto far = gaussian(Eigen::Vector3d(0, 1.4, -0.05), Eigen::Vector3d(1, 0.04, 0.01).asDiagonal());
  auto res = exploratory_test(prior, far, 0);
  REQUIRE(res.size() == 2);
  CHECK(res[0].name == "a");
  CHECK(res[0].p_positive > 0.99);

  auto same = exploratory_test(prior, prior, 0);
  for (const auto& r : same) {
    CHECK(r.p_zero == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.p_negative == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.p_positive == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  // Quadrature oracle. Under the Gaussian approximation the likelihood is
  // proportional to post/prior; integrate it against each hypothesis prior.
  const double s0 = 2.0, m = -0.25, s = 0.4;
  auto pr = gaussian(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, s0 * s0).asDiagonal());
  auto po = gaussian(Eigen::Vector2d(0, m), Eigen::Vector2d(1, s * s).asDiagonal());
  auto got = exploratory_test(pr, po, 0).at(0);
  auto lik = [&](double b) { return normal_pdf(b, m, s) / normal_pdf(b, 0.0, s0); };
  double neg = 0.0, pos = 0.0;
  const double h = 1e-4;
  for (double b = -12.0 + h / 2; b < 12.0; b += h) {
    const double w = lik(b) * 2.0 * normal_pdf(b, 0.0, s0) * h;
    (b < 0 ? neg : pos) += w;
  }
  const double zero = lik(0.0);
  const double total = zero + neg + pos;
  CHECK(got.p_zero == doctest::Approx(zero / total).epsilon(1e-6));
  CHECK(got.p_negative == doctest::Approx(neg / total).epsilon(1e-6));
  CHECK(got.p_positive == doctest::Approx(pos / total).epsilon(1e-6));
  CHECK(got.bf_zero == doctest::Approx(zero).epsilon(1e-6));
}

TEST_CASE("Raftery labels") {
  CHECK(raftery_label(1.0) == RafteryCategory::NoPreference);
  CHECK(to_string(raftery_label(1.0)) == "no preference");
  CHECK(raftery_label(5.27) == RafteryCategory::PositiveFor);
  CHECK(raftery_label(1.5) == RafteryCategory::WeakFor);
  CHECK(raftery_label(3.0) == RafteryCategory::PositiveFor);
  CHECK(raftery_label(20.0) == RafteryCategory::StrongFor);
  CHECK(raftery_label(150.0) == RafteryCategory::DecisiveFor);
  CHECK(raftery_label(100.0) == RafteryCategory::StrongFor);
  CHECK(raftery_label(0.01) == RafteryCategory::StrongAgainst);
  CHECK(raftery_label(1.0 / 150.0) == RafteryCategory::DecisiveAgainst);
  CHECK(raftery_label(1.0 / 3.0) == RafteryCategory::PositiveAgainst);
  CHECK(raftery_label(0.5) == RafteryCategory::WeakAgainst);
  // Mirror symmetry away from the thresholds.
  for (double bf : {1.2, 2.0, 4.0, 10.0, 30.0, 100.0, 500.0}) {
    const int up = static_cast<int>(raftery_label(bf));
    const int down = static_cast<int>(raftery_label(1.0 / bf));
    CHECK(up + down == 2 * static_cast<int>(RafteryCategory::NoPreference));
  }
  CHECK_THROWS_AS(raftery_label(0.0), InputError);
  CHECK_THROWS_AS(raftery_label(-1.0), InputError);
}
