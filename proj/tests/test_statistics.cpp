#include <doctest.h>

#include "ergmbf/error.hpp"
#include "ergmbf/statistics.hpp"
#include "support.hpp"

using namespace ergmbf;
using testing::random_network;
namespace brute = testing::brute;

namespace {

struct Fixture {
  int n;
  bool directed;
  AttributeTable attrs;
  CovariateSet covs;
  std::vector<double> x;
  std::vector<std::string> g;
  std::vector<double> w;
};

Fixture make_fixture(int n, bool directed, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Fixture f{n, directed, AttributeTable(n), {}, {}, {}, {}};
  const char* levels[] = {"a", "b", "c"};
  for (int i = 0; i < n; ++i) {
    f.x.push_back(std::round(normal(rng) * 10.0) / 4.0);
    f.g.emplace_back(i < 3 ? levels[i] : levels[rng() % 3]);
  }
  f.w.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) f.w[static_cast<std::size_t>(i * n + j)] = normal(rng);
  if (!directed) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) f.w[static_cast<std::size_t>(i * n + j)] = f.w[static_cast<std::size_t>(j * n + i)];
  }
  f.attrs.add_numeric("x", f.x);
  f.attrs.add_categorical("g", f.g);
  f.covs.emplace("w", make_dyad_covariate("w", n, f.w));
  return f;
}

std::string catalog_json(bool directed) {
  std::string common =
      R"({"kind":"edges"},{"kind":"triangle"},{"kind":"gwesp","decay":0.3},{"kind":"gwdsp","decay":0.5},)"
      R"({"kind":"nodecov","attr":"x"},{"kind":"nodefactor","attr":"g","level":"b"},{"kind":"nodematch","attr":"g"},)"
      R"({"kind":"nodemix","attr":"g","levels":["a","c"]},{"kind":"absdiff","attr":"x"},{"kind":"edgecov","name":"w"})";
  if (directed) {
    return R"({"terms":[)" + common +
           R"(,{"kind":"mutual"},{"kind":"nodeifactor","attr":"g","level":"a"},)"
           R"({"kind":"nodeofactor","attr":"g","level":"c"}]})";
  }
  return R"({"terms":[)" + common +
         R"(,{"kind":"kstar","k":2},{"kind":"kstar","k":3},{"kind":"gwdegree","decay":0.7}]})";
}

/// Independent recount of the catalog statistics in catalog order.
Eigen::VectorXd brute_stats(const Network& net, const Fixture& f) {
  const int n = f.n;
  auto ties = [&](auto&& fn) { return brute::sum_ties(net, fn); };
  auto sz = [](int i) { return static_cast<std::size_t>(i); };
  std::vector<double> v{
      brute::edges(net),
      brute::triangle(net),
      brute::gwesp(net, 0.3),
      brute::gwdsp(net, 0.5),
      ties([&](int i, int j) { return f.x[sz(i)] + f.x[sz(j)]; }),
      ties([&](int i, int j) { return (f.g[sz(i)] == "b" ? 1.0 : 0.0) + (f.g[sz(j)] == "b" ? 1.0 : 0.0); }),
      ties([&](int i, int j) { return f.g[sz(i)] == f.g[sz(j)] ? 1.0 : 0.0; }),
      ties([&](int i, int j) {
        const bool fw = f.g[sz(i)] == "a" && f.g[sz(j)] == "c";
        const bool bw = f.g[sz(i)] == "c" && f.g[sz(j)] == "a";
        return (fw || (!f.directed && bw)) ? 1.0 : 0.0;
      }),
      ties([&](int i, int j) { return std::abs(f.x[sz(i)] - f.x[sz(j)]); }),
      ties([&](int i, int j) { return f.w[static_cast<std::size_t>(i * n + j)]; }),
  };
  if (f.directed) {
    v.push_back(brute::mutual(net));
    v.push_back(ties([&](int, int j) { return f.g[sz(j)] == "a" ? 1.0 : 0.0; }));
    v.push_back(ties([&](int i, int) { return f.g[sz(i)] == "c" ? 1.0 : 0.0; }));
  } else {
    v.push_back(brute::kstar(net, 2));
    v.push_back(brute::kstar(net, 3));
    v.push_back(brute::gwdegree(net, 0.7));
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("simple sufficient statistics") {
  auto spec = ModelSpec::parse_json(R"({"terms":[{"kind":"edges"},{"kind":"triangle"}]})");
  Model m5(spec, 5, false);
  CHECK(sufficient_stats(Network::empty(5, false), m5) == Eigen::Vector2d(0, 0));
  auto k3 = testing::from_edges(3, false, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(sufficient_stats(k3, Model(spec, 3, false)) == Eigen::Vector2d(3, 1));
}

TEST_CASE("sufficient statistics match a brute-force recount") {
  for (bool directed : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      CAPTURE(directed);
      CAPTURE(seed);
      const int n = 4 + static_cast<int>(seed);
      auto f = make_fixture(n, directed, seed);
      Model model(ModelSpec::parse_json(catalog_json(directed)), n, directed, f.attrs, f.covs);
      auto net = random_network(n, directed, 0.15 + 0.1 * static_cast<double>(seed), seed * 17);
      const Eigen::VectorXd got = sufficient_stats(net, model);
      const Eigen::VectorXd want = brute_stats(net, f);
      for (Eigen::Index k = 0; k < got.size(); ++k) {
        CAPTURE(model.names()[static_cast<std::size_t>(k)]);
        CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("4-node undirected {edges, kstar2, gwesp(0.3)} against the recount") {
  auto spec =
      ModelSpec::parse_json(R"({"terms":[{"kind":"edges"},{"kind":"kstar","k":2},{"kind":"gwesp","decay":0.3}]})");
  Model model(spec, 4, false);
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    Network net = Network::empty(4, false);
    int bit = 0;
    for (auto d : canonical_dyads(4, false)) net = net.with_tie(d.i, d.j, (mask >> bit++) & 1U);
    auto s = sufficient_stats(net, model);
    CHECK(s[0] == brute::edges(net));
    CHECK(s[1] == brute::kstar(net, 2));
    CHECK(s[2] == doctest::Approx(brute::gwesp(net, 0.3)).epsilon(1e-13));
  }
}

TEST_CASE("change statistics: toggle consistency over the whole catalog") {
  for (bool directed : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const int n = 5 + static_cast<int>(seed);
      auto f = make_fixture(n, directed, seed + 100);
      Model model(ModelSpec::parse_json(catalog_json(directed)), n, directed, f.attrs, f.covs);
      auto net = random_network(n, directed, 0.35, seed + 200);
      for (auto d : canonical_dyads(n, directed)) {
        const Eigen::VectorXd delta = change_stats_dyad(net, model, d.i, d.j);
        const Eigen::VectorXd diff = sufficient_stats(net.with_tie(d.i, d.j, true), model) -
                                     sufficient_stats(net.with_tie(d.i, d.j, false), model);
        CHECK(delta[0] == 1.0);
        for (Eigen::Index k = 0; k < delta.size(); ++k) {
          CAPTURE(model.names()[static_cast<std::size_t>(k)]);
          CHECK(std::abs(delta[k] - diff[k]) <= 1e-10);
        }
        // Independent of the current state of the dyad.
        const Eigen::VectorXd flipped = change_stats_dyad(net.with_tie(d.i, d.j, !net.has_tie(d.i, d.j)), model, d.i, d.j);
        CHECK((flipped - delta).cwiseAbs().maxCoeff() <= 1e-12);
        if (!directed) CHECK((change_stats_dyad(net, model, d.j, d.i) - delta).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("integer statistics toggle exactly") {
  auto spec = ModelSpec::parse_json(
      R"({"terms":[{"kind":"edges"},{"kind":"kstar","k":2},{"kind":"kstar","k":3},{"kind":"triangle"}]})");
  auto net = random_network(9, false, 0.4, 4);
  Model model(spec, net);
  for (auto d : canonical_dyads(9, false)) {
    const Eigen::VectorXd diff = sufficient_stats(net.with_tie(d.i, d.j, true), model) -
                                 sufficient_stats(net.with_tie(d.i, d.j, false), model);
    CHECK(change_stats_dyad(net, model, d.i, d.j) == diff);
  }
}

TEST_CASE("change statistic examples") {
  auto spec = ModelSpec::parse_json(R"({"terms":[{"kind":"edges"},{"kind":"triangle"}]})");
  auto path = testing::from_edges(3, false, {{0, 1}, {1, 2}});
  Model model(spec, path);
  CHECK(change_stats_dyad(path, model, 0, 2) == Eigen::Vector2d(1, 1));
  CHECK_THROWS_AS(change_stats_dyad(path, model, 1, 1), InputError);

  auto m4 = change_stat_matrix(Network::empty(4, false),
                               Model(ModelSpec::parse_json(R"({"terms":[{"kind":"edges"}]})"), 4, false));
  CHECK(m4.values.rows() == 6);
  CHECK(m4.values.cols() == 1);
  CHECK(m4.values.isOnes());

  auto empty3 = change_stat_matrix(Network::empty(3, false), Model(spec, 3, false));
  CHECK(empty3.values.col(1).isZero());
}

TEST_CASE("change statistic matrix rows") {
  for (bool directed : {false, true}) {
    auto f = make_fixture(5, directed, 9);
    Model model(ModelSpec::parse_json(catalog_json(directed)), 5, directed, f.attrs, f.covs);
    auto net = random_network(5, directed, 0.5, 10);
    auto m = change_stat_matrix(net, model);
    const auto dyads = canonical_dyads(5, directed);
    REQUIRE(m.values.rows() == static_cast<Eigen::Index>(dyads.size()));
    CHECK(m.names == model.names());
    CHECK(m.values.col(model.edges_index()).isOnes());
    for (std::size_t r = 0; r < dyads.size(); ++r) {
      CHECK(m.dyads[r] == dyads[r]);
      CHECK(m.values.row(static_cast<Eigen::Index>(r)).transpose() ==
            change_stats_dyad(net, model, dyads[r].i, dyads[r].j));
    }
    // Lexicographic order.
    for (std::size_t r = 1; r < dyads.size(); ++r) {
      CHECK((dyads[r - 1].i < dyads[r].i || (dyads[r - 1].i == dyads[r].i && dyads[r - 1].j < dyads[r].j)));
    }
  }
}

TEST_CASE("dyad-independent columns do not move when ties toggle") {
  auto f = make_fixture(7, false, 21);
  auto spec = ModelSpec::parse_json(
      R"({"terms":[{"kind":"edges"},{"kind":"nodematch","attr":"g"},{"kind":"nodemix","attr":"g","levels":["a","b"]},)"
      R"({"kind":"absdiff","attr":"x"},{"kind":"edgecov","name":"w"},{"kind":"triangle"}]})");
  Model model(spec, 7, false, f.attrs, f.covs);
  CHECK_FALSE(model.dyad_independent());
  for (int k = 0; k < 5; ++k) CHECK(model.term_dyad_independent(k));
  CHECK_FALSE(model.term_dyad_independent(5));
  auto net = random_network(7, false, 0.4, 22);
  auto base = change_stat_matrix(net, model);
  for (auto d : canonical_dyads(7, false)) {
    auto toggled = change_stat_matrix(net.with_tie(d.i, d.j, !net.has_tie(d.i, d.j)), model);
    CHECK(toggled.values.leftCols(5) == base.values.leftCols(5));
  }
}

TEST_CASE("standardized edge covariate") {
  const int n = 6;
  std::vector<double> w(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) w[static_cast<std::size_t>(i * n + j)] = 3.0 + 2.0 * i - j;
  CovariateSet covs{{"w", make_dyad_covariate("w", n, w)}};
  auto spec = ModelSpec::parse_json(R"({"terms":[{"kind":"edges"},{"kind":"edgecov","name":"w","standardized":true}]})");
  Model model(spec, n, true, {}, covs);
  auto m = change_stat_matrix(Network::empty(n, true), model);
  const Eigen::VectorXd z = m.values.col(1);
  const double mean = z.mean();
  const double sd = std::sqrt((z.array() - mean).square().sum() / static_cast<double>(z.size() - 1));
  CHECK(std::abs(mean) < 1e-12);
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model validation") {
  AttributeTable attrs(4);
  attrs.add_numeric("x", {1, 2, 3, 4});
  attrs.add_categorical("g", {"a", "b", "a", "b"});
  auto build = [&](const std::string& terms, bool directed) {
    return Model(ModelSpec::parse_json(R"({"terms":[)" + terms + "]}"), 4, directed, attrs);
  };
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"mutual"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"nodeifactor","attr":"g","level":"a"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"kstar","k":2})", true), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"gwesp","decay":0})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"gwesp","decay":-1})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"nodecov","attr":"missing"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"nodefactor","attr":"g","level":"z"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"edgecov","name":"nope"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"triangle"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"edges"})", false), InputError);
  CHECK_THROWS_AS(build(R"({"kind":"edges"},{"kind":"triangle"},{"kind":"triangle"})", false), InputError);
  CHECK_THROWS_AS(ModelSpec::parse_json("{"), InputError);
  CHECK_THROWS_AS(ModelSpec::parse_json(R"({"terms":[{"kind":"bogus"}]})"), InputError);
  CHECK_NOTHROW(build(R"({"kind":"edges"},{"kind":"mutual"},{"kind":"nodeofactor","attr":"g","level":"a"})", true));
}

TEST_CASE("model JSON round trip and coefficient names") {
  const std::string text = catalog_json(true);
  auto spec = ModelSpec::parse_json(text);
  auto again = ModelSpec::parse_json(spec.to_json());
  CHECK(again.to_json() == spec.to_json());
  auto f = make_fixture(5, true, 3);
  Model model(again, 5, true, f.attrs, f.covs);
  CHECK(model.names()[2] == "gwesp.fixed.0.3");
  CHECK(model.index_of("mix.g.a.c") == 7);
  CHECK(model.index_of("edgecov.w") == 9);
  CHECK(model.index_of("absent") == -1);

  auto dropped = model.drop({"triangle", "mutual"});
  CHECK(dropped.size() == model.size() - 2);
  CHECK(dropped.index_of("triangle") == -1);
  auto net = random_network(5, true, 0.4, 8);
  const Eigen::VectorXd full = sufficient_stats(net, model);
  const Eigen::VectorXd part = sufficient_stats(net, dropped);
  CHECK(part[1] == full[2]);
}
