#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "ergmbf/network.hpp"
#include "ergmbf/statistics.hpp"

namespace testing {

using ergmbf::Network;

inline Network random_network(int n, bool directed, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution tie(p);
  std::vector<std::uint8_t> a(static_cast<std::size_t>(n * n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const std::uint8_t v = tie(rng) ? 1 : 0;
      a[static_cast<std::size_t>(i * n + j)] = v;
      if (!directed) a[static_cast<std::size_t>(j * n + i)] = v;
    }
  }
  return Network(n, directed, a);
}

inline Network from_edges(int n, bool directed, const std::vector<std::pair<int, int>>& edges) {
  Network net = Network::empty(n, directed);
  for (auto [i, j] : edges) net = net.with_tie(i, j, true);
  return net;
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("ergmbf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Brute-force statistics, recounted from the adjacency relation with plain
// loops. Shares nothing with the library beyond the Network type.
namespace brute {

inline double geometric(double decay, int k) {
  return k <= 0 ? 0.0 : std::exp(decay) * (1.0 - std::pow(1.0 - std::exp(-decay), k));
}

inline int y(const Network& g, int i, int j) { return g.has_tie(i, j) ? 1 : 0; }

/// Tie predicate per dyad: i<j for undirected networks, i!=j for directed.
template <class F>
double sum_ties(const Network& g, F&& f) {
  double s = 0.0;
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || (!g.directed() && j < i)) continue;
      if (y(g, i, j)) s += f(i, j);
    }
  }
  return s;
}

inline double edges(const Network& g) { return sum_ties(g, [](int, int) { return 1.0; }); }

inline double mutual(const Network& g) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) s += y(g, i, j) * y(g, j, i);
  return s;
}

inline double kstar(const Network& g, int k) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    int d = 0;
    for (int j = 0; j < g.size(); ++j) d += (i != j) ? y(g, i, j) : 0;
    double c = 1.0;
    for (int r = 0; r < k; ++r) c *= static_cast<double>(d - r) / static_cast<double>(r + 1);
    if (d >= k) s += c;
  }
  return s;
}

inline double triangle(const Network& g) {
  const int n = g.size();
  double s = 0.0;
  if (!g.directed()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) s += y(g, i, j) * y(g, j, k) * y(g, i, k);
    return s;
  }
  double cyc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        s += y(g, i, j) * y(g, j, k) * y(g, i, k);
        cyc += y(g, i, j) * y(g, j, k) * y(g, k, i);
      }
  return s + cyc / 3.0;
}

/// Shared partners of (i, j): common neighbours, or i->k->j when directed.
inline int partners(const Network& g, int i, int j) {
  int c = 0;
  for (int k = 0; k < g.size(); ++k) {
    if (k == i || k == j) continue;
    c += y(g, i, k) * y(g, k, j);
  }
  return c;
}

inline double gwesp(const Network& g, double decay) {
  return sum_ties(g, [&](int i, int j) { return geometric(decay, partners(g, i, j)); });
}

inline double gwdsp(const Network& g, double decay) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j) {
      if (i == j || (!g.directed() && j < i)) continue;
      s += geometric(decay, partners(g, i, j));
    }
  return s;
}

inline double gwdegree(const Network& g, double decay) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    int d = 0;
    for (int j = 0; j < g.size(); ++j) d += (i != j) ? y(g, i, j) : 0;
    s += geometric(decay, d);
  }
  return s;
}

}  // namespace brute
}  // namespace testing
