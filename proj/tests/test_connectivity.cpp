#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xnet/connectivity.hpp"
#include "xnet/spectral.hpp"

using namespace xnet;

namespace {

// Independent edge-count oracle: dense biadjacency row sums.
long long count_edges_dense(const BipartiteGraph& g, const std::vector<int>& S,
                            const std::vector<int>& T) {
  std::vector<std::vector<int>> B(g.n_out, std::vector<int>(g.n_in, 0));
  for (int v = 0; v < g.n_out; ++v)
    for (int u : g.adjacency[v]) B[v][u] = 1;
  long long e = 0;
  for (int v : S)
    for (int u : T) e += B[v][u];
  return e;
}

std::vector<int> all_indices(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("a single dense layer reaches every pair") {
  SensitivityMap m = sensitivity_map({{dense_graph(16, 16)}});
  CHECK(m.fraction == 1.0);
  CHECK(m.reachable(3, 11));
}

TEST_CASE("stacked grouped layers stay block diagonal") {
  LayeredNetworkSpec net;
  for (int i = 0; i < 3; ++i) net.graphs.push_back(grouped_graph(64, 64, 4));
  SensitivityMap m = sensitivity_map(net);
  CHECK(m.fraction == doctest::Approx(0.25));
  CHECK(m.reachable(0, 0));
  CHECK(!m.reachable(0, 16));
}

TEST_CASE("grouped fraction is 1/groups at every depth") {
  for (int groups : {2, 4, 8})
    for (int depth : {1, 2, 3}) {
      LayeredNetworkSpec net;
      for (int i = 0; i < depth; ++i) net.graphs.push_back(grouped_graph(32, 32, groups));
      CHECK(sensitivity_map(net).fraction == doctest::Approx(1.0 / groups));
    }
}

TEST_CASE("random expander stacks reach full sensitivity at logarithmic depth") {
  const int n = 64;
  const int t = 12;  // 2 * ceil(log2 64)
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LayeredNetworkSpec net;
    for (int i = 0; i < t; ++i)
      net.graphs.push_back(random_expander(n, n, 4, seed * 1000 + i));
    CHECK(sensitivity_map(net).fraction == 1.0);
  }
}

TEST_CASE("sensitivity fraction is monotone in depth") {
  std::vector<BipartiteGraph> graphs;
  for (int i = 0; i < 6; ++i) graphs.push_back(random_expander(32, 32, 2, 40 + i));
  double prev = 0.0;
  LayeredNetworkSpec net;
  for (const auto& g : graphs) {
    net.graphs.push_back(g);
    double f = sensitivity_map(net).fraction;
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("dimension mismatch is rejected") {
  LayeredNetworkSpec net{{dense_graph(8, 8), dense_graph(9, 8)}};
  CHECK_THROWS_AS(sensitivity_map(net), Error);
  CHECK_THROWS_AS(sensitivity_map({}), Error);
  try {
    sensitivity_map(net);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_spec);
  }
}

TEST_CASE("min_sensitive_depth on dense and identity families") {
  auto dense_family = [](int) { return dense_graph(16, 16); };
  CHECK(min_sensitive_depth(dense_family, 16, 4) == 1);

  auto identity_family = [](int) { return grouped_graph(16, 16, 16); };
  CHECK(!min_sensitive_depth(identity_family, 16, 32).has_value());
}

TEST_CASE("min_sensitive_depth for random D=4 expanders at n=256") {
  const int bound = 16;  // 2 * ceil(log2 256)
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto family = [seed](int i) {
      return random_expander(256, 256, 4, seed * 777 + i);
    };
    auto depth = min_sensitive_depth(family, 256, bound);
    REQUIRE(depth.has_value());
    CHECK(*depth <= bound);
  }
}

TEST_CASE("mixing over the full vertex sets is exact") {
  BipartiteGraph g = random_expander(10, 10, 3, 4);
  MixingRecord r = mixing_discrepancy(g, all_indices(10), all_indices(10), 0.3);
  CHECK(r.edges == 30);
  CHECK(r.expected == doctest::Approx(30.0));
  CHECK(r.discrepancy == doctest::Approx(0.0));
  CHECK(r.pass);
}

TEST_CASE("an output and its neighborhood share exactly D edges") {
  BipartiteGraph g = random_expander(12, 12, 4, 6);
  for (int v : {0, 5, 11}) {
    std::vector<int> S{v};
    MixingRecord r = mixing_discrepancy(g, S, g.adjacency[v], 0.0);
    CHECK(r.edges == 4);
  }
}

TEST_CASE("mixing edge counts agree with the dense oracle") {
  BipartiteGraph g = random_expander(10, 10, 3, 1);
  std::vector<std::vector<int>> subsets = {{0}, {1, 3}, {0, 2, 4, 6}, {5, 7, 8, 9}};
  for (const auto& S : subsets)
    for (const auto& T : subsets) {
      MixingRecord r = mixing_discrepancy(g, S, T, 0.2);
      CHECK(r.edges == count_edges_dense(g, S, T));
    }
}

TEST_CASE("expander mixing lemma holds exhaustively on a small expander") {
  // All subset pairs with |S|,|T| <= 3 on two seeds; the acceptance suite
  // runs the full |S|,|T| <= 5 sweep over five seeds.
  for (std::uint64_t seed : {0, 1}) {
    BipartiteGraph g = random_expander(10, 10, 3, seed);
    double gamma = spectral_gap(g).gap;
    std::vector<std::vector<int>> subsets;
    for (int a = 0; a < 10; ++a) {
      subsets.push_back({a});
      for (int b = a + 1; b < 10; ++b) {
        subsets.push_back({a, b});
        for (int c = b + 1; c < 10; ++c) subsets.push_back({a, b, c});
      }
    }
    for (const auto& S : subsets)
      for (const auto& T : subsets) CHECK(mixing_discrepancy(g, S, T, gamma).pass);
  }
}

TEST_CASE("invalid subsets are rejected") {
  BipartiteGraph g = random_expander(8, 8, 2, 0);
  std::vector<int> ok{0, 1};
  std::vector<int> out_of_range{0, 8};
  std::vector<int> repeated{1, 1};
  std::vector<int> empty;
  CHECK_THROWS_AS(mixing_discrepancy(g, out_of_range, ok, 0.1), Error);
  CHECK_THROWS_AS(mixing_discrepancy(g, ok, repeated, 0.1), Error);
  CHECK_THROWS_AS(mixing_discrepancy(g, empty, ok, 0.1), Error);
  try {
    mixing_discrepancy(g, out_of_range, ok, 0.1);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_subset);
  }
  CHECK_THROWS_AS(mixing_discrepancy(random_expander(8, 4, 2, 0), ok, ok, 0.1), Error);
}

TEST_CASE("zero-step walk is a point mass") {
  BipartiteGraph g = random_expander(16, 16, 4, 2);
  CHECK(random_walk_mixing(g, 3, 0) == doctest::Approx(1.0 - 1.0 / 16));
}

TEST_CASE("one step on the complete bipartite graph is uniform") {
  CHECK(random_walk_mixing(dense_graph(8, 8), 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("walk distribution matches a dense transition oracle") {
  BipartiteGraph g = random_expander(12, 12, 3, 9);
  // Dense propagation: start on outputs, alternate V->U and U->V.
  std::vector<double> p(12, 0.0);
  p[4] = 1.0;
  std::vector<int> indeg(12, 0);
  for (int v = 0; v < 12; ++v)
    for (int u : g.adjacency[v]) ++indeg[u];
  const int steps = 6;
  bool at_out = true;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> q(12, 0.0);
    for (int v = 0; v < 12; ++v)
      for (int u : g.adjacency[v]) {
        if (at_out)
          q[u] += p[v] / g.degree;
        else
          q[v] += p[u] / indeg[u];
      }
    p = q;
    at_out = !at_out;
  }
  double tv = 0;
  for (double v : p) tv += std::abs(v - 1.0 / 12);
  CHECK(random_walk_mixing(g, 4, steps) == doctest::Approx(0.5 * tv).epsilon(1e-12));
}

TEST_CASE("walk mixes quickly on an expander and not on a disconnected graph") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    BipartiteGraph g = random_expander(64, 64, 8, seed);
    CHECK(random_walk_mixing(g, 0, 12) <= 0.01);
  }
  // Two blocks never exchange mass.
  BipartiteGraph blocks = grouped_graph(16, 16, 2);
  CHECK(random_walk_mixing(blocks, 0, 50) >= 0.49);
}

TEST_CASE("tv distance is non-increasing at even step counts") {
  BipartiteGraph g = random_expander(32, 32, 4, 13);
  double prev = 1.0;
  for (int steps = 0; steps <= 12; steps += 2) {
    double tv = random_walk_mixing(g, 7, steps);
    CHECK(tv <= prev + 1e-12);
    prev = tv;
  }
}

TEST_CASE("mixing record serializes with pass flags") {
  BipartiteGraph g = random_expander(10, 10, 3, 0);
  double gamma = spectral_gap(g).gap;
  std::vector<int> S{0, 1}, T{2, 3, 4};
  nlohmann::json j = mixing_record_to_json(mixing_discrepancy(g, S, T, gamma));
  CHECK(j.contains("edges"));
  CHECK(j.contains("bound"));
  CHECK(j.contains("strict_bound"));
  CHECK(j["pass"].is_boolean());
}
