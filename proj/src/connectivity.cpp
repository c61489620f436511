#include "xnet/connectivity.hpp"

#include <bit>
#include <cmath>

#include "xnet/util.hpp"

namespace xnet {

namespace {

// Layerwise frontier propagation over bitsets: row v of `next` is the OR of
// the rows of v's neighbours. Rows are disjoint writes, safe to parallelize.
std::vector<std::uint64_t> propagate(const BipartiteGraph& g,
                                     const std::vector<std::uint64_t>& cur, int words) {
  std::vector<std::uint64_t> next(static_cast<std::size_t>(g.n_out) * words, 0);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < g.n_out; ++v) {
    std::uint64_t* row = next.data() + static_cast<std::size_t>(v) * words;
    for (int u : g.adjacency[v]) {
      const std::uint64_t* src = cur.data() + static_cast<std::size_t>(u) * words;
      for (int w = 0; w < words; ++w) row[w] |= src[w];
    }
  }
  return next;
}

double reachable_fraction(const std::vector<std::uint64_t>& bits, int n_rows, int n_cols) {
  long long count = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) count += std::popcount(bits[i]);
  return static_cast<double>(count) / (static_cast<double>(n_rows) * n_cols);
}

std::vector<std::uint64_t> identity_bits(int n, int words) {
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(n) * words, 0);
  for (int u = 0; u < n; ++u)
    bits[static_cast<std::size_t>(u) * words + (u >> 6)] |= 1ull << (u & 63);
  return bits;
}

void check_subset(const char* what, std::span<const int> idx, int limit) {
  require(!idx.empty(), errc::invalid_subset, std::string(what) + " subset is empty");
  std::vector<char> seen(limit, 0);
  for (int i : idx) {
    require(i >= 0 && i < limit, errc::invalid_subset,
            std::string(what) + " index " + std::to_string(i) + " out of range");
    require(!seen[i], errc::invalid_subset,
            std::string(what) + " index " + std::to_string(i) + " repeated");
    seen[i] = 1;
  }
}

}  // namespace

SensitivityMap sensitivity_map(const LayeredNetworkSpec& net) {
  require(net.depth() >= 1, errc::invalid_spec, "sensitivity_map: need at least one layer");
  for (int i = 0; i + 1 < net.depth(); ++i)
    require(net.graphs[i].n_out == net.graphs[i + 1].n_in, errc::invalid_spec,
            "sensitivity_map: layer " + std::to_string(i) + " feeds " +
                std::to_string(net.graphs[i].n_out) + " vertices but layer " +
                std::to_string(i + 1) + " expects " + std::to_string(net.graphs[i + 1].n_in));

  const int n0 = net.graphs.front().n_in;
  const int words = (n0 + 63) / 64;
  std::vector<std::uint64_t> cur = identity_bits(n0, words);
  for (const auto& g : net.graphs) cur = propagate(g, cur, words);

  SensitivityMap map;
  map.n_out_final = net.graphs.back().n_out;
  map.n_in_first = n0;
  map.words = words;
  map.fraction = reachable_fraction(cur, map.n_out_final, n0);
  map.bits = std::move(cur);
  return map;
}

std::optional<int> min_sensitive_depth(const std::function<BipartiteGraph(int)>& family, int n,
                                       int max_depth) {
  require(n >= 1 && max_depth >= 1, errc::invalid_spec,
          "min_sensitive_depth: n and max_depth must be positive");
  const int words = (n + 63) / 64;
  std::vector<std::uint64_t> cur = identity_bits(n, words);
  for (int t = 1; t <= max_depth; ++t) {
    BipartiteGraph g = family(t - 1);
    require(g.n_in == n && g.n_out == n, errc::invalid_spec,
            "min_sensitive_depth: family must produce n x n graphs");
    cur = propagate(g, cur, words);
    if (reachable_fraction(cur, n, n) == 1.0) return t;
  }
  return std::nullopt;
}

MixingRecord mixing_discrepancy(const BipartiteGraph& g, std::span<const int> outputs,
                                std::span<const int> inputs, double gamma) {
  require(g.n_in == g.n_out, errc::precondition, "mixing_discrepancy: graph must be square");
  check_subset("output", outputs, g.n_out);
  check_subset("input", inputs, g.n_in);

  std::vector<char> in_t(g.n_in, 0);
  for (int u : inputs) in_t[u] = 1;
  long long edges = 0;
  for (int v : outputs)
    for (int u : g.adjacency[v]) edges += in_t[u];

  MixingRecord r;
  r.edges = edges;
  const double s = static_cast<double>(outputs.size());
  const double t = static_cast<double>(inputs.size());
  r.expected = static_cast<double>(g.degree) * s * t / g.n_in;
  r.discrepancy = std::abs(static_cast<double>(edges) - r.expected);
  const double lambda = (1.0 - gamma) * g.degree;
  r.bound = lambda * std::sqrt(s * t);
  r.pass = r.discrepancy <= r.bound;
  r.strict_bound = (1.0 - gamma) * std::sqrt(s * t);
  r.strict_pass = r.discrepancy <= r.strict_bound;
  return r;
}

double random_walk_mixing(const BipartiteGraph& g, int start_vertex, int steps) {
  require(validate(g).ok(), errc::precondition, "random_walk_mixing: invalid graph");
  require(start_vertex >= 0 && start_vertex < g.n_out, errc::precondition,
          "random_walk_mixing: start vertex out of range");
  require(steps >= 0, errc::precondition, "random_walk_mixing: steps must be >= 0");

  std::vector<int> in_degree(g.n_in, 0);
  for (int v = 0; v < g.n_out; ++v)
    for (int u : g.adjacency[v]) ++in_degree[u];

  std::vector<double> on_out(g.n_out, 0.0), on_in;
  on_out[start_vertex] = 1.0;
  bool at_out = true;
  for (int s = 0; s < steps; ++s) {
    if (at_out) {
      on_in.assign(g.n_in, 0.0);
      for (int v = 0; v < g.n_out; ++v) {
        if (on_out[v] == 0.0) continue;
        double share = on_out[v] / g.degree;
        for (int u : g.adjacency[v]) on_in[u] += share;
      }
    } else {
      on_out.assign(g.n_out, 0.0);
      for (int v = 0; v < g.n_out; ++v)
        for (int u : g.adjacency[v])
          if (on_in[u] != 0.0) on_out[v] += on_in[u] / in_degree[u];
    }
    at_out = !at_out;
  }

  const std::vector<double>& p = at_out ? on_out : on_in;
  const int n = at_out ? g.n_out : g.n_in;
  double tv = 0.0;
  for (int i = 0; i < n; ++i) tv += std::abs(p[i] - 1.0 / n);
  return 0.5 * tv;
}

nlohmann::json mixing_record_to_json(const MixingRecord& r) {
  nlohmann::json j;
  j["edges"] = r.edges;
  j["expected"] = round_sig(r.expected);
  j["discrepancy"] = round_sig(r.discrepancy);
  j["bound"] = round_sig(r.bound);
  j["pass"] = r.pass;
  j["strict_bound"] = round_sig(r.strict_bound);
  j["strict_pass"] = r.strict_pass;
  return j;
}

}  // namespace xnet
