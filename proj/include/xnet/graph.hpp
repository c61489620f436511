#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xnet/error.hpp"

namespace xnet {

enum class GraphKind { random, cayley, grouped, dense };

std::string kind_name(GraphKind k);
GraphKind kind_from_name(const std::string& name);

// Bipartite connectivity between n_in input vertices and n_out output
// vertices. Each output vertex v carries a sorted list of `degree` distinct
// input neighbours. Graphs are immutable after construction and safe to
// share across threads.
struct BipartiteGraph {
  int n_in = 0;
  int n_out = 0;
  int degree = 0;
  std::vector<std::vector<int>> adjacency;  // [n_out][degree], ascending
  GraphKind kind = GraphKind::random;
  std::optional<std::uint64_t> seed;

  long long edge_count() const { return static_cast<long long>(degree) * n_out; }
  const std::vector<int>& neighbors(int v) const { return adjacency[v]; }

  bool operator==(const BipartiteGraph& o) const {
    return n_in == o.n_in && n_out == o.n_out && degree == o.degree &&
           adjacency == o.adjacency && kind == o.kind && seed == o.seed;
  }
};

// Cayley graph over the group {0,1}^n_bits under XOR: vertex x is joined to
// x ^ h for every generator h.
struct CayleyParams {
  int n_bits = 0;
  std::vector<std::uint64_t> generators;
};

// Random degree-regular bipartite graph, deterministic in `seed`.
// For n_in == n_out the graph is degree-regular on both sides (a union of
// `degree` edge-disjoint random perfect matchings), which makes the top
// biadjacency singular value exactly `degree`. For n_in != n_out each output
// vertex samples its neighbours uniformly without replacement.
BipartiteGraph random_expander(int n_in, int n_out, int degree, std::uint64_t seed);

BipartiteGraph cayley_expander(const CayleyParams& params);

// Block-diagonal connectivity: output vertices of group g see exactly the
// inputs of group g. `groups` must divide both vertex counts.
BipartiteGraph grouped_graph(int n_in, int n_out, int groups);

BipartiteGraph dense_graph(int n_in, int n_out);

// Samples `count` distinct nonzero generators from {0,1}^n_bits. Good sets of
// size O(n^2/eps^2) exist for any target gap; sampling is the practical way
// to find one.
std::vector<std::uint64_t> sample_cayley_generators(int n_bits, int count, std::uint64_t seed);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Reports every violated structural invariant; never throws.
ValidationReport validate(const BipartiteGraph& g);

nlohmann::json graph_to_json(const BipartiteGraph& g);
BipartiteGraph graph_from_json(const nlohmann::json& j);
void save_graph(const BipartiteGraph& g, const std::string& path);
BipartiteGraph load_graph(const std::string& path);

}  // namespace xnet
