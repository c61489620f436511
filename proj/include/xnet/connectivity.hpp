#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "xnet/graph.hpp"

namespace xnet {

// An ordered stack of layer graphs; graph i feeds graph i+1, so
// graphs[i].n_out must equal graphs[i+1].n_in.
struct LayeredNetworkSpec {
  std::vector<BipartiteGraph> graphs;
  int depth() const { return static_cast<int>(graphs.size()); }
};

// Which (final output, first input) pairs are joined by a directed path that
// uses exactly one edge per layer, in order.
struct SensitivityMap {
  int n_out_final = 0;
  int n_in_first = 0;
  int words = 0;                    // 64-bit words per output row
  std::vector<std::uint64_t> bits;  // row-major [n_out_final][words]
  double fraction = 0.0;

  bool reachable(int v, int u) const {
    return (bits[static_cast<std::size_t>(v) * words + (u >> 6)] >> (u & 63)) & 1u;
  }
};

SensitivityMap sensitivity_map(const LayeredNetworkSpec& net);

// Smallest depth t <= max_depth at which stacking family(0..t-1) reaches
// sensitivity fraction 1.0; nullopt when never reached. Every graph must be
// n x n.
std::optional<int> min_sensitive_depth(const std::function<BipartiteGraph(int)>& family, int n,
                                       int max_depth);

// Edge count between an output subset S and an input subset T, compared with
// the expander-mixing expectation D|S||T|/n. `bound` uses the standard
// lambda * sqrt(|S||T|) form with lambda = (1-gamma) * D; `strict_bound` is
// the tighter (1-gamma) * sqrt(|S||T|) variant, reported but not asserted.
struct MixingRecord {
  long long edges = 0;
  double expected = 0.0;
  double discrepancy = 0.0;
  double bound = 0.0;
  bool pass = false;
  double strict_bound = 0.0;
  bool strict_pass = false;
};

MixingRecord mixing_discrepancy(const BipartiteGraph& g, std::span<const int> outputs,
                                std::span<const int> inputs, double gamma);

// Exact distribution of a simple random walk that starts as a point mass on
// output vertex `start_vertex` and alternates sides for `steps` steps.
// Returns the total-variation distance to the uniform distribution over the
// side reached at that parity.
double random_walk_mixing(const BipartiteGraph& g, int start_vertex, int steps);

nlohmann::json mixing_record_to_json(const MixingRecord& r);

}  // namespace xnet
