#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "xnet/graph.hpp"

namespace xnet {

// Spectrum of the n_out x n_in 0/1 biadjacency matrix. lambda is the second
// largest singular value; gap = 1 - lambda/degree. For a graph that is
// degree-regular on both sides the top singular value equals the degree
// exactly (all-ones singular pair).
struct SpectralReport {
  std::vector<double> singular_values;  // descending
  double lambda = 0.0;
  int degree = 0;
  double gap = 0.0;
};

// All min(n_in, n_out) singular values, descending. Dense decomposition;
// guarded to n_in * n_out <= 1e6 entries.
std::vector<double> singular_values(const BipartiteGraph& g);

SpectralReport spectral_gap(const BipartiteGraph& g);

enum class ExpansionMode { exhaustive, sampled };

// Empirical vertex expansion: the minimum of |N(S)|/|S| over output subsets
// S with 1 <= |S| <= max_subset_size, together with a minimizing witness
// (ties broken by the lexicographically smallest subset).
//
// When certificate_gamma is set, subsets with |S| <= n_out/2 are additionally
// checked against the spectral certificate |N(S)| >= min(n_in, (1+gamma)|S|)
// and violations are counted rather than asserted.
struct ExpansionReport {
  int max_subset_size = 0;
  double alpha = 0.0;  // max_subset_size / n_out
  double worst_ratio = 0.0;
  std::vector<int> witness;
  long long subsets_examined = 0;
  std::optional<double> certificate_gamma;
  long long certificate_violations = 0;
  std::vector<int> first_violation;  // empty when none
};

ExpansionReport vertex_expansion(const BipartiteGraph& g, int max_subset_size, ExpansionMode mode,
                                 long long samples = 0, std::uint64_t seed = 0,
                                 std::optional<double> certificate_gamma = std::nullopt);

nlohmann::json spectral_report_to_json(const SpectralReport& r);
nlohmann::json expansion_report_to_json(const ExpansionReport& r);

}  // namespace xnet
