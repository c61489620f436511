#include "xnet/graph.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "xnet/rng.hpp"

namespace xnet {

std::string kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::random: return "random";
    case GraphKind::cayley: return "cayley";
    case GraphKind::grouped: return "grouped";
    case GraphKind::dense: return "dense";
  }
  return "random";
}

GraphKind kind_from_name(const std::string& name) {
  if (name == "random") return GraphKind::random;
  if (name == "cayley") return GraphKind::cayley;
  if (name == "grouped") return GraphKind::grouped;
  if (name == "dense") return GraphKind::dense;
  fail(errc::corrupt_file, "unknown graph kind '" + name + "'");
}

namespace {

void sort_rows(std::vector<std::vector<int>>& adjacency) {
  for (auto& row : adjacency) std::sort(row.begin(), row.end());
}

// One random perfect matching avoiding already-used edges. Collisions are
// repaired by random transpositions; a fresh permutation is drawn if a
// repair round stalls.
std::vector<int> collision_free_matching(int n, const std::vector<std::vector<int>>& used,
                                         Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> perm = rng.permutation(n);
    for (int pass = 0; pass < 4 * n + 64; ++pass) {
      std::vector<int> bad;
      for (int v = 0; v < n; ++v)
        if (std::find(used[v].begin(), used[v].end(), perm[v]) != used[v].end())
          bad.push_back(v);
      if (bad.empty()) return perm;
      for (int v : bad) {
        int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        std::swap(perm[v], perm[u]);
      }
    }
  }
  fail(errc::precondition, "random_expander: could not sample a collision-free matching");
}

// Union of `degree` edge-disjoint random perfect matchings: regular on both
// sides, so the all-ones vector is a top singular pair of the biadjacency.
std::vector<std::vector<int>> regular_square_adjacency(int n, int degree, Rng& rng) {
  std::vector<std::vector<int>> rows(n);
  for (auto& r : rows) r.reserve(degree);
  for (int j = 0; j < degree; ++j) {
    std::vector<int> perm = collision_free_matching(n, rows, rng);
    for (int v = 0; v < n; ++v) rows[v].push_back(perm[v]);
  }
  return rows;
}

}  // namespace

BipartiteGraph random_expander(int n_in, int n_out, int degree, std::uint64_t seed) {
  require(n_in >= 1 && n_out >= 1, errc::invalid_size,
          "random_expander: vertex counts must be positive");
  require(degree >= 1 && degree <= n_in, errc::invalid_degree,
          "random_expander: degree must lie in [1, n_in]");

  BipartiteGraph g;
  g.n_in = n_in;
  g.n_out = n_out;
  g.degree = degree;
  g.kind = GraphKind::random;
  g.seed = seed;

  Rng rng(seed);
  if (degree == n_in) {
    std::vector<int> all(n_in);
    for (int u = 0; u < n_in; ++u) all[u] = u;
    g.adjacency.assign(n_out, all);
    return g;
  }

  if (n_in == n_out) {
    if (2 * degree <= n_in) {
      g.adjacency = regular_square_adjacency(n_in, degree, rng);
    } else {
      // Dense side: sample the sparse complement and invert each row.
      auto co = regular_square_adjacency(n_in, n_in - degree, rng);
      g.adjacency.assign(n_out, {});
      std::vector<char> mark(n_in, 0);
      for (int v = 0; v < n_out; ++v) {
        for (int u : co[v]) mark[u] = 1;
        auto& row = g.adjacency[v];
        row.reserve(degree);
        for (int u = 0; u < n_in; ++u)
          if (!mark[u]) row.push_back(u);
        for (int u : co[v]) mark[u] = 0;
      }
    }
  } else {
    g.adjacency.resize(n_out);
    for (int v = 0; v < n_out; ++v) g.adjacency[v] = rng.sample_distinct(n_in, degree);
  }
  sort_rows(g.adjacency);
  return g;
}

BipartiteGraph cayley_expander(const CayleyParams& params) {
  require(params.n_bits >= 1, errc::invalid_size, "cayley_expander: n_bits must be >= 1");
  require(params.n_bits <= 24, errc::too_large, "cayley_expander: n_bits > 24 not supported");
  require(!params.generators.empty(), errc::invalid_generator,
          "cayley_expander: generator set is empty");

  const std::uint64_t n = 1ull << params.n_bits;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t h : params.generators) {
    require(h != 0, errc::invalid_generator, "cayley_expander: zero generator");
    require(h < n, errc::invalid_generator, "cayley_expander: generator exceeds n_bits range");
    require(seen.insert(h).second, errc::invalid_generator, "cayley_expander: duplicate generator");
  }

  BipartiteGraph g;
  g.n_in = g.n_out = static_cast<int>(n);
  g.degree = static_cast<int>(params.generators.size());
  g.kind = GraphKind::cayley;
  g.adjacency.resize(g.n_out);
  for (std::uint64_t x = 0; x < n; ++x) {
    auto& row = g.adjacency[static_cast<int>(x)];
    row.reserve(params.generators.size());
    for (std::uint64_t h : params.generators) row.push_back(static_cast<int>(x ^ h));
    std::sort(row.begin(), row.end());
  }
  return g;
}

BipartiteGraph grouped_graph(int n_in, int n_out, int groups) {
  require(n_in >= 1 && n_out >= 1, errc::invalid_size,
          "grouped_graph: vertex counts must be positive");
  require(groups >= 1 && n_in % groups == 0 && n_out % groups == 0, errc::invalid_grouping,
          "grouped_graph: groups must divide both n_in and n_out");

  BipartiteGraph g;
  g.n_in = n_in;
  g.n_out = n_out;
  g.degree = n_in / groups;
  g.kind = GraphKind::grouped;
  g.adjacency.resize(n_out);
  const int out_per_group = n_out / groups;
  for (int v = 0; v < n_out; ++v) {
    int grp = v / out_per_group;
    auto& row = g.adjacency[v];
    row.reserve(g.degree);
    for (int u = grp * g.degree; u < (grp + 1) * g.degree; ++u) row.push_back(u);
  }
  return g;
}

BipartiteGraph dense_graph(int n_in, int n_out) {
  require(n_in >= 1 && n_out >= 1, errc::invalid_size,
          "dense_graph: vertex counts must be positive");
  BipartiteGraph g;
  g.n_in = n_in;
  g.n_out = n_out;
  g.degree = n_in;
  g.kind = GraphKind::dense;
  std::vector<int> all(n_in);
  for (int u = 0; u < n_in; ++u) all[u] = u;
  g.adjacency.assign(n_out, all);
  return g;
}

std::vector<std::uint64_t> sample_cayley_generators(int n_bits, int count, std::uint64_t seed) {
  require(n_bits >= 1 && n_bits <= 24, errc::invalid_size,
          "sample_cayley_generators: n_bits out of range");
  const std::uint64_t n = 1ull << n_bits;
  require(count >= 1 && static_cast<std::uint64_t>(count) <= n - 1, errc::invalid_generator,
          "sample_cayley_generators: count must lie in [1, 2^n_bits - 1]");
  Rng rng(seed);
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> out;
  out.reserve(count);
  while (out.size() < static_cast<std::size_t>(count)) {
    std::uint64_t h = 1 + rng.below(n - 1);
    if (seen.insert(h).second) out.push_back(h);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ValidationReport validate(const BipartiteGraph& g) {
  ValidationReport report;
  auto note = [&](const std::string& s) { report.violations.push_back(s); };

  if (g.n_in < 1) note("n_in must be positive, got " + std::to_string(g.n_in));
  if (g.n_out < 1) note("n_out must be positive, got " + std::to_string(g.n_out));
  if (g.degree < 1) note("degree must be positive, got " + std::to_string(g.degree));
  if (static_cast<int>(g.adjacency.size()) != g.n_out)
    note("adjacency has " + std::to_string(g.adjacency.size()) + " rows, expected " +
         std::to_string(g.n_out));

  long long edges = 0;
  for (std::size_t v = 0; v < g.adjacency.size(); ++v) {
    const auto& row = g.adjacency[v];
    edges += static_cast<long long>(row.size());
    if (static_cast<int>(row.size()) != g.degree)
      note("output " + std::to_string(v) + ": degree violation, " + std::to_string(row.size()) +
           " neighbors instead of " + std::to_string(g.degree));
    std::unordered_set<int> seen;
    for (int u : row) {
      if (u < 0 || u >= g.n_in)
        note("output " + std::to_string(v) + ": neighbor " + std::to_string(u) +
             " out of range [0, " + std::to_string(g.n_in) + ")");
      else if (!seen.insert(u).second)
        note("output " + std::to_string(v) + ": duplicate neighbor " + std::to_string(u));
    }
  }
  if (edges != g.edge_count())
    note("edge count " + std::to_string(edges) + " != degree * n_out = " +
         std::to_string(g.edge_count()));
  return report;
}

nlohmann::json graph_to_json(const BipartiteGraph& g) {
  nlohmann::json j;
  j["kind"] = kind_name(g.kind);
  j["n_in"] = g.n_in;
  j["n_out"] = g.n_out;
  j["degree"] = g.degree;
  if (g.seed) j["seed"] = *g.seed;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : g.adjacency) {
    std::vector<int> sorted = row;  // canonical form: ascending
    std::sort(sorted.begin(), sorted.end());
    rows.push_back(sorted);
  }
  j["adjacency"] = std::move(rows);
  return j;
}

BipartiteGraph graph_from_json(const nlohmann::json& j) {
  BipartiteGraph g;
  try {
    g.kind = kind_from_name(j.at("kind").get<std::string>());
    g.n_in = j.at("n_in").get<int>();
    g.n_out = j.at("n_out").get<int>();
    g.degree = j.at("degree").get<int>();
    if (j.contains("seed") && !j["seed"].is_null()) g.seed = j["seed"].get<std::uint64_t>();
    g.adjacency = j.at("adjacency").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_file, std::string("graph json schema violation: ") + e.what());
  }
  return g;
}

void save_graph(const BipartiteGraph& g, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::not_found, "cannot open '" + path + "' for writing");
  out << graph_to_json(g).dump(2) << "\n";
  require(out.good(), errc::corrupt_file, "short write to '" + path + "'");
}

BipartiteGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::not_found, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_file, "cannot parse '" + path + "': " + e.what());
  }
  return graph_from_json(j);
}

}  // namespace xnet
