#include "xnet/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "xnet/rng.hpp"
#include "xnet/util.hpp"

namespace xnet {

namespace {

Eigen::MatrixXd biadjacency(const BipartiteGraph& g) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(g.n_out, g.n_in);
  for (int v = 0; v < g.n_out; ++v)
    for (int u : g.adjacency[v]) B(v, u) += 1.0;
  return B;
}

// Candidate minimizer with exact rational comparison: ratio = nbr/size.
struct Candidate {
  long long nbr = 0;
  int size = 0;
  std::vector<int> witness;
  bool valid() const { return size > 0; }
};

// Strictly better: smaller ratio, ties broken by lexicographically smaller
// witness. Exact integer cross-multiplication, no float ties.
bool better(const Candidate& a, const Candidate& b) {
  if (!a.valid()) return false;
  if (!b.valid()) return true;
  long long lhs = a.nbr * b.size;
  long long rhs = b.nbr * a.size;
  if (lhs != rhs) return lhs < rhs;
  return std::lexicographical_compare(a.witness.begin(), a.witness.end(), b.witness.begin(),
                                      b.witness.end());
}

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Distinct-neighbour count via a versioned mark array (no clearing).
struct NeighborCounter {
  std::vector<int> stamp;
  int version = 0;
  explicit NeighborCounter(int n_in) : stamp(n_in, -1) {}
  long long count(const BipartiteGraph& g, const std::vector<int>& subset) {
    ++version;
    long long c = 0;
    for (int v : subset)
      for (int u : g.adjacency[v])
        if (stamp[u] != version) {
          stamp[u] = version;
          ++c;
        }
    return c;
  }
};

long double subset_count(int n, int max_size) {
  long double total = 0, binom = 1;
  for (int k = 1; k <= max_size; ++k) {
    binom = binom * (n - k + 1) / k;
    total += binom;
    if (total > 1e18L) break;
  }
  return total;
}

struct TaskResult {
  Candidate best;
  long long examined = 0;
  long long violations = 0;
  std::vector<int> first_violation;
};

// Enumerates all size-k subsets whose smallest element is `first`,
// in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, int first, Fn&& fn) {
  std::vector<int> c(k);
  c[0] = first;
  for (int i = 1; i < k; ++i) c[i] = first + i;
  if (c.back() >= n) return;
  for (;;) {
    fn(c);
    int i = k - 1;
    while (i >= 1 && c[i] == n - k + i) --i;
    if (i < 1) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace

std::vector<double> singular_values(const BipartiteGraph& g) {
  require(g.n_in >= 1 && g.n_out >= 1, errc::invalid_size, "singular_values: empty graph");
  require(static_cast<long long>(g.n_in) * g.n_out <= 1'000'000, errc::too_large,
          "singular_values: biadjacency exceeds 1e6 entries; use an iterative "
          "eigensolver (out of scope here)");
  Eigen::MatrixXd B = biadjacency(g);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

SpectralReport spectral_gap(const BipartiteGraph& g) {
  SpectralReport r;
  r.singular_values = singular_values(g);
  r.degree = g.degree;
  if (r.singular_values.size() < 2) {
    r.lambda = 0.0;
    r.gap = 1.0;  // a single singular value leaves nothing below the top
  } else {
    r.lambda = r.singular_values[1];
    r.gap = std::clamp(1.0 - r.lambda / g.degree, 0.0, 1.0);
  }
  return r;
}

ExpansionReport vertex_expansion(const BipartiteGraph& g, int max_subset_size, ExpansionMode mode,
                                 long long samples, std::uint64_t seed,
                                 std::optional<double> certificate_gamma) {
  require(validate(g).ok(), errc::precondition, "vertex_expansion: invalid graph");
  require(max_subset_size >= 1 && max_subset_size <= g.n_out, errc::precondition,
          "vertex_expansion: max_subset_size must lie in [1, n_out]");

  ExpansionReport report;
  report.max_subset_size = max_subset_size;
  report.alpha = static_cast<double>(max_subset_size) / g.n_out;
  report.certificate_gamma = certificate_gamma;

  const int half = g.n_out / 2;
  auto check_certificate = [&](TaskResult& local, const std::vector<int>& subset, long long nbr) {
    if (!certificate_gamma || static_cast<int>(subset.size()) > half) return;
    double bound = std::min(static_cast<double>(g.n_in),
                            (1.0 + *certificate_gamma) * static_cast<double>(subset.size()));
    if (static_cast<double>(nbr) + 1e-9 < bound) {
      ++local.violations;
      if (local.first_violation.empty() || lex_less(subset, local.first_violation))
        local.first_violation = subset;
    }
  };

  if (mode == ExpansionMode::exhaustive) {
    require(subset_count(g.n_out, max_subset_size) <= 1e7L, errc::too_large,
            "vertex_expansion: exhaustive enumeration exceeds 1e7 subsets; "
            "use sampled mode");

    // One task per (size, first element); merged in fixed order so the
    // result is independent of scheduling.
    std::vector<std::pair<int, int>> tasks;
    for (int k = 1; k <= max_subset_size; ++k)
      for (int f = 0; f + k <= g.n_out; ++f) tasks.emplace_back(k, f);
    std::vector<TaskResult> results(tasks.size());

#pragma omp parallel
    {
      NeighborCounter counter(g.n_in);
#pragma omp for schedule(dynamic)
      for (long long t = 0; t < static_cast<long long>(tasks.size()); ++t) {
        auto [k, f] = tasks[t];
        TaskResult local;
        for_each_combination(g.n_out, k, f, [&](const std::vector<int>& subset) {
          long long nbr = counter.count(g, subset);
          ++local.examined;
          Candidate cand{nbr, k, subset};
          if (better(cand, local.best)) local.best = std::move(cand);
          check_certificate(local, subset, nbr);
        });
        results[t] = std::move(local);
      }
    }

    Candidate best;
    for (auto& r : results) {
      report.subsets_examined += r.examined;
      report.certificate_violations += r.violations;
      if (!r.first_violation.empty() &&
          (report.first_violation.empty() || lex_less(r.first_violation, report.first_violation)))
        report.first_violation = std::move(r.first_violation);
      if (better(r.best, best)) best = std::move(r.best);
    }
    report.worst_ratio = static_cast<double>(best.nbr) / best.size;
    report.witness = std::move(best.witness);
    return report;
  }

  require(samples >= 1, errc::precondition, "vertex_expansion: sampled mode needs samples >= 1");
  Rng rng(seed);
  NeighborCounter counter(g.n_in);
  Candidate best;
  TaskResult cert;
  for (long long s = 0; s < samples; ++s) {
    int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_subset_size)));
    std::vector<int> subset = rng.sample_distinct(g.n_out, k);
    std::sort(subset.begin(), subset.end());
    long long nbr = counter.count(g, subset);
    ++report.subsets_examined;
    Candidate cand{nbr, k, std::move(subset)};
    check_certificate(cert, cand.witness, nbr);
    if (better(cand, best)) best = std::move(cand);
  }
  report.certificate_violations = cert.violations;
  report.first_violation = std::move(cert.first_violation);
  report.worst_ratio = static_cast<double>(best.nbr) / best.size;
  report.witness = std::move(best.witness);
  return report;
}

nlohmann::json spectral_report_to_json(const SpectralReport& r) {
  nlohmann::json j;
  nlohmann::json sv = nlohmann::json::array();
  for (double s : r.singular_values) sv.push_back(round_sig(s));
  j["singular_values"] = std::move(sv);
  j["lambda"] = round_sig(r.lambda);
  j["degree"] = r.degree;
  j["gap"] = round_sig(r.gap);
  return j;
}

nlohmann::json expansion_report_to_json(const ExpansionReport& r) {
  nlohmann::json j;
  j["max_subset_size"] = r.max_subset_size;
  j["alpha"] = round_sig(r.alpha);
  j["worst_ratio"] = round_sig(r.worst_ratio);
  j["witness"] = r.witness;
  j["subsets_examined"] = r.subsets_examined;
  if (r.certificate_gamma) {
    j["certificate_gamma"] = round_sig(*r.certificate_gamma);
    j["certificate_violations"] = r.certificate_violations;
    if (!r.first_violation.empty()) j["first_violation"] = r.first_violation;
  }
  return j;
}

}  // namespace xnet
