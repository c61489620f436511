// Command-line front end: graph generation, spectral measurement,
// connectivity verification, parameter/FLOP accounting, training, and the
// expander-vs-grouped sparsity sweep.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xnet/arch.hpp"
#include "xnet/connectivity.hpp"
#include "xnet/graph.hpp"
#include "xnet/rng.hpp"
#include "xnet/spectral.hpp"
#include "xnet/trainer.hpp"
#include "xnet/util.hpp"

using namespace xnet;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  std::string precision = "f64";
};

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream f(g.out);
  require(f.good(), errc::not_found, "cannot open '" + g.out + "' for writing");
  f << text;
  if (text.empty() || text.back() != '\n') f << "\n";
  require(f.good(), errc::corrupt_file, "short write to '" + g.out + "'");
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (...) {
      fail(errc::precondition, std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  require(!out.empty(), errc::precondition, std::string(what) + ": empty list");
  return out;
}

int ceil_log2(int n) {
  int t = 0;
  while ((1 << t) < n) ++t;
  return t;
}

// ---------------------------------------------------------------- gen

struct GenOpts {
  std::string type;
  int n = 0, n_in = 0, n_out = 0, degree = 0, groups = 0, bits = 0, gen_count = 0;
  std::string gens;
};

int run_gen(const GlobalOpts& g, const GenOpts& o) {
  BipartiteGraph graph;
  const int n_in = o.n_in ? o.n_in : o.n;
  const int n_out = o.n_out ? o.n_out : o.n;
  if (o.type == "random") {
    graph = random_expander(n_in, n_out, o.degree, g.seed);
  } else if (o.type == "cayley") {
    CayleyParams params;
    params.n_bits = o.bits;
    if (!o.gens.empty()) {
      for (int v : parse_int_list(o.gens, "--gens"))
        params.generators.push_back(static_cast<std::uint64_t>(v));
    } else {
      require(o.gen_count > 0, errc::precondition, "cayley needs --gens or --gen-count");
      params.generators = sample_cayley_generators(o.bits, o.gen_count, g.seed);
    }
    graph = cayley_expander(params);
    graph.seed = o.gens.empty() ? std::optional<std::uint64_t>(g.seed) : std::nullopt;
  } else if (o.type == "grouped") {
    graph = grouped_graph(n_in, n_out, o.groups);
  } else if (o.type == "dense") {
    graph = dense_graph(n_in, n_out);
  } else {
    fail(errc::precondition, "unknown graph type '" + o.type + "'");
  }
  emit(g, graph_to_json(graph).dump(2));
  return 0;
}

// ---------------------------------------------------------------- measure

struct MeasureOpts {
  std::string graph_file;
  int expansion_max_subset = 0;
  std::string expansion_mode = "exhaustive";
  long long samples = 10000;
  bool certificate = false;
};

int run_measure(const GlobalOpts& g, const MeasureOpts& o) {
  BipartiteGraph graph = load_graph(o.graph_file);
  ValidationReport v = validate(graph);
  if (!v.ok()) {
    nlohmann::json j;
    j["valid"] = false;
    j["violations"] = v.violations;
    emit(g, j.dump(2));
    return 1;
  }
  SpectralReport spectral = spectral_gap(graph);
  nlohmann::json j = spectral_report_to_json(spectral);
  j["valid"] = true;
  j["kind"] = kind_name(graph.kind);
  j["n_in"] = graph.n_in;
  j["n_out"] = graph.n_out;
  j["edges"] = graph.edge_count();
  if (o.expansion_max_subset > 0) {
    ExpansionMode mode =
        o.expansion_mode == "sampled" ? ExpansionMode::sampled : ExpansionMode::exhaustive;
    std::optional<double> cert;
    if (o.certificate) cert = spectral.gap;
    j["expansion"] = expansion_report_to_json(
        vertex_expansion(graph, o.expansion_max_subset, mode, o.samples, g.seed, cert));
  }
  emit(g, j.dump(2));
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyResult {
  nlohmann::json params;
  std::vector<std::uint64_t> seeds;
  int pass_count = 0;
  nlohmann::json fail_witnesses = nlohmann::json::array();
};

int emit_verify(const GlobalOpts& g, const std::string& check, VerifyResult r) {
  nlohmann::json j;
  j["check"] = check;
  j["params"] = std::move(r.params);
  j["seeds"] = r.seeds;
  j["pass_count"] = r.pass_count;
  j["fail_witnesses"] = std::move(r.fail_witnesses);
  emit(g, j.dump(2));
  return r.pass_count == static_cast<int>(r.seeds.size()) ? 0 : 1;
}

struct VerifyOpts {
  int n = 64, degree = 8, depth = 0, seeds = 10, max_subset = 5, steps = -1;
  double threshold = 0.01;
  std::string mode = "exhaustive";
  long long samples = 10000;
};

int verify_sensitivity(const GlobalOpts& g, const VerifyOpts& o) {
  const int depth = o.depth > 0 ? o.depth : 2 * ceil_log2(o.n);
  VerifyResult r;
  r.params = {{"n", o.n}, {"degree", o.degree}, {"depth", depth}};
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = g.seed + s;
    r.seeds.push_back(seed);
    LayeredNetworkSpec net;
    for (int t = 0; t < depth; ++t)
      net.graphs.push_back(random_expander(o.n, o.n, o.degree, mix64(seed) + t));
    const double fraction = sensitivity_map(net).fraction;
    if (fraction == 1.0)
      ++r.pass_count;
    else
      r.fail_witnesses.push_back({{"seed", seed}, {"fraction", round_sig(fraction)}});
  }
  return emit_verify(g, "sensitivity", std::move(r));
}

int verify_mixing(const GlobalOpts& g, const VerifyOpts& o) {
  VerifyResult r;
  r.params = {{"n", o.n}, {"degree", o.degree}, {"max_subset", o.max_subset}};
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = g.seed + s;
    r.seeds.push_back(seed);
    BipartiteGraph graph = random_expander(o.n, o.n, o.degree, seed);
    const double gamma = spectral_gap(graph).gap;

    std::vector<std::vector<int>> subsets;
    std::vector<int> cur;
    // all subsets of size 1..max_subset in lexicographic order
    std::function<void(int)> gen = [&](int first) {
      for (int i = first; i < o.n; ++i) {
        cur.push_back(i);
        subsets.push_back(cur);
        if (static_cast<int>(cur.size()) < o.max_subset) gen(i + 1);
        cur.pop_back();
      }
    };
    gen(0);

    bool ok = true;
    nlohmann::json witness;
    long long strict_failures = 0;
    for (const auto& S : subsets) {
      for (const auto& T : subsets) {
        MixingRecord m = mixing_discrepancy(graph, S, T, gamma);
        if (!m.strict_pass) ++strict_failures;
        if (!m.pass) {
          ok = false;
          witness = {{"seed", seed}, {"S", S}, {"T", T}, {"record", mixing_record_to_json(m)}};
          break;
        }
      }
      if (!ok) break;
    }
    if (ok)
      ++r.pass_count;
    else
      r.fail_witnesses.push_back(witness);
    std::cerr << "seed " << seed << ": gamma=" << gamma << " pairs=" << subsets.size() * subsets.size()
              << " strict_bound_failures=" << strict_failures << "\n";
  }
  return emit_verify(g, "mixing", std::move(r));
}

int verify_walk(const GlobalOpts& g, const VerifyOpts& o) {
  const int steps = o.steps >= 0 ? o.steps : 2 * ceil_log2(o.n);
  VerifyResult r;
  r.params = {{"n", o.n}, {"degree", o.degree}, {"steps", steps}, {"threshold", o.threshold}};
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = g.seed + s;
    r.seeds.push_back(seed);
    BipartiteGraph graph = random_expander(o.n, o.n, o.degree, seed);
    const double tv = random_walk_mixing(graph, 0, steps);
    if (tv <= o.threshold)
      ++r.pass_count;
    else
      r.fail_witnesses.push_back({{"seed", seed}, {"tv_distance", round_sig(tv)}});
  }
  return emit_verify(g, "walk", std::move(r));
}

int verify_expansion(const GlobalOpts& g, const VerifyOpts& o) {
  VerifyResult r;
  const int max_subset = o.max_subset > 0 ? std::min(o.max_subset, o.n / 2) : o.n / 2;
  r.params = {{"n", o.n}, {"degree", o.degree}, {"max_subset", max_subset}, {"mode", o.mode}};
  for (int s = 0; s < o.seeds; ++s) {
    const std::uint64_t seed = g.seed + s;
    r.seeds.push_back(seed);
    BipartiteGraph graph = random_expander(o.n, o.n, o.degree, seed);
    const double gamma = spectral_gap(graph).gap;
    ExpansionMode mode =
        o.mode == "sampled" ? ExpansionMode::sampled : ExpansionMode::exhaustive;
    ExpansionReport rep =
        vertex_expansion(graph, max_subset, mode, o.samples, mix64(seed), gamma);
    if (rep.certificate_violations == 0)
      ++r.pass_count;
    else
      r.fail_witnesses.push_back({{"seed", seed},
                                  {"violations", rep.certificate_violations},
                                  {"first_violation", rep.first_violation}});
  }
  return emit_verify(g, "expansion", std::move(r));
}

// ---------------------------------------------------------------- count

int run_count(const GlobalOpts& g, const std::string& arch_file, int channels, int height,
              int width) {
  ArchSpec arch = load_arch(arch_file);
  FlopReport f = flop_count(arch, channels, height, width);
  nlohmann::json j;
  j["params"] = param_count(arch);
  j["mult_adds"] = f.mult_adds;
  j["flops"] = f.flops;
  j["input_shape"] = {channels, height, width};
  emit(g, j.dump(2));
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainOpts {
  std::string arch_file;
  std::string dataset = "synthetic";
  std::string data_dir = "data/cifar-10-batches-bin";
  int cifar_batches = 5;
  int train_size = 2000, test_size = 500, classes = 10;
  std::string image_shape = "3,32,32";
  double noise = 0.5;
  std::string save_model;
  TrainConfig config;
};

std::pair<Dataset, Dataset> make_datasets(const TrainOpts& o, std::uint64_t seed) {
  if (o.dataset == "cifar10") {
    Cifar10Options copt;
    copt.max_train_batches = o.cifar_batches;
    return {load_cifar10(o.data_dir, "train", copt), load_cifar10(o.data_dir, "test")};
  }
  require(o.dataset == "synthetic", errc::precondition,
          "unknown dataset '" + o.dataset + "'");
  auto dims = parse_int_list(o.image_shape, "--image-shape");
  require(dims.size() == 3, errc::precondition, "--image-shape needs c,h,w");
  Dataset all = synthetic_dataset(o.train_size + o.test_size, o.classes,
                                  {dims[0], dims[1], dims[2]}, seed, o.noise);
  return {dataset_slice(all, 0, o.train_size), dataset_slice(all, o.train_size, o.test_size)};
}

template <typename T>
int run_train_t(const GlobalOpts& g, const TrainOpts& o) {
  ArchSpec arch = load_arch(o.arch_file);
  auto [train_set, test_set] = make_datasets(o, g.seed);
  TrainConfig cfg = o.config;
  cfg.seed = g.seed;
  TrainResult<T> result = xnet::train<T>(arch, train_set, &test_set, cfg);
  if (!g.out.empty()) {
    write_metrics_csv(g.out, result.metrics);
  } else {
    std::ostringstream ss;
    ss << "epoch,train_loss,train_acc,test_loss,test_acc,wall_seconds\n";
    for (const auto& m : result.metrics) {
      char buf[192];
      std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.3f\n", m.epoch, m.train_loss,
                    m.train_acc, m.test_loss, m.test_acc, m.wall_seconds);
      ss << buf;
    }
    std::cout << ss.str();
  }
  if (!o.save_model.empty()) result.model.save(o.save_model);
  if (!result.metrics.empty())
    std::cerr << "final test accuracy " << result.metrics.back().test_acc << "\n";
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareOpts {
  std::string factors = "1,2,4,8";
  std::string kinds = "expander,grouped";
  int seeds = 3;
  TrainOpts data;  // dataset flags + train config
};

// The fixed desk-scale CNN: 3x3 convs over 32-64-128-128 channels with two
// 2x2 poolings and a dense head; every conv except the first is sparsified.
ArchSpec desk_cnn(const std::string& kind, int factor, std::uint64_t graph_seed) {
  auto relu = [] { LayerSpec l; l.type = "relu"; return l; };
  auto pool = [] { LayerSpec l; l.type = "pool"; return l; };
  const std::array<std::pair<int, int>, 4> chans{{{3, 32}, {32, 64}, {64, 128}, {128, 128}}};
  ArchSpec a;
  for (std::size_t i = 0; i < chans.size(); ++i) {
    auto [n_in, n_out] = chans[i];
    LayerSpec c;
    c.window = 3;
    c.n_in = n_in;
    c.n_out = n_out;
    if (i == 0 || factor == 1) {
      c.type = "dense";
    } else if (kind == "expander") {
      require(n_in % factor == 0, errc::precondition,
              "factor must divide the channel counts");
      c.type = "xconv";
      c.degree = n_in / factor;
      c.graph_seed = mix64(graph_seed + i);
    } else {
      c.type = "grouped";
      c.groups = factor;
    }
    a.layers.push_back(c);
    a.layers.push_back(relu());
    if (i == 1 || i == 3) a.layers.push_back(pool());
  }
  LayerSpec head;
  head.type = "dense";
  head.n_in = 128 * 8 * 8;
  head.n_out = 10;
  head.bias = true;
  a.layers.push_back(head);
  return a;
}

// Sensitivity of the sparsified conv stack (the layers whose connectivity
// varies between kinds).
double sparsified_sensitivity(const ArchSpec& arch) {
  LayeredNetworkSpec net;
  for (std::size_t i = 1; i < arch.layers.size(); ++i) {  // skip the first conv
    const auto& l = arch.layers[i];
    if (!l.is_conv()) continue;
    if (l.type == "xconv")
      net.graphs.push_back(random_expander(l.n_in, l.n_out, l.degree, l.graph_seed));
    else if (l.type == "grouped")
      net.graphs.push_back(grouped_graph(l.n_in, l.n_out, l.groups));
    else
      net.graphs.push_back(dense_graph(l.n_in, l.n_out));
  }
  if (net.graphs.empty()) return 1.0;
  return sensitivity_map(net).fraction;
}

struct CompareRow {
  int factor = 0;
  std::string kind;
  std::uint64_t graph_seed = 0, init_seed = 0;
  double acc = std::nan("");
  long long params = 0, flops = 0;
  double sensitivity = 0, wall = 0;
  std::string error;
};

template <typename T>
int run_compare_t(const GlobalOpts& g, const CompareOpts& o) {
  const std::vector<int> factors = parse_int_list(o.factors, "--factors");
  std::vector<std::string> kinds;
  {
    std::stringstream ss(o.kinds);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(item);
  }
  for (const auto& k : kinds)
    require(k == "expander" || k == "grouped", errc::precondition,
            "unknown connectivity kind '" + k + "'");
  require(o.seeds >= 1, errc::precondition, "--seeds must be positive");
  for (int f : factors)
    require(f >= 1, errc::precondition, "factors must be >= 1");

  auto [train_set, test_set] = make_datasets(o.data, g.seed);

  std::vector<CompareRow> rows;
  for (int factor : factors)
    for (const auto& kind : kinds)
      for (int r = 0; r < o.seeds; ++r) {
        CompareRow row;
        row.factor = factor;
        row.kind = kind;
        row.graph_seed = g.seed + 17 * factor + r;  // shared across kinds
        row.init_seed = g.seed + 1000 + r;
        rows.push_back(row);
      }

  const int jobs = std::max(1, g.jobs);
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(rows.size()); ++i) {
    CompareRow& row = rows[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ArchSpec arch = desk_cnn(row.kind, row.factor, row.graph_seed);
      row.params = param_count(arch);
      row.flops = flop_count(arch, 3, 32, 32).flops;
      row.sensitivity = sparsified_sensitivity(arch);
      TrainConfig cfg = o.data.config;
      cfg.seed = row.init_seed;
      TrainResult<T> res = xnet::train<T>(arch, train_set, &test_set, cfg);
      row.acc = res.metrics.empty() ? 0.0 : res.metrics.back().test_acc;
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  std::ostringstream csv;
  csv << "factor,kind,graph_seed,init_seed,final_test_acc,params,flops,sensitivity_fraction,"
         "wall_seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    if (r.error.empty()) {
      std::snprintf(buf, sizeof buf, "%d,%s,%llu,%llu,%.10g,%lld,%lld,%.10g,%.3f\n", r.factor,
                    r.kind.c_str(), static_cast<unsigned long long>(r.graph_seed),
                    static_cast<unsigned long long>(r.init_seed), r.acc, r.params, r.flops,
                    r.sensitivity, r.wall);
      csv << buf;
    } else {
      std::snprintf(buf, sizeof buf, "%d,%s,%llu,%llu,error:%s,%lld,%lld,%.10g,%.3f\n", r.factor,
                    r.kind.c_str(), static_cast<unsigned long long>(r.graph_seed),
                    static_cast<unsigned long long>(r.init_seed), r.error.c_str(), r.params,
                    r.flops, r.sensitivity, r.wall);
      csv << buf;
    }
  }
  // mean/stddev summary per (factor, kind); the stat name rides in the
  // graph_seed column
  for (int factor : factors)
    for (const auto& kind : kinds) {
      std::vector<const CompareRow*> cell;
      for (const auto& r : rows)
        if (r.factor == factor && r.kind == kind && r.error.empty()) cell.push_back(&r);
      if (cell.empty()) continue;
      double mean = 0, sens = 0, wall = 0;
      for (const auto* r : cell) {
        mean += r->acc;
        sens += r->sensitivity;
        wall += r->wall;
      }
      mean /= static_cast<double>(cell.size());
      sens /= static_cast<double>(cell.size());
      wall /= static_cast<double>(cell.size());
      double sq = 0;
      for (const auto* r : cell) sq += (r->acc - mean) * (r->acc - mean);
      const double stddev =
          cell.size() > 1 ? std::sqrt(sq / static_cast<double>(cell.size() - 1)) : 0.0;
      std::snprintf(buf, sizeof buf, "%d,%s,mean,,%.10g,%lld,%lld,%.10g,%.3f\n", factor,
                    kind.c_str(), mean, cell[0]->params, cell[0]->flops, sens, wall);
      csv << buf;
      std::snprintf(buf, sizeof buf, "%d,%s,stddev,,%.10g,,,,\n", factor, kind.c_str(), stddev);
      csv << buf;
    }
  emit(g, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expander-graph sparse layers: generation, verification, training"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base seed for all randomized operations");
  app.add_option("--out,-o", g.out, "output file (stdout when omitted)");
  app.add_option("--jobs", g.jobs, "parallel sweep cells");
  app.add_option("--precision", g.precision, "f64 or f32")
      ->check(CLI::IsMember({"f64", "f32"}));

  GenOpts gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "construct a connectivity graph");
  cmd_gen->add_option("--type", gen.type, "random|cayley|grouped|dense")->required();
  cmd_gen->add_option("--n", gen.n, "vertex count for square graphs");
  cmd_gen->add_option("--n-in", gen.n_in, "input vertex count");
  cmd_gen->add_option("--n-out", gen.n_out, "output vertex count");
  cmd_gen->add_option("--degree", gen.degree, "neighbors per output vertex");
  cmd_gen->add_option("--groups", gen.groups, "group count for grouped graphs");
  cmd_gen->add_option("--bits", gen.bits, "cayley: group is {0,1}^bits");
  cmd_gen->add_option("--gens", gen.gens, "cayley: comma-separated generators");
  cmd_gen->add_option("--gen-count", gen.gen_count, "cayley: sample this many generators");

  MeasureOpts measure;
  CLI::App* cmd_measure = app.add_subcommand("measure", "spectral report for a graph file");
  cmd_measure->add_option("graph", measure.graph_file, "graph json")->required();
  cmd_measure->add_option("--expansion-max-subset", measure.expansion_max_subset,
                          "also measure vertex expansion up to this subset size");
  cmd_measure->add_option("--expansion-mode", measure.expansion_mode, "exhaustive|sampled");
  cmd_measure->add_option("--samples", measure.samples, "sample count for sampled mode");
  cmd_measure->add_flag("--certificate", measure.certificate,
                        "check the spectral expansion certificate");

  VerifyOpts verify;
  CLI::App* cmd_verify = app.add_subcommand("verify", "empirical connectivity guarantees");
  cmd_verify->require_subcommand(1);
  auto add_verify_common = [&](CLI::App* c) {
    c->add_option("--n", verify.n, "vertices per side");
    c->add_option("--degree", verify.degree, "graph degree");
    c->add_option("--seeds", verify.seeds, "number of independent seeds");
  };
  CLI::App* v_sens = cmd_verify->add_subcommand("sensitivity", "full input/output sensitivity");
  add_verify_common(v_sens);
  v_sens->add_option("--depth", verify.depth, "layer count (default 2*ceil(log2 n))");
  CLI::App* v_mix = cmd_verify->add_subcommand("mixing", "expander mixing lemma bound");
  add_verify_common(v_mix);
  v_mix->add_option("--max-subset", verify.max_subset, "largest subset size");
  CLI::App* v_walk = cmd_verify->add_subcommand("walk", "random walk convergence");
  add_verify_common(v_walk);
  v_walk->add_option("--steps", verify.steps, "walk steps (default 2*ceil(log2 n))");
  v_walk->add_option("--threshold", verify.threshold, "TV distance bound");
  CLI::App* v_exp = cmd_verify->add_subcommand("expansion", "spectral expansion certificate");
  add_verify_common(v_exp);
  v_exp->add_option("--max-subset", verify.max_subset, "largest subset size (default n/2)");
  v_exp->add_option("--mode", verify.mode, "exhaustive|sampled");
  v_exp->add_option("--samples", verify.samples, "sample count for sampled mode");

  std::string count_arch;
  int count_c = 3, count_h = 32, count_w = 32;
  CLI::App* cmd_count = app.add_subcommand("count", "parameter and FLOP totals");
  cmd_count->add_option("--arch", count_arch, "architecture json")->required();
  cmd_count->add_option("--channels", count_c, "input channels");
  cmd_count->add_option("--height", count_h, "input height");
  cmd_count->add_option("--width", count_w, "input width");

  TrainOpts train_opts;
  CLI::App* cmd_train = app.add_subcommand("train", "train a model, emit metrics csv");
  cmd_train->add_option("--arch", train_opts.arch_file, "architecture json")->required();
  auto add_data_flags = [&](CLI::App* c, TrainOpts& t) {
    c->add_option("--dataset", t.dataset, "synthetic|cifar10");
    c->add_option("--data-dir", t.data_dir, "cifar binary batch directory");
    c->add_option("--cifar-batches", t.cifar_batches, "training batches to load (1..5)");
    c->add_option("--train-size", t.train_size, "synthetic training samples");
    c->add_option("--test-size", t.test_size, "synthetic test samples");
    c->add_option("--classes", t.classes, "synthetic class count");
    c->add_option("--image-shape", t.image_shape, "synthetic c,h,w");
    c->add_option("--noise", t.noise, "synthetic noise level");
    c->add_option("--epochs", t.config.epochs, "training epochs");
    c->add_option("--batch-size", t.config.batch_size, "minibatch size");
    c->add_option("--lr", t.config.learning_rate, "learning rate");
    c->add_option("--momentum", t.config.momentum, "SGD momentum");
    c->add_option("--weight-decay", t.config.weight_decay, "L2 penalty");
    c->add_flag("--step-decay", t.config.step_decay, "x0.1 lr at 50% and 75% of epochs");
    c->add_flag("--augment", t.config.augment, "pad-4 random crop + horizontal flip");
  };
  add_data_flags(cmd_train, train_opts);
  cmd_train->add_option("--save-model", train_opts.save_model, "write a model snapshot");

  CompareOpts compare;
  CLI::App* cmd_compare = app.add_subcommand("compare", "expander vs grouped sparsity sweep");
  cmd_compare->add_option("--factors", compare.factors, "comma-separated compression factors");
  cmd_compare->add_option("--kinds", compare.kinds, "connectivity kinds to sweep");
  cmd_compare->add_option("--seeds", compare.seeds, "runs per (factor, kind)");
  add_data_flags(cmd_compare, compare.data);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*cmd_gen) return run_gen(g, gen);
    if (*cmd_measure) return run_measure(g, measure);
    if (*cmd_verify) {
      if (*v_sens) return verify_sensitivity(g, verify);
      if (*v_mix) return verify_mixing(g, verify);
      if (*v_walk) return verify_walk(g, verify);
      return verify_expansion(g, verify);
    }
    if (*cmd_count) return run_count(g, count_arch, count_c, count_h, count_w);
    if (*cmd_train)
      return g.precision == "f32" ? run_train_t<float>(g, train_opts)
                                  : run_train_t<double>(g, train_opts);
    if (*cmd_compare)
      return g.precision == "f32" ? run_compare_t<float>(g, compare)
                                  : run_compare_t<double>(g, compare);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == errc::not_found || e.code() == errc::corrupt_file) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
