#include "xnet/arch.hpp"

#include <fstream>
#include <set>

namespace xnet {

namespace {

const std::set<std::string> kTypes = {"xconv", "xlinear", "grouped", "dense", "pool", "relu"};

void check_layer(const LayerSpec& l, std::size_t idx) {
  auto bad = [&](const std::string& msg) {
    fail(errc::invalid_arch, "layer " + std::to_string(idx) + " (" + l.type + "): " + msg);
  };
  if (!kTypes.count(l.type)) bad("unknown type");
  if (l.type == "pool" || l.type == "relu") return;

  if (l.n_in < 1 || l.n_out < 1) bad("n_in and n_out must be positive");
  if (l.type == "xconv" || l.type == "xlinear") {
    if (l.degree < 1 || l.degree > l.n_in) bad("degree must lie in [1, n_in]");
  }
  if (l.type == "grouped") {
    if (l.groups < 1 || l.n_in % l.groups != 0 || l.n_out % l.groups != 0)
      bad("groups must divide n_in and n_out");
  }
  if (l.is_conv()) {
    if (l.window < 1) bad("window must be positive");
    if (l.stride < 1) bad("stride must be positive");
  }
}

}  // namespace

void check_arch(const ArchSpec& arch) {
  require(!arch.layers.empty(), errc::invalid_arch, "architecture has no layers");
  for (std::size_t i = 0; i < arch.layers.size(); ++i) check_layer(arch.layers[i], i);
}

ArchSpec arch_from_json(const nlohmann::json& j) {
  ArchSpec arch;
  try {
    const nlohmann::json& list = j.is_array() ? j : j.at("layers");
    for (const auto& e : list) {
      LayerSpec l;
      l.type = e.at("type").get<std::string>();
      l.n_in = e.value("n_in", 0);
      l.n_out = e.value("n_out", 0);
      l.degree = e.value("degree", 0);
      l.groups = e.value("groups", 0);
      l.window = e.value("window", 0);
      l.stride = e.value("stride", 1);
      l.padding = e.value("padding", -1);
      l.bias = e.value("bias", false);
      l.graph_seed = e.value("graph_seed", 0ull);
      arch.layers.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::invalid_arch, std::string("architecture json: ") + e.what());
  }
  check_arch(arch);
  return arch;
}

nlohmann::json arch_to_json(const ArchSpec& arch) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& l : arch.layers) {
    nlohmann::json e;
    e["type"] = l.type;
    if (l.type != "pool" && l.type != "relu") {
      e["n_in"] = l.n_in;
      e["n_out"] = l.n_out;
      if (l.type == "xconv" || l.type == "xlinear") e["degree"] = l.degree;
      if (l.type == "grouped") e["groups"] = l.groups;
      if (l.window > 0) e["window"] = l.window;
      if (l.is_conv()) {
        e["stride"] = l.stride;
        e["padding"] = l.effective_padding();
      }
      if (l.bias) e["bias"] = true;
      if (l.has_graph()) e["graph_seed"] = l.graph_seed;
    }
    list.push_back(std::move(e));
  }
  return nlohmann::json{{"layers", std::move(list)}};
}

ArchSpec load_arch(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::not_found, "cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_file, "cannot parse '" + path + "': " + e.what());
  }
  return arch_from_json(j);
}

void save_arch(const ArchSpec& arch, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), errc::not_found, "cannot open '" + path + "' for writing");
  out << arch_to_json(arch).dump(2) << "\n";
}

long long param_count(const ArchSpec& arch) {
  check_arch(arch);
  long long total = 0;
  for (const auto& l : arch.layers) {
    if (!l.has_graph()) continue;
    long long w = static_cast<long long>(l.n_out) * l.fan_degree();
    if (l.is_conv()) w *= static_cast<long long>(l.window) * l.window;
    total += w;
    if (l.bias) total += l.n_out;
  }
  return total;
}

FlopReport flop_count(const ArchSpec& arch, int in_channels, int height, int width) {
  check_arch(arch);
  require(in_channels >= 1 && height >= 1 && width >= 1, errc::invalid_arch,
          "flop_count: input shape must be positive");
  FlopReport r;
  int ch = in_channels, h = height, w = width;
  bool spatial = true;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& l = arch.layers[i];
    if (l.type == "relu") continue;
    if (l.type == "pool") {
      require(spatial, errc::invalid_arch, "pool after flatten");
      h /= 2;
      w /= 2;
      require(h >= 1 && w >= 1, errc::invalid_arch, "pooled away all spatial extent");
      continue;
    }
    if (l.is_conv()) {
      require(spatial, errc::invalid_arch, "convolution after flatten");
      require(l.n_in == ch, errc::invalid_arch,
              "layer " + std::to_string(i) + ": expects " + std::to_string(l.n_in) +
                  " channels, gets " + std::to_string(ch));
      int p = l.effective_padding();
      int ho = (h + 2 * p - l.window) / l.stride + 1;
      int wo = (w + 2 * p - l.window) / l.stride + 1;
      require(ho >= 1 && wo >= 1, errc::invalid_arch, "convolution output collapsed");
      r.mult_adds += static_cast<long long>(l.n_out) * l.fan_degree() * l.window * l.window *
                     ho * wo;
      ch = l.n_out;
      h = ho;
      w = wo;
    } else {
      const int features = spatial ? ch * h * w : ch;
      require(l.n_in == features, errc::invalid_arch,
              "layer " + std::to_string(i) + ": expects " + std::to_string(l.n_in) +
                  " features, gets " + std::to_string(features));
      r.mult_adds += static_cast<long long>(l.n_out) * l.fan_degree();
      ch = l.n_out;
      spatial = false;
    }
  }
  r.flops = 2 * r.mult_adds;
  return r;
}

}  // namespace xnet
