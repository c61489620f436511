#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xnet/error.hpp"

namespace xnet {

// One entry of an architecture description. `type` is one of
// xconv | xlinear | grouped | dense | pool | relu; a dense layer with a
// window is a dense convolution, without one a dense linear layer.
struct LayerSpec {
  std::string type;
  int n_in = 0;
  int n_out = 0;
  int degree = 0;  // xconv / xlinear
  int groups = 0;  // grouped
  int window = 0;
  int stride = 1;
  int padding = -1;  // -1: same padding, (window - 1) / 2
  bool bias = false;
  std::uint64_t graph_seed = 0;

  bool is_conv() const {
    return type == "xconv" || type == "grouped" || (type == "dense" && window > 0);
  }
  bool is_linear() const { return type == "xlinear" || (type == "dense" && window == 0); }
  bool has_graph() const { return is_conv() || is_linear(); }
  int effective_padding() const { return padding >= 0 ? padding : (window - 1) / 2; }
  // Input channels each output unit actually connects to.
  int fan_degree() const {
    if (type == "xconv" || type == "xlinear") return degree;
    if (type == "grouped") return n_in / groups;
    return n_in;
  }
};

struct ArchSpec {
  std::vector<LayerSpec> layers;
};

ArchSpec arch_from_json(const nlohmann::json& j);
nlohmann::json arch_to_json(const ArchSpec& arch);
ArchSpec load_arch(const std::string& path);
void save_arch(const ArchSpec& arch, const std::string& path);

// Throws invalid-arch on malformed specs (unknown type, bad degrees,
// mismatched chaining).
void check_arch(const ArchSpec& arch);

// Exact number of stored parameters: one weight per edge (times window^2 for
// convolutions) plus bias terms where enabled.
long long param_count(const ArchSpec& arch);

struct FlopReport {
  long long mult_adds = 0;  // multiply-accumulate count per forward pass
  long long flops = 0;      // 2 * mult_adds
};

// Per-sample forward cost for the given input size. Tracks spatial
// dimensions through convolutions and 2x2 poolings.
FlopReport flop_count(const ArchSpec& arch, int in_channels, int height, int width);

}  // namespace xnet
