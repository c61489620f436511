#pragma once

#include <cstdint>
#include <utility>

#include "xnet/graph.hpp"
#include "xnet/tensor.hpp"

namespace xnet {

// Linear layer whose input->output connectivity is a bipartite graph; one
// weight per edge, no bias.
template <typename T>
struct XLinearLayerT {
  BipartiteGraph graph;
  std::vector<T> weights;  // [n_out][degree]
};

// Convolutional layer over channels: output channel v convolves the input
// channels N(v, 1..D) with its own window x window x D kernel.
template <typename T>
struct XConvLayerT {
  BipartiteGraph graph;
  std::vector<T> kernels;  // [n_out][window][window][degree]
  int window = 3;
  int stride = 1;
  int padding = 1;
};

using XLinearLayer = XLinearLayerT<double>;
using XConvLayer = XConvLayerT<double>;

// Fan-in scaled uniform init: variance 2 / fan_in with fan_in = D (linear)
// or D * window^2 (conv).
template <typename T>
XLinearLayerT<T> make_xlinear(BipartiteGraph graph, std::uint64_t init_seed);
template <typename T>
XConvLayerT<T> make_xconv(BipartiteGraph graph, int window, int stride, int padding,
                          std::uint64_t init_seed);

std::pair<int, int> conv_output_hw(int height, int width, int window, int stride, int padding);

// out[b][v] = sum_i w[v][i] * x[b][N(v,i)]
template <typename T>
Tensor<T> xlinear_forward(const XLinearLayerT<T>& layer, const Tensor<T>& x);

template <typename T>
void xlinear_backward(const XLinearLayerT<T>& layer, const Tensor<T>& x,
                      const Tensor<T>& grad_out, Tensor<T>& grad_x, Tensor<T>& grad_w);

// Gather-then-dense path: for each output channel, gather the D neighbour
// channels into a compact slab and run a dense window x window x D
// convolution. OpenMP-parallel over (batch, output channel).
template <typename T>
Tensor<T> xconv_forward_fast(const XConvLayerT<T>& layer, const Tensor<T>& x);

// Reference path: materializes the full n_out x n_in x window x window
// kernel with zeros off-graph and runs a plain serial dense convolution.
// Kept as the correctness oracle for the fast path.
template <typename T>
Tensor<T> xconv_forward_sparse(const XConvLayerT<T>& layer, const Tensor<T>& x);

template <typename T>
void xconv_backward(const XConvLayerT<T>& layer, const Tensor<T>& x, const Tensor<T>& grad_out,
                    Tensor<T>& grad_x, Tensor<T>& grad_k);

// Same forward as xconv_forward_fast; the layer's graph must be grouped.
template <typename T>
Tensor<T> grouped_conv_forward(const XConvLayerT<T>& layer, const Tensor<T>& x);

}  // namespace xnet
