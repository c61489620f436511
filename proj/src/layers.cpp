#include "xnet/layers.hpp"

#include <cmath>

#include "xnet/rng.hpp"

namespace xnet {

namespace {

template <typename T>
void check_input(const BipartiteGraph& g, const Tensor<T>& x, int want_rank) {
  require(x.rank() == want_rank, errc::shape_mismatch,
          "expected rank-" + std::to_string(want_rank) + " input, got " + shape_string(x.shape));
  require(x.dim(1) == g.n_in, errc::shape_mismatch,
          "input has " + std::to_string(x.dim(1)) + " channels, layer expects " +
              std::to_string(g.n_in));
  require(all_finite(x), errc::numeric, "non-finite value in layer input");
}

}  // namespace

std::pair<int, int> conv_output_hw(int height, int width, int window, int stride, int padding) {
  require(window >= 1 && stride >= 1 && padding >= 0, errc::shape_mismatch,
          "bad window/stride/padding");
  int ph = height + 2 * padding, pw = width + 2 * padding;
  require(ph >= window && pw >= window, errc::shape_mismatch,
          "spatial input " + std::to_string(height) + "x" + std::to_string(width) +
              " too small for window " + std::to_string(window) + " with padding " +
              std::to_string(padding));
  return {(ph - window) / stride + 1, (pw - window) / stride + 1};
}

template <typename T>
XLinearLayerT<T> make_xlinear(BipartiteGraph graph, std::uint64_t init_seed) {
  require(validate(graph).ok(), errc::precondition, "make_xlinear: invalid graph");
  XLinearLayerT<T> layer{std::move(graph), {}};
  const double a = std::sqrt(6.0 / layer.graph.degree);
  Rng rng(init_seed);
  layer.weights.resize(static_cast<std::size_t>(layer.graph.n_out) * layer.graph.degree);
  for (auto& w : layer.weights) w = static_cast<T>(rng.uniform(-a, a));
  return layer;
}

template <typename T>
XConvLayerT<T> make_xconv(BipartiteGraph graph, int window, int stride, int padding,
                          std::uint64_t init_seed) {
  require(validate(graph).ok(), errc::precondition, "make_xconv: invalid graph");
  require(window >= 1 && stride >= 1 && padding >= 0, errc::shape_mismatch,
          "make_xconv: bad window/stride/padding");
  XConvLayerT<T> layer{std::move(graph), {}, window, stride, padding};
  const double fan_in = static_cast<double>(layer.graph.degree) * window * window;
  const double a = std::sqrt(6.0 / fan_in);
  Rng rng(init_seed);
  layer.kernels.resize(static_cast<std::size_t>(layer.graph.n_out) * window * window *
                       layer.graph.degree);
  for (auto& k : layer.kernels) k = static_cast<T>(rng.uniform(-a, a));
  return layer;
}

template <typename T>
Tensor<T> xlinear_forward(const XLinearLayerT<T>& layer, const Tensor<T>& x) {
  const auto& g = layer.graph;
  check_input(g, x, 2);
  const long long batch = x.dim(0);
  const int D = g.degree;
  Tensor<T> out({batch, g.n_out});

#pragma omp parallel for collapse(2) schedule(static)
  for (long long b = 0; b < batch; ++b)
    for (int v = 0; v < g.n_out; ++v) {
      const T* xb = x.data.data() + b * g.n_in;
      const T* w = layer.weights.data() + static_cast<std::size_t>(v) * D;
      const int* nbr = g.adjacency[v].data();
      T acc = 0;
      for (int i = 0; i < D; ++i) acc += w[i] * xb[nbr[i]];
      out.data[b * g.n_out + v] = acc;
    }
  return out;
}

template <typename T>
void xlinear_backward(const XLinearLayerT<T>& layer, const Tensor<T>& x,
                      const Tensor<T>& grad_out, Tensor<T>& grad_x, Tensor<T>& grad_w) {
  const auto& g = layer.graph;
  require(x.rank() == 2 && x.dim(1) == g.n_in, errc::shape_mismatch,
          "xlinear_backward: bad input shape " + shape_string(x.shape));
  require(grad_out.rank() == 2 && grad_out.dim(0) == x.dim(0) && grad_out.dim(1) == g.n_out,
          errc::shape_mismatch,
          "xlinear_backward: bad grad_out shape " + shape_string(grad_out.shape));
  const long long batch = x.dim(0);
  const int D = g.degree;
  grad_x = Tensor<T>({batch, g.n_in});
  grad_w = Tensor<T>({g.n_out, D});

  // Scatter into per-sample rows: iterations own disjoint slices, so the
  // result does not depend on the thread count.
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < batch; ++b) {
    T* gx = grad_x.data.data() + b * g.n_in;
    const T* go = grad_out.data.data() + b * g.n_out;
    for (int v = 0; v < g.n_out; ++v) {
      const T* w = layer.weights.data() + static_cast<std::size_t>(v) * D;
      const int* nbr = g.adjacency[v].data();
      for (int i = 0; i < D; ++i) gx[nbr[i]] += w[i] * go[v];
    }
  }

#pragma omp parallel for schedule(static)
  for (int v = 0; v < g.n_out; ++v) {
    T* gw = grad_w.data.data() + static_cast<std::size_t>(v) * D;
    const int* nbr = g.adjacency[v].data();
    for (long long b = 0; b < batch; ++b) {
      const T go = grad_out.data[b * g.n_out + v];
      const T* xb = x.data.data() + b * g.n_in;
      for (int i = 0; i < D; ++i) gw[i] += xb[nbr[i]] * go;
    }
  }
}

namespace {

// Copies channels N(v, 1..D) of one batch item into a zero-padded slab laid
// out [Hp][Wp][D]: the degree axis is innermost so the convolution's
// neighbour loop runs over contiguous memory in both slab and kernel.
template <typename T>
void gather_slab(const BipartiteGraph& g, const Tensor<T>& x, long long b, int v, int padding,
                 std::vector<T>& slab) {
  const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
  const int Hp = H + 2 * padding, Wp = W + 2 * padding;
  const int D = g.degree;
  slab.assign(static_cast<std::size_t>(Hp) * Wp * D, T{});
  for (int i = 0; i < D; ++i) {
    const T* src = x.data.data() + ((b * g.n_in + g.adjacency[v][i]) * H) * W;
    for (int y = 0; y < H; ++y) {
      T* dst = slab.data() + (static_cast<std::size_t>(y + padding) * Wp + padding) * D + i;
      for (int xx = 0; xx < W; ++xx) dst[static_cast<std::size_t>(xx) * D] = src[xx];
      src += W;
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> xconv_forward_fast(const XConvLayerT<T>& layer, const Tensor<T>& x) {
  const auto& g = layer.graph;
  check_input(g, x, 4);
  const int c = layer.window, s = layer.stride, p = layer.padding;
  const long long batch = x.dim(0);
  const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
  auto [Ho, Wo] = conv_output_hw(H, W, c, s, p);
  const int Wp = W + 2 * p;
  const int D = g.degree;
  Tensor<T> out({batch, g.n_out, Ho, Wo});

#pragma omp parallel
  {
    std::vector<T> slab;
#pragma omp for collapse(2) schedule(static)
    for (long long b = 0; b < batch; ++b)
      for (int v = 0; v < g.n_out; ++v) {
        gather_slab(g, x, b, v, p, slab);
        const T* K = layer.kernels.data() + static_cast<std::size_t>(v) * c * c * D;
        T* dst = out.data.data() + ((b * g.n_out + v) * Ho) * Wo;
        for (int oy = 0; oy < Ho; ++oy)
          for (int ox = 0; ox < Wo; ++ox) {
            // four independent partials keep the FMA chain short
            T a0 = 0, a1 = 0, a2 = 0, a3 = 0;
            for (int ky = 0; ky < c; ++ky)
              for (int kx = 0; kx < c; ++kx) {
                const T* kk = K + (static_cast<std::size_t>(ky) * c + kx) * D;
                const T* ss = slab.data() +
                              (static_cast<std::size_t>(oy * s + ky) * Wp + (ox * s + kx)) * D;
                int i = 0;
                for (; i + 4 <= D; i += 4) {
                  a0 += kk[i] * ss[i];
                  a1 += kk[i + 1] * ss[i + 1];
                  a2 += kk[i + 2] * ss[i + 2];
                  a3 += kk[i + 3] * ss[i + 3];
                }
                for (; i < D; ++i) a0 += kk[i] * ss[i];
              }
            dst[oy * Wo + ox] = (a0 + a1) + (a2 + a3);
          }
      }
  }
  return out;
}

template <typename T>
Tensor<T> xconv_forward_sparse(const XConvLayerT<T>& layer, const Tensor<T>& x) {
  const auto& g = layer.graph;
  check_input(g, x, 4);
  const int c = layer.window, s = layer.stride, p = layer.padding;
  require(static_cast<long long>(g.n_out) * g.n_in * c * c <= 100'000'000, errc::too_large,
          "xconv_forward_sparse: materialized kernel exceeds 1e8 entries");
  const long long batch = x.dim(0);
  const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
  auto [Ho, Wo] = conv_output_hw(H, W, c, s, p);

  // Full dense kernel, zero off-graph.
  std::vector<T> dense(static_cast<std::size_t>(g.n_out) * g.n_in * c * c, T{});
  for (int v = 0; v < g.n_out; ++v)
    for (int i = 0; i < g.degree; ++i) {
      const int u = g.adjacency[v][i];
      for (int ky = 0; ky < c; ++ky)
        for (int kx = 0; kx < c; ++kx)
          dense[((static_cast<std::size_t>(v) * g.n_in + u) * c + ky) * c + kx] =
              layer.kernels[((static_cast<std::size_t>(v) * c + ky) * c + kx) * g.degree + i];
    }

  // Plain serial convolution with explicit bounds checks; intentionally
  // shares no code with the fast path.
  Tensor<T> out({batch, g.n_out, Ho, Wo});
  for (long long b = 0; b < batch; ++b)
    for (int v = 0; v < g.n_out; ++v)
      for (int oy = 0; oy < Ho; ++oy)
        for (int ox = 0; ox < Wo; ++ox) {
          T acc = 0;
          for (int u = 0; u < g.n_in; ++u)
            for (int ky = 0; ky < c; ++ky)
              for (int kx = 0; kx < c; ++kx) {
                const int y = oy * s + ky - p;
                const int xx = ox * s + kx - p;
                if (y < 0 || y >= H || xx < 0 || xx >= W) continue;
                acc += dense[((static_cast<std::size_t>(v) * g.n_in + u) * c + ky) * c + kx] *
                       x.at4(b, u, y, xx);
              }
          out.at4(b, v, oy, ox) = acc;
        }
  return out;
}

template <typename T>
void xconv_backward(const XConvLayerT<T>& layer, const Tensor<T>& x, const Tensor<T>& grad_out,
                    Tensor<T>& grad_x, Tensor<T>& grad_k) {
  const auto& g = layer.graph;
  require(x.rank() == 4 && x.dim(1) == g.n_in, errc::shape_mismatch,
          "xconv_backward: bad input shape " + shape_string(x.shape));
  const int c = layer.window, s = layer.stride, p = layer.padding;
  const long long batch = x.dim(0);
  const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
  auto [Ho, Wo] = conv_output_hw(H, W, c, s, p);
  require(grad_out.rank() == 4 && grad_out.dim(0) == batch && grad_out.dim(1) == g.n_out &&
              grad_out.dim(2) == Ho && grad_out.dim(3) == Wo,
          errc::shape_mismatch,
          "xconv_backward: bad grad_out shape " + shape_string(grad_out.shape));

  const int Hp = H + 2 * p, Wp = W + 2 * p;
  const int D = g.degree;
  grad_x = Tensor<T>({batch, g.n_in, H, W});
  grad_k = Tensor<T>({g.n_out, c, c, D});

#pragma omp parallel
  {
    std::vector<T> slab;
#pragma omp for schedule(static)
    for (int v = 0; v < g.n_out; ++v) {
      T* gk = grad_k.data.data() + static_cast<std::size_t>(v) * c * c * D;
      for (long long b = 0; b < batch; ++b) {
        gather_slab(g, x, b, v, p, slab);
        const T* go = grad_out.data.data() + ((b * g.n_out + v) * Ho) * Wo;
        for (int oy = 0; oy < Ho; ++oy)
          for (int ox = 0; ox < Wo; ++ox) {
            const T gv = go[oy * Wo + ox];
            if (gv == T{}) continue;
            for (int ky = 0; ky < c; ++ky)
              for (int kx = 0; kx < c; ++kx) {
                const T* ss = slab.data() +
                              (static_cast<std::size_t>(oy * s + ky) * Wp + (ox * s + kx)) * D;
                T* gkrow = gk + (static_cast<std::size_t>(ky) * c + kx) * D;
                for (int i = 0; i < D; ++i) gkrow[i] += gv * ss[i];
              }
          }
      }
    }
  }

#pragma omp parallel
  {
    std::vector<T> gpad;
#pragma omp for schedule(static)
    for (long long b = 0; b < batch; ++b) {
      gpad.assign(static_cast<std::size_t>(g.n_in) * Hp * Wp, T{});
      for (int v = 0; v < g.n_out; ++v) {
        const T* K = layer.kernels.data() + static_cast<std::size_t>(v) * c * c * D;
        const T* go = grad_out.data.data() + ((b * g.n_out + v) * Ho) * Wo;
        for (int oy = 0; oy < Ho; ++oy)
          for (int ox = 0; ox < Wo; ++ox) {
            const T gv = go[oy * Wo + ox];
            if (gv == T{}) continue;
            for (int ky = 0; ky < c; ++ky)
              for (int kx = 0; kx < c; ++kx) {
                const T* kk = K + (static_cast<std::size_t>(ky) * c + kx) * D;
                const std::size_t row = static_cast<std::size_t>(oy * s + ky) * Wp + ox * s + kx;
                for (int i = 0; i < D; ++i)
                  gpad[static_cast<std::size_t>(g.adjacency[v][i]) * Hp * Wp + row] +=
                      gv * kk[i];
              }
          }
      }
      for (int u = 0; u < g.n_in; ++u)
        for (int y = 0; y < H; ++y)
          for (int xx = 0; xx < W; ++xx)
            grad_x.at4(b, u, y, xx) =
                gpad[static_cast<std::size_t>(u) * Hp * Wp +
                     static_cast<std::size_t>(y + p) * Wp + (xx + p)];
    }
  }
}

template <typename T>
Tensor<T> grouped_conv_forward(const XConvLayerT<T>& layer, const Tensor<T>& x) {
  require(layer.graph.kind == GraphKind::grouped, errc::precondition,
          "grouped_conv_forward: layer graph is not grouped");
  return xconv_forward_fast(layer, x);
}

#define XNET_INSTANTIATE(T)                                                                     \
  template XLinearLayerT<T> make_xlinear<T>(BipartiteGraph, std::uint64_t);                     \
  template XConvLayerT<T> make_xconv<T>(BipartiteGraph, int, int, int, std::uint64_t);          \
  template Tensor<T> xlinear_forward<T>(const XLinearLayerT<T>&, const Tensor<T>&);             \
  template void xlinear_backward<T>(const XLinearLayerT<T>&, const Tensor<T>&,                  \
                                    const Tensor<T>&, Tensor<T>&, Tensor<T>&);                  \
  template Tensor<T> xconv_forward_fast<T>(const XConvLayerT<T>&, const Tensor<T>&);            \
  template Tensor<T> xconv_forward_sparse<T>(const XConvLayerT<T>&, const Tensor<T>&);          \
  template void xconv_backward<T>(const XConvLayerT<T>&, const Tensor<T>&, const Tensor<T>&,    \
                                  Tensor<T>&, Tensor<T>&);                                      \
  template Tensor<T> grouped_conv_forward<T>(const XConvLayerT<T>&, const Tensor<T>&);

XNET_INSTANTIATE(double)
XNET_INSTANTIATE(float)
#undef XNET_INSTANTIATE

}  // namespace xnet
