#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "xnet/connectivity.hpp"
#include "xnet/layers.hpp"
#include "test_util.hpp"

using namespace xnet;
using namespace xnet::testutil;

namespace {

BipartiteGraph identity_graph(int n) { return grouped_graph(n, n, n); }

BipartiteGraph ring_graph() {
  BipartiteGraph g;
  g.n_in = g.n_out = 4;
  g.degree = 2;
  g.adjacency = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  return g;
}

template <typename T>
double max_rel_diff(const Tensor<T>& a, const Tensor<T>& b) {
  REQUIRE(a.shape == b.shape);
  double worst = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    worst = std::max(worst, rel_err(static_cast<double>(a.data[i]),
                                    static_cast<double>(b.data[i])));
  return worst;
}

XConvLayer random_conv_layer(int n_in, int n_out, int degree, int window, int stride,
                             int padding, std::uint64_t seed) {
  return make_xconv<double>(random_expander(n_in, n_out, degree, seed), window, stride, padding,
                            seed + 1);
}

}  // namespace

TEST_CASE("xlinear with identity graph and unit weights is the identity") {
  XLinearLayer layer{identity_graph(5), std::vector<double>(5, 1.0)};
  Tensor<double> x = random_tensor<double>({3, 5}, 0);
  Tensor<double> y = xlinear_forward(layer, x);
  CHECK(y.shape == x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i) CHECK(y.data[i] == x.data[i]);
}

TEST_CASE("xlinear matches the worked 4-vertex example") {
  XLinearLayer layer{ring_graph(), std::vector<double>(8, 1.0)};
  Tensor<double> x({1, 4});
  x.data = {1, 2, 3, 4};
  Tensor<double> y = xlinear_forward(layer, x);
  CHECK(y.data == std::vector<double>{3, 5, 7, 5});
}

TEST_CASE("dense-graph xlinear equals a full matrix-vector product") {
  XLinearLayer layer = make_xlinear<double>(dense_graph(7, 5), 3);
  Tensor<double> x = random_tensor<double>({4, 7}, 9);
  Tensor<double> y = xlinear_forward(layer, x);
  // independent oracle: plain dense matvec through the adjacency order
  for (long long b = 0; b < 4; ++b)
    for (int v = 0; v < 5; ++v) {
      double acc = 0;
      for (int u = 0; u < 7; ++u) acc += layer.weights[v * 7 + u] * x.at2(b, u);
      CHECK(rel_err(acc, y.at2(b, v)) < 1e-12);
    }
}

TEST_CASE("xlinear rejects bad inputs") {
  XLinearLayer layer = make_xlinear<double>(dense_graph(4, 4), 0);
  CHECK_THROWS_AS(xlinear_forward(layer, Tensor<double>({2, 5})), Error);
  Tensor<double> nan_input({1, 4});
  nan_input.data[2] = std::nan("");
  CHECK_THROWS_AS(xlinear_forward(layer, nan_input), Error);
  try {
    xlinear_forward(layer, nan_input);
  } catch (const Error& e) {
    CHECK(e.code() == errc::numeric);
  }
}

TEST_CASE("single-edge backward is the scalar chain rule") {
  XLinearLayer layer{dense_graph(1, 1), {0.7}};
  Tensor<double> x({1, 1});
  x.data = {2.5};
  Tensor<double> go({1, 1});
  go.data = {1.5};
  Tensor<double> gx, gw;
  xlinear_backward(layer, x, go, gx, gw);
  CHECK(gw.data[0] == doctest::Approx(2.5 * 1.5));
  CHECK(gx.data[0] == doctest::Approx(0.7 * 1.5));
}

TEST_CASE("zero input gives zero weight gradients") {
  XLinearLayer layer = make_xlinear<double>(random_expander(6, 6, 3, 1), 2);
  Tensor<double> x({2, 6});
  Tensor<double> go = random_tensor<double>({2, 6}, 3);
  Tensor<double> gx, gw;
  xlinear_backward(layer, x, go, gx, gw);
  for (double g : gw.data) CHECK(g == 0.0);
}

TEST_CASE("xlinear gradients match central finite differences") {
  XLinearLayer layer = make_xlinear<double>(random_expander(6, 6, 3, 1), 2);
  Tensor<double> x = random_tensor<double>({2, 6}, 3);
  Tensor<double> coeff = random_tensor<double>({2, 6}, 4);

  Tensor<double> gx, gw;
  xlinear_backward(layer, x, coeff, gx, gw);

  auto loss = [&] {
    Tensor<double> y = xlinear_forward(layer, x);
    double s = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) s += coeff.data[i] * y.data[i];
    return s;
  };
  CHECK(max_grad_err(gw.data, central_differences(layer.weights, loss)) < 1e-6);
  CHECK(max_grad_err(gx.data, central_differences(x.data, loss)) < 1e-6);
}

TEST_CASE("1x1 xconv with a full graph is a per-pixel xlinear") {
  const int n = 6;
  XLinearLayer lin = make_xlinear<double>(dense_graph(n, n), 5);
  XConvLayer conv{lin.graph, lin.weights, 1, 1, 0};
  Tensor<double> x = random_tensor<double>({2, n, 3, 3}, 6);
  Tensor<double> yc = xconv_forward_fast(conv, x);

  for (long long b = 0; b < 2; ++b)
    for (int py = 0; py < 3; ++py)
      for (int px = 0; px < 3; ++px) {
        Tensor<double> pixel({1, n});
        for (int u = 0; u < n; ++u) pixel.data[u] = x.at4(b, u, py, px);
        Tensor<double> yl = xlinear_forward(lin, pixel);
        for (int v = 0; v < n; ++v)
          CHECK(rel_err(yl.data[v], yc.at4(b, v, py, px)) < 1e-12);
      }
}

TEST_CASE("identity-channel conv with center-one kernels is the identity") {
  const int n = 4;
  XConvLayer layer{identity_graph(n), std::vector<double>(n * 9, 0.0), 3, 1, 1};
  for (int v = 0; v < n; ++v) layer.kernels[v * 9 + 4] = 1.0;  // center tap
  Tensor<double> x = random_tensor<double>({2, n, 5, 6}, 7);
  Tensor<double> y = xconv_forward_fast(layer, x);
  CHECK(y.shape == x.shape);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(y.data[i] == doctest::Approx(x.data[i]).epsilon(1e-15));
  Tensor<double> ys = xconv_forward_sparse(layer, x);
  CHECK(max_rel_diff(y, ys) < 1e-15);
}

TEST_CASE("all-zero kernels give all-zero output") {
  XConvLayer layer{random_expander(8, 6, 3, 2), std::vector<double>(6 * 9 * 3, 0.0), 3, 1, 1};
  Tensor<double> x = random_tensor<double>({1, 8, 4, 4}, 8);
  for (double v : xconv_forward_fast(layer, x).data) CHECK(v == 0.0);
}

TEST_CASE("fast path equals the sparse reference across configurations") {
  Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_in = 1 + static_cast<int>(rng.below(16));
    const int n_out = 1 + static_cast<int>(rng.below(16));
    const int degree = 1 + static_cast<int>(rng.below(n_in));
    const int window = 1 + 2 * static_cast<int>(rng.below(3));
    const int stride = 1 + static_cast<int>(rng.below(2));
    const int padding = static_cast<int>(rng.below(3));
    const int h = window + static_cast<int>(rng.below(6));
    const int w = window + static_cast<int>(rng.below(6));
    XConvLayer layer = random_conv_layer(n_in, n_out, degree, window, stride, padding, trial);
    Tensor<double> x = random_tensor<double>({2, n_in, h, w}, 500 + trial);
    CHECK(max_rel_diff(xconv_forward_fast(layer, x), xconv_forward_sparse(layer, x)) < 1e-9);
  }
}

TEST_CASE("layers are linear maps") {
  XConvLayer layer = random_conv_layer(6, 6, 3, 3, 1, 1, 21);
  Tensor<double> x = random_tensor<double>({2, 6, 5, 5}, 22);
  Tensor<double> y = random_tensor<double>({2, 6, 5, 5}, 23);
  const double a = 1.7, b = -0.4;
  Tensor<double> mix({2, 6, 5, 5});
  for (std::size_t i = 0; i < mix.data.size(); ++i)
    mix.data[i] = a * x.data[i] + b * y.data[i];
  Tensor<double> lhs = xconv_forward_fast(layer, mix);
  Tensor<double> fx = xconv_forward_fast(layer, x);
  Tensor<double> fy = xconv_forward_fast(layer, y);
  for (std::size_t i = 0; i < lhs.data.size(); ++i)
    CHECK(rel_err(lhs.data[i], a * fx.data[i] + b * fy.data[i]) < 1e-12);
}

TEST_CASE("sparse reference memory guard") {
  XConvLayer layer{random_expander(6000, 2000, 1, 0), std::vector<double>(2000 * 9, 0.0), 3, 1, 1};
  Tensor<double> x({1, 6000, 3, 3});
  CHECK_THROWS_AS(xconv_forward_sparse(layer, x), Error);
  try {
    xconv_forward_sparse(layer, x);
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_large);
  }
}

TEST_CASE("conv shape arithmetic and errors") {
  CHECK(conv_output_hw(32, 32, 3, 1, 1) == std::pair<int, int>{32, 32});
  CHECK(conv_output_hw(32, 32, 3, 2, 1) == std::pair<int, int>{16, 16});
  CHECK(conv_output_hw(5, 5, 5, 1, 0) == std::pair<int, int>{1, 1});
  CHECK_THROWS_AS(conv_output_hw(2, 2, 5, 1, 0), Error);
  XConvLayer layer = random_conv_layer(4, 4, 2, 5, 1, 0, 31);
  CHECK_THROWS_AS(xconv_forward_fast(layer, Tensor<double>({1, 4, 2, 2})), Error);
}

TEST_CASE("xconv gradients match central finite differences") {
  XConvLayer layer = random_conv_layer(5, 4, 3, 3, 1, 1, 41);
  Tensor<double> x = random_tensor<double>({2, 5, 4, 4}, 42);
  Tensor<double> coeff = random_tensor<double>({2, 4, 4, 4}, 43);

  Tensor<double> gx, gk;
  xconv_backward(layer, x, coeff, gx, gk);

  auto loss = [&] {
    Tensor<double> y = xconv_forward_fast(layer, x);
    double s = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) s += coeff.data[i] * y.data[i];
    return s;
  };
  CHECK(max_grad_err(gk.data, central_differences(layer.kernels, loss)) < 1e-6);
  CHECK(max_grad_err(gx.data, central_differences(x.data, loss)) < 1e-6);
}

TEST_CASE("strided conv gradients also match finite differences") {
  XConvLayer layer = random_conv_layer(4, 3, 2, 3, 2, 0, 51);
  Tensor<double> x = random_tensor<double>({1, 4, 7, 7}, 52);
  auto [ho, wo] = conv_output_hw(7, 7, 3, 2, 0);
  Tensor<double> coeff = random_tensor<double>({1, 3, ho, wo}, 53);
  Tensor<double> gx, gk;
  xconv_backward(layer, x, coeff, gx, gk);
  auto loss = [&] {
    Tensor<double> y = xconv_forward_fast(layer, x);
    double s = 0;
    for (std::size_t i = 0; i < y.data.size(); ++i) s += coeff.data[i] * y.data[i];
    return s;
  };
  CHECK(max_grad_err(gk.data, central_differences(layer.kernels, loss)) < 1e-6);
  CHECK(max_grad_err(gx.data, central_differences(x.data, loss)) < 1e-6);
}

TEST_CASE("grouped conv with one group equals the dense graph conv") {
  XConvLayer grouped = make_xconv<double>(grouped_graph(6, 6, 1), 3, 1, 1, 7);
  XConvLayer dense{dense_graph(6, 6), grouped.kernels, 3, 1, 1};
  Tensor<double> x = random_tensor<double>({2, 6, 4, 4}, 61);
  Tensor<double> yg = grouped_conv_forward(grouped, x);
  Tensor<double> yd = xconv_forward_fast(dense, x);
  CHECK(max_rel_diff(yg, yd) < 1e-15);
}

TEST_CASE("grouped conv outputs ignore the other group's inputs") {
  XConvLayer layer = make_xconv<double>(grouped_graph(8, 8, 2), 3, 1, 1, 8);
  Tensor<double> x = random_tensor<double>({1, 8, 5, 5}, 62);
  Tensor<double> y0 = grouped_conv_forward(layer, x);
  Tensor<double> perturbed = x;
  for (int u = 4; u < 8; ++u)  // group 1 channels
    for (int i = 0; i < 25; ++i)
      perturbed.data[(static_cast<std::size_t>(u) * 25) + i] += 10.0;
  Tensor<double> y1 = grouped_conv_forward(layer, perturbed);
  for (int v = 0; v < 4; ++v)  // group 0 outputs: exactly unchanged
    for (int i = 0; i < 25; ++i)
      CHECK(y0.at4(0, v, i / 5, i % 5) == y1.at4(0, v, i / 5, i % 5));
  CHECK_THROWS_AS(grouped_conv_forward(XConvLayer{dense_graph(4, 4), std::vector<double>(4 * 4, 0.0), 1, 1, 0},
                                       Tensor<double>({1, 4, 2, 2})),
                  Error);
}

TEST_CASE("perturbation response realizes the sensitivity map") {
  // Two sparse conv layers; output v responds to input channel u iff the
  // stacked graphs connect them.
  BipartiteGraph g1 = random_expander(8, 8, 2, 70);
  BipartiteGraph g2 = random_expander(8, 8, 2, 71);
  XConvLayer l1 = make_xconv<double>(g1, 3, 1, 1, 72);
  XConvLayer l2 = make_xconv<double>(g2, 3, 1, 1, 73);
  SensitivityMap map = sensitivity_map({{g1, g2}});

  Tensor<double> x = random_tensor<double>({1, 8, 4, 4}, 74);
  Tensor<double> base = xconv_forward_fast(l2, xconv_forward_fast(l1, x));
  for (int u = 0; u < 8; ++u) {
    Tensor<double> px = x;
    for (int i = 0; i < 16; ++i) px.data[static_cast<std::size_t>(u) * 16 + i] += 1.0;
    Tensor<double> out = xconv_forward_fast(l2, xconv_forward_fast(l1, px));
    for (int v = 0; v < 8; ++v) {
      double diff = 0;
      for (int i = 0; i < 16; ++i)
        diff = std::max(diff, std::abs(out.at4(0, v, i / 4, i % 4) -
                                       base.at4(0, v, i / 4, i % 4)));
      if (map.reachable(v, u))
        CHECK(diff > 1e-12);
      else
        CHECK(diff == 0.0);
    }
  }
}

TEST_CASE("float kernels agree with double within single precision") {
  XConvLayerT<float> lf = make_xconv<float>(random_expander(8, 8, 4, 80), 3, 1, 1, 81);
  XConvLayer ld{lf.graph, {}, 3, 1, 1};
  ld.kernels.assign(lf.kernels.begin(), lf.kernels.end());
  Tensor<float> xf = random_tensor<float>({2, 8, 6, 6}, 82);
  Tensor<double> xd({2, 8, 6, 6});
  xd.data.assign(xf.data.begin(), xf.data.end());
  Tensor<float> yf = xconv_forward_fast(lf, xf);
  Tensor<double> yd = xconv_forward_fast(ld, xd);
  for (std::size_t i = 0; i < yf.data.size(); ++i)
    CHECK(rel_err(yf.data[i], yd.data[i]) < 1e-4);
  Tensor<float> ys = xconv_forward_sparse(lf, xf);
  for (std::size_t i = 0; i < yf.data.size(); ++i)
    CHECK(rel_err(yf.data[i], ys.data[i]) < 1e-4);
}
