#pragma once

// Shared oracle helpers for the test suites. Everything here is test-only
// and independent of the library kernels it checks.

#include <cmath>
#include <cstdint>
#include <functional>

#include "xnet/rng.hpp"
#include "xnet/tensor.hpp"

namespace xnet::testutil {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

template <typename T>
Tensor<T> random_tensor(std::vector<long long> shape, std::uint64_t seed, double lo = -1.0,
                        double hi = 1.0) {
  Tensor<T> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

// Central finite differences of scalar_fn around x, one coordinate at a time.
inline std::vector<double> central_differences(std::vector<double>& x,
                                               const std::function<double()>& scalar_fn,
                                               double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = scalar_fn();
    x[i] = keep - h;
    const double down = scalar_fn();
    x[i] = keep;
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

// max over coordinates of rel_err(analytic, finite-difference)
inline double max_grad_err(const std::vector<double>& analytic,
                           const std::vector<double>& numeric) {
  double worst = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, rel_err(analytic[i], numeric[i]));
  return worst;
}

}  // namespace xnet::testutil
