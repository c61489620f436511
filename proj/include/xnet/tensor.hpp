#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "xnet/error.hpp"

namespace xnet {

// Dense row-major array with shape metadata. Double precision by default;
// float is used by the reduced-precision training mode.
template <typename T>
struct Tensor {
  std::vector<long long> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<long long> s, T fill = T{}) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), fill);
  }

  static long long numel_of(const std::vector<long long>& s) {
    long long n = 1;
    for (long long d : s) {
      require(d >= 0, errc::shape_mismatch, "negative dimension");
      n *= d;
    }
    return n;
  }

  long long numel() const { return static_cast<long long>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  long long dim(int i) const { return shape[i]; }

  T& at2(long long i, long long j) { return data[i * shape[1] + j]; }
  T at2(long long i, long long j) const { return data[i * shape[1] + j]; }
  T& at4(long long b, long long c, long long y, long long x) {
    return data[((b * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }
  T at4(long long b, long long c, long long y, long long x) const {
    return data[((b * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

template <typename T>
bool all_finite(const Tensor<T>& t) {
  for (T v : t.data)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return true;
}

inline std::string shape_string(const std::vector<long long>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

}  // namespace xnet
