#include "xnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "xnet/rng.hpp"

namespace xnet {

namespace {

constexpr int kCifarDim = 32;
constexpr int kCifarChannels = 3;
constexpr int kCifarRecord = 1 + kCifarChannels * kCifarDim * kCifarDim;

void append_cifar_file(const std::string& path, const Cifar10Options& opt, Dataset& ds,
                       std::vector<double>& pixels) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::not_found, "cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const long long bytes = in.tellg();
  in.seekg(0);
  require(bytes > 0 && bytes % kCifarRecord == 0, errc::corrupt_file,
          "'" + path + "': size " + std::to_string(bytes) + " is not a multiple of " +
              std::to_string(kCifarRecord));
  const long long records = bytes / kCifarRecord;
  std::vector<unsigned char> buf(kCifarRecord);
  for (long long r = 0; r < records; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()), kCifarRecord);
    require(in.good(), errc::corrupt_file, "'" + path + "': short read");
    const int label = buf[0];
    require(label >= 0 && label < 10, errc::corrupt_file,
            "'" + path + "': label byte " + std::to_string(label) + " out of range");
    ds.labels.push_back(label);
    for (int c = 0; c < kCifarChannels; ++c)
      for (int i = 0; i < kCifarDim * kCifarDim; ++i) {
        double p = buf[1 + c * kCifarDim * kCifarDim + i] / 255.0;
        pixels.push_back((p - opt.mean[c]) / opt.stddev[c]);
      }
  }
}

}  // namespace

Dataset load_cifar10(const std::string& dir, const std::string& split,
                     const Cifar10Options& options) {
  require(split == "train" || split == "test", errc::precondition,
          "load_cifar10: split must be 'train' or 'test'");
  require(options.max_train_batches >= 1 && options.max_train_batches <= 5, errc::precondition,
          "load_cifar10: max_train_batches must lie in [1, 5]");
  Dataset ds;
  ds.split = split;
  ds.num_classes = 10;
  std::vector<double> pixels;
  if (split == "train") {
    for (int b = 1; b <= options.max_train_batches; ++b)
      append_cifar_file(dir + "/data_batch_" + std::to_string(b) + ".bin", options, ds, pixels);
  } else {
    append_cifar_file(dir + "/test_batch.bin", options, ds, pixels);
  }
  const long long n = static_cast<long long>(ds.labels.size());
  ds.images.shape = {n, kCifarChannels, kCifarDim, kCifarDim};
  ds.images.data = std::move(pixels);
  return ds;
}

Dataset synthetic_dataset(int n_samples, int n_classes, std::array<int, 3> image_shape,
                          std::uint64_t seed, double noise) {
  require(n_samples >= 1 && n_classes >= 1, errc::precondition,
          "synthetic_dataset: sizes must be positive");
  require(image_shape[0] >= 1 && image_shape[1] >= 1 && image_shape[2] >= 1, errc::precondition,
          "synthetic_dataset: image shape must be positive");
  const long long dim =
      static_cast<long long>(image_shape[0]) * image_shape[1] * image_shape[2];
  Rng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(n_classes) * dim);
  for (auto& m : means) m = rng.normal();

  Dataset ds;
  ds.split = "synthetic";
  ds.num_classes = n_classes;
  ds.images = Tensor<double>({n_samples, image_shape[0], image_shape[1], image_shape[2]});
  ds.labels.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const int label = i % n_classes;
    ds.labels[i] = label;
    double* dst = ds.images.data.data() + static_cast<std::size_t>(i) * dim;
    const double* mu = means.data() + static_cast<std::size_t>(label) * dim;
    for (long long d = 0; d < dim; ++d) dst[d] = mu[d] + noise * rng.normal();
  }
  return ds;
}

Dataset dataset_slice(const Dataset& ds, long long start, long long count) {
  require(start >= 0 && count >= 1 && start + count <= ds.size(), errc::precondition,
          "dataset_slice: range out of bounds");
  Dataset out;
  out.split = ds.split;
  out.num_classes = ds.num_classes;
  out.labels.assign(ds.labels.begin() + start, ds.labels.begin() + start + count);
  const long long sample =
      ds.images.dim(1) * ds.images.dim(2) * ds.images.dim(3);
  out.images.shape = {count, ds.images.dim(1), ds.images.dim(2), ds.images.dim(3)};
  out.images.data.assign(ds.images.data.begin() + start * sample,
                         ds.images.data.begin() + (start + count) * sample);
  return out;
}

namespace {

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> out = x;
  for (auto& v : out.data) v = v > T{} ? v : T{};
  return out;
}

template <typename T>
Tensor<T> maxpool2_forward(const Tensor<T>& x, std::vector<std::uint8_t>* argmax) {
  require(x.rank() == 4, errc::shape_mismatch, "pool expects a rank-4 tensor");
  const long long B = x.dim(0), C = x.dim(1);
  const int H = static_cast<int>(x.dim(2)), W = static_cast<int>(x.dim(3));
  const int Ho = H / 2, Wo = W / 2;
  require(Ho >= 1 && Wo >= 1, errc::shape_mismatch, "pool input too small");
  Tensor<T> out({B, C, Ho, Wo});
  if (argmax) argmax->assign(static_cast<std::size_t>(B) * C * Ho * Wo, 0);

#pragma omp parallel for collapse(2) schedule(static)
  for (long long b = 0; b < B; ++b)
    for (long long c = 0; c < C; ++c)
      for (int oy = 0; oy < Ho; ++oy)
        for (int ox = 0; ox < Wo; ++ox) {
          T best = x.at4(b, c, 2 * oy, 2 * ox);
          int pick = 0;
          for (int d = 1; d < 4; ++d) {
            T v = x.at4(b, c, 2 * oy + d / 2, 2 * ox + d % 2);
            if (v > best) {
              best = v;
              pick = d;
            }
          }
          out.at4(b, c, oy, ox) = best;
          if (argmax)
            (*argmax)[((b * C + c) * Ho + oy) * Wo + ox] = static_cast<std::uint8_t>(pick);
        }
  return out;
}

template <typename T>
Tensor<T> maxpool2_backward(const std::vector<long long>& in_shape,
                            const std::vector<std::uint8_t>& argmax, const Tensor<T>& grad) {
  Tensor<T> gin(in_shape);
  const long long B = grad.dim(0), C = grad.dim(1), Ho = grad.dim(2), Wo = grad.dim(3);
#pragma omp parallel for collapse(2) schedule(static)
  for (long long b = 0; b < B; ++b)
    for (long long c = 0; c < C; ++c)
      for (long long oy = 0; oy < Ho; ++oy)
        for (long long ox = 0; ox < Wo; ++ox) {
          const int pick = argmax[((b * C + c) * Ho + oy) * Wo + ox];
          gin.at4(b, c, 2 * oy + pick / 2, 2 * ox + pick % 2) += grad.at4(b, c, oy, ox);
        }
  return gin;
}

BipartiteGraph make_layer_graph(const LayerSpec& spec) {
  if (spec.type == "xconv" || spec.type == "xlinear")
    return random_expander(spec.n_in, spec.n_out, spec.degree, spec.graph_seed);
  if (spec.type == "grouped") return grouped_graph(spec.n_in, spec.n_out, spec.groups);
  return dense_graph(spec.n_in, spec.n_out);
}

// Mean softmax cross-entropy over the batch; returns the loss sum and fills
// grad with (softmax - onehot) / divisor.
template <typename T>
double softmax_ce(const Tensor<T>& logits, const int* labels, Tensor<T>* grad,
                  long long* correct, double divisor) {
  const long long B = logits.dim(0), K = logits.dim(1);
  double loss_sum = 0;
  for (long long b = 0; b < B; ++b) {
    const T* row = logits.data.data() + b * K;
    double m = row[0];
    long long arg = 0;
    for (long long k = 1; k < K; ++k)
      if (row[k] > m) {
        m = row[k];
        arg = k;
      }
    double z = 0;
    for (long long k = 0; k < K; ++k) z += std::exp(static_cast<double>(row[k]) - m);
    const int y = labels[b];
    loss_sum += -(static_cast<double>(row[y]) - m - std::log(z));
    if (correct && arg == y) ++*correct;
    if (grad)
      for (long long k = 0; k < K; ++k) {
        double p = std::exp(static_cast<double>(row[k]) - m) / z;
        grad->data[b * K + k] = static_cast<T>((p - (k == y ? 1.0 : 0.0)) / divisor);
      }
  }
  return loss_sum;
}

template <typename T>
void sgd_update(std::vector<T>& w, std::vector<T>& vel, const std::vector<T>& grad, double lr,
                double momentum, double weight_decay) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    double v = momentum * static_cast<double>(vel[i]) + static_cast<double>(grad[i]) +
               weight_decay * static_cast<double>(w[i]);
    vel[i] = static_cast<T>(v);
    w[i] = static_cast<T>(static_cast<double>(w[i]) - lr * v);
  }
}

}  // namespace

template <typename T>
long long Model<T>::param_count() const {
  long long total = 0;
  for (const auto& l : layers) {
    if (l.spec.is_conv()) total += static_cast<long long>(l.conv.kernels.size());
    if (l.spec.is_linear()) total += static_cast<long long>(l.lin.weights.size());
    total += static_cast<long long>(l.bias.size());
  }
  return total;
}

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& x, ForwardCache<T>* cache) const {
  Tensor<T> cur = x;
  if (cache) {
    cache->inputs.clear();
    cache->before_flatten.assign(layers.size(), {});
    cache->pool_argmax.assign(layers.size(), {});
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (layer.spec.is_linear() && cur.rank() == 4) {
      if (cache) cache->before_flatten[i] = cur.shape;
      cur.shape = {cur.dim(0), cur.numel() / cur.dim(0)};
    }
    if (cache) cache->inputs.push_back(cur);

    if (layer.spec.is_conv()) {
      cur = xconv_forward_fast(layer.conv, cur);
    } else if (layer.spec.is_linear()) {
      cur = xlinear_forward(layer.lin, cur);
      if (!layer.bias.empty()) {
        const long long B = cur.dim(0), K = cur.dim(1);
        for (long long b = 0; b < B; ++b)
          for (long long k = 0; k < K; ++k) cur.data[b * K + k] += layer.bias[k];
      }
    } else if (layer.spec.type == "relu") {
      cur = relu_forward(cur);
    } else {
      cur = maxpool2_forward(cur, cache ? &cache->pool_argmax[i] : nullptr);
    }
  }
  if (cache) cache->output = cur;
  return cur;
}

template <typename T>
void Model<T>::backward(const ForwardCache<T>& cache, const Tensor<T>& grad_output) {
  require(cache.inputs.size() == layers.size(), errc::precondition,
          "backward: cache does not match model");
  Tensor<T> grad = grad_output;
  for (int i = static_cast<int>(layers.size()) - 1; i >= 0; --i) {
    auto& layer = layers[i];
    const Tensor<T>& in = cache.inputs[i];
    if (layer.spec.is_conv()) {
      Tensor<T> gx, gk;
      xconv_backward(layer.conv, in, grad, gx, gk);
      for (std::size_t k = 0; k < layer.grad_w.size(); ++k) layer.grad_w[k] += gk.data[k];
      grad = std::move(gx);
    } else if (layer.spec.is_linear()) {
      if (!layer.bias.empty()) {
        const long long B = grad.dim(0), K = grad.dim(1);
        for (long long b = 0; b < B; ++b)
          for (long long k = 0; k < K; ++k) layer.grad_b[k] += grad.data[b * K + k];
      }
      Tensor<T> gx, gw;
      xlinear_backward(layer.lin, in, grad, gx, gw);
      for (std::size_t k = 0; k < layer.grad_w.size(); ++k) layer.grad_w[k] += gw.data[k];
      grad = std::move(gx);
    } else if (layer.spec.type == "relu") {
      for (std::size_t k = 0; k < grad.data.size(); ++k)
        if (in.data[k] <= T{}) grad.data[k] = T{};
    } else {
      grad = maxpool2_backward(in.shape, cache.pool_argmax[i], grad);
    }
    if (!cache.before_flatten[i].empty()) grad.shape = cache.before_flatten[i];
  }
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto& l : layers) {
    std::fill(l.grad_w.begin(), l.grad_w.end(), T{});
    std::fill(l.grad_b.begin(), l.grad_b.end(), T{});
  }
}

template <typename T>
void Model<T>::sgd_step(double lr, double momentum, double weight_decay) {
  for (auto& l : layers) {
    if (l.spec.is_conv()) sgd_update(l.conv.kernels, l.vel_w, l.grad_w, lr, momentum, weight_decay);
    if (l.spec.is_linear()) sgd_update(l.lin.weights, l.vel_w, l.grad_w, lr, momentum, weight_decay);
    if (!l.bias.empty()) sgd_update(l.bias, l.vel_b, l.grad_b, lr, momentum, weight_decay);
  }
}

template <typename T>
Model<T> build_model(const ArchSpec& arch, std::uint64_t init_seed) {
  check_arch(arch);
  Model<T> m;
  m.arch = arch;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& spec = arch.layers[i];
    ModelLayer<T> layer;
    layer.spec = spec;
    const std::uint64_t lseed = mix64(init_seed + 0x9e3779b97f4a7c15ull * (i + 1));
    if (spec.is_conv()) {
      layer.conv = make_xconv<T>(make_layer_graph(spec), spec.window, spec.stride,
                                 spec.effective_padding(), lseed);
      layer.grad_w.assign(layer.conv.kernels.size(), T{});
      layer.vel_w.assign(layer.conv.kernels.size(), T{});
    } else if (spec.is_linear()) {
      layer.lin = make_xlinear<T>(make_layer_graph(spec), lseed);
      layer.grad_w.assign(layer.lin.weights.size(), T{});
      layer.vel_w.assign(layer.lin.weights.size(), T{});
      if (spec.bias) {
        layer.bias.assign(spec.n_out, T{});
        layer.grad_b.assign(spec.n_out, T{});
        layer.vel_b.assign(spec.n_out, T{});
      }
    }
    m.layers.push_back(std::move(layer));
  }
  return m;
}

namespace {

constexpr char kModelMagic[9] = "XNETMDL1";

template <typename T>
void write_array(std::ofstream& out, const std::vector<T>& v) {
  std::uint64_t n = v.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  std::vector<double> tmp(v.begin(), v.end());
  out.write(reinterpret_cast<const char*>(tmp.data()),
            static_cast<std::streamsize>(tmp.size() * sizeof(double)));
}

template <typename T>
void read_array(std::ifstream& in, std::vector<T>& v, const std::string& path) {
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  require(in.good() && n == v.size(), errc::corrupt_file,
          "'" + path + "': model payload does not match architecture");
  std::vector<double> tmp(n);
  in.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(n * sizeof(double)));
  require(in.good(), errc::corrupt_file, "'" + path + "': short read");
  for (std::uint64_t i = 0; i < n; ++i) v[i] = static_cast<T>(tmp[i]);
}

}  // namespace

template <typename T>
void Model<T>::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::not_found, "cannot open '" + path + "' for writing");
  out.write(kModelMagic, 8);
  const std::string arch_json = arch_to_json(arch).dump();
  std::uint64_t len = arch_json.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(arch_json.data(), static_cast<std::streamsize>(len));
  for (const auto& l : layers) {
    if (l.spec.is_conv()) write_array(out, l.conv.kernels);
    if (l.spec.is_linear()) write_array(out, l.lin.weights);
    if (!l.bias.empty()) write_array(out, l.bias);
  }
  require(out.good(), errc::corrupt_file, "short write to '" + path + "'");
}

template <typename T>
Model<T> Model<T>::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::not_found, "cannot open '" + path + "'");
  char magic[8] = {};
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kModelMagic, 8) == 0, errc::corrupt_file,
          "'" + path + "' is not a model snapshot");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  require(in.good() && len < (1ull << 24), errc::corrupt_file, "'" + path + "': bad header");
  std::string arch_json(len, '\0');
  in.read(arch_json.data(), static_cast<std::streamsize>(len));
  require(in.good(), errc::corrupt_file, "'" + path + "': short read");
  Model<T> m = build_model<T>(arch_from_json(nlohmann::json::parse(arch_json)), 0);
  for (auto& l : m.layers) {
    if (l.spec.is_conv()) read_array(in, l.conv.kernels, path);
    if (l.spec.is_linear()) read_array(in, l.lin.weights, path);
    if (!l.bias.empty()) read_array(in, l.bias, path);
  }
  return m;
}

namespace {

// Copies sample `src` of `ds` into row `dst_row` of the batch tensor,
// optionally with pad-4 random crop and horizontal flip.
template <typename T>
void fill_sample(const Dataset& ds, long long src, Tensor<T>& batch, long long dst_row,
                 Rng* aug) {
  const long long C = ds.images.dim(1), H = ds.images.dim(2), W = ds.images.dim(3);
  const double* in = ds.images.data.data() + src * C * H * W;
  T* out = batch.data.data() + dst_row * C * H * W;
  if (!aug) {
    for (long long i = 0; i < C * H * W; ++i) out[i] = static_cast<T>(in[i]);
    return;
  }
  const int dy = static_cast<int>(aug->below(9)) - 4;
  const int dx = static_cast<int>(aug->below(9)) - 4;
  const bool flip = aug->below(2) == 1;
  for (long long c = 0; c < C; ++c)
    for (long long y = 0; y < H; ++y)
      for (long long x = 0; x < W; ++x) {
        const long long sy = y + dy;
        const long long sx = (flip ? W - 1 - x : x) + dx;
        double v = 0;
        if (sy >= 0 && sy < H && sx >= 0 && sx < W) v = in[(c * H + sy) * W + sx];
        out[(c * H + y) * W + x] = static_cast<T>(v);
      }
}

void check_dataset(const Dataset& ds, const char* what) {
  require(ds.size() >= 1, errc::precondition, std::string(what) + " dataset is empty");
  require(ds.images.rank() == 4, errc::precondition,
          std::string(what) + " dataset images must be [N, C, H, W]");
  require(static_cast<long long>(ds.labels.size()) == ds.size(), errc::precondition,
          std::string(what) + " dataset: image/label count mismatch");
  for (int y : ds.labels)
    require(y >= 0 && y < ds.num_classes, errc::precondition,
            std::string(what) + " dataset: label out of range");
}

}  // namespace

template <typename T>
TrainResult<T> train(const ArchSpec& arch, const Dataset& train_set, const Dataset* test_set,
                     const TrainConfig& config) {
  check_dataset(train_set, "train");
  if (test_set) check_dataset(*test_set, "test");
  require(config.epochs >= 0 && config.batch_size >= 1, errc::precondition,
          "train: bad epochs/batch_size");

  // The classifier head must match the label space.
  int head = 0;
  for (const auto& l : arch.layers)
    if (l.has_graph()) head = l.n_out;
  require(head == train_set.num_classes, errc::invalid_arch,
          "architecture emits " + std::to_string(head) + " logits for " +
              std::to_string(train_set.num_classes) + " classes");

  TrainResult<T> result{{}, build_model<T>(arch, config.seed)};
  Model<T>& model = result.model;

  const long long N = train_set.size();
  const long long C = train_set.images.dim(1), H = train_set.images.dim(2),
                  W = train_set.images.dim(3);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    double lr = config.learning_rate;
    if (config.step_decay) {
      if (epoch > (3 * config.epochs) / 4)
        lr *= 0.01;
      else if (epoch > config.epochs / 2)
        lr *= 0.1;
    }

    Rng shuffle_rng(mix64(config.seed ^ mix64(static_cast<std::uint64_t>(epoch))));
    std::vector<int> order(N);
    for (long long i = 0; i < N; ++i) order[i] = static_cast<int>(i);
    shuffle_rng.shuffle(order);
    Rng aug_rng(mix64(config.seed + 0x5851f42d4c957f2dull * epoch));

    double loss_sum = 0;
    long long correct = 0;
    ForwardCache<T> cache;
    for (long long start = 0; start < N; start += config.batch_size) {
      const long long B = std::min<long long>(config.batch_size, N - start);
      Tensor<T> xb({B, C, H, W});
      std::vector<int> yb(B);
      for (long long b = 0; b < B; ++b) {
        fill_sample(train_set, order[start + b], xb, b, config.augment ? &aug_rng : nullptr);
        yb[b] = train_set.labels[order[start + b]];
      }
      Tensor<T> logits = model.forward(xb, &cache);
      Tensor<T> grad(logits.shape);
      const double batch_loss =
          softmax_ce(logits, yb.data(), &grad, &correct, static_cast<double>(B));
      if (!std::isfinite(batch_loss))
        fail(errc::divergence, "training diverged at epoch " + std::to_string(epoch));
      loss_sum += batch_loss;
      model.zero_grad();
      model.backward(cache, grad);
      model.sgd_step(lr, config.momentum, config.weight_decay);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(N);
    m.train_acc = static_cast<double>(correct) / static_cast<double>(N);
    if (test_set) {
      EvalResult ev = evaluate(model, *test_set, std::max(config.batch_size, 64));
      m.test_loss = ev.loss;
      m.test_acc = ev.accuracy;
    }
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.metrics.push_back(m);
  }
  return result;
}

template <typename T>
EvalResult evaluate(const Model<T>& model, const Dataset& dataset, int batch_size) {
  check_dataset(dataset, "eval");
  const long long N = dataset.size();
  const long long C = dataset.images.dim(1), H = dataset.images.dim(2),
                  W = dataset.images.dim(3);
  double loss_sum = 0;
  long long correct = 0;
  for (long long start = 0; start < N; start += batch_size) {
    const long long B = std::min<long long>(batch_size, N - start);
    Tensor<T> xb({B, C, H, W});
    for (long long b = 0; b < B; ++b) fill_sample(dataset, start + b, xb, b, nullptr);
    Tensor<T> logits = model.forward(xb, nullptr);
    loss_sum += softmax_ce<T>(logits, dataset.labels.data() + start, nullptr, &correct,
                              static_cast<double>(B));
  }
  return {static_cast<double>(correct) / static_cast<double>(N),
          loss_sum / static_cast<double>(N)};
}

template <typename T>
SeedStats multi_seed_report(const ArchSpec& arch, const Dataset& train_set,
                            const Dataset& test_set, const TrainConfig& config,
                            const std::vector<std::uint64_t>& seeds) {
  require(seeds.size() >= 2, errc::precondition, "multi_seed_report: need at least two seeds");
  SeedStats stats;
  for (std::uint64_t s : seeds) {
    ArchSpec resampled = arch;
    for (auto& l : resampled.layers)
      if (l.type == "xconv" || l.type == "xlinear") l.graph_seed = mix64(l.graph_seed ^ mix64(s + 1));
    TrainConfig cfg = config;
    cfg.seed = s;
    TrainResult<T> run = train<T>(resampled, train_set, &test_set, cfg);
    stats.accuracies.push_back(run.metrics.empty() ? 0.0 : run.metrics.back().test_acc);
  }
  const auto& a = stats.accuracies;
  stats.min = *std::min_element(a.begin(), a.end());
  stats.max = *std::max_element(a.begin(), a.end());
  double sum = 0;
  for (double v : a) sum += v;
  stats.mean = sum / static_cast<double>(a.size());
  double sq = 0;
  for (double v : a) sq += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(sq / static_cast<double>(a.size() - 1));
  return stats;
}

void write_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& metrics) {
  std::ofstream out(path);
  require(out.good(), errc::not_found, "cannot open '" + path + "' for writing");
  out << "epoch,train_loss,train_acc,test_loss,test_acc,wall_seconds\n";
  char buf[192];
  for (const auto& m : metrics) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.3f\n", m.epoch, m.train_loss,
                  m.train_acc, m.test_loss, m.test_acc, m.wall_seconds);
    out << buf;
  }
  require(out.good(), errc::corrupt_file, "short write to '" + path + "'");
}

#define XNET_INSTANTIATE_TRAINER(T)                                                          \
  template struct Model<T>;                                                                  \
  template Model<T> build_model<T>(const ArchSpec&, std::uint64_t);                          \
  template TrainResult<T> train<T>(const ArchSpec&, const Dataset&, const Dataset*,          \
                                   const TrainConfig&);                                      \
  template EvalResult evaluate<T>(const Model<T>&, const Dataset&, int);                     \
  template SeedStats multi_seed_report<T>(const ArchSpec&, const Dataset&, const Dataset&,   \
                                          const TrainConfig&, const std::vector<std::uint64_t>&);

XNET_INSTANTIATE_TRAINER(double)
XNET_INSTANTIATE_TRAINER(float)
#undef XNET_INSTANTIATE_TRAINER

}  // namespace xnet
