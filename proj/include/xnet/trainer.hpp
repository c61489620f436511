#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xnet/arch.hpp"
#include "xnet/layers.hpp"
#include "xnet/tensor.hpp"

namespace xnet {

struct Dataset {
  Tensor<double> images;  // [N, channels, H, W]
  std::vector<int> labels;
  int num_classes = 0;
  std::string split;

  long long size() const { return images.rank() ? images.dim(0) : 0; }
};

struct Cifar10Options {
  std::array<double, 3> mean{0.4914, 0.4822, 0.4465};
  std::array<double, 3> stddev{0.2470, 0.2435, 0.2616};
  int max_train_batches = 5;  // 1..5; 1 gives the 10k-image subset
};

// Reads the binary batch format: 3073-byte records, one label byte followed
// by 3072 channel-planar pixels. split is "train" (data_batch_*.bin) or
// "test" (test_batch.bin). Pixels are scaled to [0,1] and standardized per
// channel with the constants in `options`.
Dataset load_cifar10(const std::string& dir, const std::string& split,
                     const Cifar10Options& options = {});

// Class-conditional Gaussian blobs, linearly separable by construction.
// Deterministic in `seed`; `noise` scales the per-pixel deviation from the
// class mean.
Dataset synthetic_dataset(int n_samples, int n_classes, std::array<int, 3> image_shape,
                          std::uint64_t seed, double noise = 0.5);

// Copy of a contiguous sample range, e.g. to carve a train/test split out of
// one generated dataset.
Dataset dataset_slice(const Dataset& ds, long long start, long long count);

struct TrainConfig {
  int epochs = 20;
  int batch_size = 64;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  bool step_decay = false;  // x0.1 at 50% and 75% of the epoch budget
  bool augment = false;     // pad-4 random crop + horizontal flip
};

template <typename T>
struct ModelLayer {
  LayerSpec spec;
  XConvLayerT<T> conv;   // engaged when spec.is_conv()
  XLinearLayerT<T> lin;  // engaged when spec.is_linear()
  std::vector<T> bias;
  std::vector<T> grad_w, grad_b, vel_w, vel_b;
};

template <typename T>
struct ForwardCache {
  std::vector<Tensor<T>> inputs;                      // input seen by each layer
  std::vector<std::vector<long long>> before_flatten; // original shape, when flattened
  std::vector<std::vector<std::uint8_t>> pool_argmax;
  Tensor<T> output;
};

template <typename T>
struct Model {
  ArchSpec arch;
  std::vector<ModelLayer<T>> layers;

  long long param_count() const;
  Tensor<T> forward(const Tensor<T>& x, ForwardCache<T>* cache = nullptr) const;
  void backward(const ForwardCache<T>& cache, const Tensor<T>& grad_output);
  void zero_grad();
  void sgd_step(double lr, double momentum, double weight_decay);
  void save(const std::string& path) const;
  static Model load(const std::string& path);
};

// Builds graphs from each layer's graph_seed and initializes weights from
// init_seed. The same seeds give the same model in either precision.
template <typename T>
Model<T> build_model(const ArchSpec& arch, std::uint64_t init_seed);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0, train_acc = 0;
  double test_loss = 0, test_acc = 0;
  double wall_seconds = 0;
};

template <typename T>
struct TrainResult {
  std::vector<EpochMetrics> metrics;
  Model<T> model;
};

// SGD with momentum and weight decay on softmax cross-entropy. Fully
// deterministic for a fixed (arch, datasets, config) in double precision;
// augmentation draws from the same seeded stream and is excluded from the
// determinism contract.
template <typename T>
TrainResult<T> train(const ArchSpec& arch, const Dataset& train_set, const Dataset* test_set,
                     const TrainConfig& config);

struct EvalResult {
  double accuracy = 0;
  double loss = 0;
};

template <typename T>
EvalResult evaluate(const Model<T>& model, const Dataset& dataset, int batch_size = 256);

struct SeedStats {
  double mean = 0, stddev = 0, min = 0, max = 0;
  std::vector<double> accuracies;
};

// Independent runs with per-seed graph resampling and initialization;
// summarizes final test accuracy. Needs at least two seeds.
template <typename T>
SeedStats multi_seed_report(const ArchSpec& arch, const Dataset& train_set,
                            const Dataset& test_set, const TrainConfig& config,
                            const std::vector<std::uint64_t>& seeds);

void write_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& metrics);

}  // namespace xnet
