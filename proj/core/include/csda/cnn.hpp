#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csda/aligned.hpp"
#include "csda/dataset.hpp"
#include "csda/rng.hpp"

namespace csda {

// Network shape: conv1d (valid, stride 1) -> ReLU -> flatten -> dense ->
// ReLU -> dense -> softmax. Defaults are the detector architecture used for
// the 1000-sample windows; the sizes are configurable so tiny instances can
// be gradient-checked cheaply.
struct CnnConfig {
  std::size_t input_length = 1000;
  std::size_t conv_filters = 64;
  std::size_t kernel = 5;
  std::size_t hidden = 128;
  std::size_t classes = 2;

  std::size_t conv_output() const { return input_length - kernel + 1; }
  std::size_t flat_size() const { return conv_output() * conv_filters; }
  void validate() const;
};

// All trainable parameters in one flat float64 buffer, in declared order:
//   conv kernels [filters][kernel], conv biases [filters],
//   w1 [flat][hidden], b1 [hidden], w2 [hidden][classes], b2 [classes].
// Dense weights are [input][output]: y_j = sum_i W[i][j] x_i + b_j.
struct ParamSet {
  CnnConfig config;
  AlignedVector<double> data;

  static ParamSet zeros(const CnnConfig& config);

  std::size_t size() const { return data.size(); }

  std::span<double> conv_kernels();
  std::span<double> conv_bias();
  std::span<double> w1();
  std::span<double> b1();
  std::span<double> w2();
  std::span<double> b2();
  std::span<const double> conv_kernels() const;
  std::span<const double> conv_bias() const;
  std::span<const double> w1() const;
  std::span<const double> b1() const;
  std::span<const double> w2() const;
  std::span<const double> b2() const;
};

// Glorot-style uniform init, U(-a, a) with a = sqrt(6 / (fan_in + fan_out))
// per layer; biases start at zero.
ParamSet init_params(const CnnConfig& config, RngStream& rng);

// --- Layer primitives (exposed for tests and gradient checking) -------------

// Valid cross-correlation, stride 1. Output is row-major [t][filter],
// out[t][f] = bias[f] + sum_i input[t + i] * kernel[f][i].
std::vector<double> conv1d_forward(std::span<const double> input,
                                   std::span<const double> kernels,
                                   std::span<const double> biases,
                                   std::size_t filters, std::size_t kernel);

// y = W^T x + b with W row-major [in][out].
std::vector<double> dense_forward(std::span<const double> x,
                                  std::span<const double> w,
                                  std::span<const double> b, std::size_t in,
                                  std::size_t out);

// max(0, x); the backward pass uses subgradient 0 at exactly 0.
void relu_inplace(std::span<double> x);

struct SoftmaxResult {
  std::vector<double> probabilities;
  double loss;  // -log p[label]
};

// Numerically stabilized softmax + categorical cross-entropy. The fused
// backward gradient at the logits is (p - onehot(label)).
SoftmaxResult softmax_cce(std::span<const double> logits, std::size_t label);

// --- Training ----------------------------------------------------------------

struct TrainOptions {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct BatchGradients {
  ParamSet grads;   // d(mean batch loss)/d(param), same layout as ParamSet
  double loss = 0;  // mean batch loss
  std::size_t correct = 0;
};

// Forward + backward over a row-major batch (rows x input_length).
BatchGradients backward(const ParamSet& params,
                        std::span<const double> batch_values,
                        std::span<const int> batch_labels, std::size_t rows);

double batch_loss(const ParamSet& params, std::span<const double> batch_values,
                  std::span<const int> batch_labels, std::size_t rows);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  AlignedVector<double> m;  // first moment, flat over ParamSet::data
  AlignedVector<double> v;  // second moment

  static AdamState for_params(const ParamSet& params);
};

// One bias-corrected Adam update in place.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state,
               double learning_rate);

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
};

class CnnModel {
 public:
  CnnModel() = default;
  CnnModel(ParamSet params, Standardization standardization,
           TrainOptions options)
      : params_(std::move(params)),
        standardization_(standardization),
        options_(options) {}

  // Classifies a raw window (standardizes internally with the persisted
  // stats). Probabilities sum to 1; an exact tie reports class 0.
  std::pair<int, std::vector<double>> predict_raw(
      std::span<const double> window) const;
  std::pair<int, std::vector<double>> predict_standardized(
      std::span<const double> window) const;

  const ParamSet& params() const { return params_; }
  const CnnConfig& config() const { return params_.config; }
  const Standardization& standardization() const { return standardization_; }
  const TrainOptions& options() const { return options_; }

  // Versioned binary: magic + header + little-endian float64 parameter
  // blocks in declared order. Round-trips exactly.
  void save(const std::filesystem::path& path) const;
  static CnnModel load(const std::filesystem::path& path);

 private:
  ParamSet params_;
  Standardization standardization_;
  TrainOptions options_;
};

// Mini-batch Adam training on the dataset's train split. Deterministic under
// (dataset bytes, options): init and shuffle order derive from options.seed.
CnnModel train_cnn(const Dataset& ds, const TrainOptions& options,
                   TrainLog* log = nullptr);

// As above but with a non-default architecture (used by reduced-length runs).
CnnModel train_cnn_with_config(const Dataset& ds, const CnnConfig& config,
                               const TrainOptions& options,
                               TrainLog* log = nullptr);

}  // namespace csda
