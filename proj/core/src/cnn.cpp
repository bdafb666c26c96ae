#include "csda/cnn.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "csda/units.hpp"

namespace csda {

namespace {

using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using CMapRM = Eigen::Map<const MatrixRM>;
using Eigen::VectorXd;

// Training draws from dedicated stream ids so they can never collide with
// the per-window streams of a dataset generated under the same seed.
constexpr std::uint64_t kInitStream = 1ULL << 62;
constexpr std::uint64_t kShuffleStreamBase = (1ULL << 62) + 1;

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidParameter(std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

void CnnConfig::validate() const {
  require(kernel >= 1, "kernel size must be >= 1");
  require(input_length >= kernel,
          "input length " + std::to_string(input_length) +
              " is shorter than the kernel (" + std::to_string(kernel) + ")");
  require(conv_filters >= 1, "need at least one conv filter");
  require(hidden >= 1, "need at least one hidden unit");
  require(classes >= 2, "need at least two classes");
}

ParamSet ParamSet::zeros(const CnnConfig& config) {
  config.validate();
  ParamSet p;
  p.config = config;
  const std::size_t total = config.conv_filters * config.kernel +
                            config.conv_filters +
                            config.flat_size() * config.hidden + config.hidden +
                            config.hidden * config.classes + config.classes;
  p.data.assign(total, 0.0);
  return p;
}

namespace {

struct Layout {
  std::size_t conv_kernels, conv_kernels_n;
  std::size_t conv_bias, conv_bias_n;
  std::size_t w1, w1_n;
  std::size_t b1, b1_n;
  std::size_t w2, w2_n;
  std::size_t b2, b2_n;

  explicit Layout(const CnnConfig& c) {
    conv_kernels = 0;
    conv_kernels_n = c.conv_filters * c.kernel;
    conv_bias = conv_kernels + conv_kernels_n;
    conv_bias_n = c.conv_filters;
    w1 = conv_bias + conv_bias_n;
    w1_n = c.flat_size() * c.hidden;
    b1 = w1 + w1_n;
    b1_n = c.hidden;
    w2 = b1 + b1_n;
    w2_n = c.hidden * c.classes;
    b2 = w2 + w2_n;
    b2_n = c.classes;
  }
};

}  // namespace

#define CSDA_PARAM_SPAN(NAME)                                          \
  std::span<double> ParamSet::NAME() {                                 \
    const Layout l(config);                                            \
    return {data.data() + l.NAME, l.NAME##_n};                         \
  }                                                                    \
  std::span<const double> ParamSet::NAME() const {                     \
    const Layout l(config);                                            \
    return {data.data() + l.NAME, l.NAME##_n};                         \
  }

CSDA_PARAM_SPAN(conv_kernels)
CSDA_PARAM_SPAN(conv_bias)
CSDA_PARAM_SPAN(w1)
CSDA_PARAM_SPAN(b1)
CSDA_PARAM_SPAN(w2)
CSDA_PARAM_SPAN(b2)

#undef CSDA_PARAM_SPAN

namespace {

void fill_uniform(std::span<double> out, double amplitude, RngStream& rng) {
  for (double& v : out) v = (2.0 * rng.uniform() - 1.0) * amplitude;
}

double glorot(double fan_in, double fan_out) {
  return std::sqrt(6.0 / (fan_in + fan_out));
}

}  // namespace

ParamSet init_params(const CnnConfig& config, RngStream& rng) {
  ParamSet p = ParamSet::zeros(config);
  const double k = static_cast<double>(config.kernel);
  const double f = static_cast<double>(config.conv_filters);
  fill_uniform(p.conv_kernels(), glorot(k, k * f), rng);
  fill_uniform(p.w1(), glorot(static_cast<double>(config.flat_size()),
                              static_cast<double>(config.hidden)),
               rng);
  fill_uniform(p.w2(), glorot(static_cast<double>(config.hidden),
                              static_cast<double>(config.classes)),
               rng);
  return p;
}

std::vector<double> conv1d_forward(std::span<const double> input,
                                   std::span<const double> kernels,
                                   std::span<const double> biases,
                                   std::size_t filters, std::size_t kernel) {
  require_shape(input.size() >= kernel,
                "conv input length " + std::to_string(input.size()) +
                    " is shorter than the kernel (" + std::to_string(kernel) +
                    ")");
  require_shape(kernels.size() == filters * kernel, "kernel buffer size mismatch");
  require_shape(biases.size() == filters, "conv bias size mismatch");
  const std::size_t out_len = input.size() - kernel + 1;
  std::vector<double> out(out_len * filters);
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < filters; ++f) {
      double acc = biases[f];
      for (std::size_t i = 0; i < kernel; ++i) {
        acc += input[t + i] * kernels[f * kernel + i];
      }
      out[t * filters + f] = acc;
    }
  }
  return out;
}

std::vector<double> dense_forward(std::span<const double> x,
                                  std::span<const double> w,
                                  std::span<const double> b, std::size_t in,
                                  std::size_t out) {
  require_shape(x.size() == in, "dense input size mismatch");
  require_shape(w.size() == in * out, "dense weight size mismatch");
  require_shape(b.size() == out, "dense bias size mismatch");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < out; ++j) y[j] += w[i * out + j] * xi;
  }
  return y;
}

void relu_inplace(std::span<double> x) {
  for (double& v : x) v = v > 0.0 ? v : 0.0;
}

SoftmaxResult softmax_cce(std::span<const double> logits, std::size_t label) {
  require(label < logits.size(), "label out of range");
  check_finite(logits, "logits");
  const double top = *std::max_element(logits.begin(), logits.end());
  SoftmaxResult r{std::vector<double>(logits.size()), 0.0};
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.probabilities[i] = std::exp(logits[i] - top);
    denom += r.probabilities[i];
  }
  for (double& p : r.probabilities) p /= denom;
  // -log p computed from the stabilized pieces to stay finite when one
  // logit dominates completely.
  r.loss = std::log(denom) - (logits[label] - top);
  return r;
}

namespace {

// Shared forward pass over a batch. Fills activations needed by backward.
struct ForwardPass {
  MatrixRM im2col;  // (B*T) x K
  MatrixRM z0;      // (B*T) x F, pre-ReLU conv output
  MatrixRM a0;      // (B*T) x F, post-ReLU conv output
  MatrixRM a1;      // B x H, post-ReLU hidden
  MatrixRM z1;      // B x H, pre-ReLU hidden
  MatrixRM probs;   // B x C
  double mean_loss = 0.0;
  std::size_t correct = 0;
};

ForwardPass run_forward(const ParamSet& params,
                        std::span<const double> batch_values,
                        std::span<const int> batch_labels, std::size_t rows) {
  const CnnConfig& cfg = params.config;
  cfg.validate();
  require_shape(batch_values.size() == rows * cfg.input_length,
                "batch buffer does not match rows * input_length");
  require_shape(batch_labels.size() == rows, "batch labels size mismatch");
  check_finite(batch_values, "network input");

  const auto b = static_cast<Eigen::Index>(rows);
  const auto len = static_cast<Eigen::Index>(cfg.input_length);
  const auto t_out = static_cast<Eigen::Index>(cfg.conv_output());
  const auto filters = static_cast<Eigen::Index>(cfg.conv_filters);
  const auto kernel = static_cast<Eigen::Index>(cfg.kernel);
  const auto flat = static_cast<Eigen::Index>(cfg.flat_size());
  const auto hidden = static_cast<Eigen::Index>(cfg.hidden);
  const auto classes = static_cast<Eigen::Index>(cfg.classes);

  // Owned, Eigen-aligned copy of the input; the caller's buffer alignment
  // must not influence any vectorized code path.
  MatrixRM x = CMapRM(batch_values.data(), b, len);
  CMapRM kmat(params.conv_kernels().data(), filters, kernel);
  CMapRM w1(params.w1().data(), flat, hidden);
  CMapRM w2(params.w2().data(), hidden, classes);
  Eigen::Map<const VectorXd> conv_bias(params.conv_bias().data(), filters);
  Eigen::Map<const VectorXd> b1(params.b1().data(), hidden);
  Eigen::Map<const VectorXd> b2(params.b2().data(), classes);

  ForwardPass fp;
  fp.im2col.resize(b * t_out, kernel);
  for (Eigen::Index r = 0; r < b; ++r) {
    const double* row = x.row(r).data();
    double* dst = fp.im2col.data() +
                  static_cast<std::size_t>(r * t_out) *
                      static_cast<std::size_t>(kernel);
    for (Eigen::Index t = 0; t < t_out; ++t) {
      std::memcpy(dst, row + t, static_cast<std::size_t>(kernel) * sizeof(double));
      dst += kernel;
    }
  }

  fp.z0.noalias() = fp.im2col * kmat.transpose();
  fp.z0.rowwise() += conv_bias.transpose();

  // ReLU'd conv activations viewed as the flattened (B x flat) input of the
  // first dense layer; flat index is t * filters + f.
  fp.a0 = fp.z0.cwiseMax(0.0);
  MapRM a0_flat(fp.a0.data(), b, flat);

  fp.z1.noalias() = a0_flat * w1;
  fp.z1.rowwise() += b1.transpose();
  fp.a1 = fp.z1.cwiseMax(0.0);

  MatrixRM logits(b, classes);
  logits.noalias() = fp.a1 * w2;
  logits.rowwise() += b2.transpose();

  fp.probs.resize(b, classes);
  double loss_sum = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    const double top = logits.row(r).maxCoeff();
    if (!std::isfinite(top)) throw InvalidParameter("logits are non-finite");
    fp.probs.row(r) = (logits.row(r).array() - top).exp();
    const double denom = fp.probs.row(r).sum();
    fp.probs.row(r) /= denom;
    const int label = batch_labels[static_cast<std::size_t>(r)];
    require(label >= 0 && label < classes, "label out of range");
    loss_sum += std::log(denom) - (logits(r, label) - top);
    Eigen::Index argmax = 0;
    fp.probs.row(r).maxCoeff(&argmax);
    // Exact ties report the lowest class index.
    if (fp.probs(r, 0) == fp.probs(r, argmax)) argmax = 0;
    if (argmax == label) ++fp.correct;
  }
  fp.mean_loss = loss_sum / static_cast<double>(rows);
  return fp;
}

}  // namespace

double batch_loss(const ParamSet& params, std::span<const double> batch_values,
                  std::span<const int> batch_labels, std::size_t rows) {
  return run_forward(params, batch_values, batch_labels, rows).mean_loss;
}

BatchGradients backward(const ParamSet& params,
                        std::span<const double> batch_values,
                        std::span<const int> batch_labels, std::size_t rows) {
  const CnnConfig& cfg = params.config;
  ForwardPass fp = run_forward(params, batch_values, batch_labels, rows);

  const auto b = static_cast<Eigen::Index>(rows);
  const auto t_out = static_cast<Eigen::Index>(cfg.conv_output());
  const auto filters = static_cast<Eigen::Index>(cfg.conv_filters);
  const auto flat = static_cast<Eigen::Index>(cfg.flat_size());
  const auto hidden = static_cast<Eigen::Index>(cfg.hidden);
  const auto classes = static_cast<Eigen::Index>(cfg.classes);

  CMapRM w1(params.w1().data(), flat, hidden);
  CMapRM w2(params.w2().data(), hidden, classes);

  BatchGradients out{ParamSet::zeros(cfg), fp.mean_loss, fp.correct};

  MapRM g_kernels(out.grads.conv_kernels().data(), filters,
                  static_cast<Eigen::Index>(cfg.kernel));
  Eigen::Map<VectorXd> g_conv_bias(out.grads.conv_bias().data(), filters);
  MapRM g_w1(out.grads.w1().data(), flat, hidden);
  Eigen::Map<VectorXd> g_b1(out.grads.b1().data(), hidden);
  MapRM g_w2(out.grads.w2().data(), hidden, classes);
  Eigen::Map<VectorXd> g_b2(out.grads.b2().data(), classes);

  // d(mean loss)/d(logits) = (p - onehot) / B.
  MatrixRM d_logits = fp.probs;
  for (Eigen::Index r = 0; r < b; ++r) {
    d_logits(r, batch_labels[static_cast<std::size_t>(r)]) -= 1.0;
  }
  d_logits /= static_cast<double>(rows);

  g_w2.noalias() = fp.a1.transpose() * d_logits;
  g_b2 = d_logits.colwise().sum();

  MatrixRM d_z1(b, hidden);
  d_z1.noalias() = d_logits * w2.transpose();
  d_z1 = (fp.z1.array() > 0.0).select(d_z1, 0.0);

  MapRM a0_flat(fp.a0.data(), b, flat);
  g_w1.noalias() = a0_flat.transpose() * d_z1;
  g_b1 = d_z1.colwise().sum();

  MatrixRM d_a0_flat(b, flat);
  d_a0_flat.noalias() = d_z1 * w1.transpose();
  MapRM d_z0(d_a0_flat.data(), b * t_out, filters);
  d_z0 = (fp.z0.array() > 0.0).select(d_z0, 0.0);

  g_kernels.noalias() = d_z0.transpose() * fp.im2col;
  g_conv_bias = d_z0.colwise().sum();

  return out;
}

AdamState AdamState::for_params(const ParamSet& params) {
  AdamState s;
  s.m.assign(params.size(), 0.0);
  s.v.assign(params.size(), 0.0);
  return s;
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state,
               double learning_rate) {
  require_shape(grads.size() == params.size(), "gradient/parameter size mismatch");
  require_shape(state.m.size() == params.size(), "Adam state size mismatch");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  const auto n = static_cast<Eigen::Index>(params.size());
  Eigen::Map<Eigen::ArrayXd> m(state.m.data(), n);
  Eigen::Map<Eigen::ArrayXd> v(state.v.data(), n);
  Eigen::Map<Eigen::ArrayXd> theta(params.data.data(), n);
  Eigen::Map<const Eigen::ArrayXd> g(grads.data.data(), n);

  m = state.beta1 * m + (1.0 - state.beta1) * g;
  v = state.beta2 * v + (1.0 - state.beta2) * g.square();
  theta -= learning_rate * (m / bc1) / ((v / bc2).sqrt() + state.epsilon);
}

std::pair<int, std::vector<double>> CnnModel::predict_standardized(
    std::span<const double> window) const {
  require_shape(window.size() == params_.config.input_length,
                "window length " + std::to_string(window.size()) +
                    " does not match model input length " +
                    std::to_string(params_.config.input_length));
  const int label = 0;  // unused by the forward pass beyond loss bookkeeping
  ForwardPass fp = run_forward(params_, window, {&label, 1}, 1);
  std::vector<double> probs(params_.config.classes);
  for (std::size_t c = 0; c < probs.size(); ++c) {
    probs[c] = fp.probs(0, static_cast<Eigen::Index>(c));
  }
  int best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[best]) best = static_cast<int>(c);
  }
  return {best, probs};
}

std::pair<int, std::vector<double>> CnnModel::predict_raw(
    std::span<const double> window) const {
  std::vector<double> z(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    z[i] = standardization_.apply(window[i]);
  }
  return predict_standardized(z);
}

namespace {

constexpr char kMagic[8] = {'C', 'S', 'D', 'A', 'C', 'N', 'N', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value, const std::string& path) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("truncated model file: " + path);
}

}  // namespace

void CnnModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = 1;
  write_pod(out, version);
  write_pod(out, static_cast<std::uint32_t>(params_.config.input_length));
  write_pod(out, static_cast<std::uint32_t>(params_.config.conv_filters));
  write_pod(out, static_cast<std::uint32_t>(params_.config.kernel));
  write_pod(out, static_cast<std::uint32_t>(params_.config.hidden));
  write_pod(out, static_cast<std::uint32_t>(params_.config.classes));
  write_pod(out, standardization_.mean);
  write_pod(out, standardization_.stddev);
  write_pod(out, static_cast<std::uint32_t>(options_.epochs));
  write_pod(out, static_cast<std::uint32_t>(options_.batch_size));
  write_pod(out, options_.learning_rate);
  write_pod(out, options_.seed);
  write_pod(out, static_cast<std::uint64_t>(params_.data.size()));
  out.write(reinterpret_cast<const char*>(params_.data.data()),
            static_cast<std::streamsize>(params_.data.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path.string());
}

CnnModel CnnModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a CNN model file: " + path.string());
  }
  std::uint32_t version;
  read_pod(in, version, path.string());
  if (version != 1) {
    throw FormatError("unsupported CNN model version " +
                      std::to_string(version));
  }
  std::uint32_t len, filters, kernel, hidden, classes;
  read_pod(in, len, path.string());
  read_pod(in, filters, path.string());
  read_pod(in, kernel, path.string());
  read_pod(in, hidden, path.string());
  read_pod(in, classes, path.string());
  CnnConfig cfg{len, filters, kernel, hidden, classes};
  cfg.validate();

  Standardization stats;
  read_pod(in, stats.mean, path.string());
  read_pod(in, stats.stddev, path.string());
  TrainOptions options;
  std::uint32_t epochs, batch;
  read_pod(in, epochs, path.string());
  read_pod(in, batch, path.string());
  options.epochs = epochs;
  options.batch_size = batch;
  read_pod(in, options.learning_rate, path.string());
  read_pod(in, options.seed, path.string());

  std::uint64_t count;
  read_pod(in, count, path.string());
  ParamSet params = ParamSet::zeros(cfg);
  if (count != params.data.size()) {
    throw FormatError("model parameter count disagrees with declared shapes");
  }
  in.read(reinterpret_cast<char*>(params.data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw FormatError("truncated model file: " + path.string());
  return {std::move(params), stats, options};
}

CnnModel train_cnn(const Dataset& ds, const TrainOptions& options,
                   TrainLog* log) {
  CnnConfig cfg;
  cfg.input_length = ds.length();
  return train_cnn_with_config(ds, cfg, options, log);
}

CnnModel train_cnn_with_config(const Dataset& ds, const CnnConfig& config,
                               const TrainOptions& options, TrainLog* log) {
  config.validate();
  require_shape(config.input_length == ds.length(),
                "model input length " + std::to_string(config.input_length) +
                    " does not match dataset window length " +
                    std::to_string(ds.length()));
  require(options.epochs >= 1, "epochs must be >= 1");
  require(options.batch_size >= 1, "batch size must be >= 1");
  require(options.learning_rate > 0.0, "learning rate must be > 0");

  const Standardization stats = train_standardization(ds);
  const WindowMatrix train = train_matrix(ds, stats);
  const std::size_t n = train.rows;
  const std::size_t cols = train.cols;

  RngStream init_rng(options.seed, kInitStream);
  ParamSet params = init_params(config, init_rng);
  AdamState adam = AdamState::for_params(params);

  std::vector<std::uint32_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::vector<double> batch_values(options.batch_size * cols);
  std::vector<int> batch_labels(options.batch_size);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    RngStream shuffle_rng(options.seed, kShuffleStreamBase + epoch);
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = shuffle_rng.next_u64() % (i + 1);
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t rows = std::min(options.batch_size, n - start);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto src = train.row(order[start + r]);
        std::copy(src.begin(), src.end(), batch_values.begin() + r * cols);
        batch_labels[r] = train.labels[order[start + r]];
      }
      BatchGradients grads =
          backward(params, {batch_values.data(), rows * cols},
                   {batch_labels.data(), rows}, rows);
      adam_step(params, grads.grads, adam, options.learning_rate);
      loss_sum += grads.loss * static_cast<double>(rows);
      correct += grads.correct;
    }
    if (log) {
      log->epochs.push_back({epoch + 1, loss_sum / static_cast<double>(n),
                             static_cast<double>(correct) /
                                 static_cast<double>(n)});
    }
  }
  return {std::move(params), stats, options};
}

}  // namespace csda
