#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csda/dataset.hpp"

namespace csda {

// Binary confusion counts; the positive class is "interfered".
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  void add(int truth, int predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Degenerate denominators yield nullopt rather than NaN.
struct MetricValues {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

MetricValues metrics(const ConfusionMatrix& cm);

struct CellResult {
  CellKey cell;
  ConfusionMatrix cm;
};

struct EvalResult {
  std::string model_name;  // "cnn" | "dtree"
  std::string scenario;
  int interference_model = 0;
  ConfusionMatrix total;
  std::vector<CellResult> cells;  // sums exactly to `total`
};

// A trained classifier viewed as a raw-window function.
using Predictor = std::function<int(std::span<const double>)>;

// Runs the predictor over every test-split window and aggregates counts
// globally and per generation cell.
EvalResult evaluate(const Predictor& predict, std::size_t model_input_length,
                    const std::string& model_name, const Dataset& ds);

// Writes metrics.json, confusion.csv, breakdown.csv and the SVG report set
// (confusion-matrix heatmap, example SINR windows, SNR-vs-phase curve).
// Pure with respect to the result: identical inputs produce identical bytes.
void emit_report(const EvalResult& result, const Dataset& ds,
                 const std::filesystem::path& out_dir);

}  // namespace csda
