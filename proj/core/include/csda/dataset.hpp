#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csda/channel.hpp"

namespace csda {

// One generation cell: clean cells vary only over psi, interfered cells over
// (p_alpha, power, psi). Doubles as the stratification and breakdown key.
struct CellKey {
  std::optional<double> power_dbw;
  std::optional<double> p_alpha;
  double psi_deg = 0.0;

  bool clean() const { return !power_dbw.has_value(); }
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

// Declarative recipe for one dataset: a single scenario, a single
// interference model, and the sweep sets. Window totals are allocated across
// cells deterministically (largest remainder, canonical cell order), and the
// realized per-cell counts land in the manifest.
struct GenerationGrid {
  InterferenceModel model = InterferenceModel::kModel1;
  std::size_t window_length = 1000;
  std::vector<double> psi_deg = {0, 60, 120, 180, 230, 240, 250, 300};
  std::vector<double> p_alpha = {0.5, 0.75};
  std::vector<double> power_dbw = {-130, -125, -120, -115, -110, -105, -100};
  std::size_t clean_windows = 2250;
  std::size_t interfered_windows = 2250;

  void validate() const;
};

struct CellPlan {
  CellKey key;
  std::size_t count;
};

// Deterministic allocation of the grid's totals over its cells, in canonical
// order: clean cells by psi, then interfered cells by (p_alpha, power, psi).
std::vector<CellPlan> plan_cells(const GenerationGrid& grid);

struct SplitIndices {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> test;

  bool empty() const { return train.empty() && test.empty(); }
};

struct DatasetManifest {
  std::uint32_t version = 1;
  ScenarioConfig scenario;
  GenerationGrid grid;
  std::uint64_t master_seed = 0;
  SplitIndices split;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<SampleWindow> windows;

  std::size_t size() const { return windows.size(); }
  std::size_t length() const { return manifest.grid.window_length; }
};

CellKey window_cell(const SampleWindow& window);

// Generates every window of the grid. Window i draws from stream
// (master_seed, i); jobs > 1 fills disjoint index ranges concurrently and
// changes nothing about the result.
Dataset generate(const ScenarioConfig& cfg, const GenerationGrid& grid,
                 std::uint64_t master_seed, int jobs = 1);

// Rebuilds window `index` from manifest + metadata alone.
SampleWindow regenerate_window(const Dataset& ds, std::size_t index);

// Stratified train/test split over (label, power, p_alpha, psi) strata.
// Every stratum contributes at least one window to each side; the global
// train count is exactly round(N * train_fraction). A stratum with fewer
// than two windows cannot be split and is an error.
void split_dataset(Dataset& ds, double train_fraction, std::uint64_t seed);

// Directory layout: manifest.jsonl (header record + one record per window)
// and values.f64le (row-major N x L little-endian doubles). load() restores
// a dataset that compares equal field-for-field, bit-exact on values.
void save(const Dataset& ds, const std::filesystem::path& dir);
Dataset load(const std::filesystem::path& dir);

// Interop export, one window per row:
//   window_id,label,scenario,model,p_alpha,I_dbw,psi_deg,seed,v0..v{L-1}
void export_csv(const Dataset& ds, const std::filesystem::path& file);

// Global z-score parameters, always estimated on the train split only.
struct Standardization {
  double mean = 0.0;
  double stddev = 1.0;

  double apply(double v) const { return (v - mean) / stddev; }
  double invert(double v) const { return v * stddev + mean; }
};

Standardization train_standardization(const Dataset& ds);

// Spec'd convenience: standardized copy plus the train-split stats that
// produced it (the same stats are meant to be applied to the test split and
// persisted with trained models).
std::pair<Dataset, Standardization> standardize(const Dataset& ds);

// Row-major feature matrix over one side of the split, standardized.
struct WindowMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows x cols
  std::vector<int> labels;     // 0 = clean, 1 = interfered
  std::vector<std::uint32_t> window_ids;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
};

WindowMatrix train_matrix(const Dataset& ds, const Standardization& stats);
WindowMatrix test_matrix(const Dataset& ds, const Standardization& stats);

}  // namespace csda
