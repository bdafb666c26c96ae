#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "csda/dataset.hpp"

namespace csda {

// Shannon entropy of a two-class count vector, in bits (0 log 0 = 0).
double entropy_bits(std::span<const std::size_t> counts);

struct DtreeConfig {
  int max_depth = 25;
  std::size_t min_samples_split = 2;
};

// Binary decision tree, entropy criterion, exact greedy splits over midpoint
// thresholds between consecutive distinct feature values. Fully
// deterministic: ties prefer the lowest feature index, then the lowest
// threshold; prediction routes left iff value < threshold (a value exactly
// at the threshold goes right).
class DecisionTree {
 public:
  struct Node {
    // Interior nodes carry (feature, threshold, left, right); leaves carry
    // class counts of the training rows routed to them.
    int feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::array<std::uint64_t, 2> counts{0, 0};

    bool is_leaf() const { return feature < 0; }
  };

  static DecisionTree fit(const WindowMatrix& data, DtreeConfig config = {});

  int predict(std::span<const double> window) const;
  // Class counts at the window's leaf (the raw score behind predict).
  std::array<std::uint64_t, 2> leaf_counts(std::span<const double> window) const;

  int depth() const;
  std::size_t input_length() const { return input_length_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const DtreeConfig& config() const { return config_; }

 private:
  friend class DtreeModel;
  std::vector<Node> nodes_;
  std::size_t input_length_ = 0;
  DtreeConfig config_;
};

// Trained tree plus the standardization it expects, persisted as JSON.
class DtreeModel {
 public:
  DtreeModel() = default;
  DtreeModel(DecisionTree tree, Standardization standardization)
      : tree_(std::move(tree)), standardization_(standardization) {}

  // Classifies a raw (un-standardized) window.
  int predict_raw(std::span<const double> window) const;

  const DecisionTree& tree() const { return tree_; }
  const Standardization& standardization() const { return standardization_; }

  void save(const std::filesystem::path& path) const;
  static DtreeModel load(const std::filesystem::path& path);

 private:
  DecisionTree tree_;
  Standardization standardization_;
};

DtreeModel train_dtree(const Dataset& ds, DtreeConfig config = {});

}  // namespace csda
