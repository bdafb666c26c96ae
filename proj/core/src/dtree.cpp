#include "csda/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace csda {

using nlohmann::json;

double entropy_bits(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  require(total > 0, "entropy of an all-zero count vector is undefined");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

// Gains this close to zero are treated as exactly zero. A zero-gain split is
// still committed when the node is impure: pairs of identical marginals can
// hide a separable interaction one level down.
constexpr double kGainEps = 1e-12;

double counts_entropy(std::uint64_t n0, std::uint64_t n1) {
  const std::size_t c[2] = {static_cast<std::size_t>(n0),
                            static_cast<std::size_t>(n1)};
  return entropy_bits(c);
}

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = -1.0;
};

}  // namespace

DecisionTree DecisionTree::fit(const WindowMatrix& data, DtreeConfig config) {
  require(data.rows >= 1 && data.cols >= 1, "cannot fit on an empty matrix");
  require(data.labels.size() == data.rows, "labels/rows mismatch");
  require(config.max_depth >= 0, "max_depth must be >= 0");
  require(config.min_samples_split >= 2, "min_samples_split must be >= 2");

  DecisionTree tree;
  tree.input_length_ = data.cols;
  tree.config_ = config;

  std::vector<std::uint32_t> order(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) order[i] = static_cast<std::uint32_t>(i);

  // Scratch reused across nodes: (value, label) pairs for one feature.
  std::vector<std::pair<double, int>> column;

  struct Frame {
    std::size_t begin, end;  // range within `order`
    int depth;
    std::int32_t node;
  };

  const auto make_leaf = [&](std::size_t begin, std::size_t end) {
    Node leaf;
    for (std::size_t i = begin; i < end; ++i) {
      ++leaf.counts[data.labels[order[i]] == 1 ? 1 : 0];
    }
    return leaf;
  };

  std::vector<Frame> stack;
  tree.nodes_.emplace_back();
  stack.push_back({0, data.rows, 0, 0});

  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    const std::size_t n = frame.end - frame.begin;

    Node node = make_leaf(frame.begin, frame.end);
    const std::uint64_t n0 = node.counts[0];
    const std::uint64_t n1 = node.counts[1];
    const bool pure = n0 == 0 || n1 == 0;

    if (pure || n < config.min_samples_split || frame.depth >= config.max_depth) {
      tree.nodes_[frame.node] = node;
      continue;
    }

    const double parent_entropy = counts_entropy(n0, n1);
    BestSplit best;
    for (std::size_t f = 0; f < data.cols; ++f) {
      column.clear();
      column.reserve(n);
      for (std::size_t i = frame.begin; i < frame.end; ++i) {
        const auto row = order[i];
        column.emplace_back(data.values[row * data.cols + f],
                            data.labels[row]);
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::uint64_t l0 = 0, l1 = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ++(column[i].second == 1 ? l1 : l0);
        if (column[i].first == column[i + 1].first) continue;
        const std::uint64_t r0 = n0 - l0;
        const std::uint64_t r1 = n1 - l1;
        const double nl = static_cast<double>(l0 + l1);
        const double nr = static_cast<double>(r0 + r1);
        const double child =
            (nl * counts_entropy(l0, l1) + nr * counts_entropy(r0, r1)) /
            static_cast<double>(n);
        const double gain = parent_entropy - child;
        if (gain > best.gain) {
          double threshold = std::midpoint(column[i].first, column[i + 1].first);
          // Adjacent representable values can round the midpoint onto the
          // lower one; routing is `value < threshold`, so nudge up.
          if (threshold <= column[i].first) threshold = column[i + 1].first;
          best.feature = static_cast<int>(f);
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }

    if (best.feature < 0 || best.gain <= -kGainEps) {
      // No candidate threshold at all (every feature is constant here), or a
      // numerically negative gain. Either way: leaf.
      tree.nodes_[frame.node] = node;
      continue;
    }

    // Partition `order` by the chosen split, keeping relative order stable.
    std::vector<std::uint32_t> left, right;
    left.reserve(n);
    right.reserve(n);
    for (std::size_t i = frame.begin; i < frame.end; ++i) {
      const auto row = order[i];
      if (data.values[row * data.cols + best.feature] < best.threshold) {
        left.push_back(row);
      } else {
        right.push_back(row);
      }
    }
    // Midpoint thresholds always separate at least one row per side.
    require(!left.empty() && !right.empty(), "degenerate split");
    std::copy(left.begin(), left.end(), order.begin() + static_cast<std::ptrdiff_t>(frame.begin));
    std::copy(right.begin(), right.end(),
              order.begin() + static_cast<std::ptrdiff_t>(frame.begin + left.size()));

    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<std::int32_t>(tree.nodes_.size());
    node.right = static_cast<std::int32_t>(tree.nodes_.size() + 1);
    tree.nodes_[frame.node] = node;
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    stack.push_back({frame.begin, frame.begin + left.size(), frame.depth + 1,
                     node.left});
    stack.push_back({frame.begin + left.size(), frame.end, frame.depth + 1,
                     node.right});
  }
  return tree;
}

int DecisionTree::predict(std::span<const double> window) const {
  const auto counts = leaf_counts(window);
  // Leaf majority; an exactly tied leaf reports class 0.
  return counts[1] > counts[0] ? 1 : 0;
}

std::array<std::uint64_t, 2> DecisionTree::leaf_counts(
    std::span<const double> window) const {
  require_shape(window.size() == input_length_,
                "window length " + std::to_string(window.size()) +
                    " does not match training length " +
                    std::to_string(input_length_));
  require(!nodes_.empty(), "tree is empty");
  std::int32_t at = 0;
  while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
    const Node& node = nodes_[static_cast<std::size_t>(at)];
    at = window[static_cast<std::size_t>(node.feature)] < node.threshold
             ? node.left
             : node.right;
  }
  return nodes_[static_cast<std::size_t>(at)].counts;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  // Iterative depth over the explicit node array.
  std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
  int depth = 0;
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(at)];
    depth = std::max(depth, d);
    if (!node.is_leaf()) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return depth;
}

int DtreeModel::predict_raw(std::span<const double> window) const {
  std::vector<double> z(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    z[i] = standardization_.apply(window[i]);
  }
  return tree_.predict(z);
}

void DtreeModel::save(const std::filesystem::path& path) const {
  json nodes = json::array();
  for (const auto& node : tree_.nodes()) {
    if (node.is_leaf()) {
      nodes.push_back(json{{"leaf", {node.counts[0], node.counts[1]}}});
    } else {
      nodes.push_back(json{{"feature", node.feature},
                           {"threshold", node.threshold},
                           {"left", node.left},
                           {"right", node.right},
                           {"counts", {node.counts[0], node.counts[1]}}});
    }
  }
  const json doc{{"format", "csda.dtree"},
                 {"version", 1},
                 {"input_length", tree_.input_length()},
                 {"max_depth", tree_.config().max_depth},
                 {"min_samples_split", tree_.config().min_samples_split},
                 {"standardization",
                  {{"mean", standardization_.mean},
                   {"stddev", standardization_.stddev}}},
                 {"nodes", nodes}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

DtreeModel DtreeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid tree model JSON: ") + e.what());
  }
  if (doc.value("format", "") != "csda.dtree") {
    throw FormatError("not a decision tree model file");
  }
  if (doc.at("version").get<int>() != 1) {
    throw FormatError("unsupported tree model version");
  }

  DtreeModel model;
  model.standardization_.mean =
      doc.at("standardization").at("mean").get<double>();
  model.standardization_.stddev =
      doc.at("standardization").at("stddev").get<double>();
  model.tree_.input_length_ = doc.at("input_length").get<std::size_t>();
  model.tree_.config_.max_depth = doc.at("max_depth").get<int>();
  model.tree_.config_.min_samples_split =
      doc.at("min_samples_split").get<std::size_t>();
  for (const auto& rec : doc.at("nodes")) {
    DecisionTree::Node node;
    if (rec.contains("leaf")) {
      node.counts[0] = rec.at("leaf").at(0).get<std::uint64_t>();
      node.counts[1] = rec.at("leaf").at(1).get<std::uint64_t>();
    } else {
      node.feature = rec.at("feature").get<int>();
      node.threshold = rec.at("threshold").get<double>();
      node.left = rec.at("left").get<std::int32_t>();
      node.right = rec.at("right").get<std::int32_t>();
      node.counts[0] = rec.at("counts").at(0).get<std::uint64_t>();
      node.counts[1] = rec.at("counts").at(1).get<std::uint64_t>();
    }
    model.tree_.nodes_.push_back(node);
  }
  if (model.tree_.nodes_.empty()) throw FormatError("tree model has no nodes");
  return model;
}

DtreeModel train_dtree(const Dataset& ds, DtreeConfig config) {
  const Standardization stats = train_standardization(ds);
  const WindowMatrix train = train_matrix(ds, stats);
  return {DecisionTree::fit(train, config), stats};
}

}  // namespace csda
