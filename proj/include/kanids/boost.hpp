#pragma once

// Second-order gradient-boosted regression trees with a softmax multiclass
// objective and exact greedy split search.
//
// Each round computes per-class gradient/hessian statistics at the current
// margins and grows one tree per class. A node holding gradient sum G and
// hessian sum H has optimal leaf weight -G / (H + lambda); a split is scored by
//
//   gain = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "kanids/binary_io.hpp"
#include "kanids/error.hpp"
#include "kanids/matrix.hpp"

namespace kanids {

inline constexpr double kMinHessian = 1e-16;

// Gains closer than this (relative) count as tied. Equal partitions reached
// through different features are summed in different orders, so exact ties
// only agree to rounding.
inline constexpr double kGainTieTolerance = 1e-12;


struct GradHess {
  Matrix grad;
  Matrix hess;
};

inline GradHess softmax_grad_hess(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows) throw Error(ErrorKind::LengthMismatch, "one label per logit row required");
  GradHess out{Matrix(logits.rows, logits.cols), Matrix(logits.rows, logits.cols)};
  std::vector<double> p(logits.cols);
  for (std::size_t r = 0; r < logits.rows; ++r) {
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols)
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(label) + " at row " + std::to_string(r));
    auto z = logits.row(r);
    const double shift = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) sum += p[c] = std::exp(z[c] - shift);
    for (std::size_t c = 0; c < z.size(); ++c) {
      const double pc = p[c] / sum;
      out.grad(r, c) = pc - (static_cast<int>(c) == label ? 1.0 : 0.0);
      out.hess(r, c) = std::max(pc * (1.0 - pc), kMinHessian);
    }
  }
  return out;
}

struct SplitParams {
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;

  bool operator==(const Split&) const = default;
};

inline double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  return -grad_sum / (hess_sum + lambda);
}

inline double split_gain(double gl, double hl, double gr, double hr, const SplitParams& sp) {
  const double g = gl + gr;
  const double h = hl + hr;
  return 0.5 * (gl * gl / (hl + sp.lambda) + gr * gr / (hr + sp.lambda) - g * g / (h + sp.lambda)) - sp.gamma;
}

namespace detail {

inline bool beats(double gain, double incumbent) {
  return gain - incumbent > kGainTieTolerance * std::abs(incumbent);
}

// Threshold strictly above `lo` and at most `hi`, so rows equal to `lo` go
// left under the `x < threshold` rule.
inline double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

// Scans one feature's rows in ascending value order; updates `best` only on a
// clearly larger gain so earlier features and lower thresholds win ties.
// Right-side sums are accumulated from the far end rather than subtracted
// from the total, so a feature ordering the rows in reverse yields the same
// sums with the sides swapped and ties stay exact.
inline void scan_sorted(std::span<const std::size_t> sorted, std::size_t feature, const Matrix& x,
                        std::span<const double> g, std::span<const double> h, const SplitParams& sp,
                        std::optional<Split>& best) {
  const std::size_t n = sorted.size();
  std::vector<double> g_right(n + 1, 0.0), h_right(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    g_right[i] = g_right[i + 1] + g[sorted[i]];
    h_right[i] = h_right[i + 1] + h[sorted[i]];
  }
  double gl = 0.0, hl = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t row = sorted[i];
    gl += g[row];
    hl += h[row];
    const double v = x(row, feature);
    const double next = x(sorted[i + 1], feature);
    if (!(next > v)) continue;
    const double gr = g_right[i + 1];
    const double hr = h_right[i + 1];
    if (hl < sp.min_child_weight || hr < sp.min_child_weight) continue;
    const double gain = split_gain(gl, hl, gr, hr, sp);
    if (gain > 0.0 && (!best || beats(gain, best->gain))) best = Split{feature, midpoint(v, next), gain};
  }
}

inline std::vector<std::size_t> sorted_by_feature(std::span<const std::size_t> rows, const Matrix& x,
                                                  std::size_t feature) {
  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](std::size_t a, std::size_t b) { return x(a, feature) < x(b, feature); });
  return sorted;
}

}  // namespace detail

/// Best exact split of `rows`, or nothing when no candidate has positive gain.
inline std::optional<Split> best_split(std::span<const std::size_t> rows, const Matrix& x,
                                      std::span<const double> g, std::span<const double> h,
                                      const SplitParams& sp) {
  if (rows.size() < 2) return std::nullopt;
  std::optional<Split> best;
  for (std::size_t f = 0; f < x.cols; ++f) {
    const auto sorted = detail::sorted_by_feature(rows, x, f);
    detail::scan_sorted(sorted, f, x, g, h, sp, best);
  }
  return best;
}

/// Flat binary tree; node 0 is the root. Leaves have feature == kLeaf.
struct Tree {
  static constexpr std::int32_t kLeaf = -1;

  struct Node {
    std::int32_t feature = kLeaf;
    double threshold = 0.0;
    double weight = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return feature == kLeaf; }
    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;

  double predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf())
      i = static_cast<std::size_t>(row[static_cast<std::size_t>(nodes[i].feature)] < nodes[i].threshold
                                       ? nodes[i].left
                                       : nodes[i].right);
    return nodes[i].weight;
  }

  std::size_t depth(std::size_t node = 0) const {
    const auto& n = nodes[node];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth(static_cast<std::size_t>(n.left)), depth(static_cast<std::size_t>(n.right)));
  }

  bool operator==(const Tree&) const = default;
};

struct TreeParams {
  std::size_t max_depth = 6;
  SplitParams split{};
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> g, std::span<const double> h, const TreeParams& params)
      : x_(x), g_(g), h_(h), params_(params), goes_left_(x.rows, 0) {}

  // `rows` ascending; `by_feature[f]` holds the same rows sorted by feature f.
  Tree build(std::vector<std::size_t> rows, std::vector<std::vector<std::size_t>> by_feature) {
    Tree tree;
    grow(tree, std::move(rows), std::move(by_feature), 0);
    return tree;
  }

 private:
  std::int32_t grow(Tree& tree, std::vector<std::size_t> rows, std::vector<std::vector<std::size_t>> by_feature,
                    std::size_t depth) {
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    double g_total = 0.0, h_total = 0.0;
    for (auto r : rows) {
      g_total += g_[r];
      h_total += h_[r];
    }

    std::optional<Split> split;
    if (depth < params_.max_depth && rows.size() >= 2)
      for (std::size_t f = 0; f < x_.cols; ++f)
        scan_sorted(by_feature[f], f, x_, g_, h_, params_.split, split);

    if (!split) {
      tree.nodes[static_cast<std::size_t>(index)].weight = leaf_weight(g_total, h_total, params_.split.lambda);
      return index;
    }

    for (auto r : rows) goes_left_[r] = x_(r, split->feature) < split->threshold ? 1 : 0;
    auto partition = [&](const std::vector<std::size_t>& in, std::vector<std::size_t>& left,
                         std::vector<std::size_t>& right) {
      for (auto r : in) (goes_left_[r] ? left : right).push_back(r);
    };
    std::vector<std::size_t> left_rows, right_rows;
    partition(rows, left_rows, right_rows);
    std::vector<std::vector<std::size_t>> left_sorted(x_.cols), right_sorted(x_.cols);
    for (std::size_t f = 0; f < x_.cols; ++f) {
      left_sorted[f].reserve(left_rows.size());
      right_sorted[f].reserve(right_rows.size());
      partition(by_feature[f], left_sorted[f], right_sorted[f]);
    }
    rows.clear();
    by_feature.clear();

    const std::int32_t left = grow(tree, std::move(left_rows), std::move(left_sorted), depth + 1);
    const std::int32_t right = grow(tree, std::move(right_rows), std::move(right_sorted), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = static_cast<std::int32_t>(split->feature);
    node.threshold = split->threshold;
    node.left = left;
    node.right = right;
    return index;
  }

  const Matrix& x_;
  std::span<const double> g_;
  std::span<const double> h_;
  TreeParams params_;
  std::vector<char> goes_left_;
};

inline std::vector<std::vector<std::size_t>> presort(std::span<const std::size_t> rows, const Matrix& x) {
  std::vector<std::vector<std::size_t>> by_feature(x.cols);
  for (std::size_t f = 0; f < x.cols; ++f) by_feature[f] = sorted_by_feature(rows, x, f);
  return by_feature;
}

}  // namespace detail

/// Greedy recursive tree over `rows`; stops at max_depth, when no split has
/// positive gain, or below two rows.
inline Tree build_tree(std::span<const std::size_t> rows, const Matrix& x, std::span<const double> g,
                       std::span<const double> h, const TreeParams& params) {
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "cannot build a tree on no rows");
  std::vector<std::size_t> sorted_rows(rows.begin(), rows.end());
  std::sort(sorted_rows.begin(), sorted_rows.end());
  auto by_feature = detail::presort(sorted_rows, x);
  return detail::TreeBuilder(x, g, h, params).build(std::move(sorted_rows), std::move(by_feature));
}

struct GbtParams {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  double base_score = 0.0;

  TreeParams tree_params() const { return {max_depth, {lambda, gamma, min_child_weight}}; }

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "boosting learning_rate must be positive");
    if (!(lambda >= 0.0) || !(gamma >= 0.0) || !(min_child_weight >= 0.0))
      throw Error(ErrorKind::InvalidArgument, "lambda, gamma and min_child_weight must be non-negative");
  }

  bool operator==(const GbtParams&) const = default;
};

struct GbtModel {
  std::size_t classes = 0;
  std::size_t features = 0;
  GbtParams params;
  std::vector<double> base_scores;  // one per class
  std::vector<Tree> trees;          // rounds x classes, round-major

  std::size_t rounds() const { return classes == 0 ? 0 : trees.size() / classes; }
  const Tree& tree(std::size_t round, std::size_t cls) const { return trees[round * classes + cls]; }

  bool operator==(const GbtModel&) const = default;
};

struct GbtPrediction {
  Matrix logits;
  std::vector<int> classes;
};

inline GbtPrediction gbt_predict(const GbtModel& model, const Matrix& x) {
  if (x.cols != model.features)
    throw Error(ErrorKind::ShapeMismatch, "feature width " + std::to_string(x.cols) + " != model width " +
                                              std::to_string(model.features));
  GbtPrediction out{Matrix(x.rows, model.classes), std::vector<int>(x.rows, 0)};
  for (std::size_t r = 0; r < x.rows; ++r) {
    auto row = x.row(r);
    auto z = out.logits.row(r);
    for (std::size_t c = 0; c < model.classes; ++c) {
      double sum = 0.0;
      for (std::size_t t = 0; t < model.rounds(); ++t) sum += model.tree(t, c).predict(row);
      z[c] = model.base_scores[c] + model.params.learning_rate * sum;
    }
    // First maximum wins, so ties resolve to the lowest class id.
    out.classes[r] = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

inline double mean_softmax_loss(const Matrix& logits, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t r = 0; r < logits.rows; ++r) {
    auto z = logits.row(r);
    const double shift = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - shift);
    total += std::log(sum) + shift - z[static_cast<std::size_t>(labels[r])];
  }
  return logits.rows == 0 ? 0.0 : total / static_cast<double>(logits.rows);
}

/// Fits params.rounds rounds of one tree per class. When `loss_trace` is given
/// it receives the mean training softmax loss after each round.
inline GbtModel gbt_fit(const Matrix& x, std::span<const int> labels, const GbtParams& params,
                        std::size_t classes = 0, std::vector<double>* loss_trace = nullptr) {
  params.validate();
  if (x.rows == 0) throw Error(ErrorKind::EmptyDataset, "cannot boost on an empty dataset");
  if (labels.size() != x.rows) throw Error(ErrorKind::LengthMismatch, "one label per row required");
  int max_label = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0) throw Error(ErrorKind::LabelOutOfRange, "negative label at row " + std::to_string(r));
    max_label = std::max(max_label, labels[r]);
  }
  if (classes == 0) classes = static_cast<std::size_t>(max_label) + 1;
  if (static_cast<std::size_t>(max_label) >= classes)
    throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(max_label) + " exceeds class count");
  for (double v : x.data)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "boosting input contains non-finite values");

  GbtModel model;
  model.classes = classes;
  model.features = x.cols;
  model.params = params;
  model.base_scores.assign(classes, params.base_score);

  Matrix margins(x.rows, classes, params.base_score);
  std::vector<std::size_t> all_rows(x.rows);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  const auto presorted = detail::presort(all_rows, x);
  const TreeParams tree_params = params.tree_params();
  std::vector<double> g(x.rows), h(x.rows);
  if (loss_trace) loss_trace->clear();

  for (std::size_t round = 0; round < params.rounds; ++round) {
    const GradHess gh = softmax_grad_hess(margins, labels);
    std::vector<Tree> round_trees;
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t r = 0; r < x.rows; ++r) {
        g[r] = gh.grad(r, c);
        h[r] = gh.hess(r, c);
      }
      round_trees.push_back(detail::TreeBuilder(x, g, h, tree_params).build(all_rows, presorted));
    }
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < classes; ++c)
        margins(r, c) += params.learning_rate * round_trees[c].predict(x.row(r));
    for (auto& t : round_trees) model.trees.push_back(std::move(t));
    if (loss_trace) loss_trace->push_back(mean_softmax_loss(margins, labels));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Serialization: "KANIDSGB" u32 version, u32 classes, u32 features, u32 rounds,
// u32 max_depth, f64 learning_rate, f64 lambda, f64 gamma, f64
// min_child_weight, f64 base_score, classes x f64 base scores, then each tree
// (round-major, class-minor) in preorder: u8 0 + f64 weight for a leaf, or
// u8 1 + u32 feature + f64 threshold followed by left and right subtrees.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kGbtFormatVersion = 1;

namespace detail {

inline void write_subtree(io::BinaryWriter& w, const Tree& tree, std::size_t node) {
  const auto& n = tree.nodes[node];
  if (n.is_leaf()) {
    w.u8(0);
    w.f64(n.weight);
    return;
  }
  w.u8(1);
  w.u32(static_cast<std::uint32_t>(n.feature));
  w.f64(n.threshold);
  write_subtree(w, tree, static_cast<std::size_t>(n.left));
  write_subtree(w, tree, static_cast<std::size_t>(n.right));
}

inline std::int32_t read_subtree(io::BinaryReader& r, Tree& tree, std::size_t features, std::size_t depth) {
  if (depth > 4096) throw Error(ErrorKind::Format, "tree nesting too deep");
  const auto index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  const std::uint8_t tag = r.u8();
  if (tag == 0) {
    tree.nodes.back().weight = r.f64();
    return index;
  }
  if (tag != 1) throw Error(ErrorKind::Format, "bad tree node tag");
  const std::uint32_t feature = r.u32();
  if (feature >= features) throw Error(ErrorKind::Format, "tree feature index out of range");
  const double threshold = r.f64();
  const std::int32_t left = read_subtree(r, tree, features, depth + 1);
  const std::int32_t right = read_subtree(r, tree, features, depth + 1);
  auto& n = tree.nodes[static_cast<std::size_t>(index)];
  n.feature = static_cast<std::int32_t>(feature);
  n.threshold = threshold;
  n.left = left;
  n.right = right;
  return index;
}

}  // namespace detail

inline void write_gbt(std::ostream& out, const GbtModel& model) {
  io::BinaryWriter w(out);
  w.magic("KANIDSGB");
  w.u32(kGbtFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.classes));
  w.u32(static_cast<std::uint32_t>(model.features));
  w.u32(static_cast<std::uint32_t>(model.rounds()));
  w.u32(static_cast<std::uint32_t>(model.params.max_depth));
  w.f64(model.params.learning_rate);
  w.f64(model.params.lambda);
  w.f64(model.params.gamma);
  w.f64(model.params.min_child_weight);
  w.f64(model.params.base_score);
  w.f64s(model.base_scores);
  for (const auto& t : model.trees) detail::write_subtree(w, t, 0);
  w.check();
}

inline GbtModel read_gbt(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("KANIDSGB");
  if (const auto v = r.u32(); v != kGbtFormatVersion)
    throw Error(ErrorKind::Format, "unsupported boosting format version " + std::to_string(v));
  GbtModel model;
  model.classes = r.u32();
  model.features = r.u32();
  const std::size_t rounds = r.u32();
  model.params.rounds = rounds;
  model.params.max_depth = r.u32();
  model.params.learning_rate = r.f64();
  model.params.lambda = r.f64();
  model.params.gamma = r.f64();
  model.params.min_child_weight = r.f64();
  model.params.base_score = r.f64();
  model.base_scores = r.f64s(model.classes);
  for (std::size_t i = 0; i < rounds * model.classes; ++i) {
    Tree t;
    detail::read_subtree(r, t, model.features, 0);
    model.trees.push_back(std::move(t));
  }
  return model;
}

}  // namespace kanids
