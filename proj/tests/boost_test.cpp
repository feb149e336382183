#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <sstream>

#include "kanids/boost.hpp"
#include "kanids/rng.hpp"
#include "oracles.hpp"

using namespace kanids;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

struct FourRows {
  Matrix x{4, 1};
  std::vector<double> g{-1, -1, 1, 1};
  std::vector<double> h{1, 1, 1, 1};
  FourRows() { x.data = {0, 1, 2, 3}; }
};

// Random split-search instance. Coarse mode uses small integer features and
// dyadic gradients so sums are exact and ties are frequent.
struct Instance {
  Matrix x;
  std::vector<double> g, h;
  std::vector<std::size_t> rows;
};

Instance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const bool coarse = seed % 2 == 0;
  const std::size_t n = 2 + rng.index(63);
  const std::size_t f = 1 + rng.index(5);
  Instance in{Matrix(n, f), std::vector<double>(n), std::vector<double>(n), {}};
  for (auto& v : in.x.data) v = coarse ? static_cast<double>(rng.index(6)) : rng.normal();
  for (std::size_t r = 0; r < n; ++r) {
    if (coarse) {
      in.g[r] = (static_cast<double>(rng.index(33)) - 16.0) / 16.0;
      in.h[r] = static_cast<double>(1 + rng.index(16)) / 16.0;
    } else {
      in.g[r] = rng.uniform(-1, 1);
      in.h[r] = rng.uniform(0.01, 0.25);
    }
  }
  // Use a random subset of rows in shuffled order.
  in.rows = all_rows(n);
  rng.shuffle(std::span<std::size_t>(in.rows));
  in.rows.resize(2 + rng.index(n - 1));
  return in;
}

}  // namespace

TEST(SoftmaxGradHess, Values) {
  Matrix z(1, 2, 0.0);
  const std::vector<int> y{1};
  const auto gh = softmax_grad_hess(z, y);
  EXPECT_DOUBLE_EQ(gh.grad(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(gh.grad(0, 1), -0.5);
  EXPECT_DOUBLE_EQ(gh.hess(0, 0), 0.25);

  Matrix sat(1, 2);
  sat.data = {0.0, 800.0};
  EXPECT_EQ(softmax_grad_hess(sat, y).hess(0, 0), kMinHessian);
}

TEST(BestSplit, IdenticalRowsHaveNoSplit) {
  Matrix x(5, 2, 3.0);
  std::vector<double> g{1, -1, 2, -2, 0.5}, h(5, 1.0);
  EXPECT_FALSE(best_split(all_rows(5), x, g, h, {}).has_value());
}

TEST(BestSplit, FourRowExample) {
  FourRows d;
  const auto s = best_split(all_rows(4), d.x, d.g, d.h, {});
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->feature, 0u);
  EXPECT_EQ(s->threshold, 1.5);
  EXPECT_NEAR(s->gain, 4.0 / 3.0, 1e-12);
}

TEST(BestSplit, GammaSuppressesSplit) {
  FourRows d;
  EXPECT_FALSE(best_split(all_rows(4), d.x, d.g, d.h, {1.0, 2.0, 1.0}).has_value());
}

TEST(BestSplit, MinChildWeightRespected) {
  FourRows d;
  // Each side needs hessian mass 3, impossible with 4 unit rows.
  EXPECT_FALSE(best_split(all_rows(4), d.x, d.g, d.h, {1.0, 0.0, 3.0}).has_value());
}

TEST(BestSplit, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto in = random_instance(seed);
    for (const SplitParams sp : {SplitParams{}, SplitParams{0.5, 0.01, 0.1}}) {
      const auto got = best_split(in.rows, in.x, in.g, in.h, sp);
      const auto want =
          oracle::brute_force_split(in.rows, in.x, in.g, in.h, sp.lambda, sp.gamma, sp.min_child_weight);
      ASSERT_EQ(got.has_value(), want.has_value()) << "seed " << seed;
      if (!got) continue;
      EXPECT_EQ(got->feature, want->feature) << "seed " << seed;
      EXPECT_EQ(got->threshold, want->threshold) << "seed " << seed;
      EXPECT_NEAR(got->gain, want->gain, 1e-9) << "seed " << seed;
    }
  }
}

TEST(BuildTree, DepthZeroIsLeaf) {
  FourRows d;
  const auto t = build_tree(all_rows(4), d.x, d.g, d.h, {0, {}});
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.nodes[0].weight, 0.0);
}

TEST(BuildTree, Stump) {
  FourRows d;
  const auto t = build_tree(all_rows(4), d.x, d.g, d.h, {1, {}});
  EXPECT_EQ(t.depth(), 1u);
  ASSERT_EQ(t.nodes.size(), 3u);
  const double lo[] = {0.0}, hi[] = {3.0};
  EXPECT_NEAR(t.predict(lo), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(t.predict(hi), -2.0 / 3.0, 1e-12);
}

TEST(BuildTree, LeafWeightsClosedForm) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto in = random_instance(seed + 1000);
    const TreeParams tp{3, {}};
    const auto t = build_tree(in.rows, in.x, in.g, in.h, tp);
    EXPECT_LE(t.depth(), 3u);
    // Group rows by the leaf they land in and recompute -G/(H+lambda).
    std::map<const Tree::Node*, std::pair<double, double>> sums;
    for (auto r : in.rows) {
      std::size_t i = 0;
      while (!t.nodes[i].is_leaf())
        i = static_cast<std::size_t>(in.x(r, static_cast<std::size_t>(t.nodes[i].feature)) < t.nodes[i].threshold
                                         ? t.nodes[i].left
                                         : t.nodes[i].right);
      sums[&t.nodes[i]].first += in.g[r];
      sums[&t.nodes[i]].second += in.h[r];
    }
    for (const auto& [node, gh] : sums) EXPECT_NEAR(node->weight, -gh.first / (gh.second + 1.0), 1e-12);
  }
}

TEST(BuildTree, DepthBound) {
  Rng rng(5);
  Matrix x(300, 3);
  std::vector<double> g(300), h(300, 1.0);
  for (auto& v : x.data) v = rng.normal();
  for (auto& v : g) v = rng.normal();
  for (std::size_t d = 0; d <= 6; ++d) EXPECT_LE(build_tree(all_rows(300), x, g, h, {d, {1, 0, 0}}).depth(), d);
}

TEST(GbtFit, LossDecreasesMonotonically) {
  Rng rng(7);
  Matrix x(200, 3);
  std::vector<int> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    y[r] = static_cast<int>(r % 3);
    for (std::size_t c = 0; c < 3; ++c) x(r, c) = rng.normal(c == static_cast<std::size_t>(y[r]) ? 1.0 : 0.0, 1.0);
  }
  GbtParams p;
  p.rounds = 10;
  std::vector<double> trace;
  const auto model = gbt_fit(x, y, p, 0, &trace);
  ASSERT_EQ(trace.size(), 10u);
  EXPECT_LT(trace[0], std::log(3.0));
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]);
  EXPECT_NEAR(trace.back(), mean_softmax_loss(gbt_predict(model, x).logits, y), 1e-12);
  EXPECT_EQ(model.rounds(), 10u);
  EXPECT_EQ(model.trees.size(), 30u);
}

TEST(GbtFit, TwoGaussians) {
  Rng rng(11);
  auto make = [&](std::size_t n, Matrix& x, std::vector<int>& y) {
    x = Matrix(n, 2);
    y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      y[r] = static_cast<int>(r % 2);
      x(r, 0) = rng.normal(y[r] ? 2.0 : -2.0, 1.0);
      x(r, 1) = rng.normal();
    }
  };
  Matrix xtr, xte;
  std::vector<int> ytr, yte;
  make(400, xtr, ytr);
  make(400, xte, yte);
  GbtParams p;
  p.rounds = 20;
  p.max_depth = 3;
  const auto pred = gbt_predict(gbt_fit(xtr, ytr, p), xte).classes;
  std::size_t hit = 0;
  for (std::size_t r = 0; r < yte.size(); ++r) hit += pred[r] == yte[r];
  EXPECT_GT(static_cast<double>(hit) / static_cast<double>(yte.size()), 0.95);
}

TEST(GbtPredict, EmptyModelUsesBaseScores) {
  GbtModel m;
  m.classes = 3;
  m.features = 2;
  m.base_scores = {0.0, 0.0, 0.0};
  const auto p = gbt_predict(m, Matrix(4, 2, 1.0));
  for (double v : p.logits.data) EXPECT_EQ(v, 0.0);
  for (int c : p.classes) EXPECT_EQ(c, 0);
}

TEST(GbtPredict, BatchEqualsPerRowAndWidthChecked) {
  Rng rng(3);
  Matrix x(60, 4);
  std::vector<int> y(60);
  for (auto& v : x.data) v = rng.normal();
  for (std::size_t r = 0; r < 60; ++r) y[r] = x(r, 1) > 0 ? 1 : 0;
  GbtParams p;
  p.rounds = 5;
  const auto m = gbt_fit(x, y, p);
  const auto batch = gbt_predict(m, x);
  for (std::size_t r = 0; r < 60; ++r) {
    const std::size_t idx[] = {r};
    const auto one = gbt_predict(m, gather_rows(x, idx));
    EXPECT_EQ(one.classes[0], batch.classes[r]);
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(one.logits(0, c), batch.logits(r, c));
  }
  try {
    gbt_predict(m, Matrix(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(GbtFit, DeterministicAndSerializable) {
  Rng rng(9);
  Matrix x(80, 3);
  std::vector<int> y(80);
  for (auto& v : x.data) v = rng.normal();
  for (std::size_t r = 0; r < 80; ++r) y[r] = static_cast<int>(r % 4);
  GbtParams p;
  p.rounds = 4;
  p.max_depth = 4;
  const auto a = gbt_fit(x, y, p), b = gbt_fit(x, y, p);
  EXPECT_EQ(a, b);
  std::stringstream s;
  write_gbt(s, a);
  EXPECT_EQ(s.str().substr(0, 8), "KANIDSGB");
  const auto c = read_gbt(s);
  EXPECT_EQ(a, c);
  EXPECT_EQ(gbt_predict(a, x).logits, gbt_predict(c, x).logits);

  std::stringstream truncated(s.str().substr(0, s.str().size() - 3));
  EXPECT_THROW(read_gbt(truncated), Error);
}

TEST(GbtFit, SingleClassAndExplicitClassCount) {
  Matrix x(10, 1);
  for (std::size_t r = 0; r < 10; ++r) x(r, 0) = static_cast<double>(r);
  const std::vector<int> y(10, 0);
  GbtParams p;
  p.rounds = 3;
  const auto m = gbt_fit(x, y, p);
  EXPECT_EQ(m.classes, 1u);
  for (int c : gbt_predict(m, x).classes) EXPECT_EQ(c, 0);
  const auto m5 = gbt_fit(x, y, p, 5);
  EXPECT_EQ(m5.classes, 5u);
  for (int c : gbt_predict(m5, x).classes) EXPECT_EQ(c, 0);
}

TEST(GbtFit, InvalidInputs) {
  Matrix x(3, 1, 0.0);
  const std::vector<int> bad_label{0, 1, -1};
  EXPECT_THROW(gbt_fit(x, bad_label, {}), Error);
  const std::vector<int> short_labels{0, 1};
  EXPECT_THROW(gbt_fit(x, short_labels, {}), Error);
  const std::vector<int> y{0, 1, 2};
  EXPECT_THROW(gbt_fit(x, y, {}, 2), Error);
  x(1, 0) = std::nan("");
  try {
    gbt_fit(x, y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
  }
}
