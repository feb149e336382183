#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "kanids/metrics.hpp"
#include "kanids/rng.hpp"

using namespace kanids;

namespace {

std::vector<int> repeat(std::initializer_list<std::pair<int, int>> runs) {
  std::vector<int> out;
  for (auto [value, count] : runs) out.insert(out.end(), static_cast<std::size_t>(count), value);
  return out;
}

struct Counts {
  double tp = 0, fp = 0, fn = 0;
};

// Per-class counts straight from the label/prediction pairs.
std::vector<Counts> count_pairs(const std::vector<int>& pred, const std::vector<int>& truth, int classes) {
  std::vector<Counts> c(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == truth[i]) {
      c[static_cast<std::size_t>(pred[i])].tp += 1;
    } else {
      c[static_cast<std::size_t>(pred[i])].fp += 1;
      c[static_cast<std::size_t>(truth[i])].fn += 1;
    }
  }
  return c;
}

}  // namespace

TEST(Evaluate, PerfectPredictions) {
  const std::vector<int> y{0, 1, 2, 2, 1, 0, 3};
  const auto rep = evaluate(y, y, 4);
  EXPECT_EQ(rep.accuracy, 1.0);
  for (auto a : {Averaging::Micro, Averaging::Macro, Averaging::Weighted}) {
    EXPECT_EQ(rep.averaged(a).precision, 1.0);
    EXPECT_EQ(rep.averaged(a).recall, 1.0);
    EXPECT_EQ(rep.averaged(a).f1, 1.0);
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) EXPECT_EQ(rep.confusion[i][j], 0u);
}

TEST(Evaluate, TwoClassHandExample) {
  // TP=2, FN=1, FP=1, TN=6 for class 1.
  const auto truth = repeat({{1, 2}, {1, 1}, {0, 1}, {0, 6}});
  const auto pred = repeat({{1, 2}, {0, 1}, {1, 1}, {0, 6}});
  const auto rep = evaluate(pred, truth, 2);
  EXPECT_NEAR(rep.per_class[1].precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rep.per_class[1].recall, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(rep.per_class[1].f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(rep.per_class[1].support, 3u);
  EXPECT_NEAR(rep.accuracy, 0.8, 1e-15);
}

TEST(Evaluate, EmptyColumnGivesZeroPrecision) {
  const std::vector<int> truth{0, 1, 2}, pred{0, 0, 0};
  const auto rep = evaluate(pred, truth, 3);
  EXPECT_EQ(rep.per_class[1].precision, 0.0);
  EXPECT_EQ(rep.per_class[1].f1, 0.0);
}

TEST(Evaluate, MatchesPairCountingOnRandomInputs) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(rng.index(10));
    const std::size_t n = 1 + rng.index(300);
    std::vector<int> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
      pred[i] = rng.uniform() < 0.6 ? truth[i] : static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
    }
    const auto rep = evaluate(pred, truth, static_cast<std::size_t>(classes));

    std::uint64_t mass = 0;
    for (const auto& row : rep.confusion)
      for (auto v : row) mass += v;
    EXPECT_EQ(mass, n);

    EXPECT_NEAR(rep.micro.recall, rep.accuracy, 1e-12);
    EXPECT_NEAR(rep.micro.precision, rep.accuracy, 1e-12);
    EXPECT_NEAR(rep.weighted.recall, rep.accuracy, 1e-12);

    const auto counts = count_pairs(pred, truth, classes);
    std::set<int> present(truth.begin(), truth.end());
    present.insert(pred.begin(), pred.end());
    double macro_p = 0, macro_r = 0, macro_f = 0, w_p = 0, w_f = 0;
    for (int c = 0; c < classes; ++c) {
      const auto& k = counts[static_cast<std::size_t>(c)];
      const double p = k.tp + k.fp > 0 ? k.tp / (k.tp + k.fp) : 0.0;
      const double r = k.tp + k.fn > 0 ? k.tp / (k.tp + k.fn) : 0.0;
      const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      const auto& m = rep.per_class[static_cast<std::size_t>(c)];
      EXPECT_NEAR(m.precision, p, 1e-12);
      EXPECT_NEAR(m.recall, r, 1e-12);
      EXPECT_NEAR(m.f1, f, 1e-12);
      if (present.count(c)) {
        macro_p += p;
        macro_r += r;
        macro_f += f;
      }
      const double support = k.tp + k.fn;
      w_p += support * p;
      w_f += support * f;
    }
    const double np = static_cast<double>(present.size());
    EXPECT_NEAR(rep.macro.precision, macro_p / np, 1e-12);
    EXPECT_NEAR(rep.macro.recall, macro_r / np, 1e-12);
    EXPECT_NEAR(rep.macro.f1, macro_f / np, 1e-12);
    EXPECT_NEAR(rep.weighted.precision, w_p / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(rep.weighted.f1, w_f / static_cast<double>(n), 1e-12);
  }
}

TEST(Evaluate, Errors) {
  const std::vector<int> a{0, 1}, b{0};
  try {
    evaluate(a, b, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
  }
  const std::vector<int> c{0, 2};
  try {
    evaluate(c, a, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelOutOfRange);
  }
}

TEST(Averaging, ParseAndPrint) {
  for (auto a : {Averaging::Micro, Averaging::Macro, Averaging::Weighted})
    EXPECT_EQ(parse_averaging(to_string(a)), a);
  EXPECT_THROW(parse_averaging("median"), Error);
}

TEST(ConfusionCsv, RoundTripAndLayout) {
  const std::vector<int> truth{0, 1, 2, 2, 1}, pred{0, 2, 2, 1, 1};
  const auto rep = evaluate(pred, truth, 3, {"benign", "gafgyt.scan", "mirai.ack"});
  std::stringstream s;
  write_confusion_csv(s, rep);
  EXPECT_EQ(s.str(),
            "true\\predicted,benign,gafgyt.scan,mirai.ack\n"
            "benign,1,0,0\n"
            "gafgyt.scan,0,1,1\n"
            "mirai.ack,0,1,1\n");
  const auto back = read_confusion_csv(s);
  EXPECT_EQ(back.confusion, rep.confusion);
  EXPECT_EQ(back.class_names, rep.class_names);
  EXPECT_EQ(back.accuracy, rep.accuracy);
  EXPECT_EQ(back.weighted.f1, rep.weighted.f1);
}

TEST(ReportJson, Fields) {
  const std::vector<int> y{0, 1, 1};
  const auto j = to_json(evaluate(y, y, 2));
  EXPECT_EQ(j["total"], 3);
  EXPECT_EQ(j["accuracy"], 1.0);
  EXPECT_EQ(j["per_class"].size(), 2u);
  EXPECT_EQ(j["confusion"][1][1], 2);
  for (const char* k : {"micro", "macro", "weighted"}) EXPECT_TRUE(j.contains(k));
}
