#pragma once

// Trained classifiers (MLP, KAN, hybrid KAN -> boosted trees), their
// training procedures, on-disk layout, and the three-way comparison.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <optional>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kanids/boost.hpp"
#include "kanids/data.hpp"
#include "kanids/error.hpp"
#include "kanids/kan.hpp"
#include "kanids/metrics.hpp"
#include "kanids/optim.hpp"

namespace kanids {

enum class ModelKind { Mlp, Kan, Hybrid };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Kan: return "kan";
    case ModelKind::Hybrid: return "hybrid";
  }
  return "kan";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "mlp") return ModelKind::Mlp;
  if (s == "kan") return ModelKind::Kan;
  if (s == "hybrid") return ModelKind::Hybrid;
  throw Error(ErrorKind::Config, "unknown model '" + std::string(s) + "' (expected mlp, kan or hybrid)");
}

/// Which KAN output the boosted trees consume.
enum class HybridFeatures { Hidden, Logits };

inline HybridFeatures parse_hybrid_features(std::string_view s) {
  if (s == "hidden") return HybridFeatures::Hidden;
  if (s == "logits") return HybridFeatures::Logits;
  throw Error(ErrorKind::Config, "unknown hybrid feature source '" + std::string(s) + "'");
}

inline std::string_view to_string(HybridFeatures f) { return f == HybridFeatures::Hidden ? "hidden" : "logits"; }

struct PipelineConfig {
  KanShape kan{};
  std::vector<std::size_t> mlp_widths{115, 10, 11};
  TrainConfig train{};
  GbtParams gbt{};
  HybridFeatures hybrid_features = HybridFeatures::Hidden;
};

struct KanClassifier {
  StandardStats stats;
  KanNetwork net;

  Matrix logits(const Matrix& raw) const { return kan_forward(net, apply_standardizer(stats, raw)); }
  std::vector<int> predict(const Matrix& raw) const { return argmax_rows(logits(raw)); }
};

struct MlpClassifier {
  StandardStats stats;
  MlpNetwork net;

  std::vector<int> predict(const Matrix& raw) const {
    return argmax_rows(mlp_forward(net, apply_standardizer(stats, raw)));
  }
};

struct HybridModel {
  StandardStats stats;
  KanNetwork kan;
  GbtModel gbt;
  HybridFeatures features = HybridFeatures::Hidden;

  Matrix representation(const Matrix& raw) const {
    const Matrix z = apply_standardizer(stats, raw);
    return features == HybridFeatures::Hidden ? kan_hidden(kan, z) : kan_forward(kan, z);
  }
  std::vector<int> predict(const Matrix& raw) const { return gbt_predict(gbt, representation(raw)).classes; }
};

template <typename Model>
struct Trained {
  Model model;
  std::vector<double> loss_trace;        // per epoch (network stage)
  std::vector<double> boost_loss_trace;  // per round, hybrid only
};

namespace detail {

inline void check_widths(const std::vector<std::size_t>& widths, const Dataset& d, const char* what) {
  if (widths.size() < 2) throw Error(ErrorKind::Config, std::string(what) + " needs at least two widths");
  if (widths.front() != d.width())
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " input width " + std::to_string(widths.front()) +
                                              " != dataset width " + std::to_string(d.width()));
  if (widths.back() != d.classes())
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + " output width " + std::to_string(widths.back()) +
                                              " != class count " + std::to_string(d.classes()));
}

}  // namespace detail

inline Trained<KanClassifier> train_kan(const Dataset& train_set, const PipelineConfig& cfg) {
  detail::check_widths(cfg.kan.widths, train_set, "kan");
  auto [z, stats] = standardize(train_set);
  KanClassifier model{std::move(stats), make_kan(cfg.kan, derive_seed(cfg.train.seed, 1))};
  auto trace = train(model.net, z.features, z.labels, cfg.train);
  return {std::move(model), std::move(trace), {}};
}

inline Trained<MlpClassifier> train_mlp(const Dataset& train_set, const PipelineConfig& cfg) {
  detail::check_widths(cfg.mlp_widths, train_set, "mlp");
  auto [z, stats] = standardize(train_set);
  MlpClassifier model{std::move(stats), make_mlp(cfg.mlp_widths, derive_seed(cfg.train.seed, 2))};
  auto trace = train(model.net, z.features, z.labels, cfg.train);
  return {std::move(model), std::move(trace), {}};
}

/// Stages 2 and 3: extract the KAN representation of the training rows and
/// boost on it.
inline Trained<HybridModel> fit_hybrid_head(const Trained<KanClassifier>& kan, const Dataset& train_set,
                                            const PipelineConfig& cfg) {
  HybridModel model{kan.model.stats, kan.model.net, {}, cfg.hybrid_features};
  const Matrix rep = model.representation(train_set.features);
  std::vector<double> boost_trace;
  model.gbt = gbt_fit(rep, train_set.labels, cfg.gbt, train_set.classes(), &boost_trace);
  return {std::move(model), kan.loss_trace, std::move(boost_trace)};
}

inline Trained<HybridModel> train_hybrid(const Dataset& train_set, const PipelineConfig& cfg) {
  if (train_set.classes() < 2) throw Error(ErrorKind::InvalidArgument, "hybrid needs at least two classes");
  if (cfg.kan.widths.size() < 3 && cfg.hybrid_features == HybridFeatures::Hidden)
    throw Error(ErrorKind::Config, "hidden-feature hybrid needs a KAN with a hidden layer");
  return fit_hybrid_head(train_kan(train_set, cfg), train_set, cfg);
}

// ---------------------------------------------------------------------------
// On-disk layout: one directory per model holding model.json (kind and
// options), stats.bin, and kan.bin / mlp.bin / gbt.bin as applicable.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Writer, typename Value>
void write_binary_file(const std::filesystem::path& path, Writer writer, const Value& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  writer(out, value);
}

template <typename Reader>
auto read_binary_file(const std::filesystem::path& path, Reader reader) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return reader(in);
}

inline void write_model_json(const std::filesystem::path& dir, ModelKind kind, const nlohmann::json& extra = {}) {
  nlohmann::json j = {{"kind", to_string(kind)}, {"format_version", 1}};
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(dir / "model.json");
  out << j.dump(2) << '\n';
}

}  // namespace detail

inline ModelKind saved_model_kind(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw Error(ErrorKind::Io, "no model.json in " + dir.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("kind")) throw Error(ErrorKind::Format, "malformed model.json in " + dir.string());
  return parse_model_kind(j["kind"].get<std::string>());
}

inline void save_model(const std::filesystem::path& dir, const KanClassifier& m) {
  std::filesystem::create_directories(dir);
  detail::write_binary_file(dir / "stats.bin", write_stats, m.stats);
  detail::write_binary_file(dir / "kan.bin", write_kan, m.net);
  detail::write_model_json(dir, ModelKind::Kan);
}

inline void save_model(const std::filesystem::path& dir, const MlpClassifier& m) {
  std::filesystem::create_directories(dir);
  detail::write_binary_file(dir / "stats.bin", write_stats, m.stats);
  detail::write_binary_file(dir / "mlp.bin", write_mlp, m.net);
  detail::write_model_json(dir, ModelKind::Mlp);
}

inline void save_model(const std::filesystem::path& dir, const HybridModel& m) {
  std::filesystem::create_directories(dir);
  detail::write_binary_file(dir / "stats.bin", write_stats, m.stats);
  detail::write_binary_file(dir / "kan.bin", write_kan, m.kan);
  detail::write_binary_file(dir / "gbt.bin", write_gbt, m.gbt);
  detail::write_model_json(dir, ModelKind::Hybrid, {{"features", to_string(m.features)}});
}

inline KanClassifier load_kan_classifier(const std::filesystem::path& dir) {
  return {detail::read_binary_file(dir / "stats.bin", read_stats), detail::read_binary_file(dir / "kan.bin", read_kan)};
}

inline MlpClassifier load_mlp_classifier(const std::filesystem::path& dir) {
  return {detail::read_binary_file(dir / "stats.bin", read_stats), detail::read_binary_file(dir / "mlp.bin", read_mlp)};
}

inline HybridModel load_hybrid_model(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  HybridModel m;
  m.stats = detail::read_binary_file(dir / "stats.bin", read_stats);
  m.kan = detail::read_binary_file(dir / "kan.bin", read_kan);
  m.gbt = detail::read_binary_file(dir / "gbt.bin", read_gbt);
  m.features = parse_hybrid_features(j.value("features", std::string("hidden")));
  return m;
}

/// Predictions of whichever model is saved in `dir`.
inline std::vector<int> predict_saved(const std::filesystem::path& dir, const Matrix& raw) {
  switch (saved_model_kind(dir)) {
    case ModelKind::Mlp: return load_mlp_classifier(dir).predict(raw);
    case ModelKind::Kan: return load_kan_classifier(dir).predict(raw);
    case ModelKind::Hybrid: return load_hybrid_model(dir).predict(raw);
  }
  return {};
}

inline void write_loss_csv(std::ostream& out, const std::vector<double>& trace, std::string_view step = "epoch") {
  out << step << ",loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, trace[i]);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct ModelResult {
  std::string name;
  EvalReport report;
  std::vector<double> loss_trace;
  std::vector<double> boost_loss_trace;
  std::string error;  // non-empty when this model failed

  bool ok() const { return error.empty(); }
};

struct Comparison {
  std::vector<ModelResult> rows;  // mlp, kan, hybrid

  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ModelResult& r) { return r.ok(); });
  }
};

/// Trains all three models on `train_set` and evaluates them on `test_set`.
/// The hybrid's first stage is exactly the KAN-only training run under the
/// same seed, so that network is trained once and shared. A failing model is
/// recorded with its error and the remaining models still run.
inline Comparison compare_models(const Dataset& train_set, const Dataset& test_set, const PipelineConfig& cfg) {
  Comparison out;
  auto score = [&](const std::vector<int>& predicted) {
    return evaluate(predicted, test_set.labels, test_set.classes(), test_set.class_names);
  };
  auto failed = [](std::string name, const std::exception& e) {
    ModelResult r;
    r.name = std::move(name);
    r.error = e.what();
    return r;
  };

  try {
    const auto mlp = train_mlp(train_set, cfg);
    out.rows.push_back({"mlp", score(mlp.model.predict(test_set.features)), mlp.loss_trace, {}, {}});
  } catch (const std::exception& e) {
    out.rows.push_back(failed("mlp", e));
  }

  std::optional<Trained<KanClassifier>> kan;
  try {
    kan = train_kan(train_set, cfg);
    out.rows.push_back({"kan", score(kan->model.predict(test_set.features)), kan->loss_trace, {}, {}});
  } catch (const std::exception& e) {
    kan.reset();
    out.rows.push_back(failed("kan", e));
  }

  try {
    if (!kan) throw Error(ErrorKind::InvalidArgument, "KAN stage failed");
    const auto hybrid = fit_hybrid_head(*kan, train_set, cfg);
    out.rows.push_back({"hybrid", score(hybrid.model.predict(test_set.features)), hybrid.loss_trace,
                        hybrid.boost_loss_trace, {}});
  } catch (const std::exception& e) {
    out.rows.push_back(failed("hybrid", e));
  }
  return out;
}

inline void write_comparison_csv(std::ostream& out, const Comparison& cmp) {
  out << "model,accuracy";
  for (auto mode : {"micro", "macro", "weighted"}) out << ",precision_" << mode << ",recall_" << mode << ",f1_" << mode;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.10f", v);
    out << buf;
  };
  for (const auto& row : cmp.rows) {
    out << row.name;
    if (!row.ok()) {
      out << ",failed,,,,,,,,,\n";
      continue;
    }
    put(row.report.accuracy);
    for (const auto* m : {&row.report.micro, &row.report.macro, &row.report.weighted}) {
      put(m->precision);
      put(m->recall);
      put(m->f1);
    }
    out << '\n';
  }
}

}  // namespace kanids
