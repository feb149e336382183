// kanids: prepare datasets, train and evaluate the MLP / KAN / hybrid
// classifiers, and export comparison tables and loss curves.
//
// Exit codes: 0 success, 2 configuration, 3 ingestion / data, 4 numeric
// failure, 1 anything else.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kanids/config.hpp"
#include "kanids/kanids.hpp"

namespace fs = std::filesystem;
using namespace kanids;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIngestion = 3;
constexpr int kExitNumeric = 4;

struct Options {
  std::string config;
  std::string profile = "paper";
  std::string out = "run";
  std::optional<std::uint64_t> seed;
  std::string model = "hybrid";
  std::string data;
  std::string partition = "test";
};

fs::path profile_path(const std::string& profile) {
  if (profile.find('/') != std::string::npos || profile.ends_with(".profile")) return profile;
  return fs::path(KANIDS_PROFILE_DIR) / (profile + ".profile");
}

RunConfig resolve(const Options& opt) {
  RunConfig cfg;
  if (!opt.profile.empty()) {
    const fs::path p = profile_path(opt.profile);
    if (!fs::exists(p)) throw Error(ErrorKind::Config, "unknown profile '" + opt.profile + "' (" + p.string() + ")");
    cfg.merge_file(p);
  }
  if (!opt.config.empty()) cfg.merge_file(opt.config);
  if (opt.seed) cfg.set_all_seeds(*opt.seed);
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

void write_snapshot(const fs::path& dir, const RunConfig& cfg) {
  std::ostringstream s;
  cfg.write(s);
  write_text(dir / "config.resolved", s.str());
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::uint64_t h = fnv1a("");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  return hex64(h);
}

fs::path dataset_path(const Options& opt) {
  return opt.data.empty() ? fs::path(opt.out) / "dataset.csv" : fs::path(opt.data);
}

DataSplit load_split(const Options& opt, const RunConfig& cfg) {
  const Dataset d = load_dataset_csv(dataset_path(opt).string());
  return stratified_split(d, cfg.real("split.test_fraction"), cfg.integer("split.seed"));
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * v);
  return buf;
}

void print_summary(std::ostream& out, const std::string& name, const EvalReport& rep, Averaging mode) {
  const auto& m = rep.averaged(mode);
  out << name << "  accuracy " << percent(rep.accuracy) << "  precision " << percent(m.precision) << "  recall "
      << percent(m.recall) << "  f1 " << percent(m.f1) << "  (" << to_string(mode) << ", n=" << rep.total << ")\n";
}

// ---------------------------------------------------------------------------

int cmd_synth(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const fs::path out(opt.out);
  fs::create_directories(out);
  SynthSpec spec = cfg.synth_spec();
  if (spec.counts.size() != kClassCount)
    throw Error(ErrorKind::Config, "synth fixtures need " + std::to_string(kClassCount) + " class counts");
  const auto devices = cfg.list("data.devices");
  if (devices.empty()) throw Error(ErrorKind::Config, "data.devices is empty");
  const std::vector<std::size_t> per_device = spec.counts;
  for (auto& c : spec.counts) c *= devices.size();
  const Dataset all = synth_generate(spec);

  // Rows of each class are dealt to devices in blocks.
  std::size_t row = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    for (const auto& device : devices) {
      std::vector<std::size_t> idx(per_device[c]);
      for (auto& i : idx) i = row++;
      const Dataset part = select_rows(all, idx);
      const fs::path path = out / (device + "." + std::string(traffic_kinds()[c]) + ".csv");
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
      write_device_csv(f, part);
    }
  }
  write_snapshot(out, cfg);
  std::cout << "wrote " << devices.size() * kClassCount << " fixture files to " << out.string() << "\n";
  return 0;
}

int cmd_prepare(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const fs::path out(opt.out);
  const std::string source = cfg.str("data.source");
  nlohmann::json manifest = {{"format", "kanids-manifest"}, {"version", 1}, {"source", source}};
  Dataset d;

  if (source == "synth") {
    const SynthSpec spec = cfg.synth_spec();
    d = synth_generate(spec);
    manifest["seeds"] = {{"synth", spec.seed}};
    manifest["sources"] = nlohmann::json::array();
  } else if (source == "nbaiot") {
    const fs::path root(cfg.str("data.root"));
    if (root.empty() || !fs::is_directory(root))
      throw Error(ErrorKind::Config, "data.root '" + root.string() + "' is not a directory");
    const SamplingPlan plan = cfg.sampling_plan();
    std::vector<Dataset> fragments;
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& device : plan.devices) {
      std::vector<int> kinds{0};
      kinds.insert(kinds.end(), plan.attacks.begin(), plan.attacks.end());
      for (int k : kinds) {
        const std::string kind(traffic_kinds()[static_cast<std::size_t>(k)]);
        const fs::path path = root / (device + "." + kind + ".csv");
        if (!fs::exists(path)) throw Error(ErrorKind::Ingestion, "missing source file " + path.string());
        fragments.push_back(load_device_csv(path.string(), device, kind));
        sources.push_back({{"file", path.filename().string()}, {"rows", fragments.back().rows()},
                           {"checksum", file_checksum(path)}});
      }
    }
    d = build_subset(fragments, plan);
    manifest["seeds"] = {{"data", plan.seed}};
    manifest["sources"] = sources;
    manifest["plan"] = {{"benign_total", plan.benign_total},
                        {"per_attack_per_device", plan.per_attack_per_device},
                        {"devices", plan.devices}};
  } else {
    throw Error(ErrorKind::Config, "data.source must be 'synth' or 'nbaiot', got '" + source + "'");
  }
  check_invariants(d);

  fs::create_directories(out);
  const fs::path data_file = out / "dataset.csv";
  {
    std::ofstream f(data_file, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + data_file.string());
    write_dataset_csv(f, d);
  }
  nlohmann::json classes = nlohmann::json::array();
  const auto hist = class_histogram(d);
  std::size_t benign = 0, malicious = 0;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    classes.push_back({{"class", d.class_names[c]}, {"id", c}, {"count", hist[c]}});
    (c == 0 ? benign : malicious) += hist[c];
  }
  std::map<std::string, std::size_t> per_device;
  for (const auto& p : d.provenance) ++per_device[p.device];
  manifest["rows"] = d.rows();
  manifest["features"] = d.width();
  manifest["benign"] = benign;
  manifest["malicious"] = malicious;
  manifest["class_counts"] = classes;
  manifest["device_counts"] = per_device;
  manifest["dataset_checksum"] = file_checksum(data_file);
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  write_snapshot(out, cfg);
  std::cout << "prepared " << d.rows() << " rows (" << benign << " benign, " << malicious << " malicious) in "
            << out.string() << "\n";
  return 0;
}

int cmd_train(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const PipelineConfig pc = cfg.pipeline();
  const DataSplit split = load_split(opt, cfg);
  const ModelKind kind = parse_model_kind(opt.model);
  const fs::path dir = fs::path(opt.out) / std::string(to_string(kind));
  fs::create_directories(dir);

  auto write_trace = [&](const std::string& name, const std::vector<double>& trace, std::string_view step) {
    std::ofstream f(dir / name, std::ios::binary);
    write_loss_csv(f, trace, step);
  };
  std::vector<double> trace;
  switch (kind) {
    case ModelKind::Mlp: {
      auto t = train_mlp(split.train, pc);
      save_model(dir, t.model);
      trace = t.loss_trace;
      break;
    }
    case ModelKind::Kan: {
      auto t = train_kan(split.train, pc);
      save_model(dir, t.model);
      trace = t.loss_trace;
      break;
    }
    case ModelKind::Hybrid: {
      auto t = train_hybrid(split.train, pc);
      save_model(dir, t.model);
      trace = t.loss_trace;
      write_trace("boost_loss.csv", t.boost_loss_trace, "round");
      break;
    }
  }
  write_trace("loss.csv", trace, "epoch");
  write_snapshot(dir, cfg);
  std::cout << to_string(kind) << ": trained on " << split.train.rows() << " rows, final loss " << trace.back()
            << ", saved to " << dir.string() << "\n";
  return 0;
}

int cmd_eval(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const DataSplit split = load_split(opt, cfg);
  const ModelKind kind = parse_model_kind(opt.model);
  const fs::path dir = fs::path(opt.out) / std::string(to_string(kind));
  if (opt.partition != "test" && opt.partition != "train")
    throw Error(ErrorKind::Config, "--partition must be test or train");
  const Dataset& part = opt.partition == "test" ? split.test : split.train;
  const auto predicted = predict_saved(dir, part.features);
  const EvalReport rep = evaluate(predicted, part.labels, part.classes(), part.class_names);

  const std::string suffix = opt.partition == "test" ? "" : "_train";
  nlohmann::json j = to_json(rep);
  j["model"] = to_string(kind);
  j["partition"] = opt.partition;
  write_text(dir / ("report" + suffix + ".json"), j.dump(2) + "\n");
  std::ofstream f(dir / ("confusion" + suffix + ".csv"), std::ios::binary);
  write_confusion_csv(f, rep);
  print_summary(std::cout, std::string(to_string(kind)), rep, parse_averaging(cfg.str("eval.averaging")));
  return 0;
}

int cmd_compare(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const PipelineConfig pc = cfg.pipeline();
  const DataSplit split = load_split(opt, cfg);
  const fs::path out(opt.out);
  fs::create_directories(out);

  const Comparison cmp = compare_models(split.train, split.test, pc);
  {
    std::ofstream f(out / "comparison.csv", std::ios::binary);
    write_comparison_csv(f, cmp);
  }
  const Averaging mode = parse_averaging(cfg.str("eval.averaging"));
  for (const auto& row : cmp.rows) {
    if (!row.ok()) {
      std::cerr << row.name << ": FAILED: " << row.error << "\n";
      continue;
    }
    std::ofstream f(out / ("loss_" + row.name + ".csv"), std::ios::binary);
    write_loss_csv(f, row.loss_trace, "epoch");
    if (!row.boost_loss_trace.empty()) {
      std::ofstream b(out / ("boost_loss_" + row.name + ".csv"), std::ios::binary);
      write_loss_csv(b, row.boost_loss_trace, "round");
    }
    nlohmann::json j = to_json(row.report);
    j["model"] = row.name;
    write_text(out / ("report_" + row.name + ".json"), j.dump(2) + "\n");
    print_summary(std::cout, row.name, row.report, mode);
  }
  write_snapshot(out, cfg);
  if (!cmp.ok()) throw Error(ErrorKind::NonFinite, "one or more models failed; partial results written");
  return 0;
}

int exit_code_for(const Error& e) {
  switch (category_of(e.kind())) {
    case ErrorCategory::Config: return kExitConfig;
    case ErrorCategory::Ingestion: return kExitIngestion;
    case ErrorCategory::Numeric: return kExitNumeric;
    case ErrorCategory::Other: return kExitOther;
  }
  return kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KAN / boosted-tree intrusion detection experiments"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Config file layered over the profile")->check(CLI::ExistingFile);
    sub->add_option("--profile", opt.profile, "Profile name (paper, synth-small) or path");
    sub->add_option("--seed", opt.seed, "Override every seed");
    sub->add_option("--out", opt.out, "Output directory");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", opt.data, "Prepared dataset CSV (default: <out>/dataset.csv)");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model, "Model kind")->check(CLI::IsMember({"mlp", "kan", "hybrid"}));
  };

  auto* synth = app.add_subcommand("synth", "Write synthetic per-device fixture CSVs");
  add_common(synth);
  auto* prepare = app.add_subcommand("prepare", "Build the experiment dataset and manifest");
  add_common(prepare);
  auto* train = app.add_subcommand("train", "Train one model");
  add_common(train);
  add_data(train);
  add_model(train);
  auto* eval = app.add_subcommand("eval", "Evaluate a trained model");
  add_common(eval);
  add_data(eval);
  add_model(eval);
  eval->add_option("--partition", opt.partition, "Partition to evaluate")->check(CLI::IsMember({"test", "train"}));
  auto* compare = app.add_subcommand("compare", "Train and compare mlp, kan and hybrid");
  add_common(compare);
  add_data(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) return cmd_synth(opt);
    if (*prepare) return cmd_prepare(opt);
    if (*train) return cmd_train(opt);
    if (*eval) return cmd_eval(opt);
    if (*compare) return cmd_compare(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
