#pragma once

// Flat "[section] key = value" run configuration. Layers are applied in
// order (built-in defaults, profile, user config, command-line overrides);
// later layers replace individual keys. Unknown keys are rejected.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kanids/data.hpp"
#include "kanids/error.hpp"
#include "kanids/pipeline.hpp"

namespace kanids {

class RunConfig {
 public:
  /// Every recognised key with its built-in (full-scale) default.
  static const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"data.source", "nbaiot"},
        {"data.root", ""},
        {"data.devices", "1,2,4,5,6,8,9"},
        {"data.benign_total", "430000"},
        {"data.per_attack_per_device", "1000"},
        {"data.seed", "1"},
        {"synth.counts", "4300,70,70,70,70,70,70,70,70,70,70"},
        {"synth.width", "115"},
        {"synth.mean_norm", "8"},
        {"synth.seed", "1"},
        {"split.test_fraction", "0.2"},
        {"split.seed", "1"},
        {"kan.widths", "115,10,11"},
        {"kan.grid_intervals", "7"},
        {"kan.degree", "5"},
        {"kan.input_scale", "3"},
        {"mlp.widths", "115,10,11"},
        {"train.epochs", "50"},
        {"train.batch_size", "512"},
        {"train.learning_rate", "0.001"},
        {"train.beta1", "0.9"},
        {"train.beta2", "0.999"},
        {"train.epsilon", "1e-8"},
        {"train.step_size", "10"},
        {"train.gamma", "0.5"},
        {"train.seed", "1"},
        {"gbt.rounds", "100"},
        {"gbt.learning_rate", "0.1"},
        {"gbt.max_depth", "6"},
        {"gbt.lambda", "1"},
        {"gbt.gamma", "0"},
        {"gbt.min_child_weight", "1"},
        {"gbt.base_score", "0"},
        {"hybrid.features", "hidden"},
        {"eval.averaging", "weighted"},
    };
    return d;
  }

  RunConfig() : values_(defaults()) {}

  void merge(std::istream& in, const std::string& source) {
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string where = source + ":" + std::to_string(line_no);
      std::string_view s = detail::trim(line);
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = detail::trim(s.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw Error(ErrorKind::Config, where + ": unterminated section header");
        section = std::string(detail::trim(s.substr(1, s.size() - 2)));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::Config, where + ": expected key = value");
      const std::string key = section + "." + std::string(detail::trim(s.substr(0, eq)));
      set(key, std::string(detail::trim(s.substr(eq + 1))), where);
    }
  }

  void merge_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config " + path.string());
    merge(in, path.string());
  }

  void set(const std::string& key, const std::string& value, const std::string& where = "override") {
    if (!defaults().contains(key)) throw Error(ErrorKind::Config, where + ": unknown key '" + key + "'");
    values_[key] = value;
  }

  /// Replaces every seed in the configuration.
  void set_all_seeds(std::uint64_t seed) {
    for (auto& [key, value] : values_)
      if (key.ends_with(".seed")) value = std::to_string(seed);
  }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::Config, "missing key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const {
    const std::string& v = str(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw Error(ErrorKind::Config, key + ": expected a number, got '" + v + "'");
    return out;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& v = str(key);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw Error(ErrorKind::Config, key + ": expected a non-negative integer, got '" + v + "'");
    return out;
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    for (auto cell : detail::split_csv_line(str(key))) {
      const auto t = detail::trim(cell);
      if (!t.empty()) out.emplace_back(t);
    }
    return out;
  }

  std::vector<std::size_t> sizes(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : list(key)) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size())
        throw Error(ErrorKind::Config, key + ": bad list element '" + item + "'");
      out.push_back(v);
    }
    return out;
  }

  /// Resolved snapshot in the same format merge() reads.
  void write(std::ostream& out) const {
    std::string section;
    for (const auto& [key, value] : values_) {
      const auto dot = key.find('.');
      const std::string sec = key.substr(0, dot);
      if (sec != section) {
        out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
        section = sec;
      }
      out << key.substr(dot + 1) << " = " << value << '\n';
    }
  }

  // Typed views -------------------------------------------------------------

  PipelineConfig pipeline() const {
    PipelineConfig p;
    p.kan.widths = sizes("kan.widths");
    p.kan.grid_intervals = static_cast<int>(integer("kan.grid_intervals"));
    p.kan.degree = static_cast<int>(integer("kan.degree"));
    p.kan.input_scale = real("kan.input_scale");
    p.mlp_widths = sizes("mlp.widths");
    p.train.epochs = integer("train.epochs");
    p.train.batch_size = integer("train.batch_size");
    p.train.learning_rate = real("train.learning_rate");
    p.train.adam = {real("train.beta1"), real("train.beta2"), real("train.epsilon")};
    p.train.step_size = integer("train.step_size");
    p.train.gamma = real("train.gamma");
    p.train.seed = integer("train.seed");
    p.gbt.rounds = integer("gbt.rounds");
    p.gbt.learning_rate = real("gbt.learning_rate");
    p.gbt.max_depth = integer("gbt.max_depth");
    p.gbt.lambda = real("gbt.lambda");
    p.gbt.gamma = real("gbt.gamma");
    p.gbt.min_child_weight = real("gbt.min_child_weight");
    p.gbt.base_score = real("gbt.base_score");
    p.hybrid_features = parse_hybrid_features(str("hybrid.features"));
    try {
      p.train.validate();
      p.gbt.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, e.what());
    }
    return p;
  }

  SamplingPlan sampling_plan() const {
    SamplingPlan plan;
    plan.benign_total = integer("data.benign_total");
    plan.per_attack_per_device = integer("data.per_attack_per_device");
    plan.devices = list("data.devices");
    plan.seed = integer("data.seed");
    return plan;
  }

  SynthSpec synth_spec() const {
    SynthSpec s;
    s.counts = sizes("synth.counts");
    s.width = integer("synth.width");
    s.mean_norm = real("synth.mean_norm");
    s.seed = integer("synth.seed");
    return s;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace kanids
