#pragma once

// Dataset ingestion, subset sampling, standardization, stratified splitting,
// and a seeded synthetic stand-in with the same layout.
//
// Class ids: 0 benign; 1-5 gafgyt (bashlite) combo, junk, scan, tcp, udp;
// 6-10 mirai ack, scan, syn, udp, udpplain.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kanids/binary_io.hpp"
#include "kanids/error.hpp"
#include "kanids/matrix.hpp"
#include "kanids/rng.hpp"

namespace kanids {

inline constexpr std::size_t kFeatureWidth = 115;
inline constexpr std::size_t kClassCount = 11;

inline const std::array<std::string_view, kClassCount>& traffic_kinds() {
  static constexpr std::array<std::string_view, kClassCount> kinds = {
      "benign",     "gafgyt.combo", "gafgyt.junk", "gafgyt.scan", "gafgyt.tcp",     "gafgyt.udp",
      "mirai.ack",  "mirai.scan",   "mirai.syn",   "mirai.udp",   "mirai.udpplain"};
  return kinds;
}

inline std::vector<std::string> traffic_class_names() {
  return {traffic_kinds().begin(), traffic_kinds().end()};
}

/// Class id for a traffic kind; accepts '.', '_' or '/' as the family
/// separator and "bashlite" as an alias of "gafgyt".
inline int class_of_kind(std::string_view kind) {
  std::string k(kind);
  std::replace(k.begin(), k.end(), '_', '.');
  std::replace(k.begin(), k.end(), '/', '.');
  if (k == "benign.traffic") k = "benign";
  if (k.rfind("bashlite.", 0) == 0) k = "gafgyt." + k.substr(9);
  if (k.rfind("gafgyt.attacks.", 0) == 0) k = "gafgyt." + k.substr(15);
  if (k.rfind("mirai.attacks.", 0) == 0) k = "mirai." + k.substr(14);
  const auto& kinds = traffic_kinds();
  for (std::size_t i = 0; i < kinds.size(); ++i)
    if (kinds[i] == k) return static_cast<int>(i);
  throw Error(ErrorKind::Ingestion, "unknown traffic kind '" + std::string(kind) + "'");
}

/// The 23 statistics x 5 decay windows column names, in distribution order.
inline std::vector<std::string> feature_names(std::size_t width = kFeatureWidth) {
  if (width != kFeatureWidth) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < width; ++i) names.push_back("f" + std::to_string(i));
    return names;
  }
  const std::array<std::string_view, 5> windows = {"L5", "L3", "L1", "L0.1", "L0.01"};
  const std::vector<std::string_view> short_stats = {"weight", "mean", "variance"};
  const std::vector<std::string_view> pair_stats = {"weight", "mean", "std", "magnitude", "radius", "covariance", "pcc"};
  const std::vector<std::pair<std::string_view, const std::vector<std::string_view>*>> groups = {
      {"MI_dir", &short_stats}, {"H", &short_stats}, {"HH", &pair_stats}, {"HH_jit", &short_stats},
      {"HpHp", &pair_stats}};
  std::vector<std::string> names;
  for (const auto& [prefix, stats] : groups)
    for (auto w : windows)
      for (auto s : *stats) names.push_back(std::string(prefix) + "_" + std::string(w) + "_" + std::string(s));
  return names;
}

struct Provenance {
  std::string device;
  int kind = 0;

  bool operator==(const Provenance&) const = default;
};

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<Provenance> provenance;
  std::vector<std::string> class_names = traffic_class_names();

  std::size_t rows() const { return features.rows; }
  std::size_t width() const { return features.cols; }
  std::size_t classes() const { return class_names.size(); }

  bool operator==(const Dataset&) const = default;
};

inline void check_invariants(const Dataset& d) {
  if (d.labels.size() != d.rows() || d.provenance.size() != d.rows())
    throw Error(ErrorKind::ShapeMismatch, "labels/provenance length differs from row count");
  for (std::size_t r = 0; r < d.rows(); ++r)
    if (d.labels[r] < 0 || static_cast<std::size_t>(d.labels[r]) >= d.classes())
      throw Error(ErrorKind::LabelOutOfRange, "label out of range at row " + std::to_string(r));
  for (double v : d.features.data)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "dataset contains non-finite features");
}

inline Dataset select_rows(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.class_names = d.class_names;
  out.features = gather_rows(d.features, indices);
  for (auto i : indices) {
    out.labels.push_back(d.labels[i]);
    out.provenance.push_back(d.provenance[i]);
  }
  return out;
}

inline Dataset concat(std::span<const Dataset> parts) {
  Dataset out;
  if (parts.empty()) return out;
  out.class_names = parts.front().class_names;
  out.features.cols = parts.front().width();
  for (const auto& p : parts) {
    if (p.width() != out.features.cols) throw Error(ErrorKind::ShapeMismatch, "fragments differ in width");
    out.features.data.insert(out.features.data.end(), p.features.data.begin(), p.features.data.end());
    out.features.rows += p.rows();
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.provenance.insert(out.provenance.end(), p.provenance.begin(), p.provenance.end());
  }
  return out;
}

inline std::vector<std::size_t> class_histogram(const Dataset& d) {
  std::vector<std::size_t> hist(d.classes(), 0);
  for (int l : d.labels) ++hist[static_cast<std::size_t>(l)];
  return hist;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_cell(std::string_view cell, const std::string& where) {
  cell = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    throw Error(ErrorKind::Ingestion, where + ": non-numeric cell '" + std::string(cell) + "'");
  if (!std::isfinite(v)) throw Error(ErrorKind::Ingestion, where + ": non-finite value '" + std::string(cell) + "'");
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses one per-(device, traffic kind) feature CSV: a header row, then rows
/// of exactly `width` numeric cells.
inline Dataset read_device_csv(std::istream& in, const std::string& source, const std::string& device,
                               std::string_view kind, std::size_t width = kFeatureWidth) {
  const int label = class_of_kind(kind);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Ingestion, source + ": missing header row");
  const auto header = detail::split_csv_line(detail::trim(line));
  if (header.size() != width)
    throw Error(ErrorKind::Ingestion, source + ": wrong column count " + std::to_string(header.size()) +
                                          " (expected " + std::to_string(width) + ")");
  Dataset out;
  out.features.cols = width;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto cells = detail::split_csv_line(trimmed);
    if (cells.size() != width)
      throw Error(ErrorKind::Ingestion, source + ":" + std::to_string(line_no) + ": wrong column count " +
                                            std::to_string(cells.size()) + " (expected " + std::to_string(width) + ")");
    for (std::size_t c = 0; c < width; ++c)
      out.features.data.push_back(detail::parse_cell(
          cells[c], source + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1)));
    ++out.features.rows;
    out.labels.push_back(label);
    out.provenance.push_back({device, label});
  }
  return out;
}

inline Dataset load_device_csv(const std::string& path, const std::string& device, std::string_view kind,
                               std::size_t width = kFeatureWidth) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_device_csv(in, path, device, kind, width);
}

/// Feature columns only, same layout the loader reads.
inline void write_device_csv(std::ostream& out, const Dataset& d) {
  const auto names = feature_names(d.width());
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    auto row = d.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << detail::format_double(row[c]);
    out << '\n';
  }
}

/// Labelled dataset file: "label,device,<feature names>".
inline void write_dataset_csv(std::ostream& out, const Dataset& d) {
  out << "label,device";
  for (const auto& n : feature_names(d.width())) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    out << d.labels[r] << ',' << d.provenance[r].device;
    for (double v : d.features.row(r)) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& in, const std::string& source,
                                std::vector<std::string> class_names = traffic_class_names()) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Ingestion, source + ": missing header row");
  const auto header = detail::split_csv_line(detail::trim(line));
  if (header.size() < 3 || detail::trim(header[0]) != "label" || detail::trim(header[1]) != "device")
    throw Error(ErrorKind::Ingestion, source + ": header must start with label,device");
  const std::size_t width = header.size() - 2;
  Dataset out;
  out.class_names = std::move(class_names);
  out.features.cols = width;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto cells = detail::split_csv_line(trimmed);
    const std::string where = source + ":" + std::to_string(line_no);
    if (cells.size() != width + 2) throw Error(ErrorKind::Ingestion, where + ": wrong column count");
    const double label = detail::parse_cell(cells[0], where + ": label");
    if (label < 0 || label >= static_cast<double>(out.class_names.size()) || label != std::floor(label))
      throw Error(ErrorKind::Ingestion, where + ": invalid label");
    for (std::size_t c = 0; c < width; ++c)
      out.features.data.push_back(detail::parse_cell(cells[c + 2], where + ": column " + std::to_string(c + 3)));
    ++out.features.rows;
    out.labels.push_back(static_cast<int>(label));
    out.provenance.push_back({std::string(detail::trim(cells[1])), static_cast<int>(label)});
  }
  return out;
}

inline Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_dataset_csv(in, path);
}

// FNV-1a; manifest checksums and stable per-device seed streams.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------
// Subset construction
// ---------------------------------------------------------------------------

struct SamplingPlan {
  std::size_t benign_total = 430000;
  std::size_t per_attack_per_device = 1000;
  std::vector<std::string> devices;
  std::vector<int> attacks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::uint64_t seed = 0;

  std::size_t total() const { return benign_total + devices.size() * attacks.size() * per_attack_per_device; }
};

/// Benign quota per device, proportional to availability (largest remainder,
/// ties to the earlier device).
inline std::vector<std::size_t> proportional_quotas(std::span<const std::size_t> available, std::size_t total) {
  const std::size_t pool = std::accumulate(available.begin(), available.end(), std::size_t{0});
  std::vector<std::size_t> quota(available.size(), 0);
  if (pool == 0) return quota;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < available.size(); ++i) {
    const long double exact = static_cast<long double>(total) * available[i] / pool;
    quota[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += quota[i];
    remainders.emplace_back(static_cast<double>(exact - quota[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t d = remainders[i].second;
    if (quota[d] < available[d]) {
      ++quota[d];
      ++assigned;
    }
  }
  return quota;
}

/// Draws the plan's exact class counts without replacement and shuffles the
/// result. Rows sharing a (device, kind) source form one sampling pool.
inline Dataset build_subset(std::span<const Dataset> fragments, const SamplingPlan& plan) {
  if (fragments.empty()) throw Error(ErrorKind::InsufficientSamples, "no fragments supplied");
  const Dataset pooled = concat(fragments);

  // (device, class) -> row indices into `pooled`, ascending.
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> cells;
  for (std::size_t r = 0; r < pooled.rows(); ++r) cells[{pooled.provenance[r].device, pooled.labels[r]}].push_back(r);
  auto cell_rows = [&](const std::string& device, int kind) -> const std::vector<std::size_t>& {
    static const std::vector<std::size_t> empty;
    auto it = cells.find({device, kind});
    return it == cells.end() ? empty : it->second;
  };

  std::vector<std::size_t> chosen;
  auto draw = [&](const std::vector<std::size_t>& pool, std::size_t count, const std::string& device, int kind) {
    if (pool.size() < count)
      throw Error(ErrorKind::InsufficientSamples,
                  "device '" + device + "' kind '" + std::string(traffic_kinds()[static_cast<std::size_t>(kind)]) +
                      "': need " + std::to_string(count) + ", have " + std::to_string(pool.size()));
    std::uint64_t stream = fnv1a(device);
    stream = derive_seed(plan.seed, stream ^ static_cast<std::uint64_t>(kind + 1));
    // Partial Fisher-Yates: the first `count` slots become a uniform sample.
    std::vector<std::size_t> p = pool;
    Rng rng(stream);
    for (std::size_t i = 0; i < count; ++i) std::swap(p[i], p[i + rng.index(p.size() - i)]);
    chosen.insert(chosen.end(), p.begin(), p.begin() + static_cast<std::ptrdiff_t>(count));
  };

  std::vector<std::size_t> available;
  for (const auto& dev : plan.devices) available.push_back(cell_rows(dev, 0).size());
  const std::size_t benign_pool = std::accumulate(available.begin(), available.end(), std::size_t{0});
  if (benign_pool < plan.benign_total)
    throw Error(ErrorKind::InsufficientSamples, "benign: need " + std::to_string(plan.benign_total) + ", have " +
                                                    std::to_string(benign_pool) + " across all devices");
  const auto quotas = proportional_quotas(available, plan.benign_total);
  for (std::size_t i = 0; i < plan.devices.size(); ++i) draw(cell_rows(plan.devices[i], 0), quotas[i], plan.devices[i], 0);
  for (const auto& dev : plan.devices)
    for (int attack : plan.attacks) draw(cell_rows(dev, attack), plan.per_attack_per_device, dev, attack);

  Rng rng(derive_seed(plan.seed, 0xfeedULL));
  rng.shuffle(std::span<std::size_t>(chosen));
  return select_rows(pooled, chosen);
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct StandardStats {
  std::vector<double> means;
  std::vector<double> stddevs;  // population; 0 marks a constant feature

  bool operator==(const StandardStats&) const = default;
};

inline StandardStats fit_standardizer(const Matrix& x) {
  if (x.rows < 2) throw Error(ErrorKind::InvalidArgument, "standardization needs at least two rows");
  StandardStats s{std::vector<double>(x.cols, 0.0), std::vector<double>(x.cols, 0.0)};
  const double n = static_cast<double>(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) s.means[c] += x(r, c);
  for (auto& m : s.means) m /= n;
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double d = x(r, c) - s.means[c];
      s.stddevs[c] += d * d;
    }
  for (auto& v : s.stddevs) v = std::sqrt(v / n);
  // Treat round-off level spread as constant.
  for (std::size_t c = 0; c < x.cols; ++c)
    if (s.stddevs[c] <= 1e-12 * std::max(1.0, std::abs(s.means[c]))) s.stddevs[c] = 0.0;
  return s;
}

inline Matrix apply_standardizer(const StandardStats& s, const Matrix& x) {
  if (x.cols != s.means.size())
    throw Error(ErrorKind::ShapeMismatch, "feature width " + std::to_string(x.cols) +
                                              " != standardizer width " + std::to_string(s.means.size()));
  Matrix out(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c)
      out(r, c) = s.stddevs[c] > 0.0 ? (x(r, c) - s.means[c]) / s.stddevs[c] : 0.0;
  return out;
}

inline std::pair<Dataset, StandardStats> standardize(const Dataset& d) {
  StandardStats stats = fit_standardizer(d.features);
  Dataset out = d;
  out.features = apply_standardizer(stats, d.features);
  return {std::move(out), std::move(stats)};
}

inline void write_stats(std::ostream& out, const StandardStats& s) {
  io::BinaryWriter w(out);
  w.magic("KANIDSST");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(s.means.size()));
  w.f64s(s.means);
  w.f64s(s.stddevs);
  w.check();
}

inline StandardStats read_stats(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("KANIDSST");
  if (r.u32() != 1) throw Error(ErrorKind::Format, "unsupported standardizer format version");
  const std::size_t width = r.u32();
  StandardStats s;
  s.means = r.f64s(width);
  s.stddevs = r.f64s(width);
  return s;
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct DataSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

/// Per class, round(n_c * test_fraction) rows (half-up, kept within
/// [1, n_c - 1]) go to the test side.
inline DataSplit stratified_split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::InvalidArgument, "test_fraction must be in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(d.classes());
  for (std::size_t r = 0; r < d.rows(); ++r) by_class[static_cast<std::size_t>(d.labels[r])].push_back(r);

  DataSplit out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2)
      throw Error(ErrorKind::ClassTooSmall, "class '" + d.class_names[c] + "' has only " +
                                                std::to_string(rows.size()) + " row");
    auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(rows.size()) * test_fraction + 0.5));
    n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::size_t>(rows));
    out.test_index.insert(out.test_index.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train_index.insert(out.train_index.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  Rng(derive_seed(seed, 0x7a11ULL)).shuffle(std::span<std::size_t>(out.train_index));
  Rng(derive_seed(seed, 0x7e57ULL)).shuffle(std::span<std::size_t>(out.test_index));
  out.train = select_rows(d, out.train_index);
  out.test = select_rows(d, out.test_index);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

struct SynthSpec {
  std::vector<std::size_t> counts;  // rows per class; size is the class count
  std::size_t width = kFeatureWidth;
  std::uint64_t seed = 0;
  double mean_norm = 8.0;         // length of each class mean over informative features
  double noise_fraction = 0.1;    // share of features carrying no class signal
  double scale_jitter = 0.25;     // per-class per-feature stddev in [1 - j, 1 + j]
  double factor_loading = 0.3;    // stddev of the two shared correlated factors' loadings
};

/// 4,300 benign plus 70 of each attack: 5,000 rows with the 86 % / 1.4 %
/// class balance of the full-scale subset.
inline SynthSpec paper_like_synth(std::uint64_t seed) {
  SynthSpec s;
  s.counts.assign(kClassCount, 70);
  s.counts[0] = 4300;
  s.seed = seed;
  return s;
}

inline Dataset synth_generate(const SynthSpec& spec) {
  const std::size_t classes = spec.counts.size();
  if (classes < 2) throw Error(ErrorKind::InvalidArgument, "synthetic data needs at least two classes");
  if (spec.width < 2) throw Error(ErrorKind::InvalidArgument, "synthetic data needs at least two features");
  Rng rng(spec.seed);

  // Class-irrelevant features, chosen once for all classes.
  std::vector<std::size_t> order(spec.width);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  const auto noise_count = static_cast<std::size_t>(std::floor(spec.noise_fraction * static_cast<double>(spec.width)));
  std::vector<char> informative(spec.width, 1);
  for (std::size_t i = 0; i < noise_count; ++i) informative[order[i]] = 0;

  struct Blob {
    std::vector<double> mean, scale, load_a, load_b;
  };
  std::vector<Blob> blobs(classes);
  for (auto& b : blobs) {
    b.mean.assign(spec.width, 0.0);
    double norm = 0.0;
    for (std::size_t f = 0; f < spec.width; ++f)
      if (informative[f]) {
        b.mean[f] = rng.normal();
        norm += b.mean[f] * b.mean[f];
      }
    norm = std::sqrt(norm);
    for (auto& m : b.mean) m *= norm > 0.0 ? spec.mean_norm / norm : 0.0;
    b.scale.resize(spec.width);
    b.load_a.resize(spec.width);
    b.load_b.resize(spec.width);
    for (std::size_t f = 0; f < spec.width; ++f) {
      b.scale[f] = informative[f] ? rng.uniform(1.0 - spec.scale_jitter, 1.0 + spec.scale_jitter) : 1.0;
      b.load_a[f] = informative[f] ? rng.normal(0.0, spec.factor_loading) : 0.0;
      b.load_b[f] = informative[f] ? rng.normal(0.0, spec.factor_loading) : 0.0;
    }
  }

  Dataset out;
  out.class_names = classes == kClassCount ? traffic_class_names() : [&] {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < classes; ++c) names.push_back("class" + std::to_string(c));
    return names;
  }();
  out.features.cols = spec.width;
  for (std::size_t c = 0; c < classes; ++c) {
    const Blob& b = blobs[c];
    for (std::size_t i = 0; i < spec.counts[c]; ++i) {
      const double fa = rng.normal();
      const double fb = rng.normal();
      for (std::size_t f = 0; f < spec.width; ++f)
        out.features.data.push_back(b.mean[f] + b.scale[f] * rng.normal() + b.load_a[f] * fa + b.load_b[f] * fb);
      ++out.features.rows;
      out.labels.push_back(static_cast<int>(c));
      out.provenance.push_back({"synth", static_cast<int>(c)});
    }
  }
  return out;
}

}  // namespace kanids
