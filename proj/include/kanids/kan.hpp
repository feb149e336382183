#pragma once

// Kolmogorov-Arnold network layers, the dense MLP baseline, softmax
// cross-entropy, and hand-written reverse-mode gradients for both.
//
// Every edge (q, p) of a KAN layer carries
//
//   phi_qp(x) = base_weight_qp * silu(x) + spline_scale_qp * spline_qp(u(x))
//
// where u(x) = clamp(x / input_scale, lo, hi) squeezes the input into the grid
// domain, and node q sums its incoming edges.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kanids/binary_io.hpp"
#include "kanids/error.hpp"
#include "kanids/matrix.hpp"
#include "kanids/rng.hpp"
#include "kanids/splines.hpp"

namespace kanids {

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double silu(double x) { return x * logistic(x); }

inline double silu_derivative(double x) {
  const double s = logistic(x);
  return s * (1.0 + x * (1.0 - s));
}

// ---------------------------------------------------------------------------
// KAN
// ---------------------------------------------------------------------------

struct KanLayer {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  SplineGrid grid;
  double input_scale = 3.0;
  std::vector<double> spline_coeffs;  // n_out x n_in x B
  std::vector<double> base_weights;   // n_out x n_in
  std::vector<double> spline_scales;  // n_out x n_in

  std::size_t basis_count() const { return grid.basis_count(); }
  std::size_t edge(std::size_t q, std::size_t p) const { return q * n_in + p; }

  std::span<double> coeffs(std::size_t q, std::size_t p) {
    return {spline_coeffs.data() + edge(q, p) * basis_count(), basis_count()};
  }
  std::span<const double> coeffs(std::size_t q, std::size_t p) const {
    return {spline_coeffs.data() + edge(q, p) * basis_count(), basis_count()};
  }

  /// Spline argument for a raw input, plus whether the clamp was inactive.
  std::pair<double, bool> spline_input(double x) const {
    const double u = x / input_scale;
    if (u < grid.lo) return {grid.lo, false};
    if (u > grid.hi) return {grid.hi, false};
    return {u, true};
  }

  bool operator==(const KanLayer&) const = default;
};

/// A layer with every parameter zero.
inline KanLayer make_zero_kan_layer(std::size_t n_in, std::size_t n_out, const SplineGrid& grid,
                                    double input_scale = 3.0) {
  if (n_in == 0 || n_out == 0) throw Error(ErrorKind::InvalidArgument, "layer widths must be positive");
  if (!(input_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "input_scale must be positive");
  KanLayer layer;
  layer.n_in = n_in;
  layer.n_out = n_out;
  layer.grid = grid;
  layer.input_scale = input_scale;
  layer.spline_coeffs.assign(n_in * n_out * grid.basis_count(), 0.0);
  layer.base_weights.assign(n_in * n_out, 0.0);
  layer.spline_scales.assign(n_in * n_out, 0.0);
  return layer;
}

/// Spline coefficients ~ N(0, 0.1 / sqrt(B)), base weights ~ U(+-1/sqrt(n_in)),
/// spline scales = 1.
inline KanLayer make_kan_layer(std::size_t n_in, std::size_t n_out, const SplineGrid& grid,
                               Rng& rng, double input_scale = 3.0) {
  KanLayer layer = make_zero_kan_layer(n_in, n_out, grid, input_scale);
  const double coeff_std = 0.1 / std::sqrt(static_cast<double>(grid.basis_count()));
  for (auto& c : layer.spline_coeffs) c = rng.normal(0.0, coeff_std);
  const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
  for (auto& w : layer.base_weights) w = rng.uniform(-bound, bound);
  std::fill(layer.spline_scales.begin(), layer.spline_scales.end(), 1.0);
  return layer;
}

inline Matrix kan_layer_forward(const KanLayer& layer, const Matrix& batch) {
  if (batch.cols != layer.n_in)
    throw Error(ErrorKind::ShapeMismatch, "batch width " + std::to_string(batch.cols) +
                                              " != layer input width " + std::to_string(layer.n_in));
  const int k = layer.grid.degree;
  Matrix out(batch.rows, layer.n_out);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    auto y = out.row(r);
    for (std::size_t p = 0; p < layer.n_in; ++p) {
      const double x = batch(r, p);
      const double s = silu(x);
      const LocalBasis local = local_basis(layer.grid, layer.spline_input(x).first, false);
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        const std::size_t e = layer.edge(q, p);
        const double* c = layer.spline_coeffs.data() + e * layer.basis_count() + local.first;
        double spline = 0.0;
        for (int j = 0; j <= k; ++j) spline += c[j] * local.values[j];
        y[q] += layer.base_weights[e] * s + layer.spline_scales[e] * spline;
      }
    }
  }
  return out;
}

/// Accumulates parameter gradients of `layer` into `grad` (same shape) given
/// dL/d(output), and returns dL/d(input).
inline Matrix kan_layer_backward(const KanLayer& layer, const Matrix& batch, const Matrix& grad_out,
                                 KanLayer& grad) {
  if (batch.cols != layer.n_in || grad_out.cols != layer.n_out || grad_out.rows != batch.rows)
    throw Error(ErrorKind::ShapeMismatch, "kan layer backward shapes do not match");
  const int k = layer.grid.degree;
  const std::size_t nb = layer.basis_count();
  Matrix grad_in(batch.rows, layer.n_in);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    for (std::size_t p = 0; p < layer.n_in; ++p) {
      const double x = batch(r, p);
      const double s = silu(x);
      const double ds = silu_derivative(x);
      const auto [u, inside] = layer.spline_input(x);
      const LocalBasis local = local_basis(layer.grid, u, inside && k > 0);
      const double du_dx = inside ? 1.0 / layer.input_scale : 0.0;
      double dx = 0.0;
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        const double g = grad_out(r, q);
        const std::size_t e = layer.edge(q, p);
        const std::size_t base = e * nb + local.first;
        const double* c = layer.spline_coeffs.data() + base;
        double spline = 0.0;
        double slope = 0.0;
        for (int j = 0; j <= k; ++j) {
          spline += c[j] * local.values[j];
          if (inside && k > 0) slope += c[j] * local.derivs[j];
        }
        const double ws = layer.spline_scales[e];
        grad.base_weights[e] += g * s;
        grad.spline_scales[e] += g * spline;
        double* gc = grad.spline_coeffs.data() + base;
        for (int j = 0; j <= k; ++j) gc[j] += g * ws * local.values[j];
        dx += g * (layer.base_weights[e] * ds + ws * slope * du_dx);
      }
      grad_in(r, p) = dx;
    }
  }
  return grad_in;
}

struct KanNetwork {
  std::vector<KanLayer> layers;

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().n_in);
    for (const auto& l : layers) w.push_back(l.n_out);
    return w;
  }

  bool operator==(const KanNetwork&) const = default;
};

inline void validate(const KanNetwork& net) {
  if (net.layers.empty()) throw Error(ErrorKind::InvalidArgument, "network has no layers");
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    if (l.spline_coeffs.size() != l.n_in * l.n_out * l.basis_count() ||
        l.base_weights.size() != l.n_in * l.n_out || l.spline_scales.size() != l.n_in * l.n_out)
      throw Error(ErrorKind::ShapeMismatch, "layer " + std::to_string(i) + " tensor shapes inconsistent");
    if (i + 1 < net.layers.size() && l.n_out != net.layers[i + 1].n_in)
      throw Error(ErrorKind::ShapeMismatch, "layer " + std::to_string(i) + " output width does not feed layer " +
                                                std::to_string(i + 1));
  }
}

struct KanShape {
  std::vector<std::size_t> widths{115, 10, 11};
  int grid_intervals = 7;
  int degree = 5;
  double domain_lo = -1.0;
  double domain_hi = 1.0;
  double input_scale = 3.0;
};

inline KanNetwork make_kan(const KanShape& shape, std::uint64_t seed) {
  if (shape.widths.size() < 2) throw Error(ErrorKind::InvalidArgument, "a network needs at least two widths");
  const SplineGrid grid = build_grid(shape.degree, shape.grid_intervals, shape.domain_lo, shape.domain_hi);
  Rng rng(seed);
  KanNetwork net;
  for (std::size_t i = 0; i + 1 < shape.widths.size(); ++i)
    net.layers.push_back(make_kan_layer(shape.widths[i], shape.widths[i + 1], grid, rng, shape.input_scale));
  return net;
}

inline KanNetwork zeros_like(const KanNetwork& net) {
  KanNetwork z = net;
  for (auto& l : z.layers) {
    std::fill(l.spline_coeffs.begin(), l.spline_coeffs.end(), 0.0);
    std::fill(l.base_weights.begin(), l.base_weights.end(), 0.0);
    std::fill(l.spline_scales.begin(), l.spline_scales.end(), 0.0);
  }
  return z;
}

inline Matrix kan_forward(const KanNetwork& net, const Matrix& batch) {
  validate(net);
  Matrix x = batch;
  for (const auto& layer : net.layers) x = kan_layer_forward(layer, x);
  return x;
}

/// Activations after the penultimate layer.
inline Matrix kan_hidden(const KanNetwork& net, const Matrix& batch) {
  validate(net);
  if (net.layers.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "hidden activations need a network with at least two layers");
  Matrix x = batch;
  for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) x = kan_layer_forward(net.layers[i], x);
  return x;
}

inline std::vector<std::span<double>> parameter_views(KanNetwork& net) {
  std::vector<std::span<double>> views;
  for (auto& l : net.layers) {
    views.emplace_back(l.spline_coeffs);
    views.emplace_back(l.base_weights);
    views.emplace_back(l.spline_scales);
  }
  return views;
}

// ---------------------------------------------------------------------------
// MLP baseline
// ---------------------------------------------------------------------------

struct DenseLayer {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::vector<double> weights;  // n_out x n_in
  std::vector<double> bias;     // n_out

  bool operator==(const DenseLayer&) const = default;
};

/// Dense layers with silu between them; the last layer emits raw logits.
struct MlpNetwork {
  std::vector<DenseLayer> layers;

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().n_in);
    for (const auto& l : layers) w.push_back(l.n_out);
    return w;
  }

  bool operator==(const MlpNetwork&) const = default;
};

inline void validate(const MlpNetwork& net) {
  if (net.layers.empty()) throw Error(ErrorKind::InvalidArgument, "network has no layers");
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    if (l.weights.size() != l.n_in * l.n_out || l.bias.size() != l.n_out)
      throw Error(ErrorKind::ShapeMismatch, "dense layer " + std::to_string(i) + " tensor shapes inconsistent");
    if (i + 1 < net.layers.size() && l.n_out != net.layers[i + 1].n_in)
      throw Error(ErrorKind::ShapeMismatch, "dense layer widths do not chain");
  }
}

inline MlpNetwork make_mlp(const std::vector<std::size_t>& widths, std::uint64_t seed) {
  if (widths.size() < 2) throw Error(ErrorKind::InvalidArgument, "a network needs at least two widths");
  Rng rng(seed);
  MlpNetwork net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    if (widths[i] == 0 || widths[i + 1] == 0) throw Error(ErrorKind::InvalidArgument, "layer widths must be positive");
    DenseLayer l{widths[i], widths[i + 1], std::vector<double>(widths[i] * widths[i + 1]),
                 std::vector<double>(widths[i + 1])};
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[i]));
    for (auto& w : l.weights) w = rng.uniform(-bound, bound);
    for (auto& b : l.bias) b = rng.uniform(-bound, bound);
    net.layers.push_back(std::move(l));
  }
  return net;
}

inline MlpNetwork zeros_like(const MlpNetwork& net) {
  MlpNetwork z = net;
  for (auto& l : z.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return z;
}

inline Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
  if (x.cols != layer.n_in) throw Error(ErrorKind::ShapeMismatch, "batch width does not match dense layer");
  Matrix y(x.rows, layer.n_out);
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t q = 0; q < layer.n_out; ++q) {
      const double* w = layer.weights.data() + q * layer.n_in;
      double sum = layer.bias[q];
      for (std::size_t p = 0; p < layer.n_in; ++p) sum += w[p] * x(r, p);
      y(r, q) = sum;
    }
  }
  return y;
}

inline Matrix mlp_forward(const MlpNetwork& net, const Matrix& batch) {
  validate(net);
  Matrix x = batch;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    x = dense_forward(net.layers[i], x);
    if (i + 1 < net.layers.size())
      for (auto& v : x.data) v = silu(v);
  }
  return x;
}

inline std::vector<std::span<double>> parameter_views(MlpNetwork& net) {
  std::vector<std::span<double>> views;
  for (auto& l : net.layers) {
    views.emplace_back(l.weights);
    views.emplace_back(l.bias);
  }
  return views;
}

// ---------------------------------------------------------------------------
// Loss and gradients
// ---------------------------------------------------------------------------

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // d(mean loss)/d(logits)
};

inline LossResult softmax_cross_entropy(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows) throw Error(ErrorKind::LengthMismatch, "one label per logit row required");
  if (logits.rows == 0) throw Error(ErrorKind::EmptyDataset, "no rows");
  const std::size_t classes = logits.cols;
  LossResult out{0.0, Matrix(logits.rows, classes)};
  const double inv_rows = 1.0 / static_cast<double>(logits.rows);
  for (std::size_t r = 0; r < logits.rows; ++r) {
    const int label = labels[r];
    if (label < 0 || static_cast<std::size_t>(label) >= classes)
      throw Error(ErrorKind::LabelOutOfRange, "label " + std::to_string(label) + " at row " + std::to_string(r));
    auto z = logits.row(r);
    const double shift = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - shift);
    const double log_sum = std::log(sum) + shift;
    out.loss += log_sum - z[static_cast<std::size_t>(label)];
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(z[c] - log_sum);
      g[c] = (p - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv_rows;
    }
  }
  out.loss *= inv_rows;
  return out;
}

/// Mean squared error over every output cell; gradient is 2 (y - t) / cells.
inline LossResult mse_loss(const Matrix& outputs, const Matrix& targets) {
  if (outputs.rows != targets.rows || outputs.cols != targets.cols)
    throw Error(ErrorKind::ShapeMismatch, "outputs and targets differ in shape");
  if (outputs.data.empty()) throw Error(ErrorKind::EmptyDataset, "no rows");
  const double inv = 1.0 / static_cast<double>(outputs.data.size());
  LossResult out{0.0, Matrix(outputs.rows, outputs.cols)};
  for (std::size_t i = 0; i < outputs.data.size(); ++i) {
    const double d = outputs.data[i] - targets.data[i];
    out.loss += d * d;
    out.grad.data[i] = 2.0 * d * inv;
  }
  out.loss *= inv;
  return out;
}

/// Layer inputs recorded during a forward pass, for the backward pass.
struct KanTape {
  std::vector<Matrix> inputs;
  Matrix output;
};

inline KanTape kan_forward_tape(const KanNetwork& net, const Matrix& batch) {
  validate(net);
  KanTape tape;
  tape.inputs.reserve(net.layers.size());
  Matrix x = batch;
  for (const auto& layer : net.layers) {
    tape.inputs.push_back(x);
    x = kan_layer_forward(layer, x);
  }
  tape.output = std::move(x);
  return tape;
}

/// Parameter gradients, shaped like `net`, given dL/d(output).
inline KanNetwork kan_backward(const KanNetwork& net, const KanTape& tape, Matrix upstream) {
  KanNetwork grad = zeros_like(net);
  for (std::size_t i = net.layers.size(); i-- > 0;)
    upstream = kan_layer_backward(net.layers[i], tape.inputs[i], upstream, grad.layers[i]);
  return grad;
}

/// Mean cross-entropy of the batch and its gradient with respect to every
/// network parameter, laid out as a network of the same shape.
inline std::pair<double, KanNetwork> loss_and_gradient(const KanNetwork& net, const Matrix& batch,
                                                       std::span<const int> labels) {
  const KanTape tape = kan_forward_tape(net, batch);
  LossResult lr = softmax_cross_entropy(tape.output, labels);
  return {lr.loss, kan_backward(net, tape, std::move(lr.grad))};
}

inline std::pair<double, KanNetwork> regression_loss_and_gradient(const KanNetwork& net, const Matrix& batch,
                                                                  const Matrix& targets) {
  const KanTape tape = kan_forward_tape(net, batch);
  LossResult lr = mse_loss(tape.output, targets);
  return {lr.loss, kan_backward(net, tape, std::move(lr.grad))};
}

inline std::pair<double, MlpNetwork> loss_and_gradient(const MlpNetwork& net, const Matrix& batch,
                                                       std::span<const int> labels) {
  validate(net);
  // pre[i] is the pre-activation of layer i, inputs[i] what layer i consumed.
  std::vector<Matrix> inputs, pre;
  Matrix x = batch;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    inputs.push_back(x);
    Matrix z = dense_forward(net.layers[i], x);
    pre.push_back(z);
    if (i + 1 < net.layers.size())
      for (auto& v : z.data) v = silu(v);
    x = std::move(z);
  }
  LossResult lr = softmax_cross_entropy(x, labels);
  MlpNetwork grad = zeros_like(net);
  Matrix upstream = std::move(lr.grad);
  for (std::size_t i = net.layers.size(); i-- > 0;) {
    const auto& layer = net.layers[i];
    auto& g = grad.layers[i];
    if (i + 1 < net.layers.size())
      for (std::size_t j = 0; j < upstream.data.size(); ++j) upstream.data[j] *= silu_derivative(pre[i].data[j]);
    Matrix down(upstream.rows, layer.n_in);
    for (std::size_t r = 0; r < upstream.rows; ++r) {
      for (std::size_t q = 0; q < layer.n_out; ++q) {
        const double d = upstream(r, q);
        g.bias[q] += d;
        const double* w = layer.weights.data() + q * layer.n_in;
        double* gw = g.weights.data() + q * layer.n_in;
        for (std::size_t p = 0; p < layer.n_in; ++p) {
          gw[p] += d * inputs[i](r, p);
          down(r, p) += d * w[p];
        }
      }
    }
    upstream = std::move(down);
  }
  return {lr.loss, std::move(grad)};
}

inline Matrix logits(const KanNetwork& net, const Matrix& batch) { return kan_forward(net, batch); }
inline Matrix logits(const MlpNetwork& net, const Matrix& batch) { return mlp_forward(net, batch); }

inline std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = m.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
//
// KAN file:  "KANIDSKN" u32 version, u32 layer count M, (M + 1) x u32 widths,
//            u32 degree, u32 intervals, f64 lo, f64 hi, f64 input_scale,
//            then per layer: spline_coeffs, base_weights, spline_scales (f64,
//            row-major).
// MLP file:  "KANIDSMP" u32 version, u32 layer count M, (M + 1) x u32 widths,
//            then per layer: weights (n_out x n_in), bias.
// All values little-endian.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kModelFormatVersion = 1;

inline void write_kan(std::ostream& out, const KanNetwork& net) {
  validate(net);
  io::BinaryWriter w(out);
  w.magic("KANIDSKN");
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.layers.size()));
  for (auto width : net.widths()) w.u32(static_cast<std::uint32_t>(width));
  // All layers share one grid configuration.
  const auto& first = net.layers.front();
  for (const auto& l : net.layers)
    if (l.grid != first.grid || l.input_scale != first.input_scale)
      throw Error(ErrorKind::InvalidArgument, "serialization requires a shared grid");
  w.u32(static_cast<std::uint32_t>(first.grid.degree));
  w.u32(static_cast<std::uint32_t>(first.grid.intervals));
  w.f64(first.grid.lo);
  w.f64(first.grid.hi);
  w.f64(first.input_scale);
  for (const auto& l : net.layers) {
    w.f64s(l.spline_coeffs);
    w.f64s(l.base_weights);
    w.f64s(l.spline_scales);
  }
  w.check();
}

inline KanNetwork read_kan(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("KANIDSKN");
  if (const auto v = r.u32(); v != kModelFormatVersion)
    throw Error(ErrorKind::Format, "unsupported KAN format version " + std::to_string(v));
  const std::uint32_t count = r.u32();
  if (count == 0 || count > 1024) throw Error(ErrorKind::Format, "implausible layer count");
  std::vector<std::size_t> widths(count + 1);
  for (auto& w : widths) w = r.u32();
  const int degree = static_cast<int>(r.u32());
  const int intervals = static_cast<int>(r.u32());
  const double lo = r.f64();
  const double hi = r.f64();
  const double scale = r.f64();
  const SplineGrid grid = build_grid(degree, intervals, lo, hi);
  KanNetwork net;
  for (std::uint32_t i = 0; i < count; ++i) {
    KanLayer l = make_zero_kan_layer(widths[i], widths[i + 1], grid, scale);
    l.spline_coeffs = r.f64s(l.spline_coeffs.size());
    l.base_weights = r.f64s(l.base_weights.size());
    l.spline_scales = r.f64s(l.spline_scales.size());
    net.layers.push_back(std::move(l));
  }
  return net;
}

inline void write_mlp(std::ostream& out, const MlpNetwork& net) {
  validate(net);
  io::BinaryWriter w(out);
  w.magic("KANIDSMP");
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.layers.size()));
  for (auto width : net.widths()) w.u32(static_cast<std::uint32_t>(width));
  for (const auto& l : net.layers) {
    w.f64s(l.weights);
    w.f64s(l.bias);
  }
  w.check();
}

inline MlpNetwork read_mlp(std::istream& in) {
  io::BinaryReader r(in);
  r.expect_magic("KANIDSMP");
  if (const auto v = r.u32(); v != kModelFormatVersion)
    throw Error(ErrorKind::Format, "unsupported MLP format version " + std::to_string(v));
  const std::uint32_t count = r.u32();
  if (count == 0 || count > 1024) throw Error(ErrorKind::Format, "implausible layer count");
  std::vector<std::size_t> widths(count + 1);
  for (auto& w : widths) w = r.u32();
  MlpNetwork net;
  for (std::uint32_t i = 0; i < count; ++i) {
    DenseLayer l{widths[i], widths[i + 1], r.f64s(widths[i] * widths[i + 1]), r.f64s(widths[i + 1])};
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace kanids
