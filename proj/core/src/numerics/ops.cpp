#include "mascot/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "mascot/numerics/errors.hpp"
#include "internal.hpp"
#include "mascot/numerics/tape.hpp"

namespace mascot {

using detail::CMap;
using detail::emit;
using detail::MMap;
using detail::RowMat;
using detail::add_into;
using detail::owned;
using detail::to_vector;

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shapes " + to_string(a.shape()) + " and " +
                         to_string(b.shape()) + " differ");
}

void require_matrix(const Tensor& a, const char* op) {
  if (a.rank() != 2) throw DimensionError(std::string(op) + ": expected a matrix, got " + to_string(a.shape()));
}

Shape with_last(const Shape& s, std::size_t last) {
  Shape out = s;
  if (out.empty()) out.push_back(last);
  else out.back() = last;
  return out;
}

template <typename F, typename D>
Tensor unary(const Tensor& x, F forward, D derivative) {
  std::vector<double> y(x.numel());
  const auto xs = x.data();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = forward(xs[i]);
  return emit(x.shape(), std::move(y), {&x}, [x, derivative](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    const auto xs = x.data();
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * derivative(xs[i]);
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw DimensionError("matmul: inner dimensions " + std::to_string(k) + " and " +
                         std::to_string(b.dim(0)) + " differ");
  const RowMat C = owned(a.data().data(), m, k) * owned(b.data().data(), k, n);
  return emit({m, n}, to_vector(C), {&a, &b}, [a, b, m, k, n](std::span<const double> g, GradSink& sink) {
    const RowMat G = owned(g.data(), m, n);
    if (auto da = sink[0]; !da.empty()) add_into(da, G * owned(b.data().data(), k, n).transpose());
    if (auto db = sink[1]; !db.empty()) add_into(db, owned(a.data().data(), m, k).transpose() * G);
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k)
    throw DimensionError("matmul_nt: inner dimensions " + std::to_string(k) + " and " +
                         std::to_string(b.dim(1)) + " differ");
  const RowMat C = owned(a.data().data(), m, k) * owned(b.data().data(), n, k).transpose();
  return emit({m, n}, to_vector(C), {&a, &b}, [a, b, m, k, n](std::span<const double> g, GradSink& sink) {
    const RowMat G = owned(g.data(), m, n);
    if (auto da = sink[0]; !da.empty()) add_into(da, G * owned(b.data().data(), n, k));
    if (auto db = sink[1]; !db.empty()) add_into(db, G.transpose() * owned(a.data().data(), m, k));
  });
}

namespace {

Tensor linear_impl(const Tensor& x, const Tensor& w, const Tensor* bias) {
  require_matrix(w, "linear");
  const std::size_t k = w.dim(0), n = w.dim(1);
  if (x.last_dim() != k)
    throw DimensionError("linear: input width " + std::to_string(x.last_dim()) + " vs weight rows " + std::to_string(k));
  if (bias && bias->numel() != n)
    throw DimensionError("linear: bias length " + std::to_string(bias->numel()) + " vs " + std::to_string(n));
  const std::size_t m = x.rows();
  RowMat Y = owned(x.data().data(), m, k) * owned(w.data().data(), k, n);
  if (bias) Y.rowwise() += CMap(bias->data().data(), 1, static_cast<Eigen::Index>(n)).row(0);
  auto backward = [x, w, m, k, n, has_bias = bias != nullptr](std::span<const double> g, GradSink& sink) {
    const RowMat G = owned(g.data(), m, n);
    if (auto dx = sink[0]; !dx.empty()) add_into(dx, G * owned(w.data().data(), k, n).transpose());
    if (auto dw = sink[1]; !dw.empty()) add_into(dw, owned(x.data().data(), m, k).transpose() * G);
    if (!has_bias) return;
    if (auto db = sink[2]; !db.empty()) add_into(db, G.colwise().sum());
  };
  if (bias) return emit(with_last(x.shape(), n), to_vector(Y), {&x, &w, bias}, std::move(backward));
  return emit(with_last(x.shape(), n), to_vector(Y), {&x, &w}, std::move(backward));
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) { return linear_impl(x, w, &bias); }

Tensor linear(const Tensor& x, const Tensor& w) { return linear_impl(x, w, nullptr); }

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> t(m * n);
  MMap(t.data(), n, m) = CMap(a.data().data(), m, n).transpose();
  return emit({n, m}, std::move(t), {&a}, [m, n](std::span<const double> g, GradSink& sink) {
    auto da = sink[0];
    MMap(da.data(), m, n) += CMap(g.data(), n, m).transpose();
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> y(a.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] + b[i];
  return emit(a.shape(), std::move(y), {&a, &b}, [](std::span<const double> g, GradSink& sink) {
    for (std::size_t s = 0; s < 2; ++s)
      if (auto d = sink[s]; !d.empty())
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> y(a.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] - b[i];
  return emit(a.shape(), std::move(y), {&a, &b}, [](std::span<const double> g, GradSink& sink) {
    if (auto d = sink[0]; !d.empty())
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
    if (auto d = sink[1]; !d.empty())
      for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> y(a.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] * b[i];
  return emit(a.shape(), std::move(y), {&a, &b}, [a, b](std::span<const double> g, GradSink& sink) {
    if (auto d = sink[0]; !d.empty())
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * b[i];
    if (auto d = sink[1]; !d.empty())
      for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * a[i];
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> y(a.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] * c;
  return emit(a.shape(), std::move(y), {&a}, [c](std::span<const double> g, GradSink& sink) {
    auto d = sink[0];
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * c;
  });
}

Tensor div_scalar(const Tensor& a, const Tensor& s) {
  if (s.numel() != 1) throw DimensionError("div_scalar: divisor must hold one element");
  const double d = s[0];
  if (d == 0.0) throw ContractError("div_scalar: division by zero");
  std::vector<double> y(a.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] / d;
  return emit(a.shape(), std::move(y), {&a, &s}, [a, d](std::span<const double> g, GradSink& sink) {
    if (auto da = sink[0]; !da.empty())
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] / d;
    if (auto ds = sink[1]; !ds.empty()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * a[i];
      ds[0] -= acc / (d * d);
    }
  });
}

Tensor weighted_sum(std::span<const Tensor> terms, std::span<const double> weights) {
  if (terms.empty() || terms.size() != weights.size())
    throw ContractError("weighted_sum: need one weight per term");
  const Shape& shape = terms.front().shape();
  std::vector<double> y(terms.front().numel(), 0.0);
  std::vector<const Tensor*> inputs;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    require_same_shape(terms[t], terms.front(), "weighted_sum");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += weights[t] * terms[t][i];
    inputs.push_back(&terms[t]);
  }
  std::vector<double> w(weights.begin(), weights.end());
  return emit(shape, std::move(y), inputs, [w](std::span<const double> g, GradSink& sink) {
    for (std::size_t t = 0; t < w.size(); ++t)
      if (auto d = sink[t]; !d.empty())
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += w[t] * g[i];
  });
}

Tensor exp(const Tensor& x) {
  std::vector<double> y(x.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(x[i]);
  Tensor out = Tensor::unchecked(x.shape(), y);
  return emit(x.shape(), std::move(y), {&x}, [out](std::span<const double> g, GradSink& sink) {
    auto d = sink[0];
    for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * out[i];
  });
}

Tensor log_clamped(const Tensor& x, double floor) {
  return unary(
      x, [floor](double v) { return std::log(std::max(v, floor)); },
      [floor](double v) { return v > floor ? 1.0 / v : 0.0; });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  if (lo > hi) throw ConfigError("clamp: lo > hi");
  return unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& x) {
  constexpr double c = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double a = 0.044715;
  return unary(
      x,
      [](double v) { return 0.5 * v * (1.0 + std::tanh(c * (v + a * v * v * v))); },
      [](double v) {
        const double t = std::tanh(c * (v + a * v * v * v));
        return 0.5 * (1.0 + t) + 0.5 * v * (1.0 - t * t) * c * (1.0 + 3.0 * a * v * v);
      });
}

Tensor softmax_lastdim(const Tensor& x) {
  const std::size_t n = x.last_dim(), rows = x.rows();
  std::vector<double> y(x.numel());
  const auto xs = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xs.data() + r * n;
    double* out = y.data() + r * n;
    const double m = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += (out[j] = std::exp(in[j] - m));
    for (std::size_t j = 0; j < n; ++j) out[j] /= z;
  }
  Tensor probs = Tensor::unchecked(x.shape(), y);
  return emit(x.shape(), std::move(y), {&x}, [probs, n, rows](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    const auto p = probs.data();
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[r * n + j] * p[r * n + j];
      for (std::size_t j = 0; j < n; ++j) dx[r * n + j] += p[r * n + j] * (g[r * n + j] - dot);
    }
  });
}

Tensor log_softmax_lastdim(const Tensor& x) {
  const std::size_t n = x.last_dim(), rows = x.rows();
  std::vector<double> y(x.numel());
  const auto xs = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xs.data() + r * n;
    const double m = *std::max_element(in, in + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(in[j] - m);
    const double lse = m + std::log(z);
    for (std::size_t j = 0; j < n; ++j) y[r * n + j] = in[j] - lse;
  }
  Tensor logp = Tensor::unchecked(x.shape(), y);
  return emit(x.shape(), std::move(y), {&x}, [logp, n, rows](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t r = 0; r < rows; ++r) {
      double gs = 0.0;
      for (std::size_t j = 0; j < n; ++j) gs += g[r * n + j];
      for (std::size_t j = 0; j < n; ++j) dx[r * n + j] += g[r * n + j] - std::exp(logp[r * n + j]) * gs;
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const std::size_t d = x.last_dim(), rows = x.rows();
  if (d < 2) throw DimensionError("layer_norm: last dimension must be at least 2");
  if (gain.numel() != d || bias.numel() != d) throw DimensionError("layer_norm: gain/bias length must equal " + std::to_string(d));
  std::vector<double> y(x.numel()), xhat(x.numel()), rstd(rows);
  const auto xs = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xs.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += in[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (in[j] - mu) * (in[j] - mu);
    var /= static_cast<double>(d);
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      xhat[r * d + j] = (in[j] - mu) * rstd[r];
      y[r * d + j] = xhat[r * d + j] * gain[j] + bias[j];
    }
  }
  return emit(x.shape(), std::move(y), {&x, &gain, &bias},
              [gain, xhat = std::move(xhat), rstd = std::move(rstd), d, rows](std::span<const double> g, GradSink& sink) {
                auto dx = sink[0];
                auto dg = sink[1];
                auto db = sink[2];
                const double inv_d = 1.0 / static_cast<double>(d);
                for (std::size_t r = 0; r < rows; ++r) {
                  const double* gr = g.data() + r * d;
                  const double* xh = xhat.data() + r * d;
                  if (!dg.empty())
                    for (std::size_t j = 0; j < d; ++j) dg[j] += gr[j] * xh[j];
                  if (!db.empty())
                    for (std::size_t j = 0; j < d; ++j) db[j] += gr[j];
                  if (dx.empty()) continue;
                  double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                  for (std::size_t j = 0; j < d; ++j) {
                    const double dxh = gr[j] * gain[j];
                    mean_dxh += dxh;
                    mean_dxh_xh += dxh * xh[j];
                  }
                  mean_dxh *= inv_d;
                  mean_dxh_xh *= inv_d;
                  for (std::size_t j = 0; j < d; ++j)
                    dx[r * d + j] += rstd[r] * (gr[j] * gain[j] - mean_dxh - xh[j] * mean_dxh_xh);
                }
              });
}

Tensor normalize_rows(const Tensor& x, double eps) {
  const std::size_t d = x.last_dim(), rows = x.rows();
  std::vector<double> y(x.numel()), inv_norm(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = eps;
    for (std::size_t j = 0; j < d; ++j) s += x[r * d + j] * x[r * d + j];
    inv_norm[r] = 1.0 / std::sqrt(s);
    for (std::size_t j = 0; j < d; ++j) y[r * d + j] = x[r * d + j] * inv_norm[r];
  }
  Tensor unit = Tensor::unchecked(x.shape(), y);
  return emit(x.shape(), std::move(y), {&x},
              [unit, inv_norm = std::move(inv_norm), d, rows](std::span<const double> g, GradSink& sink) {
                auto dx = sink[0];
                for (std::size_t r = 0; r < rows; ++r) {
                  double dot = 0.0;
                  for (std::size_t j = 0; j < d; ++j) dot += g[r * d + j] * unit[r * d + j];
                  for (std::size_t j = 0; j < d; ++j)
                    dx[r * d + j] += inv_norm[r] * (g[r * d + j] - unit[r * d + j] * dot);
                }
              });
}

Tensor grl(const Tensor& x, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("grl: lambda must be positive");
  std::vector<double> y(x.data().begin(), x.data().end());
  return emit(x.shape(), std::move(y), {&x}, [lambda](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] -= lambda * g[i];
  });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return emit({}, {s}, {&x}, [](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (auto& v : dx) v += g[0];
  });
}

Tensor mean(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  const double inv = 1.0 / static_cast<double>(x.numel());
  return emit({}, {s * inv}, {&x}, [inv](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (auto& v : dx) v += g[0] * inv;
  });
}

Tensor group_mean(const Tensor& x, std::size_t group) {
  const std::size_t d = x.last_dim(), rows = x.rows();
  if (group == 0 || rows % group != 0)
    throw DimensionError("group_mean: " + std::to_string(rows) + " rows not divisible into groups of " + std::to_string(group));
  const std::size_t groups = rows / group;
  const double inv = 1.0 / static_cast<double>(group);
  std::vector<double> y(groups * d, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j) y[(r / group) * d + j] += x[r * d + j] * inv;
  return emit({groups, d}, std::move(y), {&x}, [d, rows, group, inv](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < d; ++j) dx[r * d + j] += g[(r / group) * d + j] * inv;
  });
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index) {
  const std::size_t d = x.last_dim(), rows = x.rows();
  std::vector<double> y(index.size() * d);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= rows) throw DimensionError("gather_rows: index " + std::to_string(index[r]) + " out of " + std::to_string(rows));
    std::copy_n(x.data().data() + index[r] * d, d, y.data() + r * d);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return emit({idx.size(), d}, std::move(y), {&x}, [idx, d](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t j = 0; j < d; ++j) dx[idx[r] * d + j] += g[r * d + j];
  });
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.last_dim() != b.last_dim()) throw DimensionError("concat_rows: widths differ");
  const std::size_t d = a.last_dim();
  std::vector<double> y;
  y.reserve(a.numel() + b.numel());
  y.insert(y.end(), a.data().begin(), a.data().end());
  y.insert(y.end(), b.data().begin(), b.data().end());
  const std::size_t na = a.numel();
  return emit({a.rows() + b.rows(), d}, std::move(y), {&a, &b}, [na](std::span<const double> g, GradSink& sink) {
    if (auto da = sink[0]; !da.empty())
      for (std::size_t i = 0; i < na; ++i) da[i] += g[i];
    if (auto db = sink[1]; !db.empty())
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += g[na + i];
  });
}

Tensor gather_elements(const Tensor& x, std::span<const std::size_t> index) {
  std::vector<double> y(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= x.numel()) throw DimensionError("gather_elements: index out of range");
    y[i] = x[index[i]];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return emit({idx.size()}, std::move(y), {&x}, [idx](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t i = 0; i < idx.size(); ++i) dx[idx[i]] += g[i];
  });
}

std::vector<std::size_t> tiled_rows(std::size_t period, std::size_t times) {
  std::vector<std::size_t> idx;
  idx.reserve(period * times);
  for (std::size_t t = 0; t < times; ++t)
    for (std::size_t i = 0; i < period; ++i) idx.push_back(i);
  return idx;
}

}  // namespace mascot
