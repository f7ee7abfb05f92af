#include "mascot/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mascot/numerics/errors.hpp"

namespace mascot {

namespace {

Tensor nudged(const Tensor& x, std::size_t i, double delta) {
  std::vector<double> v = x.values();
  v[i] += delta;
  return Tensor(x.shape(), std::move(v));
}

}  // namespace

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw DimensionError("max_relative_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(analytic[i])));
  return worst;
}

std::vector<double> numeric_gradient(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  if (h < 1e-7 || h > 1e-3) throw ConfigError("finite-difference step must lie in [1e-7, 1e-3]");
  std::vector<double> g(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i)
    g[i] = (f(nudged(x, i, h)) - f(nudged(x, i, -h))) / (2.0 * h);
  return g;
}

GradCheckResult finite_diff_check(const ScalarFn& f, const Tensor& x, double h) {
  GradCheckResult r;
  {
    Tape tape;
    const Tensor leaf = tape.variable(x);
    const Tensor y = f(&tape, leaf);
    r.analytic = tape.backward(y).of(leaf);
  }
  r.numeric = numeric_gradient([&](const Tensor& xp) { return f(nullptr, xp).item(); }, x, h);
  r.max_rel_error = max_relative_error(r.analytic, r.numeric);
  return r;
}

}  // namespace mascot
