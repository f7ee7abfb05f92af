#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mascot/numerics/tape.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot {

/// Builds a scalar on `tape` (which may be null for plain evaluation) from x.
using ScalarFn = std::function<Tensor(Tape* tape, const Tensor& x)>;

struct GradCheckResult {
  /// max_i |analytic_i − numeric_i| / max(1, |analytic_i|)
  double max_rel_error = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

/// Central differences (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h for every coordinate of x,
/// compared with the tape gradient at x. h must lie in [1e-7, 1e-3].
GradCheckResult finite_diff_check(const ScalarFn& f, const Tensor& x, double h = 1e-5);

/// Central-difference gradient of f on its own, no tape involved.
std::vector<double> numeric_gradient(const std::function<double(const Tensor&)>& f,
                                     const Tensor& x, double h = 1e-5);

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric);

}  // namespace mascot
