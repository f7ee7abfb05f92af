#include "mascot/numerics/tensor.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <sstream>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/tape.hpp"

namespace mascot {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_debug_checks{false};
#else
std::atomic<bool> g_debug_checks{true};
#endif

}  // namespace

bool debug_checks() { return g_debug_checks.load(std::memory_order_relaxed); }
void set_debug_checks(bool enabled) { g_debug_checks.store(enabled, std::memory_order_relaxed); }

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

bool all_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor::Tensor() : shape_{}, data_(std::make_shared<const std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)) {
  for (auto e : shape_)
    if (e == 0) throw DimensionError("tensor extents must be positive, got " + to_string(shape_));
  if (mascot::numel(shape_) != data.size())
    throw DimensionError("shape " + to_string(shape_) + " does not match " +
                         std::to_string(data.size()) + " values");
  if (!all_finite(data)) throw InputError("tensor data must be finite");
  data_ = std::make_shared<const std::vector<double>>(std::move(data));
}

Tensor::Tensor(Shape shape, std::shared_ptr<const std::vector<double>> data)
    : shape_(std::move(shape)), data_(std::move(data)) {}

Tensor Tensor::unchecked(Shape shape, std::vector<double> data) {
  if (mascot::numel(shape) != data.size())
    throw DimensionError("shape " + to_string(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
  return Tensor(std::move(shape), std::make_shared<const std::vector<double>>(std::move(data)));
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
  const auto n = mascot::numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

std::size_t Tensor::last_dim() const { return shape_.empty() ? 1 : shape_.back(); }

std::size_t Tensor::rows() const { return numel() / last_dim(); }

double Tensor::at(std::size_t row, std::size_t col) const {
  if (rank() != 2) throw DimensionError("at(row, col) requires a matrix");
  return (*data_)[row * shape_[1] + col];
}

double Tensor::item() const {
  if (numel() != 1) throw ContractError("item() on a tensor with " + std::to_string(numel()) + " elements");
  return (*data_)[0];
}

Tensor Tensor::detach() const { return Tensor(shape_, data_); }

Tensor Tensor::reshape(Shape shape) const {
  if (mascot::numel(shape) != numel())
    throw DimensionError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  Tensor out(std::move(shape), data_);
  if (!tape_) return out;
  return tape_->record(std::move(out), {node_}, [](std::span<const double> g, GradSink& sink) {
    auto dx = sink[0];
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
  });
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(double)) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.numel() != b.numel()) throw DimensionError("max_abs_diff on tensors of different size");
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace mascot
