#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tess {

/// Scalar type used for every state, weight and trace.
using Real = double;

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor. The product of the extents always equals the
/// number of stored values; a rank-0 tensor holds one scalar.
class Tensor {
 public:
  /// Empty tensor of shape [0].
  Tensor() : shape_{0} {}
  explicit Tensor(Shape shape, Real fill = 0);
  Tensor(Shape shape, std::vector<Real> values);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor vector(std::initializer_list<Real> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::initializer_list<Real> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<Real> values() noexcept { return values_; }
  std::span<const Real> values() const noexcept { return values_; }
  Real* data() noexcept { return values_.data(); }
  const Real* data() const noexcept { return values_.data(); }

  Real& operator[](std::size_t i) { return values_[i]; }
  Real operator[](std::size_t i) const { return values_[i]; }

  // Rank-2 element access, row-major.
  Real& at(std::size_t row, std::size_t col) { return values_[row * shape_[1] + col]; }
  Real at(std::size_t row, std::size_t col) const { return values_[row * shape_[1] + col]; }

  void fill(Real value);

  /// Same values under a new shape of equal size.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  /// Row `index` of the leading axis, as a tensor with the remaining extents.
  Tensor slice(std::size_t index) const;

  bool all_finite() const noexcept;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<Real> values_;
};

// Throws ShapeError unless both tensors carry identical extents.
void require_same_shape(const Tensor& a, const Tensor& b, const char* context);
// Throws NumericError if any value is NaN or infinite.
void require_finite(const Tensor& t, const char* context);

// Elementwise helpers. All return a fresh tensor unless named *_inplace.
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scaled(const Tensor& a, Real factor);
void axpy_inplace(Tensor& y, Real alpha, const Tensor& x);  // y += alpha * x
void scale_inplace(Tensor& y, Real factor);

Real sum(const Tensor& t);
Real dot(const Tensor& a, const Tensor& b);
Real l2_norm(const Tensor& t);
Real max_abs(const Tensor& t);
Real max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace tess
