#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace manybody {

using Index = std::vector<std::size_t>;

/**
 * Extents of a dense row-major array (last index fastest).
 *
 * Indices handed to and returned from Shape are 0-based; the "first" entry of
 * a mode in the usual 1-based notation is index 0 here.
 */
class Shape {
public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t stride(std::size_t mode) const { return strides_.at(mode); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  std::size_t offset(std::span<const std::size_t> index) const;
  Index unravel(std::size_t offset) const;

  /// Calls `fn(base)` once per mode-`mode` fiber; the fiber's entries are at
  /// `base + k * stride(mode)` for k in [0, dim(mode)).
  template <typename Fn>
  void for_each_fiber(std::size_t mode, Fn&& fn) const {
    const std::size_t inner = strides_[mode];
    const std::size_t block = inner * dims_[mode];
    for (std::size_t outer = 0; outer < size_; outer += block) {
      for (std::size_t in = 0; in < inner; ++in) {
        fn(outer + in);
      }
    }
  }

  bool operator==(const Shape& other) const noexcept { return dims_ == other.dims_; }

private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Advances a row-major multi-index; returns false after the last index.
bool next_index(Index& index, const Shape& shape);

/// Non-negative dense tensor. Immutable once constructed.
class DenseTensor {
public:
  DenseTensor() = default;
  /// Throws Errc::SizeMismatch / Errc::InvalidArgument when the invariants fail.
  DenseTensor(Shape shape, std::vector<double> values);
  DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
      : DenseTensor(Shape(std::move(dims)), std::move(values)) {}

  static DenseTensor filled(const Shape& shape, double value);

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<std::size_t>& dims() const noexcept { return shape_.dims(); }
  std::size_t order() const noexcept { return shape_.order(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t offset) const { return values_[offset]; }
  double at(std::span<const std::size_t> index) const { return values_[shape_.offset(index)]; }

  DenseTensor scaled(double factor) const;

private:
  Shape shape_;
  std::vector<double> values_;
};

/// Tensor with missing entries. Missing slots hold NaN; `observed` is the mask.
class MaskedTensor {
public:
  MaskedTensor(Shape shape, std::vector<double> values, std::vector<bool> observed);
  /// Observed wherever the value is not NaN.
  static MaskedTensor from_nan(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<bool>& observed() const noexcept { return observed_; }
  bool is_observed(std::size_t offset) const { return observed_[offset]; }
  std::size_t observed_count() const noexcept { return observed_count_; }
  std::size_t missing_count() const noexcept { return values_.size() - observed_count_; }

private:
  Shape shape_;
  std::vector<double> values_;
  std::vector<bool> observed_;
  std::size_t observed_count_ = 0;
};

double total_sum(const DenseTensor& t);
double frobenius_norm(const DenseTensor& t);

struct Normalized {
  DenseTensor tensor;
  double scale;
};

/// Divides by the total sum. Throws Errc::ZeroTensor on an all-zero input.
Normalized normalize(const DenseTensor& t);

/// Generalized I-divergence sum(p log(p/q) - p + q) with 0 log 0 = 0.
double kl_divergence(const DenseTensor& p, const DenseTensor& q);

/// ||truth - approx||_F / ||truth||_F
double relative_error(const DenseTensor& truth, const DenseTensor& approx);

/// 1 - relative error restricted to the entries selected by `mask`.
double recovery_fit(const DenseTensor& truth, const DenseTensor& approx,
                    const std::vector<bool>& mask);

DenseTensor reshape(const DenseTensor& t, std::vector<std::size_t> new_dims);

/// Order-3 core of a tensor ring, shape (left, mid, right), row-major.
struct RingCore {
  std::size_t left = 0;
  std::size_t mid = 0;
  std::size_t right = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t i, std::size_t s) const {
    return values[(r * mid + i) * right + s];
  }
};

/// P[i_1..i_D] = trace(core_1[:, i_1, :] * ... * core_D[:, i_D, :]).
DenseTensor contract_ring(std::span<const RingCore> cores);

/**
 * Contracts D cores of shape (R_{d-1}, I_d, R_d), R_0 = R_D, whose entries are
 * drawn i.i.d. from the open interval (0, 1). `ring_ranks` is (R_1, ..., R_D).
 * Deterministic for a given seed within one build.
 */
DenseTensor random_ring_tensor(const std::vector<std::size_t>& dims,
                               const std::vector<std::size_t>& ring_ranks, std::uint64_t seed);

}  // namespace manybody
