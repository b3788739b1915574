#include "manybody/tensor.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "manybody/error.hpp"

namespace manybody {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw Error(Errc::InvalidArgument, "tensor order must be at least 1");
  strides_.assign(dims_.size(), 1);
  size_ = 1;
  for (std::size_t d = dims_.size(); d-- > 0;) {
    if (dims_[d] == 0) throw Error(Errc::InvalidArgument, "mode sizes must be positive");
    strides_[d] = size_;
    size_ *= dims_[d];
  }
}

std::size_t Shape::offset(std::span<const std::size_t> index) const {
  std::size_t off = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) off += index[d] * strides_[d];
  return off;
}

Index Shape::unravel(std::size_t offset) const {
  Index index(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    index[d] = offset / strides_[d];
    offset %= strides_[d];
  }
  return index;
}

bool next_index(Index& index, const Shape& shape) {
  for (std::size_t d = shape.order(); d-- > 0;) {
    if (++index[d] < shape.dim(d)) return true;
    index[d] = 0;
  }
  return false;
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.size()) {
    throw Error(Errc::SizeMismatch, "expected " + std::to_string(shape_.size()) +
                                        " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::InvalidArgument, "tensor entries must be finite and non-negative");
    }
  }
}

DenseTensor DenseTensor::filled(const Shape& shape, double value) {
  return DenseTensor(shape, std::vector<double>(shape.size(), value));
}

DenseTensor DenseTensor::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= factor;
  return DenseTensor(shape_, std::move(out));
}

MaskedTensor::MaskedTensor(Shape shape, std::vector<double> values, std::vector<bool> observed)
    : shape_(std::move(shape)), values_(std::move(values)), observed_(std::move(observed)) {
  if (values_.size() != shape_.size() || observed_.size() != shape_.size()) {
    throw Error(Errc::SizeMismatch, "masked tensor value/mask length does not match shape");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!observed_[i]) continue;
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw Error(Errc::InvalidArgument, "observed entries must be finite and non-negative");
    }
    ++observed_count_;
  }
  if (observed_count_ == 0) throw Error(Errc::EmptyObservation, "no observed entries");
}

MaskedTensor MaskedTensor::from_nan(Shape shape, std::vector<double> values) {
  std::vector<bool> observed(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) observed[i] = !std::isnan(values[i]);
  return MaskedTensor(std::move(shape), std::move(values), std::move(observed));
}

double total_sum(const DenseTensor& t) {
  const auto v = t.values();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double frobenius_norm(const DenseTensor& t) {
  double acc = 0.0;
  for (double v : t.values()) acc += v * v;
  return std::sqrt(acc);
}

Normalized normalize(const DenseTensor& t) {
  const double s = total_sum(t);
  if (s <= 0.0) throw Error(Errc::ZeroTensor, "cannot normalize a tensor with zero sum");
  return {t.scaled(1.0 / s), s};
}

namespace {

void require_same_shape(const DenseTensor& a, const DenseTensor& b) {
  if (!(a.shape() == b.shape())) throw Error(Errc::ShapeMismatch, "tensor shapes differ");
}

}  // namespace

double kl_divergence(const DenseTensor& p, const DenseTensor& q) {
  require_same_shape(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi > 0.0) {
      if (qi <= 0.0) throw Error(Errc::SupportViolation, "q is zero where p is positive");
      acc += pi * std::log(pi / qi) - pi + qi;
    } else {
      acc += qi;
    }
  }
  // Rounding can leave a tiny negative value for p == q.
  return acc < 0.0 ? 0.0 : acc;
}

double relative_error(const DenseTensor& truth, const DenseTensor& approx) {
  require_same_shape(truth, approx);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double diff = truth[i] - approx[i];
    num += diff * diff;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw Error(Errc::ZeroTensor, "truth tensor has zero norm");
  return std::sqrt(num / den);
}

double recovery_fit(const DenseTensor& truth, const DenseTensor& approx,
                    const std::vector<bool>& mask) {
  require_same_shape(truth, approx);
  if (mask.size() != truth.size()) throw Error(Errc::ShapeMismatch, "mask length differs");
  double num = 0.0;
  double den = 0.0;
  std::size_t selected = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    ++selected;
    const double diff = truth[i] - approx[i];
    num += diff * diff;
    den += truth[i] * truth[i];
  }
  if (selected == 0) throw Error(Errc::EmptyMask, "mask selects no entries");
  if (den == 0.0) throw Error(Errc::ZeroTensor, "truth is zero on the masked entries");
  return 1.0 - std::sqrt(num / den);
}

DenseTensor reshape(const DenseTensor& t, std::vector<std::size_t> new_dims) {
  Shape shape(std::move(new_dims));
  if (shape.size() != t.size()) {
    throw Error(Errc::SizeMismatch, "reshape must preserve the number of entries");
  }
  return DenseTensor(std::move(shape), std::vector<double>(t.values().begin(), t.values().end()));
}

DenseTensor contract_ring(std::span<const RingCore> cores) {
  const std::size_t order = cores.size();
  if (order == 0) throw Error(Errc::InvalidArgument, "ring needs at least one core");
  std::vector<std::size_t> dims(order);
  for (std::size_t d = 0; d < order; ++d) {
    const auto& next = cores[(d + 1) % order];
    if (cores[d].right != next.left) {
      throw Error(Errc::ShapeMismatch, "ring bond dimensions do not match");
    }
    if (cores[d].values.size() != cores[d].left * cores[d].mid * cores[d].right) {
      throw Error(Errc::SizeMismatch, "core value count does not match its shape");
    }
    dims[d] = cores[d].mid;
  }
  Shape shape(dims);
  std::vector<double> out(shape.size());
  Index index(order, 0);
  const std::size_t r0 = cores[0].left;
  std::vector<double> chain;
  std::vector<double> next;
  std::size_t pos = 0;
  do {
    // chain holds the (r0 x R_d) product of the first d slices.
    const RingCore& first = cores[0];
    chain.assign(r0 * first.right, 0.0);
    for (std::size_t r = 0; r < r0; ++r)
      for (std::size_t s = 0; s < first.right; ++s) chain[r * first.right + s] = first(r, index[0], s);
    std::size_t width = first.right;
    for (std::size_t d = 1; d < order; ++d) {
      const RingCore& c = cores[d];
      next.assign(r0 * c.right, 0.0);
      for (std::size_t r = 0; r < r0; ++r)
        for (std::size_t k = 0; k < width; ++k) {
          const double a = chain[r * width + k];
          if (a == 0.0) continue;
          for (std::size_t s = 0; s < c.right; ++s) next[r * c.right + s] += a * c(k, index[d], s);
        }
      chain.swap(next);
      width = c.right;
    }
    double trace = 0.0;
    for (std::size_t r = 0; r < r0; ++r) trace += chain[r * width + r];
    out[pos++] = trace;
  } while (next_index(index, shape));
  return DenseTensor(std::move(shape), std::move(out));
}

DenseTensor random_ring_tensor(const std::vector<std::size_t>& dims,
                               const std::vector<std::size_t>& ring_ranks, std::uint64_t seed) {
  const std::size_t order = dims.size();
  if (ring_ranks.size() != order) {
    throw Error(Errc::InvalidArgument, "need one ring rank per mode");
  }
  for (std::size_t r : ring_ranks) {
    if (r == 0) throw Error(Errc::InvalidArgument, "ring ranks must be positive");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<RingCore> cores(order);
  for (std::size_t d = 0; d < order; ++d) {
    RingCore& c = cores[d];
    c.left = ring_ranks[(d + order - 1) % order];
    c.mid = dims[d];
    c.right = ring_ranks[d];
    c.values.resize(c.left * c.mid * c.right);
    for (double& v : c.values) {
      do {
        v = unit(rng);
      } while (v == 0.0);
    }
  }
  return contract_ring(cores);
}

}  // namespace manybody
