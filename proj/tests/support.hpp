// Test-only helpers: random fixtures and brute-force reference computations
// that deliberately avoid the library's fast paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "manybody/coordinates.hpp"
#include "manybody/interactions.hpp"
#include "manybody/tensor.hpp"

namespace manybody::testing {

inline DenseTensor random_positive(const std::vector<std::size_t>& dims, std::mt19937_64& rng,
                                   bool normalized = true) {
  Shape shape(dims);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> v(shape.size());
  double sum = 0.0;
  for (double& x : v) sum += (x = dist(rng));
  if (normalized)
    for (double& x : v) x /= sum;
  return DenseTensor(shape, std::move(v));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs(std::span<const double> a) {
  double worst = 0.0;
  for (double x : a) worst = std::max(worst, std::abs(x));
  return worst;
}

/// Tensor in the model space of `s`: exp of uniform(-amplitude, amplitude)
/// energies on every member subset (each entry of every subset array), normalized.
inline DenseTensor random_model_tensor(const std::vector<std::size_t>& dims, const InteractionSet& s,
                                       std::uint64_t seed, double amplitude = 1.0) {
  Shape shape(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<double> logv(shape.size(), 0.0);
  for (ModeSet subset : s.subsets()) {
    const auto modes = subset.modes();
    std::vector<std::size_t> sub_dims;
    for (std::size_t m : modes) sub_dims.push_back(dims[m]);
    Shape sub(sub_dims);
    std::vector<double> energy(sub.size());
    for (double& e : energy) e = dist(rng);
    Index idx(dims.size(), 0);
    std::size_t pos = 0;
    do {
      std::size_t off = 0;
      for (std::size_t k = 0; k < modes.size(); ++k) off += idx[modes[k]] * sub.stride(k);
      logv[pos++] += energy[off];
    } while (next_index(idx, shape));
  }
  double sum = 0.0;
  for (double& x : logv) sum += (x = std::exp(x));
  for (double& x : logv) x /= sum;
  return DenseTensor(shape, std::move(logv));
}

/// Outer product of the mode marginals.
inline DenseTensor outer_of_marginals(const DenseTensor& p) {
  const Shape& shape = p.shape();
  std::vector<std::vector<double>> marg(shape.order());
  for (std::size_t d = 0; d < shape.order(); ++d) marg[d].assign(shape.dim(d), 0.0);
  const double total = total_sum(p);
  Index idx(shape.order(), 0);
  std::size_t pos = 0;
  do {
    for (std::size_t d = 0; d < shape.order(); ++d) marg[d][idx[d]] += p[pos];
    ++pos;
  } while (next_index(idx, shape));
  std::vector<double> out(shape.size());
  idx.assign(shape.order(), 0);
  pos = 0;
  do {
    double v = total;
    for (std::size_t d = 0; d < shape.order(); ++d) v *= marg[d][idx[d]] / total;
    out[pos++] = v;
  } while (next_index(idx, shape));
  return DenseTensor(shape, std::move(out));
}

/// Largest |a_ij a_kl - a_il a_kj| over all 2x2 minors of all mode-d matricizations.
inline double max_rank_one_violation(const DenseTensor& t) {
  const Shape& shape = t.shape();
  double worst = 0.0;
  for (std::size_t d = 0; d < shape.order(); ++d) {
    const std::size_t rows = shape.dim(d);
    const std::size_t cols = shape.size() / rows;
    std::vector<double> mat(rows * cols);
    Index idx(shape.order(), 0);
    std::vector<std::size_t> col_fill(rows, 0);
    std::size_t pos = 0;
    do {
      mat[idx[d] * cols + col_fill[idx[d]]++] = t[pos++];
    } while (next_index(idx, shape));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = i + 1; k < rows; ++k)
        for (std::size_t j = 0; j < cols; ++j)
          for (std::size_t l = j + 1; l < cols; ++l)
            worst = std::max(worst, std::abs(mat[i * cols + j] * mat[k * cols + l] -
                                             mat[i * cols + l] * mat[k * cols + j]));
  }
  return worst;
}

/**
 * Moebius function of the product-of-chains index order, evaluated by the
 * defining recursion mu(x, x) = 1, mu(x, y) = -sum_{x <= z < y} mu(x, z).
 * Memoized on flat offsets; exponential in general, fine for tiny shapes.
 */
class MobiusReference {
public:
  explicit MobiusReference(const Shape& shape) : shape_(shape) {}

  int operator()(std::size_t x, std::size_t y) {
    const auto key = std::make_pair(x, y);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const Index ix = shape_.unravel(x);
    const Index iy = shape_.unravel(y);
    int value = 0;
    if (x == y) {
      value = 1;
    } else if (leq(ix, iy)) {
      int acc = 0;
      Index z(shape_.order(), 0);
      std::size_t off = 0;
      do {
        if (off != y && leq(ix, z) && leq(z, iy)) acc += (*this)(x, off);
        ++off;
      } while (next_index(z, shape_));
      value = -acc;
    }
    memo_[key] = value;
    return value;
  }

private:
  static bool leq(const Index& a, const Index& b) {
    for (std::size_t d = 0; d < a.size(); ++d)
      if (a[d] > b[d]) return false;
    return true;
  }

  Shape shape_;
  std::map<std::pair<std::size_t, std::size_t>, int> memo_;
};

/// theta_i = sum_{i' <= i} mu(i', i) log p_i'
inline std::vector<double> theta_by_mobius(const DenseTensor& p) {
  MobiusReference mu(p.shape());
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) out[i] += mu(j, i) * std::log(p[j]);
  return out;
}

/// eta_i = sum_{i' >= i} p_i' by brute force over all pairs.
inline std::vector<double> eta_by_enumeration(const DenseTensor& p) {
  const Shape& shape = p.shape();
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Index ii = shape.unravel(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const Index jj = shape.unravel(j);
      bool dominated = true;
      for (std::size_t d = 0; d < ii.size(); ++d) dominated = dominated && jj[d] >= ii[d];
      if (dominated) out[i] += p[j];
    }
  }
  return out;
}

/// p_i = sum_{i' >= i} mu(i, i') eta_i'
inline std::vector<double> tensor_by_mobius(const CoordTensor& eta) {
  MobiusReference mu(eta.shape);
  const std::size_t n = eta.values.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += mu(i, j) * eta[j];
  return out;
}

/// Ring contraction by explicit summation over every bond index combination.
inline std::vector<double> brute_force_ring(std::span<const RingCore> cores) {
  const std::size_t order = cores.size();
  std::vector<std::size_t> dims, bonds;
  for (const auto& c : cores) {
    dims.push_back(c.mid);
    bonds.push_back(c.right);
  }
  Shape shape(dims);
  Shape bond_shape(bonds);
  std::vector<double> out(shape.size(), 0.0);
  Index idx(order, 0);
  std::size_t pos = 0;
  do {
    double acc = 0.0;
    Index r(order, 0);  // r[d] is the bond to the right of core d
    do {
      double prod = 1.0;
      for (std::size_t d = 0; d < order; ++d) prod *= cores[d](r[(d + order - 1) % order], idx[d], r[d]);
      acc += prod;
    } while (next_index(r, bond_shape));
    out[pos++] = acc;
  } while (next_index(idx, shape));
  return out;
}

/// Outer product of three uniform(0.1, 1) vectors of length n.
inline DenseTensor rank_one_fixture(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  std::vector<double> a(n), b(n), c(n);
  for (auto* v : {&a, &b, &c})
    for (double& x : *v) x = dist(rng);
  std::vector<double> out;
  out.reserve(n * n * n);
  for (double x : a)
    for (double y : b)
      for (double z : c) out.push_back(x * y * z);
  return DenseTensor(Shape({n, n, n}), std::move(out));
}

/// Hides round(fraction * size) entries chosen uniformly without replacement.
inline MaskedTensor hide_entries(const DenseTensor& t, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(t.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto hidden = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(t.size())));
  std::vector<bool> observed(t.size(), true);
  for (std::size_t k = 0; k < hidden; ++k) observed[order[k]] = false;
  std::vector<double> v(t.values().begin(), t.values().end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!observed[i]) v[i] = 0.0;
  return MaskedTensor(t.shape(), std::move(v), std::move(observed));
}

inline std::vector<bool> missing_mask(const MaskedTensor& m) {
  std::vector<bool> out(m.observed().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = !m.observed()[i];
  return out;
}

}  // namespace manybody::testing
