#pragma once

#include <vector>

#include "manybody/tensor.hpp"

namespace manybody {

enum class CoordKind { Theta, Eta };

/**
 * Full natural (theta) or expectation (eta) parameter array of a tensor,
 * same shape as the tensor.
 *
 * For Eta the entry at the all-first index is 1 and entries are
 * non-increasing along every mode. For Theta the all-first entry is the log of
 * the all-first probability, i.e. minus the log partition function.
 */
struct CoordTensor {
  CoordKind kind = CoordKind::Theta;
  Shape shape;
  std::vector<double> values;

  double operator[](std::size_t offset) const { return values[offset]; }
};

/// Suffix sums along every mode: eta_i = sum over i' >= i of p_i'.
CoordTensor eta_from_tensor(const DenseTensor& p);

/// Inverse of eta_from_tensor by forward differencing along every mode.
DenseTensor tensor_from_eta(const CoordTensor& eta);

/// Backward differences of log p along every mode (log p = 0 before the first index).
CoordTensor theta_from_tensor(const DenseTensor& p);

struct ThetaDecoding {
  DenseTensor tensor;
  /// theta at the all-first index implied by normalization.
  double log_normalizer = 0.0;
};

/// Prefix sums of theta along every mode give log-values, normalized with
/// log-sum-exp. Whatever is stored at the all-first index is absorbed.
ThetaDecoding decode_theta(const CoordTensor& theta);

inline DenseTensor tensor_from_theta(const CoordTensor& theta) {
  return decode_theta(theta).tensor;
}

namespace detail {

/// In-place suffix sums along every mode.
void suffix_sum_all_modes(const Shape& shape, std::vector<double>& values);
/// In-place prefix sums along every mode.
void prefix_sum_all_modes(const Shape& shape, std::vector<double>& values);

}  // namespace detail

}  // namespace manybody
