#include "manybody/coordinates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "manybody/error.hpp"

namespace manybody {

namespace {

constexpr double kInputNormTolerance = 1e-9;
constexpr double kNegativeEtaTolerance = 1e-9;

void require_normalized(const DenseTensor& p) {
  const double s = total_sum(p);
  if (std::abs(s - 1.0) > kInputNormTolerance) {
    throw Error(Errc::NotNormalized, "tensor sums to " + std::to_string(s));
  }
}

}  // namespace

namespace detail {

void suffix_sum_all_modes(const Shape& shape, std::vector<double>& values) {
  for (std::size_t mode = 0; mode < shape.order(); ++mode) {
    const std::size_t n = shape.dim(mode);
    const std::size_t stride = shape.stride(mode);
    shape.for_each_fiber(mode, [&](std::size_t base) {
      for (std::size_t k = n - 1; k-- > 0;) values[base + k * stride] += values[base + (k + 1) * stride];
    });
  }
}

void prefix_sum_all_modes(const Shape& shape, std::vector<double>& values) {
  for (std::size_t mode = 0; mode < shape.order(); ++mode) {
    const std::size_t n = shape.dim(mode);
    const std::size_t stride = shape.stride(mode);
    shape.for_each_fiber(mode, [&](std::size_t base) {
      for (std::size_t k = 1; k < n; ++k) values[base + k * stride] += values[base + (k - 1) * stride];
    });
  }
}

}  // namespace detail

CoordTensor eta_from_tensor(const DenseTensor& p) {
  require_normalized(p);
  std::vector<double> eta(p.values().begin(), p.values().end());
  detail::suffix_sum_all_modes(p.shape(), eta);
  return {CoordKind::Eta, p.shape(), std::move(eta)};
}

DenseTensor tensor_from_eta(const CoordTensor& eta) {
  if (eta.kind != CoordKind::Eta) throw Error(Errc::InvalidArgument, "expected eta coordinates");
  const Shape& shape = eta.shape;
  std::vector<double> p = eta.values;
  for (std::size_t mode = 0; mode < shape.order(); ++mode) {
    const std::size_t n = shape.dim(mode);
    const std::size_t stride = shape.stride(mode);
    shape.for_each_fiber(mode, [&](std::size_t base) {
      for (std::size_t k = 0; k + 1 < n; ++k) p[base + k * stride] -= p[base + (k + 1) * stride];
    });
  }
  for (double& v : p) {
    if (v < -kNegativeEtaTolerance || !std::isfinite(v)) {
      throw Error(Errc::InvalidEta, "eta does not decode to a non-negative tensor");
    }
    v = std::max(v, 0.0);
  }
  return DenseTensor(shape, std::move(p));
}

CoordTensor theta_from_tensor(const DenseTensor& p) {
  require_normalized(p);
  const Shape& shape = p.shape();
  std::vector<double> theta(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) throw Error(Errc::ZeroEntry, "theta is undefined at zero entries");
    theta[i] = std::log(p[i]);
  }
  for (std::size_t mode = 0; mode < shape.order(); ++mode) {
    const std::size_t n = shape.dim(mode);
    const std::size_t stride = shape.stride(mode);
    shape.for_each_fiber(mode, [&](std::size_t base) {
      for (std::size_t k = n - 1; k > 0; --k) theta[base + k * stride] -= theta[base + (k - 1) * stride];
    });
  }
  return {CoordKind::Theta, shape, std::move(theta)};
}

ThetaDecoding decode_theta(const CoordTensor& theta) {
  if (theta.kind != CoordKind::Theta) throw Error(Errc::InvalidArgument, "expected theta coordinates");
  std::vector<double> logp = theta.values;
  logp[0] = 0.0;
  detail::prefix_sum_all_modes(theta.shape, logp);
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : logp) {
    if (!std::isfinite(v)) throw Error(Errc::Overflow, "log-values left the floating-point range");
    peak = std::max(peak, v);
  }
  double acc = 0.0;
  for (double v : logp) acc += std::exp(v - peak);
  const double log_partition = peak + std::log(acc);
  for (double& v : logp) v = std::exp(v - log_partition);
  return {DenseTensor(theta.shape, std::move(logp)), -log_partition};
}

}  // namespace manybody
