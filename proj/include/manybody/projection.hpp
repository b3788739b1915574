#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "manybody/coordinates.hpp"
#include "manybody/interactions.hpp"
#include "manybody/tensor.hpp"

namespace manybody {

struct SolverOptions {
  /// Stop once the Euclidean norm of eta^B - target eta^B drops below this.
  double tolerance = 1e-5;
  int max_iterations = 100;
  /// Tikhonov shift applied to G on the first solve attempt.
  double damping = 0.0;
  /// Start from theta^B drawn uniformly from [-scale, scale] instead of zero.
  /// Only used to probe uniqueness of the minimizer.
  std::optional<std::uint64_t> random_init_seed;
  double random_init_scale = 1.0;

  void validate() const;
};

struct ProjectionResult {
  /// Projected tensor at the input's scale.
  DenseTensor tensor;
  Basis basis;
  std::vector<double> theta_b;
  std::vector<double> eta_b;
  std::vector<double> target_eta_b;
  /// theta at the all-first index of the normalized projection.
  double log_normalizer = 0.0;
  /// Total sum of the input.
  double scale = 1.0;
  /// Generalized KL divergence from the input to `tensor`.
  double kl = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  /// Full theta array of the normalized projection.
  CoordTensor theta() const;
};

/// G[u, v] = eta[max(u, v)] - eta[u] * eta[v] over the basis indices.
Eigen::MatrixXd fisher_matrix(const CoordTensor& eta_full, const Basis& basis);

/**
 * KL-minimizing projection of `p` onto the log-linear family whose free theta
 * parameters are given by `s`, by Newton steps in theta^B.
 *
 * The input is normalized first and the result rescaled. Failing to converge
 * within `max_iterations` is reported through `converged`, with the iterate of
 * lowest divergence returned. Throws Errc::ZeroTensor for an all-zero input and
 * Errc::SingularSystem if G cannot be factored even after damping.
 */
ProjectionResult project(const DenseTensor& p, const InteractionSet& s, const SolverOptions& opts = {});

inline ProjectionResult m_body_approximation(const DenseTensor& p, std::size_t m,
                                             const SolverOptions& opts = {}) {
  return project(p, m_body_set(p.order(), m), opts);
}

}  // namespace manybody
