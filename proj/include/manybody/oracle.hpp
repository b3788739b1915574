#pragma once

#include "manybody/interactions.hpp"
#include "manybody/tensor.hpp"

namespace manybody {

struct OracleOptions {
  /// Largest allowed absolute discrepancy between model and target marginals.
  double tolerance = 1e-10;
  int max_sweeps = 10000;
};

/// Sums `p` over every mode not in `modes`. The result has the dims of `modes`
/// in ascending mode order.
DenseTensor marginal(const DenseTensor& p, ModeSet modes);

/**
 * Iterative proportional fitting: starting from the uniform tensor, rescales
 * by the ratio of target to current marginal over each maximal subset in turn.
 * Converges to the same KL minimizer as `project` for downward-closed sets,
 * without touching theta/eta coordinates. `p` must sum to 1.
 */
DenseTensor ipf_project(const DenseTensor& p, const InteractionSet& s, const OracleOptions& opts = {});

}  // namespace manybody
