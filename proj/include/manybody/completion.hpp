#pragma once

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include "manybody/interactions.hpp"
#include "manybody/projection.hpp"
#include "manybody/tensor.hpp"

namespace manybody {

/// Missing entries start at the mean of the observed entries.
struct ObservedMeanInit {};
/// Missing entries drawn from N(mean, std^2).
struct GaussianInit {
  double mean = 50.0;
  double stddev = std::sqrt(10.0);
  std::uint64_t seed = 0;
};
struct ConstantInit {
  double value = 1.0;
};
using CompletionInit = std::variant<ObservedMeanInit, GaussianInit, ConstantInit>;

struct CompletionOptions {
  /// Stop when |res^t - res^(t-1)| < epsilon (after the third iteration).
  double epsilon = 1e-5;
  int max_iterations = 500;
  CompletionInit init = ObservedMeanInit{};

  void validate() const;
};

struct CompletionResult {
  /// Observed entries are copied bit-for-bit from the input.
  DenseTensor tensor;
  /// Output of the final m-step, before observed entries were restored.
  DenseTensor model;
  std::vector<double> residual_trace;
  int iterations = 0;
  bool converged = false;
};

/// Floor applied to initial values of missing entries.
inline constexpr double kMinInitialValue = 1e-12;

/// Initial tensor: observed entries from `m`, missing entries from `init`.
DenseTensor initial_completion(const MaskedTensor& m, const CompletionInit& init);

/**
 * Low-body tensor completion: alternates projection onto `s` (m-step) with
 * restoring the observed entries (e-step), tracking
 * res^t = ||P^(t+1) - P^t||_F / ||P^t||_F.
 * An unconverged m-step does not abort; it clears `converged` on the result.
 */
CompletionResult lbtc(const MaskedTensor& m, const InteractionSet& s, const SolverOptions& popts = {},
                      const CompletionOptions& copts = {});

}  // namespace manybody
