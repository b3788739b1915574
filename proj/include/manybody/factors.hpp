#pragma once

#include <vector>

#include "manybody/coordinates.hpp"
#include "manybody/interactions.hpp"
#include "manybody/projection.hpp"
#include "manybody/tensor.hpp"

namespace manybody {

/// Array over the modes of `modes` (ascending), with the dims of those modes.
struct ModeArray {
  ModeSet modes;
  Shape shape;
  std::vector<double> values;
};

/**
 * Energy decomposition H = H0 + sum_S H^(S) of a tensor in the model space of
 * an interaction set. Each H^(S) is minus the cumulative sum of the theta
 * block on S and vanishes wherever a coordinate of S is at its first index.
 */
struct EnergyTerms {
  double h0 = 0.0;
  std::vector<ModeArray> terms;  // one per member of the interaction set, same order
};

/// Throws Errc::OffModel when the summed |theta| outside the model exceeds 1e-6.
EnergyTerms energy_terms(const CoordTensor& theta, const InteractionSet& s);

/// How shared lower-order energies are divided among the maximal subsets.
struct SplitRule {
  std::vector<ModeSet> maximal;
  struct Share {
    ModeSet subset;
    int divisor;  // number of maximal subsets containing `subset`
  };
  /// shares[j] lists every member of the set contained in maximal[j].
  std::vector<std::vector<Share>> shares;
};

SplitRule split_rule(const InteractionSet& s);

/// One factor per maximal subset; their broadcast product times `scale` is the projection.
struct FactorSet {
  Shape shape;
  std::vector<ModeArray> factors;
  double partition_function = 1.0;
  double scale = 1.0;
};

/**
 * Factor for maximal subset M_j:
 *   Z^(-1/K) * exp(-sum_{S in s, S subset of M_j} H^(S) / c_S)
 * with K maximal subsets and c_S the number of maximal subsets covering S.
 * Throws Errc::NotConverged for an unconverged projection.
 */
FactorSet extract_factors(const ProjectionResult& r, const InteractionSet& s);

DenseTensor reconstruct_from_factors(const FactorSet& f, const std::vector<std::size_t>& dims);

struct RingExport {
  /// Core d has shape (I_{d-1}, I_d, I_d) and is nonzero only where its last
  /// two indices agree.
  std::vector<RingCore> cores;
  std::vector<std::size_t> ring_rank;
};

/**
 * Rewrites cyclic factors as tensor-ring cores. Core d carries the factor of
 * the pair (d-1, d), so the ring contraction reproduces the factor product.
 * Throws Errc::NotCyclic unless the factors are exactly the D >= 3 cycle pairs.
 */
RingExport export_ring_cores(const FactorSet& f);

}  // namespace manybody
