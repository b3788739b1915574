#include "manybody/factors.hpp"

#include <algorithm>
#include <cmath>

#include "manybody/error.hpp"

namespace manybody {

namespace {

constexpr double kOffModelTolerance = 1e-6;

Shape shape_of(const Shape& full, const std::vector<std::size_t>& modes) {
  std::vector<std::size_t> dims;
  for (std::size_t m : modes) dims.push_back(full.dim(m));
  return Shape(std::move(dims));
}

/// Positions of the modes of `sub` inside the ascending mode list of `super`.
std::vector<std::size_t> positions_within(ModeSet sub, ModeSet super) {
  const auto outer = super.modes();
  std::vector<std::size_t> pos;
  for (std::size_t m : sub.modes()) {
    pos.push_back(static_cast<std::size_t>(std::find(outer.begin(), outer.end(), m) - outer.begin()));
  }
  return pos;
}

}  // namespace

EnergyTerms energy_terms(const CoordTensor& theta, const InteractionSet& s) {
  if (theta.kind != CoordKind::Theta) throw Error(Errc::InvalidArgument, "expected theta coordinates");
  const Shape& shape = theta.shape;
  if (s.order() != shape.order()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");

  double off_model = 0.0;
  Index index(shape.order(), 0);
  std::size_t pos = 0;
  do {
    std::uint64_t support = 0;
    for (std::size_t d = 0; d < index.size(); ++d)
      if (index[d] > 0) support |= std::uint64_t{1} << d;
    if (support != 0 && !s.contains(ModeSet::from_bits(support))) off_model += std::abs(theta[pos]);
    ++pos;
  } while (next_index(index, shape));
  if (off_model > kOffModelTolerance) {
    throw Error(Errc::OffModel, "theta has mass " + std::to_string(off_model) + " outside the interaction set");
  }

  EnergyTerms out;
  out.h0 = -theta[0];
  for (ModeSet subset : s.subsets()) {
    const auto modes = subset.modes();
    ModeArray term{subset, shape_of(shape, modes), {}};
    term.values.assign(term.shape.size(), 0.0);
    Index local(modes.size(), 0);
    std::size_t k = 0;
    do {
      const bool interior = std::all_of(local.begin(), local.end(), [](std::size_t i) { return i > 0; });
      if (interior) {
        std::size_t off = 0;
        for (std::size_t j = 0; j < modes.size(); ++j) off += local[j] * shape.stride(modes[j]);
        term.values[k] = theta[off];
      }
      ++k;
    } while (next_index(local, term.shape));
    detail::prefix_sum_all_modes(term.shape, term.values);
    for (double& v : term.values) v = -v;
    out.terms.push_back(std::move(term));
  }
  return out;
}

SplitRule split_rule(const InteractionSet& s) {
  SplitRule rule;
  rule.maximal = s.maximal_subsets();
  rule.shares.resize(rule.maximal.size());
  for (ModeSet subset : s.subsets()) {
    const int covering = static_cast<int>(std::count_if(rule.maximal.begin(), rule.maximal.end(),
                                                        [&](ModeSet m) { return subset.is_subset_of(m); }));
    for (std::size_t j = 0; j < rule.maximal.size(); ++j) {
      if (subset.is_subset_of(rule.maximal[j])) rule.shares[j].push_back({subset, covering});
    }
  }
  return rule;
}

FactorSet extract_factors(const ProjectionResult& r, const InteractionSet& s) {
  if (!r.converged) throw Error(Errc::NotConverged, "factors need a converged projection");
  const CoordTensor theta = r.theta();
  const EnergyTerms energy = energy_terms(theta, s);
  const SplitRule rule = split_rule(s);
  const Shape& shape = theta.shape;

  FactorSet out;
  out.shape = shape;
  out.partition_function = std::exp(energy.h0);
  out.scale = r.scale;
  const double k = static_cast<double>(rule.maximal.size());

  for (std::size_t j = 0; j < rule.maximal.size(); ++j) {
    const ModeSet m = rule.maximal[j];
    ModeArray factor{m, shape_of(shape, m.modes()), {}};
    factor.values.assign(factor.shape.size(), -energy.h0 / k);

    for (const auto& share : rule.shares[j]) {
      const auto it = std::lower_bound(s.subsets().begin(), s.subsets().end(), share.subset);
      const ModeArray& term = energy.terms[static_cast<std::size_t>(it - s.subsets().begin())];
      const auto pos = positions_within(share.subset, m);
      Index local(factor.shape.order(), 0);
      std::size_t at = 0;
      do {
        std::size_t off = 0;
        for (std::size_t q = 0; q < pos.size(); ++q) off += local[pos[q]] * term.shape.stride(q);
        factor.values[at++] -= term.values[off] / share.divisor;
      } while (next_index(local, factor.shape));
    }
    for (double& v : factor.values) v = std::exp(v);
    out.factors.push_back(std::move(factor));
  }
  return out;
}

DenseTensor reconstruct_from_factors(const FactorSet& f, const std::vector<std::size_t>& dims) {
  if (f.shape.dims() != dims) throw Error(Errc::ShapeMismatch, "factor set was built for different dims");
  const Shape& shape = f.shape;
  for (const auto& factor : f.factors) {
    const auto modes = factor.modes.modes();
    if (modes.empty() || modes.back() >= shape.order() || !(factor.shape == shape_of(shape, modes)) ||
        factor.values.size() != factor.shape.size()) {
      throw Error(Errc::ShapeMismatch, "factor " + to_string(factor.modes) + " does not fit the tensor");
    }
  }
  std::vector<double> out(shape.size(), f.scale);
  Index index(shape.order(), 0);
  std::size_t pos = 0;
  do {
    for (const auto& factor : f.factors) {
      std::size_t off = 0;
      std::size_t q = 0;
      for (std::size_t m : factor.modes.modes()) off += index[m] * factor.shape.stride(q++);
      out[pos] *= factor.values[off];
    }
    ++pos;
  } while (next_index(index, shape));
  return DenseTensor(shape, std::move(out));
}

RingExport export_ring_cores(const FactorSet& f) {
  const std::size_t order = f.shape.order();
  if (order < 3 || f.factors.size() != order) {
    throw Error(Errc::NotCyclic, "ring export needs D >= 3 factors over the cycle pairs");
  }
  // pair_factor[d] is the factor over modes {d-1, d}.
  std::vector<const ModeArray*> pair_factor(order, nullptr);
  for (const auto& factor : f.factors) {
    const auto modes = factor.modes.modes();
    if (modes.size() != 2) throw Error(Errc::NotCyclic, "non-pair factor " + to_string(factor.modes));
    std::size_t d;
    if (modes[1] == modes[0] + 1) {
      d = modes[1];
    } else if (modes[0] == 0 && modes[1] == order - 1) {
      d = 0;
    } else {
      throw Error(Errc::NotCyclic, "factor " + to_string(factor.modes) + " is not a cycle edge");
    }
    if (pair_factor[d] != nullptr) throw Error(Errc::NotCyclic, "duplicate cycle edge");
    pair_factor[d] = &factor;
  }

  const double per_core = std::pow(f.scale, 1.0 / static_cast<double>(order));
  RingExport out;
  for (std::size_t d = 0; d < order; ++d) {
    const std::size_t prev = (d + order - 1) % order;
    const std::size_t left = f.shape.dim(prev);
    const std::size_t n = f.shape.dim(d);
    const ModeArray& x = *pair_factor[d];
    RingCore core{left, n, n, std::vector<double>(left * n * n, 0.0)};
    for (std::size_t r = 0; r < left; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        // Stored with ascending modes: (d-1, d) normally, (0, D-1) for the wrap-around edge.
        const double value = d == 0 ? x.values[i * left + r] : x.values[r * n + i];
        core.values[(r * n + i) * n + i] = value * per_core;
      }
    }
    out.cores.push_back(std::move(core));
    out.ring_rank.push_back(n);
  }
  return out;
}

}  // namespace manybody
