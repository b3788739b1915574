#include "manybody/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "manybody/error.hpp"

namespace manybody {

namespace {

/// For each entry of the full tensor, the offset of its projection onto `modes`.
std::vector<std::size_t> marginal_offsets(const Shape& full, const std::vector<std::size_t>& modes,
                                          const Shape& sub) {
  std::vector<std::size_t> out(full.size());
  Index index(full.order(), 0);
  std::size_t pos = 0;
  do {
    std::size_t off = 0;
    for (std::size_t k = 0; k < modes.size(); ++k) off += index[modes[k]] * sub.stride(k);
    out[pos++] = off;
  } while (next_index(index, full));
  return out;
}

Shape sub_shape(const Shape& full, const std::vector<std::size_t>& modes) {
  std::vector<std::size_t> dims;
  for (std::size_t m : modes) dims.push_back(full.dim(m));
  return Shape(std::move(dims));
}

std::vector<double> sum_into(std::span<const double> values, const std::vector<std::size_t>& target,
                             std::size_t size) {
  std::vector<double> out(size, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) out[target[i]] += values[i];
  return out;
}

}  // namespace

DenseTensor marginal(const DenseTensor& p, ModeSet modes) {
  const auto list = modes.modes();
  if (list.empty() || list.back() >= p.order()) throw Error(Errc::BadModes, "modes must be nonempty and within the tensor order");
  const Shape sub = sub_shape(p.shape(), list);
  const auto target = marginal_offsets(p.shape(), list, sub);
  return DenseTensor(sub, sum_into(p.values(), target, sub.size()));
}

DenseTensor ipf_project(const DenseTensor& p, const InteractionSet& s, const OracleOptions& opts) {
  if (s.order() != p.order()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");
  if (std::abs(total_sum(p) - 1.0) > 1e-9) throw Error(Errc::NotNormalized, "IPF target must sum to 1");

  struct Block {
    std::vector<std::size_t> target;
    std::vector<double> wanted;
  };
  std::vector<Block> blocks;
  for (ModeSet m : s.maximal_subsets()) {
    const auto list = m.modes();
    const Shape sub = sub_shape(p.shape(), list);
    Block b{marginal_offsets(p.shape(), list, sub), {}};
    b.wanted = sum_into(p.values(), b.target, sub.size());
    blocks.push_back(std::move(b));
  }

  std::vector<double> q(p.size(), 1.0 / static_cast<double>(p.size()));
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (const Block& b : blocks) {
      const auto have = sum_into(q, b.target, b.wanted.size());
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double h = have[b.target[i]];
        q[i] = h > 0.0 ? q[i] * b.wanted[b.target[i]] / h : 0.0;
      }
    }
    double worst = 0.0;
    for (const Block& b : blocks) {
      const auto have = sum_into(q, b.target, b.wanted.size());
      for (std::size_t k = 0; k < have.size(); ++k) worst = std::max(worst, std::abs(have[k] - b.wanted[k]));
    }
    if (worst < opts.tolerance) return DenseTensor(p.shape(), std::move(q));
  }
  throw Error(Errc::NotConverged, "IPF did not converge within max_sweeps");
}

}  // namespace manybody
