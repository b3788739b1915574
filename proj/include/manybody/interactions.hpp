#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "manybody/tensor.hpp"

namespace manybody {

/// A set of tensor modes (0-based), at most 64.
class ModeSet {
public:
  static constexpr std::size_t kMaxModes = 64;

  ModeSet() = default;
  explicit ModeSet(const std::vector<std::size_t>& modes);
  static ModeSet from_bits(std::uint64_t bits) {
    ModeSet s;
    s.bits_ = bits;
    return s;
  }

  std::uint64_t bits() const noexcept { return bits_; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  bool contains(std::size_t mode) const noexcept { return mode < kMaxModes && ((bits_ >> mode) & 1U); }
  bool is_subset_of(ModeSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  /// Sorted ascending.
  std::vector<std::size_t> modes() const;

  bool operator==(const ModeSet&) const = default;
  /// Lexicographic on the sorted mode lists.
  std::strong_ordering operator<=>(const ModeSet& other) const;

private:
  std::uint64_t bits_ = 0;
};

/// "(1,2,3)" with 1-based modes.
std::string to_string(ModeSet s);

/**
 * Downward-closed family of nonempty mode subsets that always contains every
 * singleton. Each member S frees the theta parameters whose non-first
 * coordinates are exactly the modes in S.
 */
class InteractionSet {
public:
  /// Closes `subsets` downward and adds all singletons. Throws Errc::BadOrder
  /// for order 0 or > 64 and Errc::ModeOutOfRange for modes >= order.
  InteractionSet(std::size_t order, const std::vector<ModeSet>& subsets);

  std::size_t order() const noexcept { return order_; }
  /// Sorted lexicographically.
  const std::vector<ModeSet>& subsets() const noexcept { return subsets_; }
  bool contains(ModeSet s) const;
  /// Members not strictly contained in another member, lexicographic order.
  std::vector<ModeSet> maximal_subsets() const;
  bool is_subset_of(const InteractionSet& other) const;

private:
  std::size_t order_;
  std::vector<ModeSet> subsets_;
};

/// All subsets of size <= m. Requires 1 <= m <= order.
InteractionSet m_body_set(std::size_t order, std::size_t m);

/// Singletons plus the pairs {d, d+1} around the cycle. Requires order >= 2.
InteractionSet cyclic_set(std::size_t order);

/**
 * Parses an interaction spec for a tensor of the given order.
 *
 *   spec   := clause (';' clause)*
 *   clause := "body=" INT | "cyclic" | tuple+
 *   tuple  := '(' INT (',' INT)+ ')'        modes are 1-based
 *
 * Whitespace between tokens is ignored.
 */
InteractionSet parse_spec(std::string_view text, std::size_t order);

/// Free theta indices of an interaction set, excluding the all-first index.
struct Basis {
  /// Sorted lexicographically, which is also row-major offset order.
  std::vector<Index> indices;
  std::vector<std::size_t> offsets;

  std::size_t size() const noexcept { return offsets.size(); }
};

Basis enumerate_basis(const InteractionSet& s, const Shape& shape);

/// 1 + sum over members S of prod_{d in S} (I_d - 1).
std::size_t count_parameters(const InteractionSet& s, const std::vector<std::size_t>& dims);

}  // namespace manybody
