#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "manybody/factors.hpp"
#include "manybody/tensor.hpp"

namespace manybody::io {

/**
 * Text tensor format:
 *
 *   # optional comment lines
 *   dims: I_1 I_2 ... I_D
 *   v v v ...            (prod I_d values, row-major, any whitespace)
 *
 * `nan` (any case) marks a missing entry. Values are written with 17
 * significant digits, so a write/read round trip is exact.
 */
struct RawTensor {
  Shape shape;
  std::vector<double> values;  // NaN where missing

  std::size_t missing_count() const;
};

RawTensor parse_tensor(std::istream& in, const std::string& source = "<stream>");
RawTensor read_raw_tensor(const std::filesystem::path& path);

/// Rejects files with missing entries.
DenseTensor read_tensor(const std::filesystem::path& path);
MaskedTensor read_masked_tensor(const std::filesystem::path& path);

void format_tensor(std::ostream& out, const Shape& shape, std::span<const double> values);
void write_tensor(const std::filesystem::path& path, const DenseTensor& t);

std::string format_double(double v);

/// Directory with one tensor file per factor plus manifest.json
/// {dims, subsets (1-based), files, Z, scale}.
void write_factor_set(const std::filesystem::path& dir, const FactorSet& f);
FactorSet read_factor_set(const std::filesystem::path& dir);

}  // namespace manybody::io
