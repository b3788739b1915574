#include "manybody/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "manybody/error.hpp"

namespace manybody::io {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(Errc::Io, source + ":" + std::to_string(line) + ": " + what);
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string factor_file_name(ModeSet modes) {
  std::string name = "factor";
  for (std::size_t m : modes.modes()) name += "_" + std::to_string(m + 1);
  return name + ".txt";
}

}  // namespace

std::size_t RawTensor::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
}

RawTensor parse_tensor(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> dims;
  bool have_header = false;
  std::vector<double> values;

  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line.substr(first));
    if (!have_header) {
      std::string key;
      tokens >> key;
      if (key != "dims:") fail(source, line_no, "expected 'dims:' header");
      std::string tok;
      while (tokens >> tok) {
        std::size_t d = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || d == 0) {
          fail(source, line_no, "bad mode size '" + tok + "'");
        }
        dims.push_back(d);
      }
      if (dims.empty()) fail(source, line_no, "header lists no dims");
      have_header = true;
      continue;
    }
    std::string tok;
    while (tokens >> tok) {
      if (iequals(tok, "nan")) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        fail(source, line_no, "bad value '" + tok + "'");
      }
      if (v < 0.0) fail(source, line_no, "negative value '" + tok + "'");
      values.push_back(v);
    }
  }
  if (!have_header) fail(source, line_no, "missing 'dims:' header");
  Shape shape(dims);
  if (values.size() != shape.size()) {
    fail(source, line_no,
         "expected " + std::to_string(shape.size()) + " values, found " + std::to_string(values.size()));
  }
  return {std::move(shape), std::move(values)};
}

RawTensor read_raw_tensor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return parse_tensor(in, path.string());
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  RawTensor raw = read_raw_tensor(path);
  if (raw.missing_count() > 0) throw Error(Errc::Io, path.string() + ": missing entries are not allowed here");
  return DenseTensor(std::move(raw.shape), std::move(raw.values));
}

MaskedTensor read_masked_tensor(const std::filesystem::path& path) {
  RawTensor raw = read_raw_tensor(path);
  return MaskedTensor::from_nan(std::move(raw.shape), std::move(raw.values));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void format_tensor(std::ostream& out, const Shape& shape, std::span<const double> values) {
  out << "dims:";
  for (std::size_t d : shape.dims()) out << ' ' << d;
  out << '\n';
  const std::size_t row = shape.dim(shape.order() - 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_double(values[i]) << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& t) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  format_tensor(out, t.shape(), t.values());
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

void write_factor_set(const std::filesystem::path& dir, const FactorSet& f) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json manifest;
  manifest["dims"] = f.shape.dims();
  manifest["Z"] = f.partition_function;
  manifest["scale"] = f.scale;
  manifest["subsets"] = nlohmann::json::array();
  manifest["files"] = nlohmann::json::array();
  for (const auto& factor : f.factors) {
    std::vector<std::size_t> one_based;
    for (std::size_t m : factor.modes.modes()) one_based.push_back(m + 1);
    const std::string name = factor_file_name(factor.modes);
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::Io, "cannot write " + (dir / name).string());
    out << "# factor over modes " << to_string(factor.modes) << '\n';
    format_tensor(out, factor.shape, factor.values);
    manifest["subsets"].push_back(one_based);
    manifest["files"].push_back(name);
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(Errc::Io, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

FactorSet read_factor_set(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(Errc::Io, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, std::string("bad manifest: ") + e.what());
  }
  FactorSet f;
  try {
    f.shape = Shape(manifest.at("dims").get<std::vector<std::size_t>>());
    f.partition_function = manifest.at("Z").get<double>();
    f.scale = manifest.at("scale").get<double>();
    const auto& subsets = manifest.at("subsets");
    const auto& files = manifest.at("files");
    if (subsets.size() != files.size()) throw Error(Errc::Io, "manifest subsets/files length mismatch");
    for (std::size_t j = 0; j < subsets.size(); ++j) {
      std::vector<std::size_t> modes;
      for (std::size_t m : subsets[j].get<std::vector<std::size_t>>()) {
        if (m == 0) throw Error(Errc::Io, "manifest modes are 1-based");
        modes.push_back(m - 1);
      }
      RawTensor raw = read_raw_tensor(dir / files[j].get<std::string>());
      f.factors.push_back({ModeSet(modes), std::move(raw.shape), std::move(raw.values)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, std::string("bad manifest: ") + e.what());
  }
  return f;
}

}  // namespace manybody::io
