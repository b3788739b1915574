#include "manybody/interactions.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>

#include "manybody/error.hpp"

namespace manybody {

ModeSet::ModeSet(const std::vector<std::size_t>& modes) {
  for (std::size_t m : modes) {
    if (m >= kMaxModes) throw Error(Errc::ModeOutOfRange, "mode index too large");
    bits_ |= std::uint64_t{1} << m;
  }
}

std::size_t ModeSet::size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> ModeSet::modes() const {
  std::vector<std::size_t> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

std::strong_ordering ModeSet::operator<=>(const ModeSet& other) const {
  const auto a = modes();
  const auto b = other.modes();
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

std::string to_string(ModeSet s) {
  std::string out = "(";
  bool first = true;
  for (std::size_t m : s.modes()) {
    if (!first) out += ',';
    out += std::to_string(m + 1);
    first = false;
  }
  return out + ")";
}

InteractionSet::InteractionSet(std::size_t order, const std::vector<ModeSet>& subsets) : order_(order) {
  if (order == 0 || order > ModeSet::kMaxModes) {
    throw Error(Errc::BadOrder, "tensor order must be in [1, 64]");
  }
  const std::uint64_t all = order == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << order) - 1;
  std::vector<std::uint64_t> closed;
  for (std::size_t d = 0; d < order; ++d) closed.push_back(std::uint64_t{1} << d);
  for (ModeSet s : subsets) {
    if ((s.bits() & ~all) != 0) throw Error(Errc::ModeOutOfRange, "subset " + to_string(s) + " exceeds order");
    if (s.empty()) continue;
    // Enumerate all nonempty submasks.
    for (std::uint64_t sub = s.bits(); sub != 0; sub = (sub - 1) & s.bits()) closed.push_back(sub);
  }
  std::sort(closed.begin(), closed.end());
  closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
  subsets_.reserve(closed.size());
  for (std::uint64_t b : closed) subsets_.push_back(ModeSet::from_bits(b));
  std::sort(subsets_.begin(), subsets_.end());
}

bool InteractionSet::contains(ModeSet s) const {
  return std::binary_search(subsets_.begin(), subsets_.end(), s);
}

std::vector<ModeSet> InteractionSet::maximal_subsets() const {
  std::vector<ModeSet> out;
  for (ModeSet s : subsets_) {
    const bool dominated = std::any_of(subsets_.begin(), subsets_.end(), [&](ModeSet t) {
      return t != s && s.is_subset_of(t);
    });
    if (!dominated) out.push_back(s);
  }
  return out;
}

bool InteractionSet::is_subset_of(const InteractionSet& other) const {
  if (order_ != other.order_) return false;
  return std::all_of(subsets_.begin(), subsets_.end(), [&](ModeSet s) { return other.contains(s); });
}

InteractionSet m_body_set(std::size_t order, std::size_t m) {
  if (order == 0 || order > ModeSet::kMaxModes || m < 1 || m > order) {
    throw Error(Errc::BadOrder, "m-body set needs 1 <= m <= order");
  }
  if (order > 24) throw Error(Errc::BadOrder, "m-body sets are limited to order <= 24");
  std::vector<ModeSet> subsets;
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << order); ++b) {
    if (static_cast<std::size_t>(std::popcount(b)) <= m) subsets.push_back(ModeSet::from_bits(b));
  }
  return InteractionSet(order, subsets);
}

InteractionSet cyclic_set(std::size_t order) {
  if (order < 2) throw Error(Errc::BadOrder, "cyclic set needs order >= 2");
  std::vector<ModeSet> pairs;
  for (std::size_t d = 0; d < order; ++d) pairs.push_back(ModeSet({d, (d + 1) % order}));
  return InteractionSet(order, pairs);
}

namespace {

class SpecParser {
public:
  SpecParser(std::string_view text, std::size_t order) : text_(text), order_(order) {}

  InteractionSet parse() {
    std::vector<ModeSet> subsets;
    do {
      parse_clause(subsets);
      skip_space();
    } while (consume(';'));
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return InteractionSet(order_, subsets);
  }

private:
  void parse_clause(std::vector<ModeSet>& out) {
    skip_space();
    if (starts_with("body")) {
      pos_ += 4;
      skip_space();
      if (!consume('=')) fail("expected '=' after 'body'");
      skip_space();
      const std::size_t at = pos_;
      const std::size_t m = parse_int();
      if (m < 1 || m > order_) {
        throw Error(Errc::BadOrder, "body=" + std::to_string(m) + " at position " + std::to_string(at) +
                                        " is invalid for order " + std::to_string(order_));
      }
      const auto set = m_body_set(order_, m);
      out.insert(out.end(), set.subsets().begin(), set.subsets().end());
    } else if (starts_with("cyclic")) {
      pos_ += 6;
      const auto set = cyclic_set(order_);
      out.insert(out.end(), set.subsets().begin(), set.subsets().end());
    } else if (peek() == '(') {
      while (peek() == '(') {
        out.push_back(parse_tuple());
        skip_space();
      }
    } else {
      fail(pos_ == text_.size() ? "expected a clause" : "expected 'body=', 'cyclic' or '('");
    }
  }

  ModeSet parse_tuple() {
    const std::size_t start = pos_;
    consume('(');
    std::vector<std::size_t> modes;
    do {
      skip_space();
      const std::size_t at = pos_;
      const std::size_t mode = parse_int();
      if (mode < 1 || mode > order_) {
        throw Error(Errc::ModeOutOfRange, "mode " + std::to_string(mode) + " at position " +
                                              std::to_string(at) + " outside [1, " + std::to_string(order_) + "]");
      }
      if (std::find(modes.begin(), modes.end(), mode - 1) != modes.end()) {
        fail("repeated mode " + std::to_string(mode), at);
      }
      modes.push_back(mode - 1);
      skip_space();
    } while (consume(','));
    if (!consume(')')) fail("expected ',' or ')'");
    if (modes.size() < 2) fail("a tuple needs at least two modes", start);
    return ModeSet(modes);
  }

  std::size_t parse_int() {
    std::size_t value = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) fail("expected an integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool starts_with(std::string_view word) const { return text_.substr(pos_).starts_with(word); }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw ParseError(at, what); }

  std::string_view text_;
  std::size_t order_;
  std::size_t pos_ = 0;
};

}  // namespace

InteractionSet parse_spec(std::string_view text, std::size_t order) {
  if (order == 0 || order > ModeSet::kMaxModes) throw Error(Errc::BadOrder, "tensor order must be in [1, 64]");
  return SpecParser(text, order).parse();
}

Basis enumerate_basis(const InteractionSet& s, const Shape& shape) {
  if (s.order() != shape.order()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");
  Basis basis;
  Index index(shape.order(), 0);
  std::size_t offset = 0;
  do {
    std::uint64_t support = 0;
    for (std::size_t d = 0; d < index.size(); ++d) {
      if (index[d] > 0) support |= std::uint64_t{1} << d;
    }
    if (support != 0 && s.contains(ModeSet::from_bits(support))) {
      basis.indices.push_back(index);
      basis.offsets.push_back(offset);
    }
    ++offset;
  } while (next_index(index, shape));
  return basis;
}

std::size_t count_parameters(const InteractionSet& s, const std::vector<std::size_t>& dims) {
  if (s.order() != dims.size()) throw Error(Errc::BadOrder, "interaction set order differs from tensor order");
  std::size_t count = 1;
  for (ModeSet subset : s.subsets()) {
    std::size_t block = 1;
    for (std::size_t d : subset.modes()) block *= dims[d] - 1;
    count += block;
  }
  return count;
}

}  // namespace manybody
