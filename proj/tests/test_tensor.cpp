#include <doctest.h>

#include <random>

#include "manybody/error.hpp"
#include "manybody/tensor.hpp"
#include "expect_error.hpp"
#include "support.hpp"

using namespace manybody;
using manybody::testing::max_abs_diff;

using manybody::testing::code_of;

namespace {

DenseTensor example() { return DenseTensor({2, 2}, {0.4, 0.1, 0.2, 0.3}); }

}  // namespace

TEST_CASE("construction rejects bad input") {
  CHECK(code_of([] { DenseTensor({2, 2}, {1, 2, 3}); }) == Errc::SizeMismatch);
  CHECK(code_of([] { DenseTensor({2}, {1, -1}); }) == Errc::InvalidArgument);
  CHECK(code_of([] { DenseTensor({2, 0}, {}); }) == Errc::InvalidArgument);
  CHECK(code_of([] { MaskedTensor::from_nan(Shape({2}), {NAN, NAN}); }) == Errc::EmptyObservation);
}

TEST_CASE("row-major layout, last index fastest") {
  Shape s({2, 3, 4});
  CHECK(s.stride(2) == 1);
  CHECK(s.stride(1) == 4);
  CHECK(s.stride(0) == 12);
  const Index idx{1, 2, 3};
  CHECK(s.offset(idx) == 23);
  CHECK(s.unravel(23) == idx);
}

TEST_CASE("total_sum") {
  CHECK(total_sum(example()) == doctest::Approx(1.0));
  CHECK(total_sum(DenseTensor::filled(Shape({2, 2}), 0.0)) == 0.0);
  CHECK(total_sum(DenseTensor({2, 2}, {1, 2, 3, 4})) == 10.0);
}

TEST_CASE("normalize") {
  const auto [t, scale] = normalize(DenseTensor({2, 2}, {1, 2, 3, 4}));
  CHECK(scale == 10.0);
  CHECK(max_abs_diff(t.values(), std::vector<double>{0.1, 0.2, 0.3, 0.4}) < 1e-15);
  CHECK(std::abs(total_sum(t) - 1.0) < 1e-12);

  const auto again = normalize(example());
  CHECK(again.scale == doctest::Approx(1.0));
  CHECK(max_abs_diff(again.tensor.values(), example().values()) < 1e-15);

  CHECK(code_of([] { normalize(DenseTensor::filled(Shape({2, 2}), 0.0)); }) == Errc::ZeroTensor);
}

TEST_CASE("kl_divergence") {
  const auto p = example();
  CHECK(kl_divergence(p, p) == 0.0);
  // 0.25 * log(0.25^4 / (0.4 * 0.1 * 0.2 * 0.3)) evaluated independently.
  const auto uniform = DenseTensor::filled(Shape({2, 2}), 0.25);
  CHECK(kl_divergence(uniform, p) == doctest::Approx(0.1217772742871686).epsilon(1e-12));
  const auto twice = p.scaled(2.0);
  CHECK(kl_divergence(twice, twice) == 0.0);

  CHECK(code_of([&] { kl_divergence(p, DenseTensor({4}, {0.25, 0.25, 0.25, 0.25})); }) == Errc::ShapeMismatch);
  CHECK(code_of([&] { kl_divergence(p, DenseTensor({2, 2}, {0.5, 0.5, 0.0, 0.0})); }) == Errc::SupportViolation);
  // Zero in p where q is positive is fine.
  CHECK(kl_divergence(DenseTensor({2}, {1.0, 0.0}), DenseTensor({2}, {0.5, 0.5})) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("kl_divergence is non-negative and vanishes only at p == q") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = manybody::testing::random_positive({3, 2, 2}, rng, trial % 2 == 0);
    const auto q = manybody::testing::random_positive({3, 2, 2}, rng, trial % 3 == 0);
    CHECK(kl_divergence(p, q) > 0.0);
    CHECK(kl_divergence(p, p) == 0.0);
  }
}

TEST_CASE("relative_error and recovery_fit") {
  const DenseTensor t({1, 2}, {3, 4});
  CHECK(relative_error(t, t) == 0.0);
  CHECK(relative_error(t, DenseTensor({1, 2}, {0, 0})) == doctest::Approx(1.0));
  CHECK(relative_error(t, DenseTensor({1, 2}, {3, 0})) == doctest::Approx(0.8));
  CHECK(code_of([] { relative_error(DenseTensor({2}, {0, 0}), DenseTensor({2}, {1, 1})); }) == Errc::ZeroTensor);

  const std::vector<bool> mask{false, true};
  CHECK(recovery_fit(t, t, mask) == 1.0);
  CHECK(recovery_fit(t, DenseTensor({1, 2}, {3, 0}), mask) == doctest::Approx(0.0));
  CHECK(code_of([&] { recovery_fit(t, t, {false, false}); }) == Errc::EmptyMask);
  CHECK(code_of([&] { recovery_fit(t, DenseTensor({2}, {3, 4}), mask); }) == Errc::ShapeMismatch);
}

TEST_CASE("metrics are invariant under joint positive scaling") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = manybody::testing::random_positive({2, 3, 2}, rng);
    const auto b = manybody::testing::random_positive({2, 3, 2}, rng);
    std::vector<bool> mask(a.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = (i + trial) % 3 == 0;
    for (double lambda : {0.5, 3.0, 17.0}) {
      CHECK(relative_error(a.scaled(lambda), b.scaled(lambda)) == doctest::Approx(relative_error(a, b)).epsilon(1e-12));
      CHECK(recovery_fit(a.scaled(lambda), b.scaled(lambda), mask) ==
            doctest::Approx(recovery_fit(a, b, mask)).epsilon(1e-12));
    }
  }
}

TEST_CASE("reshape keeps the flat sequence") {
  const DenseTensor square({4, 4}, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
  const auto split = reshape(square, {2, 2, 2, 2});
  CHECK(split.dims() == std::vector<std::size_t>{2, 2, 2, 2});
  CHECK(max_abs_diff(split.values(), square.values()) == 0.0);
  const auto back = reshape(split, {4, 4});
  CHECK(back.dims() == square.dims());
  CHECK(max_abs_diff(back.values(), square.values()) == 0.0);
  CHECK(code_of([&] { reshape(square, {3, 5}); }) == Errc::SizeMismatch);

  std::mt19937_64 rng(3);
  const auto cube = manybody::testing::random_positive({8, 8, 8}, rng, false);
  const auto fine = reshape(cube, {2, 4, 2, 4, 2, 4});
  CHECK(total_sum(fine) == total_sum(cube));
  CHECK(frobenius_norm(fine) == frobenius_norm(cube));
}

TEST_CASE("contract_ring matches explicit bond summation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<RingCore> cores{{2, 3, 3, {}}, {3, 2, 1, {}}, {1, 4, 2, {}}};
  for (auto& c : cores) {
    c.values.resize(c.left * c.mid * c.right);
    for (double& v : c.values) v = dist(rng);
  }
  const auto fast = contract_ring(cores);
  const auto slow = manybody::testing::brute_force_ring(cores);
  CHECK(fast.dims() == std::vector<std::size_t>{3, 2, 4});
  CHECK(max_abs_diff(fast.values(), slow) < 1e-13);
}

TEST_CASE("random_ring_tensor") {
  const auto a = random_ring_tensor({3, 4, 2}, {1, 1, 1}, 42);
  CHECK(manybody::testing::max_rank_one_violation(a) < 1e-12);

  const auto b1 = random_ring_tensor({6, 6, 6, 6}, {3, 3, 3, 3}, 0);
  const auto b2 = random_ring_tensor({6, 6, 6, 6}, {3, 3, 3, 3}, 0);
  CHECK(b1.size() == 1296);
  CHECK(max_abs_diff(b1.values(), b2.values()) == 0.0);
  for (double v : b1.values()) CHECK(v > 0.0);
  const auto c = random_ring_tensor({6, 6, 6, 6}, {3, 3, 3, 3}, 1);
  CHECK(max_abs_diff(b1.values(), c.values()) > 0.0);

  CHECK(code_of([] { random_ring_tensor({2, 2}, {1}, 0); }) == Errc::InvalidArgument);
}
