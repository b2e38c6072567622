#include <doctest.h>

#include <random>
#include <vector>

#include "twisty/kernels.hpp"

namespace k = twisty::kernels;

namespace {

std::vector<double> random_vec(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  std::mt19937 rng(7);
  for (const std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{64},
                              std::size_t{257}}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const auto c = random_vec(rng, n);

    std::vector<double> got(n), want(n);
    k::rowmax3(a.data(), b.data(), c.data(), got.data(), n);
    k::detail::rowmax3_scalar(a.data(), b.data(), c.data(), want.data(), n);
    CHECK(got == want);  // max is order-independent: exact

    k::rowmax2(a.data(), b.data(), got.data(), n);
    k::detail::rowmax2_scalar(a.data(), b.data(), want.data(), n);
    CHECK(got == want);

    k::clamp_radius(a.data(), 2.5, got.data(), n);
    k::detail::clamp_radius_scalar(a.data(), 2.5, want.data(), n);
    CHECK(got == want);

    got = a;
    want = a;
    k::min_update(got.data(), b.data(), n);
    k::detail::min_update_scalar(want.data(), b.data(), n);
    CHECK(got == want);

    // Reductions may reassociate; compare with tolerance.
    CHECK(k::dot(a.data(), b.data(), n) ==
          doctest::Approx(k::detail::dot_scalar(a.data(), b.data(), n))
              .epsilon(1e-12));
    CHECK(k::sum(a.data(), n) ==
          doctest::Approx(k::detail::sum_scalar(a.data(), n)).epsilon(1e-12));

    got = b;
    want = b;
    k::axpy(0.37, a.data(), got.data(), n);
    k::detail::axpy_scalar(0.37, a.data(), want.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
  }
}

TEST_CASE("sqdist_rows matches the scalar reference") {
  std::mt19937 rng(11);
  const std::size_t rows = 37, dim = 13;
  const auto m = random_vec(rng, rows * dim);
  const auto x = random_vec(rng, dim);
  std::vector<double> got(rows), want(rows);
  k::sqdist_rows(m.data(), rows, dim, x.data(), got.data());
  k::detail::sqdist_rows_scalar(m.data(), rows, dim, x.data(), want.data());
  for (std::size_t r = 0; r < rows; ++r)
    CHECK(got[r] == doctest::Approx(want[r]).epsilon(1e-12));
}

TEST_CASE("argmax takes the lowest index on ties") {
  const std::vector<double> v{1.0, 3.0, 3.0, 2.0};
  CHECK(k::argmax(v.data(), v.size()) == 1);
}

TEST_CASE("a backend was selected") {
  CHECK(!k::backend_name().empty());
}
