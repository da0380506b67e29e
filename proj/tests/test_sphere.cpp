#include <cmath>
#include <random>

#include "caustica/sphere.hpp"
#include "doctest.h"

using namespace caustica;

namespace {

ScalarFieldS2 harmonic_field(const SphereGrid& g, int l, int m) {
  return sample_sphere_field(g, [l, m](const Vec3& x) {
    return real_spherical_harmonic(l, m, std::asin(x[2]), std::atan2(x[1], x[0]));
  });
}

Vec3 random_axis(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  while (true) {
    Vec3 a{gauss(rng), gauss(rng), gauss(rng)};
    const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    if (n > 1e-6) return {a[0] / n, a[1] / n, a[2] / n};
  }
}

}  // namespace

TEST_CASE("constant field integrates to the circumference") {
  const SphereGrid g(64, 128);
  const auto one = sample_sphere_field(g, [](const Vec3&) { return 1.0; });
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(great_circle_transform(one, random_axis(rng), 256) - 2.0 * M_PI) < 1e-10);
  }
}

TEST_CASE("odd harmonics are invisible over random circles") {
  const SphereGrid g(256, 512);
  std::mt19937_64 rng(1);
  for (int l : {1, 3}) {
    for (int m : {0, 1, l}) {
      const auto f = harmonic_field(g, l, m);
      double worst = 0.0;
      for (int c = 0; c < 100; ++c)
        worst = std::max(worst, std::abs(great_circle_transform(f, random_axis(rng), 256)));
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("even zonal harmonic against the dense reference quadrature") {
  // Zonal input: latitude resolution controls the interpolation error.
  const SphereGrid g(4096, 64);
  const auto f = harmonic_field(g, 2, 0);
  const double got = great_circle_transform(f, {0.0, 0.0, 1.0}, 256);
  double ref = 0.0;
  const int M = 1000000;
  for (int i = 0; i < M; ++i)
    ref += real_spherical_harmonic(2, 0, 0.0, 2.0 * M_PI * i / M);
  ref *= 2.0 * M_PI / M;
  CHECK(std::abs(got) > 1.0);  // genuinely nonzero
  CHECK(std::abs(got - ref) < 1e-6);
}

TEST_CASE("transform is invariant under the antipodal map") {
  const SphereGrid g(128, 256);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Random smooth-ish field from a handful of harmonics.
  ScalarFieldS2 f(g);
  for (int l : {0, 1, 2, 3, 4})
    for (int m = -l; m <= l; ++m) {
      const double c = u(rng);
      const auto h = harmonic_field(g, l, m);
      for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += c * h.values[i];
    }
  // f o J by exact node relabeling.
  ScalarFieldS2 fj(g);
  for (int i = 0; i < g.n_lat; ++i)
    for (int j = 0; j < g.n_lon; ++j)
      fj.at(i, j) = f.at(g.n_lat - 1 - i, (j + g.n_lon / 2) % g.n_lon);
  for (int c = 0; c < 20; ++c) {
    const Vec3 ax = random_axis(rng);
    CHECK(std::abs(great_circle_transform(f, ax, 256) - great_circle_transform(fj, ax, 256)) <
          1e-10);
  }
}

TEST_CASE("rotation equivariance") {
  const SphereGrid g(2048, 4096);
  const double ang = 0.7;
  const auto f = harmonic_field(g, 2, 1);
  const auto fr = sample_sphere_field(g, [ang](const Vec3& x) {
    const Vec3 y{std::cos(ang) * x[0] + std::sin(ang) * x[2], x[1],
                 -std::sin(ang) * x[0] + std::cos(ang) * x[2]};
    return real_spherical_harmonic(2, 1, std::asin(y[2]), std::atan2(y[1], y[0]));
  });
  const Vec3 ax{0.36, 0.48, 0.8};
  const Vec3 axr{std::cos(ang) * ax[0] - std::sin(ang) * ax[2], ax[1],
                 std::sin(ang) * ax[0] + std::cos(ang) * ax[2]};
  const double a = great_circle_transform(f, ax, 512);
  const double b = great_circle_transform(fr, axr, 512);
  CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("antipodal cancellation of odd parts") {
  const SphereGrid g(256, 512);
  const auto f_even = harmonic_field(g, 2, 1);

  SUBCASE("single odd harmonic") {
    const auto f_odd = harmonic_field(g, 1, 0);
    const auto rep = antipodal_cancellation_check(f_even, f_odd, 100, 0);
    CHECK(rep.max_abs_difference < 1e-8);
  }
  SUBCASE("zero odd part") {
    const ScalarFieldS2 zero(g);
    const auto rep = antipodal_cancellation_check(f_even, zero, 10, 0);
    CHECK(rep.max_abs_difference == 0.0);
  }
  SUBCASE("random odd band-limited field") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarFieldS2 f_odd(g);
    for (int l : {1, 3, 5})
      for (int m = -l; m <= l; ++m) {
        const double c = u(rng);
        const auto h = harmonic_field(g, l, m);
        for (std::size_t i = 0; i < f_odd.values.size(); ++i)
          f_odd.values[i] += c * h.values[i];
      }
    const auto rep = antipodal_cancellation_check(f_even, f_odd, 100, 0);
    CHECK(rep.max_abs_difference < 1e-7);
  }
  SUBCASE("non-odd input is rejected") {
    const auto not_odd = harmonic_field(g, 2, 0);
    CHECK_THROWS_WITH((void)antipodal_cancellation_check(f_even, not_odd, 10, 0),
                      "f_odd not odd");
  }
}
