#include <cmath>

#include "caustica/bessel.hpp"
#include "doctest.h"

using namespace caustica;

TEST_CASE("leading Hankel coefficients match the expansion") {
  const BesselAsymptotics b = BesselAsymptotics::make(4);
  CHECK(b.p_coeffs[0] == 1.0);
  CHECK(b.q_coeffs[0] == -1.0 / 8.0);
  // Next orders of the standard expansion.
  CHECK(b.p_coeffs[1] == doctest::Approx(-9.0 / 128.0).epsilon(1e-15));
  CHECK(b.q_coeffs[1] == doctest::Approx(75.0 / 1024.0).epsilon(1e-15));
  CHECK(b.p_coeffs[2] == doctest::Approx(3675.0 / 32768.0).epsilon(1e-15));
  CHECK(b.q_coeffs[2] == doctest::Approx(-59535.0 / 262144.0).epsilon(1e-15));
}

TEST_CASE("series and asymptotics agree at the seam") {
  // Oracle: 40-term power series at z = 12.
  const double oracle = j0_power_series(12.0, 40);
  const BesselAsymptotics b = BesselAsymptotics::make(12);
  CHECK(std::abs(b.j0_asymptotic(12.0) - oracle) < 1e-10);
  // Both branches evaluated at the switch point itself.
  CHECK(std::abs(j0_power_series(12.0) - b.j0_asymptotic(12.0)) < 1e-10);
}

TEST_CASE("agreement with the standard library Bessel across the range") {
  for (double z = 0.0; z <= 60.0; z += 0.37) {
    CHECK(std::abs(bessel_j0(z) - std::cyl_bessel_j(0.0, z)) < 2e-10);
  }
}

TEST_CASE("special values") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j0(-3.5) == bessel_j0(3.5));  // even function
  // First zero of J0 near 2.404826.
  CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-12);
}

TEST_CASE("truncated P/Q reproduce J0 to the expected order") {
  // With T coefficient pairs the error is O(z^{-2T}) relative; at z = 30 the
  // two-term truncation should sit near (a4-scale)/z^4.
  const BesselAsymptotics two = BesselAsymptotics::make(2);
  const double z = 30.0;
  const double err = std::abs(two.j0_asymptotic(z) - std::cyl_bessel_j(0.0, z));
  CHECK(err < 1.0 / (z * z * z * z));
  CHECK(err > 1e-12);  // genuinely truncated
}
