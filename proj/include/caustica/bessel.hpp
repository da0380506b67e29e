#pragma once

#include <utility>
#include <vector>

namespace caustica {

// Coefficients of the Hankel large-argument expansion
//   J0(z) ~ sqrt(2/(pi z)) * ( P(z) cos(z - pi/4) - Q(z) sin(z - pi/4) ),
//   P(z) = sum_k p_coeffs[k] z^{-2k},  Q(z) = sum_k q_coeffs[k] z^{-2k-1},
// together with the switch point below which the power series is used instead.
// Leading coefficients: p_coeffs[0] = 1, q_coeffs[0] = -1/8.
struct BesselAsymptotics {
  std::vector<double> p_coeffs;
  std::vector<double> q_coeffs;
  double z_min = 12.0;

  // terms = number of coefficients kept in each of P and Q.
  static BesselAsymptotics make(int terms);

  // P(z), Q(z) truncated to the stored coefficients. Requires z > 0.
  std::pair<double, double> pq(double z) const;

  // sqrt(2/(pi z)) (P cos(z-pi/4) - Q sin(z-pi/4)); valid for z >= z_min.
  double j0_asymptotic(double z) const;
};

// J0 by Maclaurin series; accurate for |z| <~ 12, used below the seam and as
// the oracle at the seam. max_terms caps the series length.
double j0_power_series(double z, int max_terms = 80);

// J0 everywhere: power series below asymptotics.z_min, Hankel expansion above.
double bessel_j0(double z);

}  // namespace caustica
