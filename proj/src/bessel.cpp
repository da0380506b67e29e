#include "caustica/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace caustica {

// Hankel symbols a_k for nu = 0:  a_0 = 1,  a_{k+1} = -a_k (2k+1)^2 / (8(k+1)).
// P collects (-1)^k a_{2k}, Q collects (-1)^k a_{2k+1}.
BesselAsymptotics BesselAsymptotics::make(int terms) {
  if (terms < 1) throw std::invalid_argument("asymptotic series needs at least one term");
  BesselAsymptotics b;
  double a = 1.0;
  int k = 0;
  for (int j = 0; j < terms; ++j) {
    b.p_coeffs.push_back((j % 2 == 0 ? 1.0 : -1.0) * a);
    a *= -(2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * (k + 1.0));
    ++k;
    b.q_coeffs.push_back(((j % 2 == 0 ? 1.0 : -1.0)) * a);
    a *= -(2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * (k + 1.0));
    ++k;
  }
  return b;
}

std::pair<double, double> BesselAsymptotics::pq(double z) const {
  if (!(z > 0.0)) throw std::domain_error("P/Q series requires z > 0");
  const double iz2 = 1.0 / (z * z);
  double p = 0.0, zp = 1.0;
  for (double c : p_coeffs) {
    p += c * zp;
    zp *= iz2;
  }
  double q = 0.0, zq = 1.0 / z;
  for (double c : q_coeffs) {
    q += c * zq;
    zq *= iz2;
  }
  return {p, q};
}

double BesselAsymptotics::j0_asymptotic(double z) const {
  const auto [p, q] = pq(z);
  const double chi = z - 0.25 * M_PI;
  return std::sqrt(2.0 / (M_PI * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

double j0_power_series(double z, int max_terms) {
  const double x = 0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int m = 1; m < max_terms; ++m) {
    term *= -x / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double bessel_j0(double z) {
  z = std::abs(z);
  static const BesselAsymptotics asym = BesselAsymptotics::make(12);
  if (z < asym.z_min) return j0_power_series(z);
  return asym.j0_asymptotic(z);
}

}  // namespace caustica
