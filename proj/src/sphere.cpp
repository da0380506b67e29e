#include "caustica/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "caustica/parallel.hpp"

namespace caustica {

namespace {

// Gauss-Legendre nodes on (-1, 1) by Newton iteration on P_n.
std::vector<double> legendre_nodes(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[static_cast<std::size_t>(n - 1 - i)] = t;  // ascending
  }
  // Enforce exact antipodal symmetry of the node set.
  for (int i = 0; i < n / 2; ++i) {
    const double s = 0.5 * (x[static_cast<std::size_t>(n - 1 - i)] - x[static_cast<std::size_t>(i)]);
    x[static_cast<std::size_t>(n - 1 - i)] = s;
    x[static_cast<std::size_t>(i)] = -s;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  return x;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

Vec3 normalize3(const Vec3& a) {
  const double r = norm(a);
  if (r == 0.0) throw std::invalid_argument("zero axis");
  return {a[0] / r, a[1] / r, a[2] / r};
}

// Bilinear interpolation with pole rows synthesized from the ring means.
double interp(const ScalarFieldS2& f, double lat, double lon, double south_pole,
              double north_pole) {
  const SphereGrid& g = f.grid;
  const double dlon = 2.0 * M_PI / g.n_lon;
  double lw = lon / dlon;
  lw = lw - std::floor(lw / g.n_lon) * g.n_lon;
  int j0 = static_cast<int>(std::floor(lw)) % g.n_lon;
  const double fl = lw - std::floor(lw);
  const int j1 = (j0 + 1) % g.n_lon;

  const auto row_value = [&](int ilat) {
    return (1.0 - fl) * f.at(ilat, j0) + fl * f.at(ilat, j1);
  };

  if (lat <= g.lats.front()) {
    const double span = g.lats.front() + M_PI / 2.0;
    const double t = (g.lats.front() - lat) / span;  // 0 at first ring, 1 at pole
    return (1.0 - t) * row_value(0) + t * south_pole;
  }
  if (lat >= g.lats.back()) {
    const double span = M_PI / 2.0 - g.lats.back();
    const double t = (lat - g.lats.back()) / span;
    return (1.0 - t) * row_value(g.n_lat - 1) + t * north_pole;
  }
  const auto it = std::upper_bound(g.lats.begin(), g.lats.end(), lat);
  const int i1 = static_cast<int>(it - g.lats.begin());
  const int i0 = i1 - 1;
  const double t = (lat - g.lats[static_cast<std::size_t>(i0)]) /
                   (g.lats[static_cast<std::size_t>(i1)] - g.lats[static_cast<std::size_t>(i0)]);
  return (1.0 - t) * row_value(i0) + t * row_value(i1);
}

double ring_mean(const ScalarFieldS2& f, int ilat) {
  double s = 0.0;
  for (int j = 0; j < f.grid.n_lon; ++j) s += f.at(ilat, j);
  return s / f.grid.n_lon;
}

}  // namespace

SphereGrid::SphereGrid(int n_lat_, int n_lon_) : n_lat(n_lat_), n_lon(n_lon_) {
  if (n_lat < 32) throw std::invalid_argument("latitude grid must have at least 32 nodes");
  if (n_lon < 2 || n_lon % 2 != 0)
    throw std::invalid_argument("longitude grid must be even");
  lats.reserve(static_cast<std::size_t>(n_lat));
  for (double x : legendre_nodes(n_lat)) lats.push_back(std::asin(x));
}

ScalarFieldS2 sample_sphere_field(const SphereGrid& grid,
                                  const std::function<double(const Vec3&)>& f) {
  ScalarFieldS2 out(grid);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < grid.n_lat; ++i) {
    const double lat = grid.lats[static_cast<std::size_t>(i)];
    const double cl = std::cos(lat), sl = std::sin(lat);
    for (int j = 0; j < grid.n_lon; ++j) {
      const double lon = 2.0 * M_PI * j / grid.n_lon;
      out.at(i, j) = f({cl * std::cos(lon), cl * std::sin(lon), sl});
    }
  }
  return out;
}

double real_spherical_harmonic(int l, int m, double lat, double lon) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("invalid harmonic degree/order");
  const int am = std::abs(m);
  const double x = std::sin(lat);
  // Associated Legendre P_l^m with Condon-Shortley phase by upward recurrence.
  double pmm = 1.0;
  if (am > 0) {
    const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
    double fact = 1.0;
    for (int i = 1; i <= am; ++i) {
      pmm *= -fact * somx2;
      fact += 2.0;
    }
  }
  double p = pmm;
  if (l > am) {
    double pm1 = x * (2.0 * am + 1.0) * pmm;
    if (l == am + 1) {
      p = pm1;
    } else {
      for (int ll = am + 2; ll <= l; ++ll) {
        const double pll =
            ((2.0 * ll - 1.0) * x * pm1 - (ll + am - 1.0) * pmm) / (ll - am);
        pmm = pm1;
        pm1 = pll;
      }
      p = pm1;
    }
  }
  double norm_lm = (2.0 * l + 1.0) / (4.0 * M_PI);
  for (int i = l - am + 1; i <= l + am; ++i) norm_lm /= i;
  const double N = std::sqrt(norm_lm);
  if (m == 0) return N * p;
  if (m > 0) return std::sqrt(2.0) * N * p * std::cos(m * lon);
  return std::sqrt(2.0) * N * p * std::sin(am * lon);
}

double great_circle_transform(const ScalarFieldS2& f, const Vec3& axis, int m) {
  if (m < 128) throw std::invalid_argument("great-circle quadrature needs at least 128 nodes");
  if (m % 2 != 0) throw std::invalid_argument("quadrature size must be even");
  const Vec3 n = normalize3(axis);

  // Deterministic in-plane frame: cross with the least-aligned coordinate axis.
  int least = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[static_cast<std::size_t>(i)]) < std::abs(n[static_cast<std::size_t>(least)]))
      least = i;
  Vec3 e{0.0, 0.0, 0.0};
  e[static_cast<std::size_t>(least)] = 1.0;
  const Vec3 u = normalize3(cross(n, e));
  const Vec3 v = cross(n, u);

  const double south = ring_mean(f, 0);
  const double north = ring_mean(f, f.grid.n_lat - 1);

  const double sum = deterministic_sum(
      static_cast<std::size_t>(m),
      [&](std::size_t a) {
        const double s = 2.0 * M_PI * static_cast<double>(a) / m;
        const double cs = std::cos(s), sn = std::sin(s);
        const Vec3 pnt{cs * u[0] + sn * v[0], cs * u[1] + sn * v[1], cs * u[2] + sn * v[2]};
        const double lat = std::asin(std::max(-1.0, std::min(1.0, pnt[2])));
        const double lon = std::atan2(pnt[1], pnt[0]);
        return interp(f, lat, lon, south, north);
      },
      1024);
  return sum * 2.0 * M_PI / m;
}

AntipodalCheckReport antipodal_cancellation_check(const ScalarFieldS2& f_even,
                                                  const ScalarFieldS2& f_odd, int circles,
                                                  std::uint64_t seed, int m) {
  if (f_even.grid.n_lat != f_odd.grid.n_lat || f_even.grid.n_lon != f_odd.grid.n_lon)
    throw std::invalid_argument("grid mismatch");
  const SphereGrid& g = f_odd.grid;

  AntipodalCheckReport rep;
  rep.circles = circles;
  // Antipode of node (i, j) is the node (n_lat-1-i, j + n_lon/2).
  for (int i = 0; i < g.n_lat; ++i)
    for (int j = 0; j < g.n_lon; ++j) {
      const double d =
          f_odd.at(i, j) + f_odd.at(g.n_lat - 1 - i, (j + g.n_lon / 2) % g.n_lon);
      rep.max_parity_defect = std::max(rep.max_parity_defect, std::abs(d));
    }
  if (rep.max_parity_defect > 1e-10) throw std::invalid_argument("f_odd not odd");

  ScalarFieldS2 sum_field = f_even;
  for (std::size_t i = 0; i < sum_field.values.size(); ++i)
    sum_field.values[i] += f_odd.values[i];

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < circles; ++c) {
    Vec3 axis{gauss(rng), gauss(rng), gauss(rng)};
    if (norm(axis) < 1e-6) {
      --c;
      continue;
    }
    axis = normalize3(axis);
    const double t0 = great_circle_transform(f_even, axis, m);
    const double t1 = great_circle_transform(sum_field, axis, m);
    rep.max_abs_difference = std::max(rep.max_abs_difference, std::abs(t1 - t0));
  }
  return rep;
}

}  // namespace caustica
