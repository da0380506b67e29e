#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace caustica {

using Vec3 = std::array<double, 3>;

// Latitude-longitude grid with Gauss-Legendre latitudes (open: no pole nodes),
// uniform longitudes. n_lat >= 32, n_lon even (antipodal node symmetry).
struct SphereGrid {
  int n_lat = 0;
  int n_lon = 0;
  std::vector<double> lats;  // ascending, radians in (-pi/2, pi/2)

  SphereGrid() = default;
  SphereGrid(int n_lat_, int n_lon_);
};

struct ScalarFieldS2 {
  SphereGrid grid;
  std::vector<double> values;  // [i_lat * n_lon + i_lon]

  ScalarFieldS2() = default;
  explicit ScalarFieldS2(const SphereGrid& g)
      : grid(g), values(static_cast<std::size_t>(g.n_lat) * g.n_lon, 0.0) {}

  double& at(int ilat, int ilon) {
    return values[static_cast<std::size_t>(ilat) * grid.n_lon + ilon];
  }
  double at(int ilat, int ilon) const {
    return values[static_cast<std::size_t>(ilat) * grid.n_lon + ilon];
  }
};

// Samples f(unit point) on the grid.
ScalarFieldS2 sample_sphere_field(const SphereGrid& grid,
                                  const std::function<double(const Vec3&)>& f);

// Orthonormal real spherical harmonic Y_l^m evaluated at (lat, lon).
double real_spherical_harmonic(int l, int m, double lat, double lon);

// Trapezoidal integral of f over the great circle normal to `axis` (|axis|=1),
// m >= 128 nodes (even), bilinear interpolation in (lat, lon) with pole values
// from the adjacent rings.
double great_circle_transform(const ScalarFieldS2& f, const Vec3& axis, int m = 256);

struct AntipodalCheckReport {
  double max_abs_difference = 0.0;  // |T(f_even + f_odd) - T(f_even)| over circles
  double max_parity_defect = 0.0;   // max |f_odd(x) + f_odd(-x)| over grid nodes
  int circles = 0;
};

// Transforms of f_even and f_even + f_odd agree over random great circles:
// the odd part is invisible. f_odd must be strictly odd (defect <= 1e-10).
AntipodalCheckReport antipodal_cancellation_check(const ScalarFieldS2& f_even,
                                                  const ScalarFieldS2& f_odd, int circles,
                                                  std::uint64_t seed = 0, int m = 256);

}  // namespace caustica
