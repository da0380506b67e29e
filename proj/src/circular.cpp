#include "caustica/circular.hpp"

#include <cmath>
#include <stdexcept>

#include "caustica/fft.hpp"
#include "caustica/parallel.hpp"

namespace caustica {

Field2D apply_multiplier(const Field2D& f, const RadialMultiplier& m) {
  Field2D F = fft2(f);
  const int n = f.grid.n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    const double ey = f.grid.freq(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double ex = f.grid.freq(ix);
      const double z = std::hypot(ex, ey);
      cplx v = m.symbol(z);
      if (m.phase_shift != 0) {
        const double a = m.phase_shift * z;
        v *= cplx{std::cos(a), std::sin(a)};
      }
      F.at(ix, iy) *= v;
    }
  }
  return ifft2(F);
}

cplx interpolate_bilinear(const Field2D& f, Vec2 p) {
  const int n = f.grid.n;
  const double h = f.grid.h();
  double gx = p.x / h, gy = p.y / h;
  double fx = std::floor(gx), fy = std::floor(gy);
  const double sx = gx - fx, sy = gy - fy;
  long ix = static_cast<long>(fx) % n, iy = static_cast<long>(fy) % n;
  if (ix < 0) ix += n;
  if (iy < 0) iy += n;
  const long jx = (ix + 1) % n, jy = (iy + 1) % n;
  return (1.0 - sx) * (1.0 - sy) * f.at(ix, iy) + sx * (1.0 - sy) * f.at(jx, iy) +
         (1.0 - sx) * sy * f.at(ix, jy) + sx * sy * f.at(jx, jy);
}

Field2D circular_transform_quadrature(const Field2D& f, int m) {
  if (m < 64) throw std::invalid_argument("quadrature size must be at least 64");
  const Grid2D& grid = f.grid;
  const int n = grid.n;
  const double h = grid.h();
  std::vector<Vec2> nodes(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const double t = 2.0 * M_PI * a / m;
    nodes[static_cast<std::size_t>(a)] = {std::cos(t), std::sin(t)};
  }
  const double wq = 2.0 * M_PI / m;
  Field2D out(grid);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 x{ix * h, iy * h};
      cplx s{0.0, 0.0};
      for (const Vec2& w : nodes) s += interpolate_bilinear(f, x + w);
      out.at(ix, iy) = wq * s;
    }
  }
  return out;
}

RadialMultiplier circ_multiplier() {
  return {[](double z) { return cplx{2.0 * M_PI * bessel_j0(z), 0.0}; }, 0, "2pi J0"};
}

RadialMultiplier normal_multiplier() {
  return {[](double z) {
            const double v = 2.0 * M_PI * bessel_j0(z);
            return cplx{v * v, 0.0};
          },
          0, "(2pi J0)^2"};
}

Field2D circular_transform_multiplier(const Field2D& f) {
  return apply_multiplier(f, circ_multiplier());
}

Field2D normal_operator(const Field2D& f) { return apply_multiplier(f, normal_multiplier()); }

double normal_kernel_analytic(double r) {
  if (!(r > 0.0 && r < 2.0)) throw std::domain_error("kernel radius must lie in (0,2)");
  return 4.0 / (r * std::sqrt(4.0 - r * r));
}

RadialMultiplier a0_multiplier(int terms, double low_freq_cap) {
  if (terms < 1) throw std::invalid_argument("terms must be at least 1");
  const BesselAsymptotics b = BesselAsymptotics::make(terms);
  const double cap = low_freq_cap;
  return {[b, cap](double z) {
            const double zc = z < cap ? cap : z;
            const auto [p, q] = b.pq(zc);
            return cplx{4.0 * M_PI / zc * (p * p + q * q), 0.0};
          },
          0, "A0"};
}

RadialMultiplier fio_multiplier(int side, int terms, double low_freq_cap) {
  if (side != 1 && side != -1) throw std::invalid_argument("side must be +1 or -1");
  if (terms < 1) throw std::invalid_argument("terms must be at least 1");
  const BesselAsymptotics b = BesselAsymptotics::make(terms);
  const double cap = low_freq_cap;
  // (2 pi J0)^2 ~ A0 + i (2 pi/z)(P - iQ)^2 e^{-2iz} - i (2 pi/z)(P + iQ)^2 e^{+2iz};
  // the e^{-2i|xi|} factor displaces the +cone by +2 xi/|xi|.
  const auto symbol = [b, cap, side](double z) {
    const double zc = z < cap ? cap : z;
    const auto [p, q] = b.pq(zc);
    const cplx pq = side > 0 ? cplx{p, -q} : cplx{p, q};
    const cplx unit_i = side > 0 ? cplx{0.0, 1.0} : cplx{0.0, -1.0};
    return unit_i * (2.0 * M_PI / zc) * pq * pq;
  };
  return {symbol, side > 0 ? -2 : +2, side > 0 ? "F+" : "F-"};
}

Decomposition decompose(const Field2D& f, int terms) {
  if (terms < 1) throw std::invalid_argument("terms must be at least 1");
  Decomposition d{apply_multiplier(f, a0_multiplier(terms)),
                  apply_multiplier(f, fio_multiplier(+1, terms)),
                  apply_multiplier(f, fio_multiplier(-1, terms)), Field2D{}};
  d.residual = normal_operator(f) - (d.a0 + d.fplus + d.fminus);
  return d;
}

}  // namespace caustica
