#include "caustica/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "caustica/circular.hpp"

namespace caustica::ref {

std::vector<cplx> dft2(const std::vector<cplx>& in, int n, int sign) {
  if (in.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("size mismatch");
  std::vector<cplx> out(in.size());
  for (int ky = 0; ky < n; ++ky) {
    for (int kx = 0; kx < n; ++kx) {
      cplx s{0.0, 0.0};
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const double a = sign * 2.0 * M_PI * (static_cast<double>(kx) * ix + static_cast<double>(ky) * iy) / n;
          s += in[static_cast<std::size_t>(iy) * n + ix] * cplx{std::cos(a), std::sin(a)};
        }
      }
      out[static_cast<std::size_t>(ky) * n + kx] = s / static_cast<double>(n);
    }
  }
  return out;
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

}  // namespace caustica::ref
