#include "caustica/wavepacket.hpp"

#include <cmath>
#include <stdexcept>

#include "caustica/fft.hpp"
#include "caustica/parallel.hpp"

namespace caustica {

PhasePoint::PhasePoint(Vec2 x_, Vec2 xi_, double k_) : x(x_), xi(normalized(xi_)), k(k_) {
  if (!(k > 0.0)) throw std::invalid_argument("phase point frequency must be positive");
}

WavepacketSpec::WavepacketSpec(PhasePoint c, double sigma) : center(c), width(sigma) {
  if (!(width > 0.0)) throw std::invalid_argument("wavepacket width must be positive");
}

std::vector<std::string> wavepacket_warnings(const WavepacketSpec& spec) {
  std::vector<std::string> w;
  if (spec.width * spec.center.k < 4.0)
    w.push_back("sigma*k < 4: packet is barely oscillatory at this width");
  return w;
}

Field2D make_wavepacket(const WavepacketSpec& spec, const Grid2D& grid) {
  const double sigma = spec.width;
  const double half = 0.5 * grid.L;
  if (std::exp(-half * half / (2.0 * sigma * sigma)) > 1e-8)
    throw std::invalid_argument("packet leaks across period");

  const double k = spec.center.k;
  const double norm2 = 0.5 * M_PI * sigma * sigma * (1.0 + std::exp(-sigma * sigma * k * k));
  const double amp = 1.0 / std::sqrt(norm2);

  Field2D g(grid);
  const int n = grid.n;
  const double h = grid.h();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 d = grid.min_image(Vec2{ix * h, iy * h} - spec.center.x);
      const double r2 = d.dot(d);
      const double env = std::exp(-r2 / (2.0 * sigma * sigma));
      g.at(ix, iy) = cplx{amp * env * std::cos(k * spec.center.xi.dot(d)), 0.0};
    }
  }
  return g;
}

double windowed_energy(const Field2D& f, const PhasePoint& probe, double sigma, double band,
                       bool symmetric) {
  if (!(band > 0.0 && band < 1.0)) throw std::invalid_argument("band must lie in (0,1)");
  if (!(probe.k < f.grid.nyquist() * (1.0 - band)))
    throw std::invalid_argument("probe frequency too close to Nyquist for this band");
  if (!(sigma > 0.0)) throw std::invalid_argument("window width must be positive");

  const Grid2D& grid = f.grid;
  const int n = grid.n;
  const double h = grid.h();
  Field2D g(grid);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 d = grid.min_image(Vec2{ix * h, iy * h} - probe.x);
      g.at(ix, iy) = f.at(ix, iy) * std::exp(-d.dot(d) / (2.0 * sigma * sigma));
    }
  }
  const Field2D G = fft2(g);

  const double cos_band = std::cos(band);
  std::size_t bins = 0;
  double energy = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double ey = grid.freq(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double ex = grid.freq(ix);
      const double mag = std::hypot(ex, ey);
      if (mag == 0.0) continue;
      if (std::abs(mag - probe.k) >= band * probe.k) continue;
      const double c = (ex * probe.xi.x + ey * probe.xi.y) / mag;
      const bool in_cone = symmetric ? std::abs(c) > cos_band : c > cos_band;
      if (!in_cone) continue;
      ++bins;
      energy += std::norm(G.at(ix, iy));
    }
  }
  if (bins == 0) throw std::runtime_error("band unresolved at this grid");
  return grid.cell_area() * energy;
}

}  // namespace caustica
