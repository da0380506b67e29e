#pragma once

#include <functional>
#include <string>

#include "caustica/bessel.hpp"
#include "caustica/grid.hpp"

namespace caustica {

// A radial Fourier multiplier m(|xi|) * exp(i * phase_shift * |xi|); the symbol
// must be finite on the whole frequency lattice (value at 0 fixed by continuity
// or by an explicit low-frequency cap).
struct RadialMultiplier {
  std::function<cplx(double)> symbol;
  int phase_shift = 0;  // one of {0, +2, -2}
  std::string label;
};

// f -> ifft2( m(xi) * fft2(f) ).
Field2D apply_multiplier(const Field2D& f, const RadialMultiplier& m);

// Bilinear periodic interpolation of f at a physical point.
cplx interpolate_bilinear(const Field2D& f, Vec2 p);

// Integral of f over the unit circle centered at each grid point:
//   (Rf)(x_j) = (2 pi / m) sum_a f(x_j + (cos(2 pi a/m), sin(2 pi a/m))),
// with bilinear interpolation at off-grid points. Requires m >= 64.
Field2D circular_transform_quadrature(const Field2D& f, int m);

// The same transform as the Fourier multiplier 2 pi J0(|xi|).
Field2D circular_transform_multiplier(const Field2D& f);

// R*R as the multiplier (2 pi J0(|xi|))^2.
Field2D normal_operator(const Field2D& f);

// Kernel of R*R off the diagonal: 4 / (r sqrt(4 - r^2)) for 0 < r < 2.
double normal_kernel_analytic(double r);

// Multiplier factories. `terms` = number of coefficients kept in each of P, Q.
// Amplitudes are capped below |xi| = low_freq_cap by their value there (the
// decomposition is only asserted away from low frequencies).
RadialMultiplier circ_multiplier();
RadialMultiplier normal_multiplier();
RadialMultiplier a0_multiplier(int terms, double low_freq_cap = 0.5);
// side = +1: moves a packet at (x0, xi) to x0 + 2 xi/|xi| (phase exp(-2i|xi|));
// side = -1: the adjoint, displacement -2 xi/|xi| (phase exp(+2i|xi|)).
RadialMultiplier fio_multiplier(int side, int terms, double low_freq_cap = 0.5);

struct Decomposition {
  Field2D a0;        // diagonal pseudodifferential part applied to f
  Field2D fplus;     // FIO part displacing by +2 xi/|xi|
  Field2D fminus;    // adjoint FIO part, displacement -2 xi/|xi|
  Field2D residual;  // normal_operator(f) - (a0 + fplus + fminus)
};

// Splits R*R f into the three-multiplier decomposition with P, Q truncated to
// `terms`. Requires terms >= 1.
Decomposition decompose(const Field2D& f, int terms);

}  // namespace caustica
