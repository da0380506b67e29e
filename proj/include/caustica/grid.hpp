#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace caustica {

using cplx = std::complex<double>;

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const;
};

Vec2 normalized(Vec2 v);

// Periodic square grid: n samples per axis (power of two, n >= 64), period L.
// Sample j of axis a sits at j*h, h = L/n. The frequency lattice is
// (2*pi/L) * {-n/2, ..., n/2-1} per axis.
struct Grid2D {
  int n = 0;
  double L = 0.0;

  Grid2D() = default;
  Grid2D(int n_, double L_);

  double h() const { return L / n; }
  double cell_area() const { return h() * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  double nyquist() const;  // pi*n/L, magnitude of the largest resolved frequency

  // Frequency of FFT bin index i (0 <= i < n), in physical units.
  double freq(int i) const;

  // Position wrapped into the fundamental domain; shortest periodic displacement.
  double wrap(double d) const;
  Vec2 min_image(Vec2 d) const { return {wrap(d.x), wrap(d.y)}; }

  bool operator==(const Grid2D& o) const { return n == o.n && L == o.L; }
};

// Sampled field on a Grid2D, row-major: values[iy*n + ix]. Complex storage;
// fields constructed from real data carry exactly zero imaginary parts.
struct Field2D {
  Grid2D grid;
  std::vector<cplx> values;

  Field2D() = default;
  explicit Field2D(const Grid2D& g) : grid(g), values(g.size(), cplx{0.0, 0.0}) {}
  Field2D(const Grid2D& g, std::vector<cplx> v);

  cplx& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.n + ix]; }
  const cplx& at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * grid.n + ix];
  }

  void check_finite() const;  // throws if any entry is NaN/inf
  bool is_real(double tol = 0.0) const;
};

// Physical L2 norm: sqrt(h^2 * sum |f|^2). Deterministic reduction order.
double l2_norm(const Field2D& f);
// Hermitian inner product h^2 * sum f * conj(g).
cplx inner(const Field2D& f, const Field2D& g);

Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(const Field2D& a, double s);
Field2D operator*(const Field2D& a, cplx s);

}  // namespace caustica
