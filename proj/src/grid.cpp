#include "caustica/grid.hpp"

#include <cmath>

#include "caustica/parallel.hpp"

namespace caustica {

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 normalized(Vec2 v) {
  const double r = v.norm();
  if (r == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {v.x / r, v.y / r};
}

static bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

Grid2D::Grid2D(int n_, double L_) : n(n_), L(L_) {
  if (!is_pow2(n)) throw std::invalid_argument("grid size must be a power of two");
  if (n < 64) throw std::invalid_argument("grid size must be at least 64");
  if (!(L > 0.0)) throw std::invalid_argument("grid period must be positive");
}

double Grid2D::nyquist() const { return M_PI * n / L; }

double Grid2D::freq(int i) const {
  const int k = i < n / 2 ? i : i - n;
  return 2.0 * M_PI / L * k;
}

double Grid2D::wrap(double d) const {
  d = std::fmod(d, L);
  if (d > 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

Field2D::Field2D(const Grid2D& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw std::invalid_argument("field length does not match grid");
}

void Field2D::check_finite() const {
  for (const cplx& z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::domain_error("field contains non-finite entries");
}

bool Field2D::is_real(double tol) const {
  for (const cplx& z : values)
    if (std::abs(z.imag()) > tol) return false;
  return true;
}

double l2_norm(const Field2D& f) {
  const double s =
      deterministic_sum(f.values.size(), [&](std::size_t i) { return std::norm(f.values[i]); });
  return std::sqrt(f.grid.cell_area() * s);
}

cplx inner(const Field2D& f, const Field2D& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("grid mismatch");
  const double re = deterministic_sum(
      f.values.size(), [&](std::size_t i) { return (f.values[i] * std::conj(g.values[i])).real(); });
  const double im = deterministic_sum(
      f.values.size(), [&](std::size_t i) { return (f.values[i] * std::conj(g.values[i])).imag(); });
  return f.grid.cell_area() * cplx{re, im};
}

static Field2D zip(const Field2D& a, const Field2D& b, cplx sb) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("grid mismatch");
  Field2D out(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = a.values[i] + sb * b.values[i];
  return out;
}

Field2D operator+(const Field2D& a, const Field2D& b) { return zip(a, b, {1.0, 0.0}); }
Field2D operator-(const Field2D& a, const Field2D& b) { return zip(a, b, {-1.0, 0.0}); }

Field2D operator*(const Field2D& a, double s) { return a * cplx{s, 0.0}; }

Field2D operator*(const Field2D& a, cplx s) {
  Field2D out(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = s * a.values[i];
  return out;
}

}  // namespace caustica
