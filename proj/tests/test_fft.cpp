#include <complex>
#include <random>
#include <vector>

#include "caustica/fft.hpp"
#include "caustica/grid.hpp"
#include "caustica/parallel.hpp"
#include "caustica/reference.hpp"
#include "doctest.h"

using namespace caustica;

namespace {

Field2D random_field(const Grid2D& g, std::uint64_t seed, bool complex_valued = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field2D f(g);
  for (auto& z : f.values) z = complex_valued ? cplx{u(rng), u(rng)} : cplx{u(rng), 0.0};
  return f;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("constant field transforms to a DC-only spectrum") {
  Grid2D g(64, 16.0);
  Field2D f(g);
  for (auto& z : f.values) z = {1.0, 0.0};
  const Field2D F = fft2(f);
  CHECK(std::abs(F.at(0, 0) - cplx{64.0, 0.0}) < 1e-12);  // unitary: n * mean
  double off = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      if (ix != 0 || iy != 0) off = std::max(off, std::abs(F.at(ix, iy)));
  CHECK(off < 1e-12);
}

TEST_CASE("lattice plane wave transforms to a single bin") {
  Grid2D g(64, 8.0);
  const int kx = 5, ky = 62;  // negative frequency bin
  Field2D f(g);
  const double h = g.h();
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const double phase = g.freq(kx) * ix * h + g.freq(ky) * iy * h;
      f.at(ix, iy) = {std::cos(phase), std::sin(phase)};
    }
  const Field2D F = fft2(f);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const double expected = (ix == kx && iy == ky) ? 64.0 : 0.0;
      CHECK(std::abs(F.at(ix, iy) - cplx{expected, 0.0}) < 1e-11);
    }
}

TEST_CASE("Parseval against the direct-summation oracle on an 8x8 grid") {
  const int n = 8;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> in(static_cast<std::size_t>(n) * n);
  for (auto& z : in) z = {u(rng), u(rng)};

  const std::vector<cplx> oracle = ref::dft2(in, n, -1);

  std::vector<cplx> fast = in;
  for (int iy = 0; iy < n; ++iy) fft_1d(fast.data() + static_cast<std::size_t>(iy) * n, n, -1);
  std::vector<cplx> col(static_cast<std::size_t>(n));
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) col[iy] = fast[static_cast<std::size_t>(iy) * n + ix];
    fft_1d(col.data(), n, -1);
    for (int iy = 0; iy < n; ++iy) fast[static_cast<std::size_t>(iy) * n + ix] = col[iy];
  }
  CHECK(max_abs_diff(fast, oracle) < 1e-12);

  double in2 = 0.0, out2 = 0.0;
  for (const auto& z : in) in2 += std::norm(z);
  for (const auto& z : oracle) out2 += std::norm(z);
  CHECK(std::abs(in2 - out2) < 1e-12 * in2);
}

TEST_CASE("round-trip identity to 1e-12 on all grid sizes") {
  for (int n : {64, 128, 256, 512}) {
    Grid2D g(n, 16.0);
    const Field2D f = random_field(g, 1234 + n);
    const Field2D back = ifft2(fft2(f));
    double err = 0.0, ref_norm = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      err = std::max(err, std::abs(back.values[i] - f.values[i]));
      ref_norm = std::max(ref_norm, std::abs(f.values[i]));
    }
    CHECK(err < 1e-12 * ref_norm);
  }
}

TEST_CASE("Parseval at production size") {
  Grid2D g(256, 16.0);
  const Field2D f = random_field(g, 99);
  const Field2D F = fft2(f);
  CHECK(std::abs(l2_norm(F) - l2_norm(f)) < 1e-12 * l2_norm(f));
}

TEST_CASE("parallel FFT is bit-identical to the single-thread run") {
  Grid2D g(128, 16.0);
  const Field2D f = random_field(g, 321);
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Field2D serial = fft2(f);
  omp_set_num_threads(saved);
#else
  const Field2D serial = fft2(f);
#endif
  const Field2D parallel = fft2(f);
  CHECK(max_abs_diff(serial.values, parallel.values) == 0.0);
}
