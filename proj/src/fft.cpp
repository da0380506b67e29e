#include "caustica/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace caustica {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Twiddle factors e^{sign*2*pi*i*k/n} for k < n/2.
std::vector<cplx> twiddles(int n, int sign) {
  std::vector<cplx> w(static_cast<std::size_t>(n / 2));
  for (int k = 0; k < n / 2; ++k) {
    const double a = sign * 2.0 * M_PI * k / n;
    w[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
  }
  return w;
}

void fft_core(cplx* a, int n, const std::vector<cplx>& w) {
  // Bit-reversal permutation.
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int step = n / len;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < len / 2; ++k) {
        const cplx t = a[i + k + len / 2] * w[static_cast<std::size_t>(k * step)];
        a[i + k + len / 2] = a[i + k] - t;
        a[i + k] += t;
      }
    }
  }
}

}  // namespace

void fft_1d(cplx* data, int n, int sign) {
  if (!is_pow2(n)) throw std::invalid_argument("fft length must be a power of two");
  const std::vector<cplx> w = twiddles(n, sign);
  fft_core(data, n, w);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) data[i] *= s;
}

static Field2D fft2_impl(const Field2D& f, int sign) {
  const int n = f.grid.n;
  Field2D out = f;
  const std::vector<cplx> w = twiddles(n, sign);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    cplx* row = out.values.data() + static_cast<std::size_t>(iy) * n;
    fft_core(row, n, w);
    for (int ix = 0; ix < n; ++ix) row[ix] *= s;
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int ix = 0; ix < n; ++ix) {
    std::vector<cplx> col(static_cast<std::size_t>(n));
    for (int iy = 0; iy < n; ++iy) col[static_cast<std::size_t>(iy)] = out.at(ix, iy);
    fft_core(col.data(), n, w);
    for (int iy = 0; iy < n; ++iy) out.at(ix, iy) = col[static_cast<std::size_t>(iy)] * s;
  }
  return out;
}

Field2D fft2(const Field2D& f) { return fft2_impl(f, -1); }
Field2D ifft2(const Field2D& f) { return fft2_impl(f, +1); }

}  // namespace caustica
