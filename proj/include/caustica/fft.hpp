#pragma once

#include <vector>

#include "caustica/grid.hpp"

namespace caustica {

// In-place radix-2 FFT of a length-n (power of two) complex sequence.
// sign = -1: forward, sign = +1: inverse. Unitary: both directions scale by 1/sqrt(n).
void fft_1d(cplx* data, int n, int sign);

// Unitary 2D transforms. Row and column passes run in parallel; each line is
// transformed by serial code, so results are bit-identical for any thread count.
Field2D fft2(const Field2D& f);
Field2D ifft2(const Field2D& f);

}  // namespace caustica
