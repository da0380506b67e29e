#pragma once

#include <vector>

#include "caustica/grid.hpp"

namespace caustica::ref {

// Direct-summation unitary DFT, O(n^4). Oracle for the FFT on small grids;
// takes raw row-major data so it can run below the Grid2D size floor.
std::vector<cplx> dft2(const std::vector<cplx>& in, int n, int sign);

// Serial circular transform, same quadrature and interpolation as the
// parallel kernel. Kept as the single-thread reference for equivalence tests
// and the benchmark baseline.
Field2D circular_transform_quadrature(const Field2D& f, int m);

}  // namespace caustica::ref
