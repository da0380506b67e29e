#pragma once

#include <vector>

#include "caustica/geodesic/engine.hpp"
#include "caustica/grid.hpp"

namespace caustica {

// One kernel sample along the transversal path.
struct KernelSamplePoint {
  double z_prime = 0.0;    // signed normal distance to Sigma(p), positive on the range side
  double kernel = 0.0;     // Richardson-extrapolated estimate of N(p, q)
  double convergence = 0.0;  // relative change when the bump width doubles
  geo::VecX q;
};

struct KernelSliceOptions {
  double z_lo = 0.01, z_hi = 0.25;  // sampled z' range
  int samples = 16;
  double bump_width = 0.0;  // 0: z_lo / 4
  // Smooth (theta, t) windows isolating the fold branch pair: taper is 1
  // inside the inner extent and 0 outside the outer one. Zero selects widths
  // from the fold invariants (branch spread ~ sqrt(2 D z_hi / A)).
  double theta_inner = 0.0, theta_outer = 0.0;
  double t_inner = 0.0, t_outer = 0.0;
  geo::VecX path_dir;  // empty: inward normal (range side) at the crossing
  bool two_sided = false;  // also sample the mirrored points on the forbidden side
};

struct KernelSlice {
  std::vector<KernelSamplePoint> points;
  geo::VecX p;
  geo::VecX theta0;
  geo::SingFitInputs fold;  // invariants at the crossing fold point (unit weights)
};

// Probes the Schwartz kernel of the (theta, t)-windowed normal operator along
// a path crossing Sigma(p) transversally at exp_p(t* theta0), by applying the
// operator to shrinking normalized bumps (widths w, w/2, 2w; Richardson
// extrapolation over the Gaussian smoothing bias).
KernelSlice kernel_slice(const geo::GeodesicModel& model, const geo::VecX& p,
                         const geo::VecX& theta0, const KernelSliceOptions& opts = {});

struct SingularityFit {
  double exponent = 0.0;   // fitted power of z'
  double coeff = 0.0;      // fitted prefactor
  double predicted = 0.0;  // sqrt(2) W_Sigma / sqrt(A D)
  double residual = 0.0;   // RMS relative misfit over the window
  double window_lo = 0.0, window_hi = 0.0;
};

// Least-squares fit of log K against log z' over [window_lo, window_hi];
// requires at least 12 points inside the window.
SingularityFit fit_sqrt_singularity(const KernelSlice& slice, double window_lo = 0.01,
                                    double window_hi = 0.25);

struct DiagonalCheckOptions {
  double t_taper_on = 1.4;   // t-window of the truncated transform: 1 below this
  double t_taper_off = 2.0;  // 0 above this; must stay below the conjugate time pi
  double packet_sigma = 0.5;
  std::vector<double> ks = {32.0, 64.0};
};

struct DiagonalCheckResult {
  double max_rel_error = 0.0;          // response vs 4*pi/k over all samples
  double vanishing_weight_ratio = 0.0; // response with kappa = (theta.xi)^2 vs unit weight
};

// Applies the diagonal (time-truncated) part of the circular normal operator
// to wavepackets at (p, xi) and compares amplitudes against the principal
// symbol 4*pi/|xi|. Realized as a Fourier multiplier via the closed-form
// angular reduction; only valid below the first conjugate time.
DiagonalCheckResult diagonal_symbol_check(const Grid2D& grid, Vec2 p,
                                          const std::vector<Vec2>& xi_samples,
                                          const DiagonalCheckOptions& opts = {});

}  // namespace caustica
