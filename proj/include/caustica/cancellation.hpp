#pragma once

#include "caustica/circular.hpp"
#include "caustica/geodesic/engine.hpp"
#include "caustica/grid.hpp"
#include "caustica/wavepacket.hpp"

namespace caustica {

// f2: packet at center; f1: constructed partner at center.x + 2*side*xi whose
// singularities cancel those of f2 for the circle family between them.
struct CancellationPair {
  Field2D f2;
  Field2D f1;
  PhasePoint center;
  int side = +1;       // +1 or -1
  double sigma = 0.0;  // packet width used
  int terms = 2;       // P/Q truncation of the construction multipliers
};

struct BuildPairOptions {
  double sigma = 0.0;  // packet width; 0 selects 1/sqrt(k) (separation vs. leak tradeoff)
  int terms = 2;
};

// Partner construction f1 = -2 A0^{-1} F_side f2, with F_side realized per
// frequency cone: the F+ symbol on side*<xi, xi0> > 0 and the F- symbol on the
// mirrored cone, so both cones of a real packet land on the same image point.
Field2D partner_field(const Field2D& f2, Vec2 xi0, int side, int terms);

CancellationPair build_pair(const Grid2D& grid, const PhasePoint& center, int side,
                            const BuildPairOptions& opts = {});

// R* chi R with chi a radial C^2 cutoff in circle-center space around
// `window_center` (identically 1 inside r_inner, 0 outside r_outer): the
// localized normal operator of the circle family near C(window_center).
Field2D localized_normal(const Field2D& f, Vec2 window_center, double r_inner = 0.55,
                         double r_outer = 1.45);

struct CancellationRatios {
  double rho_N = 0.0;  // localized normal operator, max over the four probe phase points
  double rho_R = 0.0;  // single transform, max over the circle-center probes
};

struct RatioOptions {
  double window_sigma = 0.0;  // 0: twice the packet width
  double band = 0.3;
  bool negate_f1 = false;  // wrong-sign control
};

CancellationRatios cancellation_ratio(const CancellationPair& pair,
                                      const RatioOptions& opts = {});

struct SconResult {
  bool ok = false;
  geo::VecX witness;  // direction theta_1 when ok
};

// Condition (Scon): exists theta1 with xi1(theta1) = 0, kappa(p0, theta1) != 0,
// and xi1 not conormal to Sigma(q(p0, theta1)) at p0 (angular distance of the
// fold conormal from +-xi1 above 1e-3).
SconResult scon_probe(const geo::GeodesicModel& model, const geo::VecX& p0,
                      const geo::VecX& xi1, int v_candidates,
                      const geo::Weight& kappa = geo::unit_weight());

}  // namespace caustica
