#pragma once

#include <string>
#include <vector>

#include "caustica/grid.hpp"

namespace caustica {

// A point in phase space: position, unit frequency direction, center frequency.
struct PhasePoint {
  Vec2 x;
  Vec2 xi;     // unit
  double k = 0.0;  // > 0

  PhasePoint() = default;
  PhasePoint(Vec2 x_, Vec2 xi_, double k_);
};

// Gaussian-enveloped oscillation standing in for a conormal singularity at
// `center`: g(x) = exp(-|x-x0|^2/(2 sigma^2)) cos(k <xi, x-x0>).
struct WavepacketSpec {
  PhasePoint center;
  double width = 1.0;  // spatial std-dev sigma > 0

  WavepacketSpec() = default;
  WavepacketSpec(PhasePoint c, double sigma);
};

// Non-fatal advice (e.g. sigma*k < 4: packet barely oscillatory).
std::vector<std::string> wavepacket_warnings(const WavepacketSpec& spec);

// Builds the packet with periodic (minimum-image) displacements, normalized to
// unit L2 norm via the closed-form Gaussian integral
//   ||g||^2 = (pi sigma^2 / 2) (1 + exp(-sigma^2 k^2)).
// Throws "packet leaks across period" if the envelope at half the period
// exceeds 1e-8.
Field2D make_wavepacket(const WavepacketSpec& spec, const Grid2D& grid);

// L2 mass of (Gaussian window at probe.x, width sigma) * f restricted in
// frequency to the annular cone { xi : ||xi|-k| < band*k, angle(xi, probe.xi) < band }.
// `symmetric` admits the mirrored cone (-probe.xi) as well.
double windowed_energy(const Field2D& f, const PhasePoint& probe, double sigma, double band,
                       bool symmetric = false);

}  // namespace caustica
