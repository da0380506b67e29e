#include "caustica/cancellation.hpp"

#include <cmath>
#include <stdexcept>

#include "caustica/fft.hpp"

namespace caustica {

Field2D partner_field(const Field2D& f2, Vec2 xi0, int side, int terms) {
  if (side != 1 && side != -1) throw std::invalid_argument("side must be +1 or -1");
  if (terms < 1) throw std::invalid_argument("terms must be at least 1");
  const Vec2 dir = normalized(xi0);
  const RadialMultiplier a0 = a0_multiplier(terms);
  const RadialMultiplier fp = fio_multiplier(+1, terms);
  const RadialMultiplier fm = fio_multiplier(-1, terms);

  const Grid2D& grid = f2.grid;
  Field2D F = fft2(f2);
  const int n = grid.n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    const double ey = grid.freq(iy);
    for (int ix = 0; ix < n; ++ix) {
      const double ex = grid.freq(ix);
      const double z = std::hypot(ex, ey);
      const double cone = side * (ex * dir.x + ey * dir.y);
      const RadialMultiplier& m = cone > 0.0 ? fp : fm;
      cplx v = m.symbol(z);
      const double a = m.phase_shift * z;
      v *= cplx{std::cos(a), std::sin(a)};
      double a0v = a0.symbol(z).real();
      if (std::abs(a0v) < 1e-6) a0v = a0v < 0.0 ? -1e-6 : 1e-6;  // reciprocal clamp
      F.at(ix, iy) *= -2.0 * v / a0v;
    }
  }
  Field2D f1 = ifft2(F);
  if (f2.is_real(0.0)) {
    // The cone-split symbol satisfies m(-xi) = conj(m(xi)); drop rounding dust.
    for (auto& z : f1.values) z = cplx{z.real(), 0.0};
  }
  return f1;
}

CancellationPair build_pair(const Grid2D& grid, const PhasePoint& center, int side,
                            const BuildPairOptions& opts) {
  if (!(center.k < grid.nyquist() / 2.0))
    throw std::invalid_argument("packet frequency must stay below half Nyquist");
  const double sigma = opts.sigma > 0.0 ? opts.sigma : 1.0 / std::sqrt(center.k);

  // The chain x0 -> x0 + 2*side*xi must stay separated on the torus.
  const Vec2 image = center.x + center.xi * (2.0 * side);
  if (grid.min_image(image - center.x).norm() < 2.0 - 1e-9)
    throw std::invalid_argument("image point leaks");

  CancellationPair pair;
  pair.center = center;
  pair.side = side;
  pair.sigma = sigma;
  pair.terms = opts.terms;
  pair.f2 = make_wavepacket(WavepacketSpec(center, sigma), grid);
  pair.f1 = partner_field(pair.f2, center.xi, side, opts.terms);
  return pair;
}

Field2D localized_normal(const Field2D& f, Vec2 window_center, double r_inner, double r_outer) {
  if (!(r_inner > 0.0 && r_outer > r_inner))
    throw std::invalid_argument("window radii must satisfy 0 < r_inner < r_outer");
  Field2D rf = circular_transform_multiplier(f);
  const Grid2D& grid = f.grid;
  const int n = grid.n;
  const double h = grid.h();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Vec2 d = grid.min_image(Vec2{ix * h, iy * h} - window_center);
      const double r = d.norm();
      double chi;
      if (r <= r_inner) {
        chi = 1.0;
      } else if (r >= r_outer) {
        chi = 0.0;
      } else {
        const double s = (r - r_inner) / (r_outer - r_inner);
        chi = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);  // C^2 step
      }
      rf.at(ix, iy) *= chi;
    }
  }
  return circular_transform_multiplier(rf);
}

CancellationRatios cancellation_ratio(const CancellationPair& pair, const RatioOptions& opts) {
  const double k = pair.center.k;
  const double wsig = opts.window_sigma > 0.0 ? opts.window_sigma : 2.0 * pair.sigma;
  const Vec2 xi = pair.center.xi;
  const Vec2 x0 = pair.center.x;
  const Vec2 ximg = x0 + xi * (2.0 * pair.side);
  const Vec2 c0 = x0 + xi * (1.0 * pair.side);  // circle-center image

  const Field2D f1 = opts.negate_f1 ? pair.f1 * (-1.0) : pair.f1;
  const Field2D sum = f1 + pair.f2;

  const Field2D n_sum = localized_normal(sum, c0);
  const Field2D n_f2 = localized_normal(pair.f2, c0);

  CancellationRatios out;
  const Vec2 minus_xi{-xi.x, -xi.y};
  const PhasePoint probes[4] = {{x0, xi, k}, {x0, minus_xi, k}, {ximg, xi, k}, {ximg, minus_xi, k}};
  for (const PhasePoint& probe : probes) {
    const double den = windowed_energy(n_f2, probe, wsig, opts.band);
    if (den < 1e-30) throw std::runtime_error("reference energy vanished");
    out.rho_N = std::max(out.rho_N, windowed_energy(n_sum, probe, wsig, opts.band) / den);
  }

  const Field2D r_sum = circular_transform_multiplier(sum);
  const Field2D r_f2 = circular_transform_multiplier(pair.f2);
  const PhasePoint rprobes[2] = {{c0, xi, k}, {c0, minus_xi, k}};
  for (const PhasePoint& probe : rprobes) {
    const double den = windowed_energy(r_f2, probe, wsig, opts.band);
    if (den < 1e-30) throw std::runtime_error("reference energy vanished");
    out.rho_R = std::max(out.rho_R, windowed_energy(r_sum, probe, wsig, opts.band) / den);
  }
  return out;
}

SconResult scon_probe(const geo::GeodesicModel& model, const geo::VecX& p0, const geo::VecX& xi1,
                      int v_candidates, const geo::Weight& kappa) {
  using geo::VecX;
  const int n = model.dim();
  if (xi1.size() != n) throw std::invalid_argument("covector dimension mismatch");
  if (v_candidates < 1) throw std::invalid_argument("need at least one candidate");

  // Basis of the plane {theta : xi1(theta) = 0}.
  Eigen::JacobiSVD<geo::MatX> svd(geo::MatX(xi1.transpose()), Eigen::ComputeFullV);
  std::vector<VecX> basis;
  for (int i = 1; i < n; ++i) basis.push_back(svd.matrixV().col(i));

  const geo::EngineOptions opts;
  bool any_caustic = false;
  SconResult res;
  for (int i = 0; i < v_candidates; ++i) {
    VecX theta;
    if (n == 2) {
      theta = (i % 2 == 0) ? basis[0] : VecX(-basis[0]);
    } else {
      const double ang = 2.0 * M_PI * i / v_candidates;
      theta = std::cos(ang) * basis[0] + std::sin(ang) * basis[1];
    }
    if (theta.norm() < 1e-12) continue;
    if (std::abs(kappa(p0, theta / theta.norm())) < 1e-12) continue;

    std::optional<geo::ConjugateRecord> rec;
    try {
      rec = geo::find_conjugate(model, p0, theta, 8.0, opts);
    } catch (const std::exception&) {
      continue;
    }
    if (!rec || rec->classification != geo::CausticClass::Fold) continue;
    any_caustic = true;

    const auto cs = geo::conormal_bundle(model, p0, rec->v, opts);
    const double c = std::abs(cs.xi.dot(xi1)) / (cs.xi.norm() * xi1.norm());
    const double angle = std::acos(std::min(1.0, c));
    if (angle > 1e-3) {
      res.ok = true;
      res.witness = model.metric_normalize(p0, theta);
      return res;
    }
  }
  if (!any_caustic) throw std::runtime_error("no caustic in range");
  return res;  // all sampled conormals stayed aligned with xi1
}

}  // namespace caustica
