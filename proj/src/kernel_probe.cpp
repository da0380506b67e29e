#include "caustica/kernel_probe.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "caustica/bessel.hpp"
#include "caustica/circular.hpp"
#include "caustica/fft.hpp"
#include "caustica/parallel.hpp"
#include "caustica/wavepacket.hpp"

namespace caustica {

using geo::MatX;
using geo::VecX;

namespace {

double smooth_step_down(double x, double inner, double outer) {
  const double ax = std::abs(x);
  if (ax <= inner) return 1.0;
  if (ax >= outer) return 0.0;
  const double s = (ax - inner) / (outer - inner);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Nearest point of Sigma(p) to q_probe via Gauss-Newton over the direction
// parameters; returns the foot point and the fold time there.
struct LocusFoot {
  VecX q;
  VecX theta;
  double t_star = 0.0;
};

std::optional<VecX> fold_point(const geo::GeodesicModel& model, const VecX& p, const VecX& theta,
                               double t_guess, const geo::EngineOptions& opts, double* t_out) {
  const VecX th = model.metric_normalize(p, theta);
  double lo = 0.80 * t_guess, hi = 1.20 * t_guess;
  if (!(geo::det_dexp(model, p, lo * th, opts) > 0.0 &&
        geo::det_dexp(model, p, hi * th, opts) < 0.0))
    return std::nullopt;
  while (hi - lo > opts.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    if (geo::det_dexp(model, p, mid * th, opts) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (t_out) *t_out = 0.5 * (lo + hi);
  return model.unit_flow(p, th, 0.5 * (lo + hi), false).x;
}

LocusFoot nearest_locus_point(const geo::GeodesicModel& model, const VecX& p, const VecX& theta0,
                              double t0, const VecX& q_probe, const geo::EngineOptions& opts) {
  const int n = model.dim();
  std::vector<VecX> params;
  if (n == 2) {
    const VecX th = model.metric_normalize(p, theta0);
    params.push_back((VecX(2) << -th[1], th[0]).finished());
  } else {
    Eigen::Vector3d t3{theta0[0], theta0[1], theta0[2]};
    t3.normalize();
    const Eigen::Vector3d a3 = t3.unitOrthogonal(), b3 = t3.cross(a3);
    params.push_back(VecX(a3));
    params.push_back(VecX(b3));
  }
  VecX s = VecX::Zero(n - 1);
  const double h = 1e-5;
  LocusFoot foot;
  for (int iter = 0; iter < 30; ++iter) {
    VecX th = model.metric_normalize(p, theta0);
    for (int j = 0; j < n - 1; ++j) th += s[j] * params[static_cast<std::size_t>(j)];
    double tstar = 0.0;
    const auto q = fold_point(model, p, th, t0, opts, &tstar);
    if (!q) throw std::runtime_error("stratum exited; reduce scale");
    foot.q = *q;
    foot.theta = model.metric_normalize(p, th);
    foot.t_star = tstar;

    MatX T(n, n - 1);
    for (int j = 0; j < n - 1; ++j) {
      VecX thp = th + h * params[static_cast<std::size_t>(j)];
      VecX thm = th - h * params[static_cast<std::size_t>(j)];
      const auto qp = fold_point(model, p, thp, tstar, opts, nullptr);
      const auto qm = fold_point(model, p, thm, tstar, opts, nullptr);
      if (!qp || !qm) throw std::runtime_error("stratum exited; reduce scale");
      T.col(j) = (*qp - *qm) / (2.0 * h);
    }
    const VecX r = q_probe - foot.q;
    const VecX step = (T.transpose() * T).ldlt().solve(T.transpose() * r);
    s += step;
    if (step.norm() < 1e-12) break;
  }
  return foot;
}

// Signed distance from q_probe to Sigma(p), positive on the range side. The
// geodesic is tangent to Sigma at the fold, so the inward probe needs a
// moderate backstep: the normal component of the displacement is O(delta^2).
double signed_distance(const geo::GeodesicModel& model, const VecX& p, const LocusFoot& foot,
                       const VecX& q_probe) {
  const VecX inward =
      model.unit_flow(p, foot.theta, foot.t_star - 0.3, false).x - foot.q;
  const double d = (q_probe - foot.q).norm();
  return (q_probe - foot.q).dot(inward) >= 0.0 ? d : -d;
}

// Windowed bump integral: K_w(q) = int int taper(psi) taper(t - t*) B_w(gamma - q),
// with B_w the normalized Gaussian of width w. 2D models: direction angle grid;
// magnetic-style 3D models: (azimuth, polar) grid with a vertical-slab skip.
double bump_integral_2d(const geo::GeodesicModel& model, const VecX& p, const VecX& theta0,
                        double t_star, const VecX& q, double w, const KernelSliceOptions& o) {
  const double base = std::atan2(theta0[1], theta0[0]);
  const double t_lo = t_star - o.t_outer, t_hi = t_star + o.t_outer;
  const double dt = 1.25 * w;  // trapezoid ripple for a width-w Gaussian: ~3e-6
  const int nt = static_cast<int>(std::ceil((t_hi - t_lo) / dt)) + 1;
  const double dpsi = 1.25 * w / t_hi;
  const int npsi = static_cast<int>(std::ceil(2.0 * o.theta_outer / dpsi)) + 1;
  const double qx = q[0], qy = q[1];
  const double inv2w2 = 1.0 / (2.0 * w * w);
  const double bump_norm = 1.0 / (2.0 * M_PI * w * w);
  const double cutoff2 = 36.0 * w * w;

  const double sum = deterministic_sum(
      static_cast<std::size_t>(npsi),
      [&](std::size_t ip) {
        const double psi = -o.theta_outer + (static_cast<double>(ip) + 0.5) *
                                                (2.0 * o.theta_outer / npsi);
        const double wpsi = smooth_step_down(psi, o.theta_inner, o.theta_outer);
        if (wpsi == 0.0) return 0.0;
        VecX u0(2);
        u0 << std::cos(base + psi), std::sin(base + psi);
        u0 = model.metric_normalize(p, u0);
        std::vector<double> buf(static_cast<std::size_t>(nt) * 2);
        model.sample_curve(p, u0, t_lo, dt, nt, buf.data());
        double acc = 0.0;
        for (int i = 0; i < nt; ++i) {
          const double dx = buf[2 * static_cast<std::size_t>(i)] - qx;
          const double dy = buf[2 * static_cast<std::size_t>(i) + 1] - qy;
          const double d2 = dx * dx + dy * dy;
          if (d2 > cutoff2) continue;
          const double wt = smooth_step_down(t_lo + i * dt - t_star, o.t_inner, o.t_outer);
          if (wt == 0.0) continue;
          acc += wpsi * wt * std::exp(-d2 * inv2w2);
        }
        return acc * bump_norm * dt * dpsi;
      },
      4);
  return sum;
}

double bump_integral_3d(const geo::GeodesicModel& model, const VecX& p, const VecX& theta0,
                        double t_star, const VecX& q, double w, const KernelSliceOptions& o) {
  // Direction parametrized as sqrt(1-z^2) (cos a, sin a), z) around theta0
  // (assumed near-equatorial); contributions require |gamma_3 - q_3| < 6w,
  // and gamma_3 = p_3 + t z restricts z to a thin slab.
  const double base = std::atan2(theta0[1], theta0[0]);
  const double t_lo = t_star - o.t_outer, t_hi = t_star + o.t_outer;
  const double dt = 1.25 * w;
  const int nt = static_cast<int>(std::ceil((t_hi - t_lo) / dt)) + 1;
  const double dpsi = 1.25 * w / t_hi;
  const int npsi = static_cast<int>(std::ceil(2.0 * o.theta_outer / dpsi)) + 1;

  // Contributions need |p3 + t z - q3| < 6w for some t in the window, which
  // confines the polar component to a thin slab.
  const double z0 = theta0[2] / theta0.norm();
  const double zspan = (std::abs(q[2] - p[2]) + 6.0 * w) / std::max(t_lo, 0.5);
  const double z_lo = std::max(-1.0, z0 - zspan), z_hi = std::min(1.0, z0 + zspan);
  const double dz = 1.25 * w / t_hi;
  const int nz = static_cast<int>(std::ceil((z_hi - z_lo) / dz)) + 1;

  const double inv2w2 = 1.0 / (2.0 * w * w);
  const double bump_norm = 1.0 / std::pow(2.0 * M_PI * w * w, 1.5);
  const double cutoff2 = 36.0 * w * w;
  const double qx = q[0], qy = q[1], qz = q[2];

  const double sum = deterministic_sum(
      static_cast<std::size_t>(npsi),
      [&](std::size_t ip) {
        const double psi = -o.theta_outer + (static_cast<double>(ip) + 0.5) *
                                                (2.0 * o.theta_outer / npsi);
        double acc = 0.0;
        std::vector<double> buf(static_cast<std::size_t>(nt) * 3);
        for (int iz = 0; iz < nz; ++iz) {
          const double z = z_lo + (iz + 0.5) * (z_hi - z_lo) / nz;
          if (std::abs(z) >= 1.0) continue;
          const double r = std::sqrt(1.0 - z * z);
          VecX u0(3);
          u0 << r * std::cos(base + psi), r * std::sin(base + psi), z;
          // Angular distance to theta0 enters the taper.
          const double cosang =
              std::min(1.0, u0.dot(theta0) / theta0.norm());
          const double ang = std::acos(cosang);
          const double wdir = smooth_step_down(ang, o.theta_inner, o.theta_outer);
          if (wdir == 0.0) continue;
          model.sample_curve(p, u0, t_lo, dt, nt, buf.data());
          for (int i = 0; i < nt; ++i) {
            const double dzq = buf[3 * static_cast<std::size_t>(i) + 2] - qz;
            if (std::abs(dzq) > 6.0 * w) continue;
            const double dx = buf[3 * static_cast<std::size_t>(i)] - qx;
            const double dy = buf[3 * static_cast<std::size_t>(i) + 1] - qy;
            const double d2 = dx * dx + dy * dy + dzq * dzq;
            if (d2 > cutoff2) continue;
            const double wt = smooth_step_down(t_lo + i * dt - t_star, o.t_inner, o.t_outer);
            if (wt == 0.0) continue;
            acc += wdir * wt * std::exp(-d2 * inv2w2);
          }
        }
        return acc * bump_norm * dt * dpsi * ((z_hi - z_lo) / nz);
      },
      1);
  return sum;
}

double bump_integral(const geo::GeodesicModel& model, const VecX& p, const VecX& theta0,
                     double t_star, const VecX& q, double w, const KernelSliceOptions& o) {
  if (model.dim() == 2) return bump_integral_2d(model, p, theta0, t_star, q, w, o);
  return bump_integral_3d(model, p, theta0, t_star, q, w, o);
}

}  // namespace

KernelSlice kernel_slice(const geo::GeodesicModel& model, const geo::VecX& p,
                         const geo::VecX& theta0, const KernelSliceOptions& opts) {
  const geo::EngineOptions eopts;
  const auto rec = geo::find_conjugate(model, p, theta0, 8.0, eopts);
  if (!rec || rec->classification != geo::CausticClass::Fold)
    throw std::runtime_error("not a simple fold point");

  KernelSlice slice;
  slice.p = p;
  slice.theta0 = model.metric_normalize(p, theta0);
  slice.fold = geo::sing_fit_inputs(model, p, rec->v, geo::unit_weight(), geo::unit_weight(),
                                    eopts);

  KernelSliceOptions o = opts;
  if (o.t_inner <= 0.0 || o.theta_inner <= 0.0) {
    // The fold branch pair sits at parameter distance ~ sqrt(2 D z'/A) from
    // (theta0, t*); keep it inside the flat part of the tapers.
    const double vdev = std::sqrt(2.0 * slice.fold.D * o.z_hi / slice.fold.A);
    o.t_inner = 1.25 * vdev;
    o.t_outer = 1.3 * o.t_inner + 0.05;
    o.theta_inner = 0.65 * vdev;
    o.theta_outer = 1.3 * o.theta_inner + 0.03;
  }

  const VecX q0 = rec->q;
  const auto cs = geo::conormal_bundle(model, p, rec->v, eopts);
  const VecX nhat = cs.eta / cs.eta.norm();
  // Orient the normal towards the range side; the backstepped geodesic point
  // sits inside by O(delta^2).
  const VecX inside = model.unit_flow(p, slice.theta0, rec->t_star - 0.3, false).x - q0;
  const VecX inward = (inside.dot(nhat) >= 0.0 ? 1.0 : -1.0) * nhat;

  VecX dir;
  if (opts.path_dir.size() == model.dim()) {
    dir = opts.path_dir / opts.path_dir.norm();
  } else {
    dir = inward;
  }

  // Transversality of the path against the conormal at the crossing.
  const double cosn = std::abs(dir.dot(nhat));
  if (cosn < 0.01) throw std::runtime_error("transversality violated");
  if (dir.dot(inward) < 0.0) dir = -dir;  // march into the range side

  const double w0 = o.bump_width > 0.0 ? o.bump_width : o.z_lo / 4.0;

  std::vector<double> targets;
  for (int i = 0; i < o.samples; ++i) {
    const double f = static_cast<double>(i) / (o.samples - 1);
    targets.push_back(o.z_lo * std::pow(o.z_hi / o.z_lo, f));
  }

  if (o.two_sided) {
    std::vector<double> mirrored;
    for (double zt : targets) {
      mirrored.push_back(-zt);
      mirrored.push_back(zt);
    }
    targets = std::move(mirrored);
  }

  for (double zt : targets) {
    const VecX q = q0 + (zt / cosn) * dir;
    const LocusFoot foot = nearest_locus_point(model, p, slice.theta0, rec->t_star, q, eopts);
    KernelSamplePoint pt;
    pt.q = q;
    pt.z_prime = signed_distance(model, p, foot, q);
    const double k2 = bump_integral(model, p, slice.theta0, rec->t_star, q, 2.0 * w0, o);
    const double k1 = bump_integral(model, p, slice.theta0, rec->t_star, q, w0, o);
    const double kh = bump_integral(model, p, slice.theta0, rec->t_star, q, 0.5 * w0, o);
    const double rich_fine = (4.0 * kh - k1) / 3.0;
    const double rich_coarse = (4.0 * k1 - k2) / 3.0;
    pt.kernel = rich_fine;
    pt.convergence = std::abs(rich_fine - rich_coarse) / std::max(1e-300, std::abs(rich_fine));
    slice.points.push_back(std::move(pt));
  }
  return slice;
}

SingularityFit fit_sqrt_singularity(const KernelSlice& slice, double window_lo,
                                    double window_hi) {
  std::vector<double> lx, ly;
  for (const auto& pt : slice.points) {
    if (pt.z_prime >= window_lo && pt.z_prime <= window_hi && pt.kernel > 0.0) {
      lx.push_back(std::log(pt.z_prime));
      ly.push_back(std::log(pt.kernel));
    }
  }
  if (lx.empty()) throw std::runtime_error("fit window outside sampled range");
  if (lx.size() < 12) throw std::invalid_argument("fit requires at least 12 sample radii");

  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  SingularityFit fit;
  fit.exponent = slope;
  fit.coeff = std::exp(intercept);
  fit.predicted = slice.fold.predicted_coefficient;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

DiagonalCheckResult diagonal_symbol_check(const Grid2D& grid, Vec2 p,
                                          const std::vector<Vec2>& xi_samples,
                                          const DiagonalCheckOptions& opts) {
  if (!(opts.t_taper_off < M_PI))
    throw std::invalid_argument("conjugate point inside the truncated t-range");

  // Radial multiplier of the time-truncated transform: the angular reduction
  // gives m(z) = 2 * 2*pi * int_0^T w(t) J0(2 z sin(t/2)) dt (both time signs).
  const int nt = 4096;
  const double dt = opts.t_taper_off / nt;
  const int ntab = 8192;
  const double zmax = grid.nyquist() * std::sqrt(2.0) + 1.0;
  std::vector<double> table(static_cast<std::size_t>(ntab) + 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int iz = 0; iz <= ntab; ++iz) {
    const double z = zmax * iz / ntab;
    double acc = 0.0;
    for (int i = 0; i < nt; ++i) {
      const double t = (i + 0.5) * dt;
      const double wt = smooth_step_down(t, opts.t_taper_on, opts.t_taper_off);
      if (wt == 0.0) continue;
      acc += wt * bessel_j0(2.0 * z * std::sin(0.5 * t));
    }
    table[static_cast<std::size_t>(iz)] = 4.0 * M_PI * acc * dt;
  }
  const auto m_trunc = [&](double z) {
    const double x = z / zmax * ntab;
    const int i = std::min(ntab - 1, static_cast<int>(x));
    const double f = x - i;
    return (1.0 - f) * table[static_cast<std::size_t>(i)] +
           f * table[static_cast<std::size_t>(i) + 1];
  };
  const RadialMultiplier trunc{[&](double z) { return cplx{m_trunc(z), 0.0}; }, 0, "N_trunc"};

  DiagonalCheckResult res;
  for (const Vec2& xi : xi_samples) {
    for (double k : opts.ks) {
      const PhasePoint c{p, xi, k};
      const Field2D f = make_wavepacket(WavepacketSpec(c, opts.packet_sigma), grid);
      const Field2D nf = apply_multiplier(f, trunc);
      const double observed = l2_norm(nf) / l2_norm(f);
      res.max_rel_error =
          std::max(res.max_rel_error, std::abs(observed * k / (4.0 * M_PI) - 1.0));
    }
  }

  // Vanishing-weight control: kappa_sharp = kappa = (theta . xi0)^2 kills the
  // principal symbol at the two roots theta = +-xi-perp. The weighted
  // multiplier follows from the angular reduction: with gamma(theta, t) =
  // 2 sin(t/2) R_{-t/2} theta and the weight product a trigonometric
  // polynomial of degree 4, the theta-integral collapses to J0, J2, J4 terms.
  {
    const Vec2 xi = normalized(xi_samples.back());
    const double k = opts.ks.back();
    const PhasePoint c{p, xi, k};
    const Field2D f = make_wavepacket(WavepacketSpec(c, opts.packet_sigma), grid);
    const double phi0 = std::atan2(xi.y, xi.x);

    const int nts = 1024;
    const double dts = 2.0 * opts.t_taper_off / nts;
    Field2D F = fft2(f);
    const int n = grid.n;
    const double spread = 6.0 / opts.packet_sigma;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int iy = 0; iy < n; ++iy) {
      const double ey = grid.freq(iy);
      for (int ix = 0; ix < n; ++ix) {
        const double ex = grid.freq(ix);
        const double mag = std::hypot(ex, ey);
        const double near_plus = std::hypot(ex - k * xi.x, ey - k * xi.y);
        const double near_minus = std::hypot(ex + k * xi.x, ey + k * xi.y);
        if (std::min(near_plus, near_minus) > spread || mag == 0.0) {
          F.at(ix, iy) = 0.0;
          continue;
        }
        const double phi = std::atan2(ey, ex);
        double acc = 0.0;
        for (int s = 0; s < nts; ++s) {
          const double t = -opts.t_taper_off + (s + 0.5) * dts;
          const double wt = smooth_step_down(t, opts.t_taper_on, opts.t_taper_off);
          if (wt == 0.0) continue;
          const double zr = std::abs(2.0 * mag * std::sin(0.5 * t));
          const double j0 = bessel_j0(zr);
          const double j2 = std::cyl_bessel_j(2.0, zr);
          const double j4 = std::cyl_bessel_j(4.0, zr);
          const double c0 = 0.25 * (1.0 + 0.5 * std::cos(2.0 * t));
          // c2 = (1/8) e^{-2i phi0} (1 + e^{-2it}); pair term -J2 2Re(c2 e^{i(t+2phi)})
          const double re_c2 =
              0.25 * (std::cos(t + 2.0 * (phi - phi0)) + std::cos(-t + 2.0 * (phi - phi0)));
          // c4 = (1/16) e^{-4i phi0} e^{-2it}; pair term +J4 2Re(c4 e^{i(2t+4phi)})
          const double re_c4 = 0.125 * std::cos(4.0 * (phi - phi0));
          acc += wt * (c0 * j0 - re_c2 * j2 + re_c4 * j4);
        }
        F.at(ix, iy) *= 2.0 * M_PI * acc * dts;
      }
    }
    const Field2D nfw = ifft2(F);
    const Field2D nf_unit = apply_multiplier(f, trunc);
    res.vanishing_weight_ratio = l2_norm(nfw) / l2_norm(nf_unit);
  }
  return res;
}

}  // namespace caustica
