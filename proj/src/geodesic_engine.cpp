#include "caustica/geodesic/engine.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace caustica::geo {

namespace {

// State layout for the variational system: [x, u, dx_1, du_1, ..., dx_n, du_n]
// with one (dx, du) block per chart basis direction of the initial velocity.
VecX variational_rhs(const GeodesicModel& model, bool reverse, const VecX& s, int n, int cols) {
  VecX d(s.size());
  const VecX x = s.segment(0, n), u = s.segment(n, n);
  d.segment(0, n) = u;
  d.segment(n, n) = model.acceleration(x, u, reverse);
  MatX da_dx, da_du;
  model.acceleration_jacobian(x, u, reverse, da_dx, da_du);
  for (int c = 0; c < cols; ++c) {
    const int off = 2 * n + 2 * n * c;
    const VecX dx = s.segment(off, n), du = s.segment(off + n, n);
    d.segment(off, n) = du;
    d.segment(off + n, n) = da_dx * dx + da_du * du;
  }
  return d;
}

struct VariationalRun {
  VecX x, u;          // endpoint state
  std::vector<VecX> dx, du;  // per-column endpoint variations
};

VariationalRun run_variational(const GeodesicModel& model, const VecX& p, const VecX& u0,
                               const std::vector<VecX>& du0, double tau, bool reverse) {
  const int n = model.dim();
  const int cols = static_cast<int>(du0.size());
  VecX y(2 * n + 2 * n * cols);
  y.segment(0, n) = p;
  y.segment(n, n) = u0;
  for (int c = 0; c < cols; ++c) {
    const int off = 2 * n + 2 * n * c;
    y.segment(off, n).setZero();
    y.segment(off + n, n) = du0[static_cast<std::size_t>(c)];
  }
  const auto rhs = [&](double, const VecX& s) { return variational_rhs(model, reverse, s, n, cols); };
  const VecX yf = integrate_rk45(rhs, y, 0.0, tau, {});
  VariationalRun out;
  out.x = yf.segment(0, n);
  out.u = yf.segment(n, n);
  for (int c = 0; c < cols; ++c) {
    const int off = 2 * n + 2 * n * c;
    out.dx.push_back(yf.segment(off, n));
    out.du.push_back(yf.segment(off + n, n));
  }
  return out;
}

double sphere_angle(const VecX& a, const VecX& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::min(1.0, std::max(-1.0, c)));
}

}  // namespace

MatX dexp_ode(const GeodesicModel& model, const VecX& p, const VecX& v, bool reverse) {
  const int n = model.dim();
  const double tau = model.metric_norm(p, v);
  const VecX vhat = v / tau;
  const MatX g = model.metric(p);

  std::vector<VecX> du0;
  for (int j = 0; j < n; ++j) du0.push_back(VecX::Unit(n, j));
  const VariationalRun run = run_variational(model, p, vhat, du0, tau, reverse);

  // d exp . a = <vhat, a>_g gamma_dot(tau) + dx[a_perp / tau], assembled from
  // the chart basis columns by linearity.
  VecX dx_vhat = VecX::Zero(n);
  for (int j = 0; j < n; ++j) dx_vhat += vhat[j] * run.dx[static_cast<std::size_t>(j)];
  MatX J(n, n);
  for (int j = 0; j < n; ++j) {
    const double radial = vhat.dot(g * VecX::Unit(n, j));
    const VecX col = radial * run.u + (run.dx[static_cast<std::size_t>(j)] - radial * dx_vhat) / tau;
    J.col(j) = col;
  }
  return J;
}

JacobiValue jacobi_field(const GeodesicModel& model, const VecX& p, const VecX& v,
                         const VecX& alpha, double t, bool reverse) {
  const int n = model.dim();
  const double tau = model.metric_norm(p, v);
  const VecX vhat = v / tau;
  const MatX g = model.metric(p);
  const double radial = vhat.dot(g * alpha);
  const VecX aperp = alpha - radial * vhat;

  const VariationalRun run = run_variational(model, p, vhat, {aperp / tau}, t * tau, reverse);
  JacobiValue out;
  out.J = t * radial * run.u + run.dx[0];
  out.Jdot = radial * run.u +
             t * tau * radial * model.acceleration(run.x, run.u, reverse) + tau * run.du[0];
  return out;
}

static double metric_det(const GeodesicModel& model, const VecX& x) {
  return model.metric(x).determinant();
}

ExpMapResult exp_map(const GeodesicModel& model, const VecX& p, const VecX& v,
                     const EngineOptions& opts) {
  const double tau = model.metric_norm(p, v);
  if (!(tau > 0.0)) throw std::invalid_argument("exp_map requires a nonzero vector");
  const VecX vhat = v / tau;
  const FlowState end = model.unit_flow(p, vhat, tau, opts.reverse);
  ExpMapResult r;
  r.q = end.x;
  r.w = -tau * end.u;
  r.dexp = (opts.prefer_closed_form && model.has_closed_form_dexp())
               ? model.closed_form_dexp(p, v, opts.reverse)
               : dexp_ode(model, p, v, opts.reverse);
  r.det = std::sqrt(metric_det(model, r.q) / metric_det(model, p)) * r.dexp.determinant();
  return r;
}

double det_dexp(const GeodesicModel& model, const VecX& p, const VecX& v,
                const EngineOptions& opts) {
  const MatX J = (opts.prefer_closed_form && model.has_closed_form_dexp())
                     ? model.closed_form_dexp(p, v, opts.reverse)
                     : dexp_ode(model, p, v, opts.reverse);
  const FlowState end =
      model.unit_flow(p, v / model.metric_norm(p, v), model.metric_norm(p, v), opts.reverse);
  return std::sqrt(metric_det(model, end.x) / metric_det(model, p)) * J.determinant();
}

std::string to_string(CausticClass c) {
  switch (c) {
    case CausticClass::Fold: return "Fold";
    case CausticClass::Blowdown1: return "Blowdown1";
    case CausticClass::BlowdownK: return "BlowdownK";
    default: return "Unresolved";
  }
}

namespace {

// v-gradient of det d exp by Richardson-extrapolated central differences.
VecX grad_det_dexp(const GeodesicModel& model, const VecX& p, const VecX& v,
                   const EngineOptions& opts) {
  const int n = model.dim();
  const double h = opts.fd_step * std::max(1.0, v.norm());
  VecX grad(n);
  for (int j = 0; j < n; ++j) {
    const VecX e = VecX::Unit(n, j);
    const auto diff = [&](double step) {
      return (det_dexp(model, p, v + step * e, opts) - det_dexp(model, p, v - step * e, opts)) /
             (2.0 * step);
    };
    grad[j] = (4.0 * diff(h / 2) - diff(h)) / 3.0;
  }
  return grad;
}

// Fills kernel data, gradient and transversality for a located conjugate vector.
void resolve_record(const GeodesicModel& model, ConjugateRecord& rec, const EngineOptions& opts) {
  const int n = model.dim();
  const ExpMapResult em = exp_map(model, rec.p, rec.v, opts);
  rec.q = em.q;
  rec.w = em.w;

  Eigen::JacobiSVD<MatX> svd(em.dexp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VecX sv = svd.singularValues();
  const double smax = sv[0];
  int kdim = 0;
  for (int i = 0; i < n; ++i)
    if (sv[i] < opts.kernel_svd_rel * smax) ++kdim;
  rec.kernel_dim = kdim;
  rec.kernel_dir = svd.matrixV().col(n - 1);

  rec.grad_det = grad_det_dexp(model, rec.p, rec.v, opts);
  // Orientation: derivative of det along the kernel direction is positive.
  if (rec.grad_det.dot(rec.kernel_dir) < 0.0) rec.kernel_dir = -rec.kernel_dir;
  rec.ddet = std::abs(rec.grad_det.dot(rec.kernel_dir));

  const double gnorm = rec.grad_det.norm();
  if (gnorm > 1e-12) {
    const double s = std::abs(rec.grad_det.dot(rec.kernel_dir)) / (gnorm * rec.kernel_dir.norm());
    rec.transversality = std::asin(std::min(1.0, s));
  } else {
    rec.transversality = 0.0;
  }
}

std::optional<ConjugateRecord> locate_conjugate(const GeodesicModel& model, const VecX& p,
                                                const VecX& theta_in, double t_max,
                                                const EngineOptions& opts) {
  const VecX theta = model.metric_normalize(p, theta_in);
  const int steps = 240;
  const double dt = t_max / steps;
  double t_prev = dt, d_prev = det_dexp(model, p, t_prev * theta, opts);
  double min_abs = std::abs(d_prev), min_t = t_prev;
  double lo = 0.0, hi = 0.0;
  for (int i = 2; i <= steps; ++i) {
    const double t = i * dt;
    const double d = det_dexp(model, p, t * theta, opts);
    if (std::abs(d) < min_abs) {
      min_abs = std::abs(d);
      min_t = t;
    }
    if (d_prev > 0.0 && d <= 0.0) {
      lo = t_prev;
      hi = t;
      break;
    }
    t_prev = t;
    d_prev = d;
  }

  ConjugateRecord rec;
  rec.p = p;
  if (hi == 0.0) {
    if (min_abs < 1e-6) {  // grazing zero without a crossing
      rec.v = min_t * theta;
      rec.t_star = min_t;
      resolve_record(model, rec, opts);
      rec.classification = CausticClass::Unresolved;
      return rec;
    }
    return std::nullopt;
  }

  double flo = det_dexp(model, p, lo * theta, opts);
  while (hi - lo > opts.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = det_dexp(model, p, mid * theta, opts);
    if ((flo > 0.0) == (fm > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  rec.t_star = 0.5 * (lo + hi);
  rec.v = rec.t_star * theta;
  rec.sign_change = true;
  resolve_record(model, rec, opts);
  return rec;
}

// q(theta) with t* tracked by bisection near a known conjugate time; returns
// only the conjugate point (used for tangent-plane estimation).
std::optional<VecX> locate_q(const GeodesicModel& model, const VecX& p, const VecX& theta,
                             double t_guess, const EngineOptions& opts) {
  const VecX th = model.metric_normalize(p, theta);
  double lo = 0.80 * t_guess, hi = 1.20 * t_guess;
  const double flo = det_dexp(model, p, lo * th, opts);
  const double fhi = det_dexp(model, p, hi * th, opts);
  if (!(flo > 0.0 && fhi < 0.0)) return std::nullopt;
  while (hi - lo > opts.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    if (det_dexp(model, p, mid * th, opts) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  return model.unit_flow(p, th, t, opts.reverse).x;
}

}  // namespace

std::optional<ConjugateRecord> find_conjugate(const GeodesicModel& model, const VecX& p,
                                              const VecX& theta, double t_max,
                                              const EngineOptions& opts) {
  auto rec = locate_conjugate(model, p, theta, t_max, opts);
  if (rec && rec->sign_change) rec->classification = classify_caustic(model, *rec, opts);
  return rec;
}

CausticClass classify_caustic(const GeodesicModel& model, const ConjugateRecord& rec,
                              const EngineOptions& opts) {
  if (rec.kernel_dim < 1) return CausticClass::Unresolved;
  if (rec.kernel_dim >= 2) return CausticClass::BlowdownK;
  if (rec.grad_det.norm() < 1e-10) return CausticClass::Unresolved;  // S(p) not resolvable

  if (rec.transversality > opts.tangency_tol) {
    return rec.ddet > opts.ddet_tol ? CausticClass::Fold : CausticClass::Unresolved;
  }

  // Tangency at the sampled vector: blowdown of order 1 requires the kernel to
  // stay tangent at nearby regular conjugate vectors.
  const int n = model.dim();
  const VecX theta = rec.v / rec.v.norm();
  std::vector<VecX> probes;
  if (n == 2) {
    const VecX perp = (VecX(2) << -theta[1], theta[0]).finished();
    for (int s : {-4, -3, -2, -1, 1, 2, 3, 4})
      probes.push_back(theta + 0.02 * s * perp);
  } else {
    Eigen::Vector3d t3{theta[0], theta[1], theta[2]};
    Eigen::Vector3d a3 = t3.unitOrthogonal(), b3 = t3.cross(a3);
    for (int k = 0; k < 8; ++k) {
      const double ang = 2.0 * M_PI * k / 8.0;
      Eigen::Vector3d dir = t3 + 0.02 * (std::cos(ang) * a3 + std::sin(ang) * b3);
      probes.push_back(VecX(dir));
    }
  }
  for (const VecX& dir : probes) {
    const auto nb = locate_conjugate(model, rec.p, dir, 1.5 * rec.t_star, opts);
    if (!nb) return CausticClass::Unresolved;
    if (nb->kernel_dim != 1 || nb->transversality > opts.tangency_tol)
      return CausticClass::Unresolved;
  }
  return CausticClass::Blowdown1;
}

LocusResult conjugate_locus(const GeodesicModel& model, const VecX& p, const VecX& patch_center,
                            double patch_radius, int samples, double t_max,
                            const EngineOptions& opts) {
  const int n = model.dim();
  const VecX center = model.metric_normalize(p, patch_center);
  LocusResult out;

  std::vector<VecX> dirs;
  if (n == 2) {
    const double base = std::atan2(center[1], center[0]);
    for (int i = 0; i < samples; ++i) {
      const double a = base - patch_radius + 2.0 * patch_radius * (i + 0.5) / samples;
      dirs.push_back((VecX(2) << std::cos(a), std::sin(a)).finished());
    }
  } else {
    // Fibonacci spiral in the spherical cap around the center direction.
    Eigen::Vector3d c3{center[0], center[1], center[2]};
    c3.normalize();
    const Eigen::Vector3d a3 = c3.unitOrthogonal(), b3 = c3.cross(a3);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double cap = std::cos(patch_radius);
    for (int i = 0; i < samples; ++i) {
      const double z = 1.0 - (1.0 - cap) * (i + 0.5) / samples;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ang = golden * i;
      const Eigen::Vector3d d = z * c3 + r * (std::cos(ang) * a3 + std::sin(ang) * b3);
      dirs.push_back(VecX(d));
    }
  }

  for (const VecX& dir : dirs) {
    const auto rec = find_conjugate(model, p, dir, t_max, opts);
    if (!rec) continue;
    LocusSample s;
    s.theta = model.metric_normalize(p, dir);
    s.v = rec->v;
    s.q = rec->q;
    s.w = rec->w;
    s.t_star = rec->t_star;
    s.classification = rec->classification;
    s.kernel_dim = rec->kernel_dim;
    if (rec->classification != CausticClass::Fold) out.non_fold_warning = true;

    // Tangent plane of Sigma(p) at q from the direction parametrization
    // q(theta); the geodesic velocity at q must lie in it.
    std::vector<VecX> tangents;
    const double h = 5e-4;
    std::vector<VecX> params;
    if (n == 2) {
      params.push_back((VecX(2) << -s.theta[1], s.theta[0]).finished());
    } else {
      Eigen::Vector3d t3{s.theta[0], s.theta[1], s.theta[2]};
      t3.normalize();
      const Eigen::Vector3d a3 = t3.unitOrthogonal(), b3 = t3.cross(a3);
      params.push_back(VecX(a3));
      params.push_back(VecX(b3));
    }
    bool ok = true;
    for (const VecX& b : params) {
      const auto plus = locate_q(model, p, s.theta + h * b, rec->t_star, opts);
      const auto minus = locate_q(model, p, s.theta - h * b, rec->t_star, opts);
      if (!plus || !minus) {
        ok = false;
        break;
      }
      tangents.push_back((*plus - *minus) / (2.0 * h));
    }
    if (ok) {
      // Angle between w and span(tangents).
      MatX T(n, static_cast<int>(tangents.size()));
      for (int c = 0; c < T.cols(); ++c) T.col(c) = tangents[static_cast<std::size_t>(c)];
      const VecX wq = s.w / s.w.norm();
      const VecX proj = T * (T.transpose() * T).ldlt().solve(T.transpose() * wq);
      s.tangency_angle = std::asin(std::min(1.0, (wq - proj).norm()));
    } else {
      s.tangency_angle = std::nan("");
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

ConormalSample conormal_bundle(const GeodesicModel& model, const VecX& p, const VecX& v,
                               const EngineOptions& opts) {
  const int n = model.dim();
  ConjugateRecord rec;
  rec.p = p;
  rec.v = v;
  rec.t_star = model.metric_norm(p, v);
  resolve_record(model, rec, opts);
  if (rec.kernel_dim != 1 || classify_caustic(model, rec, opts) != CausticClass::Fold)
    throw std::runtime_error("not a simple fold point");

  const ExpMapResult em = exp_map(model, p, v, opts);
  Eigen::JacobiSVD<MatX> svd(em.dexp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  VecX eta = svd.matrixU().col(n - 1);  // left null covector of d_v exp
  // Deterministic sign: largest-magnitude component positive.
  int imax = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(eta[i]) > std::abs(eta[imax])) imax = i;
  if (eta[imax] < 0.0) eta = -eta;

  // xi_j = eta_i d exp^i / d p^j with v held fixed in the chart.
  const double h = opts.fd_step;
  VecX xi(n);
  for (int j = 0; j < n; ++j) {
    const VecX e = VecX::Unit(n, j);
    const auto diff = [&](double step) {
      const VecX qp = exp_map(model, p + step * e, v, opts).q;
      const VecX qm = exp_map(model, p - step * e, v, opts).q;
      return VecX((qp - qm) / (2.0 * step));
    };
    const VecX d = (4.0 * diff(h / 2) - diff(h)) / 3.0;
    xi[j] = -eta.dot(d);
  }
  // Joint sign convention: xi points towards p - q (the pair is defined up to
  // a common factor).
  if (xi.dot(p - em.q) < 0.0) {
    xi = -xi;
    eta = -eta;
  }

  ConormalSample out;
  out.p = p;
  out.q = em.q;
  out.xi = xi;
  out.eta = eta;
  return out;
}

GraphTestResult graph_test(const GeodesicModel& model, const VecX& p, const VecX& v,
                           double perturbation_scale, const EngineOptions& opts) {
  const int n = model.dim();
  const double t0 = model.metric_norm(p, v);
  const VecX theta0 = v / t0;

  // Reference conormal for sign alignment.
  const ConormalSample ref = conormal_bundle(model, p, v, opts);
  const VecX eta0 = ref.eta / ref.eta.norm();

  // Basis of the eta-direction tangent space (outputs) and of the theta
  // perturbations (inputs).
  std::vector<VecX> eta_basis, theta_basis;
  {
    MatX comp = eta0 * eta0.transpose();
    Eigen::JacobiSVD<MatX> svd(MatX::Identity(n, n) - comp,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (int i = 0; i < n - 1; ++i) eta_basis.push_back(svd.matrixU().col(i));
  }
  {
    MatX comp = theta0 * theta0.transpose() / theta0.squaredNorm();
    Eigen::JacobiSVD<MatX> svd(MatX::Identity(n, n) - comp,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (int i = 0; i < n - 1; ++i) theta_basis.push_back(svd.matrixU().col(i));
  }

  // (p, theta) -> (q, eta projected off eta0): 2n-1 inputs, 2n-1 outputs.
  const auto evaluate = [&](const VecX& dp, const VecX& s) -> VecX {
    const VecX pp = p + dp;
    VecX th = theta0;
    for (int j = 0; j < n - 1; ++j) th += s[j] * theta_basis[static_cast<std::size_t>(j)];
    th = model.metric_normalize(pp, th);
    // Track the fold time near t0.
    double lo = 0.8 * t0, hi = 1.2 * t0;
    double flo = det_dexp(model, pp, lo * th, opts);
    double fhi = det_dexp(model, pp, hi * th, opts);
    if (!(flo > 0.0 && fhi < 0.0)) throw std::runtime_error("stratum exited; reduce scale");
    while (hi - lo > opts.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      if (det_dexp(model, pp, mid * th, opts) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    const VecX vv = t * th;
    const ExpMapResult em = exp_map(model, pp, vv, opts);
    Eigen::JacobiSVD<MatX> svd(em.dexp, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VecX eta = svd.matrixU().col(n - 1);
    if (eta.dot(eta0) < 0.0) eta = -eta;
    VecX out(2 * n - 1);
    out.head(n) = em.q;
    for (int j = 0; j < n - 1; ++j) out[n + j] = eta.dot(eta_basis[static_cast<std::size_t>(j)]);
    return out;
  };

  const double h = perturbation_scale;
  MatX Jac(2 * n - 1, 2 * n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j, ++col) {
    const VecX e = VecX::Unit(n, j);
    const VecX plus = evaluate(h * e, VecX::Zero(n - 1));
    const VecX minus = evaluate(-h * e, VecX::Zero(n - 1));
    Jac.col(col) = (plus - minus) / (2.0 * h);
  }
  for (int j = 0; j < n - 1; ++j, ++col) {
    VecX s = VecX::Zero(n - 1);
    s[j] = h;
    const VecX plus = evaluate(VecX::Zero(n), s);
    s[j] = -h;
    const VecX minus = evaluate(VecX::Zero(n), s);
    Jac.col(col) = (plus - minus) / (2.0 * h);
  }

  Eigen::JacobiSVD<MatX> svd(Jac);
  GraphTestResult res;
  res.singular_values = svd.singularValues();
  const double smax = res.singular_values[0];
  for (int i = 0; i < res.singular_values.size(); ++i)
    if (res.singular_values[i] > 1e-6 * smax) ++res.rank;
  res.is_graph = (res.rank == 2 * n - 1);
  return res;
}

Weight unit_weight() {
  return [](const VecX&, const VecX&) { return 1.0; };
}

SingFitInputs sing_fit_inputs(const GeodesicModel& model, const VecX& p, const VecX& v,
                              const Weight& kappa_sharp, const Weight& kappa,
                              const EngineOptions& opts) {
  const int n = model.dim();
  ConjugateRecord rec;
  rec.p = p;
  rec.v = v;
  rec.t_star = model.metric_norm(p, v);
  resolve_record(model, rec, opts);
  if (rec.kernel_dim != 1 || classify_caustic(model, rec, opts) != CausticClass::Fold)
    throw std::runtime_error("not a simple fold point");

  const MatX gp = model.metric(p);
  SingFitInputs out;

  // A = metric norm of the covector d(det d exp); for the diagonal metrics in
  // the zoo the dual norm is the Euclidean norm scaled by the conformal factor.
  const MatX gp_inv = gp.inverse();
  out.A = std::sqrt(rec.grad_det.dot(gp_inv * rec.grad_det));

  // Independent directional derivative along the g-unit kernel direction.
  const VecX khat_g = rec.kernel_dir / std::sqrt(rec.kernel_dir.dot(gp * rec.kernel_dir));
  {
    const double h = opts.fd_step * std::max(1.0, v.norm());
    const auto diff = [&](double step) {
      return (det_dexp(model, p, v + step * khat_g, opts) -
              det_dexp(model, p, v - step * khat_g, opts)) /
             (2.0 * step);
    };
    out.B = std::abs((4.0 * diff(h / 2) - diff(h)) / 3.0);
  }

  // D: d exp restricted to T_v S(p) with induced volumes on both sides.
  const ExpMapResult em = exp_map(model, p, v, opts);
  const MatX gq = model.metric(em.q);
  const VecX gnormal = rec.grad_det / rec.grad_det.norm();
  std::vector<VecX> tangS;
  {
    Eigen::JacobiSVD<MatX> svd(MatX(gnormal * gnormal.transpose()),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (int i = 1; i < n; ++i) tangS.push_back(svd.matrixU().col(i));
    // g(p)-orthonormalize.
    for (std::size_t i = 0; i < tangS.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j)
        tangS[i] -= tangS[j] * (tangS[j].dot(gp * tangS[i]));
      tangS[i] /= std::sqrt(tangS[i].dot(gp * tangS[i]));
    }
  }
  MatX gram(static_cast<int>(tangS.size()), static_cast<int>(tangS.size()));
  for (std::size_t i = 0; i < tangS.size(); ++i)
    for (std::size_t j = 0; j < tangS.size(); ++j)
      gram(static_cast<int>(i), static_cast<int>(j)) =
          (em.dexp * tangS[i]).dot(gq * (em.dexp * tangS[j]));
  out.D = std::sqrt(std::max(0.0, gram.determinant()));

  if (n == 2) out.phi = rec.transversality;

  const double tau = rec.t_star;
  const VecX vhat = v / tau;
  const FlowState end = model.unit_flow(p, vhat, tau, opts.reverse);
  out.W_sigma = std::pow(tau, 1.0 - n) * kappa_sharp(p, vhat) * kappa(em.q, end.u);
  out.predicted_coefficient = std::sqrt(2.0) * out.W_sigma / std::sqrt(out.A * out.D);
  return out;
}

double check_r4(const GeodesicModel& model, const VecX& p, const VecX& v) {
  const double tau = model.metric_norm(p, v);
  const VecX vhat = v / tau;
  const FlowState zero = model.unit_flow(p, vhat, 0.0, false);
  double err = (zero.x - p).norm();
  const double h = 1e-6;
  const FlowState fwd = model.unit_flow(p, vhat, h * tau, false);
  const FlowState bwd = model.unit_flow(p, vhat, -h * tau, false);
  const VecX vel = (fwd.x - bwd.x) / (2.0 * h);  // d/dt exp_p(t v) at t = 0 equals v
  err = std::max(err, (vel - v).norm() / std::max(1.0, v.norm()));
  return err;
}

double check_r5(const GeodesicModel& model, const VecX& p, const VecX& v) {
  EngineOptions opts;
  const ExpMapResult em = exp_map(model, p, v, opts);
  const double tau = model.metric_norm(em.q, em.w);
  const FlowState back = model.unit_flow(em.q, em.w / tau, tau, /*reverse=*/true);
  return (back.x - p).norm();
}

}  // namespace caustica::geo
