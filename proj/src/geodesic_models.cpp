#include "caustica/geodesic/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace caustica::geo {

MatX GeodesicModel::metric(const VecX& p) const {
  return MatX::Identity(p.size(), p.size());
}

double GeodesicModel::metric_norm(const VecX& p, const VecX& vec) const {
  return std::sqrt(vec.dot(metric(p) * vec));
}

VecX GeodesicModel::metric_normalize(const VecX& p, const VecX& vec) const {
  const double r = metric_norm(p, vec);
  if (r == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return vec / r;
}

FlowState GeodesicModel::integrate_flow(const VecX& p, const VecX& u0, double tau, bool reverse,
                                        const Rk45Options& opts) const {
  const int n = dim();
  VecX y(2 * n);
  y.head(n) = p;
  y.tail(n) = u0;
  const auto rhs = [&](double, const VecX& s) {
    VecX d(2 * n);
    d.head(n) = s.tail(n);
    d.tail(n) = acceleration(s.head(n), s.tail(n), reverse);
    return d;
  };
  const VecX yf = integrate_rk45(rhs, y, 0.0, tau, opts);
  return {yf.head(n), yf.tail(n)};
}

FlowState GeodesicModel::unit_flow(const VecX& p, const VecX& u0, double tau,
                                   bool reverse) const {
  return integrate_flow(p, u0, tau, reverse);
}

void GeodesicModel::sample_curve(const VecX& p, const VecX& u0, double t0, double dt, int count,
                                 double* out) const {
  const int n = dim();
  for (int i = 0; i < count; ++i) {
    const FlowState s = unit_flow(p, u0, t0 + i * dt, false);
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = s.x[j];
  }
}

MatX GeodesicModel::closed_form_dexp(const VecX&, const VecX&, bool) const {
  throw std::logic_error("model has no closed-form differential");
}

namespace {

inline Eigen::Vector2d rot_cw(const Eigen::Vector2d& u) { return {u.y(), -u.x()}; }

// --- 2D unit-circle magnetic flow (negative orientation) ---
class Circle2D final : public GeodesicModel {
 public:
  std::string name() const override { return "circle2d"; }
  int dim() const override { return 2; }

  FlowState unit_flow(const VecX& p, const VecX& u0, double tau, bool reverse) const override {
    const Eigen::Vector2d u = u0, ju = (reverse ? -1.0 : 1.0) * rot_cw(u);
    FlowState s;
    s.x = p + std::sin(tau) * VecX(u) + (1.0 - std::cos(tau)) * VecX(ju);
    s.u = std::cos(tau) * VecX(u) + std::sin(tau) * VecX(ju);
    return s;
  }

  VecX acceleration(const VecX&, const VecX& u, bool reverse) const override {
    const Eigen::Vector2d a = (reverse ? -1.0 : 1.0) * rot_cw(Eigen::Vector2d(u));
    return VecX(a);
  }

  void acceleration_jacobian(const VecX&, const VecX&, bool reverse, MatX& da_dx,
                             MatX& da_du) const override {
    da_dx = MatX::Zero(2, 2);
    da_du = MatX::Zero(2, 2);
    const double s = reverse ? -1.0 : 1.0;
    da_du(0, 1) = s;
    da_du(1, 0) = -s;
  }

  void sample_curve(const VecX& p, const VecX& u0, double t0, double dt, int count,
                    double* out) const override {
    const double ux = u0[0], uy = u0[1];
    const double jx = uy, jy = -ux;  // clockwise normal
    for (int i = 0; i < count; ++i) {
      const double t = t0 + i * dt;
      const double st = std::sin(t), ct = 1.0 - std::cos(t);
      out[2 * static_cast<std::size_t>(i)] = p[0] + st * ux + ct * jx;
      out[2 * static_cast<std::size_t>(i) + 1] = p[1] + st * uy + ct * jy;
    }
  }

  bool has_closed_form_dexp() const override { return true; }

  MatX closed_form_dexp(const VecX&, const VecX& v, bool reverse) const override {
    const double s = v.norm();
    const double sgn = reverse ? -1.0 : 1.0;
    const Eigen::Vector2d jv = sgn * rot_cw(Eigen::Vector2d(v));
    const double a = std::sin(s) / s, b = (1.0 - std::cos(s)) / s;
    const double ap = (s * std::cos(s) - std::sin(s)) / (s * s);
    const double bp = (s * std::sin(s) - (1.0 - std::cos(s))) / (s * s);
    MatX J(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double jij = (i == 0 && j == 1) ? sgn : (i == 1 && j == 0) ? -sgn : 0.0;
        J(i, j) = a * (i == j ? 1.0 : 0.0) + b * jij + (ap * v[i] + bp * jv[i]) * v[j] / s;
      }
    return J;
  }
};

// --- magnetic geodesics in R^3, constant vertical field of strength alpha ---
class Magnetic3D final : public GeodesicModel {
 public:
  explicit Magnetic3D(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("magnetic strength must be positive");
  }

  std::string name() const override { return "magnetic3d"; }
  int dim() const override { return 3; }

  // Horizontal part rotates by +90 degrees under J; spirals
  // q(tau) = p + sin(a tau)/a u_xy + (1 - cos(a tau))/a J u_xy + tau u_z.
  FlowState unit_flow(const VecX& p, const VecX& u0, double tau, bool reverse) const override {
    const double a = (reverse ? -1.0 : 1.0) * alpha_;
    Eigen::Vector3d uxy{u0[0], u0[1], 0.0}, jxy{-u0[1], u0[0], 0.0}, uz{0.0, 0.0, u0[2]};
    FlowState s;
    s.x = p + VecX(std::sin(a * tau) / a * uxy + (1.0 - std::cos(a * tau)) / a * jxy + tau * uz);
    s.u = VecX(std::cos(a * tau) * uxy + std::sin(a * tau) * jxy + uz);
    return s;
  }

  void sample_curve(const VecX& p, const VecX& u0, double t0, double dt, int count,
                    double* out) const override {
    const double a = alpha_;
    const double ux = u0[0], uy = u0[1], uz = u0[2];
    for (int i = 0; i < count; ++i) {
      const double t = t0 + i * dt;
      const double s = std::sin(a * t) / a, c = (1.0 - std::cos(a * t)) / a;
      out[3 * static_cast<std::size_t>(i)] = p[0] + s * ux - c * uy;
      out[3 * static_cast<std::size_t>(i) + 1] = p[1] + s * uy + c * ux;
      out[3 * static_cast<std::size_t>(i) + 2] = p[2] + t * uz;
    }
  }

  VecX acceleration(const VecX&, const VecX& u, bool reverse) const override {
    const double a = (reverse ? -1.0 : 1.0) * alpha_;
    VecX out(3);
    out << -a * u[1], a * u[0], 0.0;
    return out;
  }

  void acceleration_jacobian(const VecX&, const VecX&, bool reverse, MatX& da_dx,
                             MatX& da_du) const override {
    const double a = (reverse ? -1.0 : 1.0) * alpha_;
    da_dx = MatX::Zero(3, 3);
    da_du = MatX::Zero(3, 3);
    da_du(0, 1) = -a;
    da_du(1, 0) = a;
  }

  bool has_closed_form_dexp() const override { return true; }

  MatX closed_form_dexp(const VecX&, const VecX& v, bool reverse) const override {
    const double al = (reverse ? -1.0 : 1.0) * alpha_;
    const double s = v.norm(), as = al * s;
    const Eigen::Vector3d pv{v[0], v[1], 0.0}, jpv{-v[1], v[0], 0.0};
    const double A = std::sin(as) / as;
    const double B = (1.0 - std::cos(as)) / as;
    const double Ap = al * (as * std::cos(as) - std::sin(as)) / (as * as);
    const double Bp = al * (as * std::sin(as) - (1.0 - std::cos(as))) / (as * as);
    MatX J = MatX::Zero(3, 3);
    J(0, 0) = A;
    J(1, 1) = A;
    J(2, 2) = 1.0;
    J(0, 1) = -B;
    J(1, 0) = B;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) J(i, j) += (Ap * pv[i] + Bp * jpv[i]) * v[j] / s;
    return J;
  }

 private:
  double alpha_;
};

// --- fold 2D factor x flat line ---
class ProductFoldLine final : public GeodesicModel {
 public:
  std::string name() const override { return "product"; }
  int dim() const override { return 3; }

  FlowState unit_flow(const VecX& p, const VecX& u0, double tau, bool reverse) const override {
    const Eigen::Vector2d up{u0[0], u0[1]};
    const double r = up.norm();
    FlowState s;
    s.x = VecX(3);
    s.u = VecX(3);
    if (r < 1e-14) {
      s.x << p[0], p[1], p[2] + tau * u0[2];
      s.u = u0;
      return s;
    }
    const Eigen::Vector2d uh = up / r, jh = (reverse ? -1.0 : 1.0) * rot_cw(uh);
    const double w = tau * r;  // arc length travelled in the 2D factor
    const Eigen::Vector2d x2 =
        Eigen::Vector2d{p[0], p[1]} + std::sin(w) * uh + (1.0 - std::cos(w)) * jh;
    const Eigen::Vector2d u2 = r * (std::cos(w) * uh + std::sin(w) * jh);
    s.x << x2.x(), x2.y(), p[2] + tau * u0[2];
    s.u << u2.x(), u2.y(), u0[2];
    return s;
  }

  VecX acceleration(const VecX&, const VecX& u, bool reverse) const override {
    const Eigen::Vector2d up{u[0], u[1]};
    const Eigen::Vector2d a = (reverse ? -1.0 : 1.0) * up.norm() * rot_cw(up);
    VecX out(3);
    out << a.x(), a.y(), 0.0;
    return out;
  }

  void acceleration_jacobian(const VecX&, const VecX& u, bool reverse, MatX& da_dx,
                             MatX& da_du) const override {
    da_dx = MatX::Zero(3, 3);
    da_du = MatX::Zero(3, 3);
    const double sgn = reverse ? -1.0 : 1.0;
    const Eigen::Vector2d up{u[0], u[1]};
    const double r = up.norm();
    if (r < 1e-14) return;
    const Eigen::Vector2d ju = rot_cw(up);
    // d/du' of |u'| J u' = J u' (u'/|u'|)^T + |u'| J.
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) da_du(i, j) = sgn * ju[i] * up[j] / r;
    da_du(0, 1) += sgn * r;
    da_du(1, 0) -= sgn * r;
  }

  bool has_closed_form_dexp() const override { return true; }

  MatX closed_form_dexp(const VecX& p, const VecX& v, bool reverse) const override {
    Circle2D factor;
    const MatX j2 = factor.closed_form_dexp(p.head(2), v.head(2), reverse);
    MatX J = MatX::Zero(3, 3);
    J.topLeftCorner(2, 2) = j2;
    J(2, 2) = 1.0;
    return J;
  }
};

// --- conformal metric c(x)^{-2} delta on R^2 ---
class Conformal2D final : public GeodesicModel {
 public:
  Conformal2D(ConformalFactor f, std::string label) : f_(std::move(f)), label_(std::move(label)) {}

  std::string name() const override { return label_; }
  int dim() const override { return 2; }

  MatX metric(const VecX& p) const override {
    const double c = f_.value(p[0], p[1]);
    return MatX::Identity(2, 2) / (c * c);
  }

  FlowState unit_flow(const VecX& p, const VecX& u0, double tau, bool reverse) const override {
    if (f_.bumps.empty() && f_.spherical_base) return sphere_flow(p, u0, tau);
    return integrate_flow(p, u0, tau, reverse);
  }

  void sample_curve(const VecX& p, const VecX& u0, double t0, double dt, int count,
                    double* out) const override {
    if (f_.bumps.empty() && f_.spherical_base) {
      for (int i = 0; i < count; ++i) {
        const FlowState s = sphere_flow(p, u0, t0 + i * dt);
        out[2 * static_cast<std::size_t>(i)] = s.x[0];
        out[2 * static_cast<std::size_t>(i) + 1] = s.x[1];
      }
      return;
    }
    FlowState s = integrate_flow(p, u0, t0, false);
    for (int i = 0; i < count; ++i) {
      out[2 * static_cast<std::size_t>(i)] = s.x[0];
      out[2 * static_cast<std::size_t>(i) + 1] = s.x[1];
      if (i + 1 < count) s = integrate_flow(s.x, s.u, dt, false);
    }
  }

  // Geodesic equation for g = e^{2 phi} delta, phi = -log c:
  //   u' = -2 (grad phi . u) u + |u|^2 grad phi.
  VecX acceleration(const VecX& x, const VecX& u, bool) const override {
    double cx, cy;
    f_.gradient(x[0], x[1], cx, cy);
    const double c = f_.value(x[0], x[1]);
    const double gu = cx * u[0] + cy * u[1];
    const double uu = u.squaredNorm();
    VecX a(2);
    a[0] = (2.0 * gu * u[0] - uu * cx) / c;
    a[1] = (2.0 * gu * u[1] - uu * cy) / c;
    return a;
  }

  void acceleration_jacobian(const VecX& x, const VecX& u, bool, MatX& da_dx,
                             MatX& da_du) const override {
    double cx, cy, cxx, cxy, cyy;
    f_.gradient(x[0], x[1], cx, cy);
    f_.hessian(x[0], x[1], cxx, cxy, cyy);
    const double c = f_.value(x[0], x[1]);
    const double grad[2] = {cx, cy};
    const double hess[2][2] = {{cxx, cxy}, {cxy, cyy}};
    const double gu = cx * u[0] + cy * u[1];
    const double uu = u.squaredNorm();
    const VecX a = acceleration(x, u, false);
    da_dx = MatX(2, 2);
    da_du = MatX(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double hu = hess[j][0] * u[0] + hess[j][1] * u[1];
        da_dx(i, j) = (2.0 * hu * u[i] - uu * hess[i][j]) / c - a[i] * grad[j] / c;
        da_du(i, j) =
            (2.0 * grad[j] * u[i] + 2.0 * gu * (i == j ? 1.0 : 0.0) - 2.0 * u[j] * grad[i]) / c;
      }
  }

 private:
  // Exact great-circle flow through the stereographic lift
  // P(x) = (2x, |x|^2 - 1)/(1 + |x|^2).
  FlowState sphere_flow(const VecX& p, const VecX& u0, double tau) const {
    const double w = 1.0 + p.squaredNorm();
    Eigen::Vector3d P{2.0 * p[0] / w, 2.0 * p[1] / w, (p.squaredNorm() - 1.0) / w};
    const double xu = p[0] * u0[0] + p[1] * u0[1];
    Eigen::Vector3d V{2.0 * u0[0] / w - 4.0 * p[0] * xu / (w * w),
                      2.0 * u0[1] / w - 4.0 * p[1] * xu / (w * w), 4.0 * xu / (w * w)};
    V /= V.norm();  // g-unit u0 lifts to an ambient unit vector up to rounding
    const Eigen::Vector3d Pt = std::cos(tau) * P + std::sin(tau) * V;
    const Eigen::Vector3d Vt = -std::sin(tau) * P + std::cos(tau) * V;
    const double d = 1.0 - Pt.z();
    FlowState s;
    s.x = VecX(2);
    s.u = VecX(2);
    s.x << Pt.x() / d, Pt.y() / d;
    s.u << (Vt.x() * d + Pt.x() * Vt.z()) / (d * d), (Vt.y() * d + Pt.y() * Vt.z()) / (d * d);
    return s;
  }

  ConformalFactor f_;
  std::string label_;
};

}  // namespace

double ConformalFactor::value(double x, double y) const {
  double c = spherical_base ? 0.5 * (1.0 + x * x + y * y) : 1.0;
  for (const Bump& b : bumps) {
    const double dx = x - b.cx, dy = y - b.cy;
    c += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
  }
  return c;
}

void ConformalFactor::gradient(double x, double y, double& dx, double& dy) const {
  dx = spherical_base ? x : 0.0;
  dy = spherical_base ? y : 0.0;
  for (const Bump& b : bumps) {
    const double rx = x - b.cx, ry = y - b.cy, w2 = b.width * b.width;
    const double e = b.amplitude * std::exp(-(rx * rx + ry * ry) / (2.0 * w2));
    dx += -rx / w2 * e;
    dy += -ry / w2 * e;
  }
}

void ConformalFactor::hessian(double x, double y, double& dxx, double& dxy, double& dyy) const {
  dxx = dyy = spherical_base ? 1.0 : 0.0;
  dxy = 0.0;
  for (const Bump& b : bumps) {
    const double rx = x - b.cx, ry = y - b.cy, w2 = b.width * b.width;
    const double e = b.amplitude * std::exp(-(rx * rx + ry * ry) / (2.0 * w2));
    dxx += (rx * rx / w2 - 1.0) / w2 * e;
    dyy += (ry * ry / w2 - 1.0) / w2 * e;
    dxy += rx * ry / (w2 * w2) * e;
  }
}

std::unique_ptr<GeodesicModel> make_circle2d() { return std::make_unique<Circle2D>(); }

std::unique_ptr<GeodesicModel> make_magnetic3d(double alpha) {
  return std::make_unique<Magnetic3D>(alpha);
}

std::unique_ptr<GeodesicModel> make_product() { return std::make_unique<ProductFoldLine>(); }

std::unique_ptr<GeodesicModel> make_conformal(const ConformalFactor& factor,
                                              const std::string& label) {
  return std::make_unique<Conformal2D>(factor, label);
}

std::unique_ptr<GeodesicModel> make_sphere() {
  return make_conformal(ConformalFactor{}, "sphere");
}

std::unique_ptr<GeodesicModel> make_perturbed_sphere() {
  ConformalFactor f;
  f.bumps.push_back({0.18, 1.1, 0.4, 1.2});
  f.bumps.push_back({-0.10, -0.6, 1.0, 1.5});
  return make_conformal(f, "perturbed-sphere");
}

std::unique_ptr<GeodesicModel> make_model(const std::string& spec) {
  if (spec == "circle2d") return make_circle2d();
  if (spec == "sphere") return make_sphere();
  if (spec == "perturbed-sphere") return make_perturbed_sphere();
  if (spec == "product") return make_product();
  if (spec.rfind("magnetic3d", 0) == 0) {
    double alpha = 1.0;
    if (const auto pos = spec.find(':'); pos != std::string::npos)
      alpha = std::stod(spec.substr(pos + 1));
    return make_magnetic3d(alpha);
  }
  if (spec.rfind("conformal:", 0) == 0) {
    const std::string path = spec.substr(std::string("conformal:").size());
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open conformal factor file: " + path);
    nlohmann::json j;
    in >> j;
    ConformalFactor f;
    f.spherical_base = j.value("spherical_base", true);
    for (const auto& b : j.value("bumps", nlohmann::json::array()))
      f.bumps.push_back({b.value("amplitude", 0.0), b.value("cx", 0.0), b.value("cy", 0.0),
                         b.value("width", 1.0)});
    return make_conformal(f, "conformal");
  }
  throw std::invalid_argument("unknown model: " + spec);
}

}  // namespace caustica::geo
