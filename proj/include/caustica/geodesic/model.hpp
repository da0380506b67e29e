#pragma once

#include <memory>
#include <string>
#include <vector>

#include "caustica/geodesic/ode.hpp"

namespace caustica::geo {

struct FlowState {
  VecX x;  // position, chart coordinates
  VecX u;  // velocity of the unit-speed flow
};

// A geodesic-like dynamical system in a global chart. exp_p(v) is the
// unit-speed flow from p in direction v/|v|_g run for time |v|_g, so the
// tangent conjugate locus lives at metric radius t*.
//
// reverse = true selects the time-reversed system (for magnetic flows the
// Lorentz force changes sign; Riemannian models are their own reverse). The
// return identity exp_q(w) = p holds with the reverse system.
class GeodesicModel {
 public:
  virtual ~GeodesicModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;

  // Chart metric at p (dim x dim, symmetric positive definite).
  virtual MatX metric(const VecX& p) const;

  // Unit-speed flow: u0 must be g-unit. Closed form where the model has one,
  // otherwise integrated.
  virtual FlowState unit_flow(const VecX& p, const VecX& u0, double tau, bool reverse) const;

  // Acceleration of the unit-speed system and its linearization.
  virtual VecX acceleration(const VecX& x, const VecX& u, bool reverse) const = 0;
  virtual void acceleration_jacobian(const VecX& x, const VecX& u, bool reverse, MatX& da_dx,
                                     MatX& da_du) const = 0;

  virtual bool has_closed_form_dexp() const { return false; }
  // d_v exp_p(v) in chart coordinates (no metric volume factors).
  virtual MatX closed_form_dexp(const VecX& p, const VecX& v, bool reverse) const;

  double metric_norm(const VecX& p, const VecX& vec) const;
  VecX metric_normalize(const VecX& p, const VecX& vec) const;

  // Positions gamma_{p,u0}(t0 + i*dt), i in [0, count), written dim-strided
  // into out. The default evaluates unit_flow per node; closed-form models
  // override with tight loops and ODE models with a chained integration.
  virtual void sample_curve(const VecX& p, const VecX& u0, double t0, double dt, int count,
                            double* out) const;

 protected:
  FlowState integrate_flow(const VecX& p, const VecX& u0, double tau, bool reverse,
                           const Rk45Options& opts = {}) const;
};

// --- model zoo ---

// 2D unit-circle magnetic flow: every trajectory is a unit circle (negative
// orientation); conjugate locus Sigma(x) = {|y-x| = 2} at t* = pi.
std::unique_ptr<GeodesicModel> make_circle2d();

// Magnetic geodesics in R^3 with constant vertical field of strength alpha;
// spirals, conjugate sphere |v| = pi/alpha, Sigma(p) an ellipsoid.
std::unique_ptr<GeodesicModel> make_magnetic3d(double alpha);

// Product of the 2D circle flow with a flat line: fold factor x R.
std::unique_ptr<GeodesicModel> make_product();

// Conformal metric c(x)^{-2} (dx^2 + dy^2) on R^2, defined by a factor c made
// of an optional spherical base and Gaussian bumps (all derivatives analytic).
struct ConformalFactor {
  bool spherical_base = true;  // c0 = (1+|x|^2)/2, the unit round sphere
  struct Bump {
    double amplitude = 0.0;
    double cx = 0.0, cy = 0.0;
    double width = 1.0;
  };
  std::vector<Bump> bumps;

  double value(double x, double y) const;
  void gradient(double x, double y, double& dx, double& dy) const;
  void hessian(double x, double y, double& dxx, double& dxy, double& dyy) const;
};

std::unique_ptr<GeodesicModel> make_conformal(const ConformalFactor& factor,
                                              const std::string& label);
// Round sphere in the stereographic chart (conformal with spherical base).
std::unique_ptr<GeodesicModel> make_sphere();
// Sphere with a smooth bump perturbation; its caustic is fold-generic.
std::unique_ptr<GeodesicModel> make_perturbed_sphere();

// Parses "circle2d", "magnetic3d:<alpha>", "sphere", "perturbed-sphere",
// "product", "conformal:<json file>".
std::unique_ptr<GeodesicModel> make_model(const std::string& spec);

}  // namespace caustica::geo
