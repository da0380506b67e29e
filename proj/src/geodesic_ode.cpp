#include "caustica/geodesic/ode.hpp"

#include <cmath>
#include <stdexcept>

namespace caustica::geo {

namespace {
// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace

VecX integrate_rk45(const std::function<VecX(double, const VecX&)>& f, VecX y, double t0,
                    double t1, const Rk45Options& opts) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::min(opts.initial_step, std::abs(t1 - t0));
  if (h == 0.0) return y;

  VecX k1 = f(t, y);
  double err_prev = 1.0;
  for (int step = 0; step < opts.max_steps; ++step) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    const VecX k2 = f(t + c2 * h, y + h * (a21 * k1));
    const VecX k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const VecX k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const VecX k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const VecX k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const VecX ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const VecX k7 = f(t + h, ynew);
    const VecX errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(errv[i]) / sc);
    }

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (t == t1) return y;
      const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                          std::pow(err_prev, 0.4 / 5.0);
      h *= std::min(5.0, std::max(0.2, grow));
      err_prev = std::max(err, 1e-10);
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
    }
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("integrator tolerance not met: step size underflow");
  }
  throw std::runtime_error("integrator tolerance not met: step budget exhausted");
}

}  // namespace caustica::geo
