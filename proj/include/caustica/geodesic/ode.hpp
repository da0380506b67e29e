#pragma once

#include <Eigen/Dense>
#include <functional>

namespace caustica::geo {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Dormand-Prince 5(4) with PI step control. Integrates y' = f(t, y) from t0 to
// t1 keeping the local error below atol + rtol*|y| per component.
struct Rk45Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 1e-3;
  int max_steps = 2'000'000;
};

VecX integrate_rk45(const std::function<VecX(double, const VecX&)>& f, VecX y0, double t0,
                    double t1, const Rk45Options& opts = {});

}  // namespace caustica::geo
