#include <cmath>

#include "caustica/circular.hpp"
#include "caustica/kernel_probe.hpp"
#include "doctest.h"

using namespace caustica;

namespace {
geo::VecX vec2(double x, double y) { return (geo::VecX(2) << x, y).finished(); }
geo::VecX vec3(double x, double y, double z) { return (geo::VecX(3) << x, y, z).finished(); }
}  // namespace

TEST_CASE("circle kernel slice reproduces the analytic kernel") {
  auto c2 = geo::make_circle2d();
  KernelSliceOptions ko;
  ko.z_lo = 0.01;
  ko.z_hi = 0.25;
  const auto slice = kernel_slice(*c2, vec2(0, 0), vec2(1, 0), ko);
  REQUIRE(slice.points.size() == 16);
  for (const auto& pt : slice.points) {
    const double analytic = normal_kernel_analytic(2.0 - pt.z_prime);
    CHECK(std::abs(pt.kernel / analytic - 1.0) < 0.02);
    CHECK(pt.convergence < 0.01);  // doubling the bump width barely moves K
  }
  CHECK(slice.fold.predicted_coefficient == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("square-root law on the circle in the asymptotic window") {
  auto c2 = geo::make_circle2d();
  KernelSliceOptions ko;
  ko.z_lo = 0.004;
  ko.z_hi = 0.02;
  const auto slice = kernel_slice(*c2, vec2(0, 0), vec2(1, 0), ko);
  const auto fit = fit_sqrt_singularity(slice, 0.004, 0.02);
  CHECK(std::abs(fit.exponent + 0.5) < 0.05);
  CHECK(fit.coeff / fit.predicted > 0.95);
  CHECK(fit.coeff / fit.predicted < 1.05);
  CHECK(fit.residual < 0.01);
}

TEST_CASE("square-root law on the magnetic model") {
  auto m = geo::make_magnetic3d(1.0);
  KernelSliceOptions km;
  km.z_lo = 0.02;
  km.z_hi = 0.08;
  km.samples = 14;
  km.bump_width = 0.005;
  const auto slice = kernel_slice(*m, geo::VecX::Zero(3), vec3(1, 0, 0), km);
  const auto fit = fit_sqrt_singularity(slice, 0.02, 0.08);
  CHECK(std::abs(fit.exponent + 0.5) < 0.05);
  // Coefficient recorded against the fold invariants: K sqrt(z') approaches
  // the prediction as z' -> 0; at the smallest sampled z' the remainder
  // contributes about 2%.
  const auto& first = slice.points.front();
  CHECK(first.kernel * std::sqrt(first.z_prime) ==
        doctest::Approx(fit.predicted).epsilon(0.05));
  CHECK(fit.coeff == doctest::Approx(fit.predicted).epsilon(0.25));
}

TEST_CASE("kernel is supported on one side of Sigma") {
  auto c2 = geo::make_circle2d();
  KernelSliceOptions ko;
  ko.z_lo = 0.05;
  ko.z_hi = 0.10;
  ko.samples = 3;
  ko.two_sided = true;
  const auto slice = kernel_slice(*c2, vec2(0, 0), vec2(1, 0), ko);
  double peak = 0.0;
  for (const auto& pt : slice.points)
    if (pt.z_prime > 0.0) peak = std::max(peak, pt.kernel);
  REQUIRE(peak > 1.0);
  for (const auto& pt : slice.points)
    if (pt.z_prime < 0.0) CHECK(std::abs(pt.kernel) < 1e-3 * peak);
}

TEST_CASE("synthetic power-law data is fitted exactly") {
  KernelSlice synthetic;
  synthetic.fold.predicted_coefficient = 3.0;
  for (int i = 0; i < 14; ++i) {
    KernelSamplePoint pt;
    pt.z_prime = 0.01 * std::pow(20.0, i / 13.0);
    pt.kernel = 3.0 / std::sqrt(pt.z_prime);
    synthetic.points.push_back(pt);
  }
  const auto fit = fit_sqrt_singularity(synthetic, 0.005, 0.5);
  CHECK(std::abs(fit.exponent + 0.5) < 1e-6);
  CHECK(fit.coeff == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("fit preconditions") {
  KernelSlice synthetic;
  for (int i = 0; i < 14; ++i) {
    KernelSamplePoint pt;
    pt.z_prime = 0.01 * (i + 1);
    pt.kernel = 1.0 / std::sqrt(pt.z_prime);
    synthetic.points.push_back(pt);
  }
  CHECK_THROWS_WITH((void)fit_sqrt_singularity(synthetic, 5.0, 10.0),
                    "fit window outside sampled range");
  CHECK_THROWS_AS((void)fit_sqrt_singularity(synthetic, 0.005, 0.035), std::invalid_argument);
}

TEST_CASE("exponent is stable under path reparameterization") {
  auto c2 = geo::make_circle2d();
  KernelSliceOptions ko;
  ko.z_lo = 0.004;
  ko.z_hi = 0.02;
  const auto radial = kernel_slice(*c2, vec2(0, 0), vec2(1, 0), ko);
  KernelSliceOptions oblique = ko;
  oblique.path_dir = vec2(-0.30, 1.8);  // ~30 degrees off the inward normal
  const auto slanted = kernel_slice(*c2, vec2(0, 0), vec2(1, 0), oblique);
  const auto f0 = fit_sqrt_singularity(radial, 0.004, 0.02);
  const auto f1 = fit_sqrt_singularity(slanted, 0.004, 0.02);
  CHECK(std::abs(f0.exponent - f1.exponent) < 0.02);
}

TEST_CASE("tangent paths are rejected") {
  auto c2 = geo::make_circle2d();
  KernelSliceOptions ko;
  // The conormal at the crossing points along x; refuse paths within 0.01 rad
  // of the tangent plane.
  ko.path_dir = vec2(1.0, 0.005);
  CHECK_THROWS_WITH((void)kernel_slice(*c2, vec2(0, 0), vec2(1, 0), ko),
                    "transversality violated");
}

TEST_CASE("diagonal symbol of the truncated circular transform") {
  const Grid2D grid(512, 16.0);
  const auto res = diagonal_symbol_check(grid, {8.0, 8.0}, {{1.0, 0.0}, {0.6, 0.8}}, {});
  CHECK(res.max_rel_error < 0.10);
  CHECK(res.max_rel_error < 0.01);  // measured 0.0015 on this configuration
  CHECK(res.vanishing_weight_ratio < 1e-3);
}

TEST_CASE("truncated transform rejects windows reaching the conjugate time") {
  const Grid2D grid(512, 16.0);
  DiagonalCheckOptions opts;
  opts.t_taper_off = 3.5;  // beyond t* = pi
  CHECK_THROWS_WITH((void)diagonal_symbol_check(grid, {8.0, 8.0}, {{1.0, 0.0}}, opts),
                    "conjugate point inside the truncated t-range");
}
