#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caustica/geodesic/model.hpp"

namespace caustica::geo {

// Thresholds shared by the conjugate-point machinery.
struct EngineOptions {
  double kernel_svd_rel = 1e-6;   // singular value below this * sigma_max counts as zero
  double tangency_tol = 1e-3;     // radians; fold vs blowdown discrimination
  double ddet_tol = 1e-8;         // fold condition floor on |d/dN det|
  double bisection_tol = 1e-10;   // absolute tolerance on t*
  double fd_step = 1e-4;          // base finite-difference step in v and p
  bool prefer_closed_form = true;
  bool reverse = false;           // operate on the time-reversed system
};

struct ExpMapResult {
  VecX q;       // exp_p(v)
  VecX w;       // -d/dt exp_p(tv) at t = 1 (norm |v|_g)
  MatX dexp;    // chart matrix of d_v exp_p(v)
  double det;   // invariant determinant: sqrt(det g(q)/det g(p)) * det(dexp)
};

ExpMapResult exp_map(const GeodesicModel& model, const VecX& p, const VecX& v,
                     const EngineOptions& opts = {});

// Chart matrix of d_v exp_p(v) through the variational equations (always
// integrates, even when the model has a closed form); used as the cross-check
// against closed-form differentials.
MatX dexp_ode(const GeodesicModel& model, const VecX& p, const VecX& v, bool reverse = false);

// Invariant Jacobian determinant at v.
double det_dexp(const GeodesicModel& model, const VecX& p, const VecX& v,
                const EngineOptions& opts = {});

// Jacobi field J(t) = d[exp_p(tv)](alpha), J(0) = 0, Jdot(0) = alpha,
// evaluated at t together with its time derivative.
struct JacobiValue {
  VecX J;
  VecX Jdot;
};
JacobiValue jacobi_field(const GeodesicModel& model, const VecX& p, const VecX& v,
                         const VecX& alpha, double t, bool reverse = false);

enum class CausticClass { Fold, Blowdown1, BlowdownK, Unresolved };
std::string to_string(CausticClass c);

struct ConjugateRecord {
  VecX p;
  VecX v;          // conjugate vector, |v|_g = t_star
  VecX q;          // exp_p(v)
  VecX w;          // return vector at q
  double t_star = 0.0;
  int kernel_dim = 0;
  VecX kernel_dir;       // unit vector spanning N_p(v) (first kernel direction)
  CausticClass classification = CausticClass::Unresolved;
  double transversality = 0.0;  // angle between N_p(v) and T_v S(p), radians
  double ddet = 0.0;            // |directional derivative of det d exp along N_p(v)|
  VecX grad_det;                // v-gradient of det d exp at v
  bool sign_change = false;     // true when t* was bracketed by a sign change
};

// Smallest t in (0, t_max] with det d exp_p(t theta) = 0 (sign change refined
// by bisection); nullopt when the determinant stays bounded away from zero.
std::optional<ConjugateRecord> find_conjugate(const GeodesicModel& model, const VecX& p,
                                              const VecX& theta, double t_max,
                                              const EngineOptions& opts = {});

CausticClass classify_caustic(const GeodesicModel& model, const ConjugateRecord& rec,
                              const EngineOptions& opts = {});

struct LocusSample {
  VecX theta;
  VecX v;
  VecX q;
  VecX w;
  double t_star = 0.0;
  CausticClass classification = CausticClass::Unresolved;
  int kernel_dim = 0;
  double tangency_angle = 0.0;  // angle between w and the tangent plane of Sigma(p)
};

struct LocusResult {
  std::vector<LocusSample> samples;
  bool non_fold_warning = false;
};

// Direction patch: cone around patch_center of angular radius patch_radius
// (radians; pi covers everything except the antipodal direction).
LocusResult conjugate_locus(const GeodesicModel& model, const VecX& p, const VecX& patch_center,
                            double patch_radius, int samples, double t_max,
                            const EngineOptions& opts = {});

struct ConormalSample {
  VecX p, q;
  VecX xi, eta;  // covectors at p and q; eta unit, xi scaled by the pairing
};

// Conormal of the conjugate pair (p, exp_p(v)) at a fold point: eta spans the
// cokernel of d_v exp, xi_j = eta_i d exp^i / d p^j.
ConormalSample conormal_bundle(const GeodesicModel& model, const VecX& p, const VecX& v,
                               const EngineOptions& opts = {});

struct GraphTestResult {
  int rank = 0;
  bool is_graph = false;
  VecX singular_values;
};

// Rank of the differential of (p, theta) -> (q, eta-direction) parameterizing
// the canonical relation (2 dim - 1 perturbation directions; homogeneity
// removes the fiber scaling). Full rank <=> local canonical graph.
GraphTestResult graph_test(const GeodesicModel& model, const VecX& p, const VecX& v,
                           double perturbation_scale, const EngineOptions& opts = {});

using Weight = std::function<double(const VecX& x, const VecX& unit_dir)>;
Weight unit_weight();

struct SingFitInputs {
  double A = 0.0;        // |d det d exp_p(v)|, metric norm of the v-gradient
  double D = 0.0;        // induced-volume determinant of d exp restricted to T_v S(p)
  double W_sigma = 0.0;  // weight on Sigma: |v|^{1-n} kappa_sharp(p, v/|v|) kappa(q, u(t*))
  double B = 0.0;        // |d/dN det d exp| (independent directional derivative)
  double phi = 0.0;      // 2D only: angle between S(p) and N_p(v)
  double predicted_coefficient = 0.0;  // sqrt(2) W_sigma / sqrt(A D)
};

SingFitInputs sing_fit_inputs(const GeodesicModel& model, const VecX& p, const VecX& v,
                              const Weight& kappa_sharp, const Weight& kappa,
                              const EngineOptions& opts = {});

// Runtime checks of the regular-exponential-map contract.
// (R4): exp_p(0) = p and d/dt exp_p(t v)|_0 = v, to 1e-8.
double check_r4(const GeodesicModel& model, const VecX& p, const VecX& v);
// (R5): with q, w from exp_map, the reverse system returns exp_q(w) = p; the
// defect |exp_q(w) - p| is returned (spec tolerance 1e-6).
double check_r5(const GeodesicModel& model, const VecX& p, const VecX& v);

}  // namespace caustica::geo
