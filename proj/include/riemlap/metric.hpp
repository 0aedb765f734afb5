#pragma once

#include <functional>
#include <string>

#include "riemlap/target.hpp"
#include "riemlap/types.hpp"

namespace riemlap {

/// A position-dependent SPD tensor with the operations geodesic integration
/// needs. accel returns a^k = -Gamma^k_ij v^i v^j (Levi-Civita connection).
/// Tensor evaluations that fail Cholesky (after one jitter retry) throw
/// MetricError so the integrator can record a per-sample failure.
struct MetricField {
  std::string name;
  int dim = 0;
  std::function<Mat(const Vec&)> tensor;
  std::function<Vec(const Vec&, const Vec&)> inverse_apply;
  std::function<Vec(const Vec&, const Vec&)> accel;
  std::function<double(const Vec&)> log_det;
  std::function<Vec(const Vec&)> log_det_grad;  // analytic; may be empty

  double quad_form(const Vec& theta, const Vec& v) const { return v.dot(tensor(theta) * v); }
};

/// Cholesky with the geodesic failure policy: one jitter retry, then
/// MetricError carrying the position.
Eigen::LLT<Mat> chol_metric(const Mat& g, const Vec& theta);

/// Geodesic acceleration by numerically differentiating the metric tensor:
/// central differences with per-coordinate step h*(1+|theta_i|), contracted
/// as -G^{-1} (p1 + p2 - p3)/2. Above dim 64 the full derivative tensor is
/// replaced by directional differences to keep memory O(D^2).
Vec numeric_accel(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta,
                  const Vec& v, double h = 0.0);

/// Same contraction, forced onto the directional-difference path (used by
/// tests to check the two paths agree).
Vec numeric_accel_directional(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta,
                              const Vec& v, double h = 0.0);

/// Closed-form acceleration of the Monge metric I + grad grad':
/// -(v . hvp_v) grad / (1 + |grad|^2).
Vec monge_accel(const Vec& grad, const Vec& hvp_v, const Vec& v);

/// Sherman-Morrison solve for (I + g g') x = w.
Vec monge_inverse_apply(const Vec& grad, const Vec& w);

/// Fisher-metric acceleration for logistic regression,
/// -1/2 G^{-1} X' d with d_k = s_k (1-s_k)(1-2 s_k) (Xv)_k^2.
Vec logistic_accel(const Mat& X, double alpha, const Vec& theta, const Vec& v);
Vec logistic_accel(const Dataset& data, const Vec& theta, const Vec& v, double alpha);

/// Central-difference gradient of log det tensor(theta).
Vec log_det_grad_fd(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta,
                    double h = 0.0);

MetricField euclidean_metric(int dim);

/// Monge metric I + grad l grad l' of the target's log density.
MetricField monge_metric(const TargetModel& target);

/// Monge metric induced by the Gaussian N(center, Sigma); tensor(center) = I.
MetricField gaussian_monge_metric(const Vec& center, const Mat& sigma);

/// Fisher metric field of a target; uses the target's closed-form
/// acceleration when available, numeric Christoffel contraction otherwise.
MetricField fisher_metric(const TargetModel& target);

/// Empirical Fisher metric (score outer products plus prior precision) with
/// numeric Christoffel contraction.
MetricField empirical_fisher_metric(const TargetModel& target);

}  // namespace riemlap
