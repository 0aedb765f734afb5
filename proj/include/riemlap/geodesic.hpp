#pragma once

#include <functional>
#include <vector>

#include "riemlap/metric.hpp"
#include "riemlap/types.hpp"

namespace riemlap {

struct IntegratorConfig {
  double rtol = 1e-3;
  double atol = 1e-6;
  int max_steps = 4096;  // attempted (accepted + rejected) steps
  double t_end = 1.0;
};

struct GeodesicResult {
  Vec endpoint;
  Vec end_velocity;
  int nfev = 0;  // 6 per attempted step of the 5(4) pair
  Status status = Status::Ok;
};

/// Called after every accepted step (and once at t = 0).
using StepObserver = std::function<void(double t, const Vec& theta, const Vec& v)>;

/// Integrates the geodesic equation d(theta, v)/dt = (v, accel(theta, v))
/// from t = 0 to cfg.t_end with the Dormand-Prince 5(4) embedded pair and a
/// PI step-size controller on the mixed error norm max(atol, rtol * |state|).
/// Metric failures and step-budget exhaustion are reported through status,
/// with the last valid state as partial diagnostics.
GeodesicResult exp_map(const MetricField& metric, const Vec& theta0, const Vec& v0,
                       const IntegratorConfig& cfg = {}, const StepObserver& observer = nullptr);

struct ShootConfig {
  int max_iters = 50;
};

/// Initial velocity v with exp_map(theta0, v) = theta_target, solved as a
/// shooting problem: Levenberg-Marquardt on the endpoint residual with a
/// forward-difference Jacobian, starting from v = theta_target - theta0.
/// Throws LogMapError (with the best residual reached) on non-convergence.
Vec log_map(const MetricField& metric, const Vec& theta0, const Vec& theta_target,
            const IntegratorConfig& cfg = {}, const ShootConfig& shoot = {});

/// Metric norm g(v(t), v(t)) at every accepted step of the geodesic,
/// starting with t = 0. Constant in exact arithmetic.
std::vector<double> norm_trace(const MetricField& metric, const Vec& theta0, const Vec& v0,
                               const IntegratorConfig& cfg = {});

}  // namespace riemlap
