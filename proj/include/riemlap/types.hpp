#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace riemlap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Outcome of a geodesic integration or of one sample of a wrapped Gaussian.
enum class Status {
  Ok,
  MaxSteps,        // integrator hit the step budget
  MetricFailure,   // metric tensor not SPD along the path
  LogMapFailure,   // shooting solver did not converge
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::MaxSteps: return "max_steps_exceeded";
    case Status::MetricFailure: return "metric_failure";
    case Status::LogMapFailure: return "log_map_failure";
  }
  return "unknown";
}

/// A matrix that was required to be symmetric positive definite is not.
struct SpdError : std::runtime_error {
  explicit SpdError(const std::string& what) : std::runtime_error(what) {}
};

/// Metric tensor failed Cholesky (after one jitter retry) at position theta.
struct MetricError : std::runtime_error {
  Vec theta;
  MetricError(const std::string& what, Vec theta_arg)
      : std::runtime_error(what), theta(std::move(theta_arg)) {}
};

/// Logarithmic-map shooting failed to converge.
struct LogMapError : std::runtime_error {
  double best_residual;
  LogMapError(const std::string& what, double best)
      : std::runtime_error(what), best_residual(best) {}
};

/// Cholesky of an SPD matrix. Adds one shot of jitter (1e-9 * mean diagonal)
/// if the factorization fails; a second failure throws SpdError.
Eigen::LLT<Mat> chol_spd(const Mat& a, const std::string& context);

/// log det of an SPD matrix via its Cholesky factor.
double log_det_spd(const Eigen::LLT<Mat>& llt);

}  // namespace riemlap
