#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riemlap/geodesic.hpp"
#include "riemlap/metric.hpp"
#include "riemlap/target.hpp"

namespace riemlap {

enum class Variant { ELA, RLA_B, RLA_BLOG, RLA_F };
enum class MapKind { Euclidean, Hausdorff };
enum class PrecisionKind { NegHessian, Fisher };

const char* to_string(Variant v);
const char* to_string(MapKind m);
const char* to_string(PrecisionKind p);
Variant variant_from_string(const std::string& s);
MapKind map_kind_from_string(const std::string& s);
PrecisionKind precision_from_string(const std::string& s);

struct ApproxConfig {
  Variant variant = Variant::ELA;
  MapKind map_kind = MapKind::Euclidean;
  PrecisionKind precision_kind = PrecisionKind::NegHessian;
  int n_samples = 1000;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  int threads = 1;
};

/// Fitted Gaussian core of the approximation: MAP point, precision, and the
/// lower Cholesky factor of the covariance (L L' = precision^-1).
struct LaplaceFit {
  Vec theta_hat;
  Mat precision;
  Mat cov_chol;
};

struct SampleSet {
  Mat samples;                  // n x D; failed rows hold the partial state
  std::vector<int> nfev;        // exponential-map evaluations per sample
  std::vector<Status> statuses;
  std::uint64_t seed = 0;

  int n_failed() const;
  /// Rows with ok status, in order.
  Mat ok_samples() const;
  double mean_nfev_ok() const;
};

/// Multi-start quasi-Newton maximization of the log density; standard-normal
/// random initializations, runs ending non-finite are discarded.
Vec find_map_euclidean(const TargetModel& target, int restarts = 20, std::uint64_t seed = 0);

/// Maximizes log pi(theta) - 1/2 log det G(theta) (the density under the
/// Riemannian volume measure), same multi-start protocol. Uses the metric's
/// analytic log-det gradient when present, finite differences otherwise.
Vec find_map_hausdorff(const TargetModel& target, const MetricField& metric, int restarts = 20,
                       std::uint64_t seed = 0);

/// kind = NegHessian: assembles -hvp on basis vectors (symmetrized);
/// kind = Fisher: target.fisher(theta_hat). Throws SpdError when the result
/// fails Cholesky; for the negative Hessian the message recommends Fisher.
Mat build_precision(const TargetModel& target, const Vec& theta_hat, PrecisionKind kind);

LaplaceFit make_laplace_fit(const Vec& theta_hat, const Mat& precision);

/// Draws n_samples wrapped-Gaussian samples. Velocities come from per-sample
/// counter-derived streams, so results are identical for any thread count.
/// Per-sample geodesic failures are recorded in statuses, never thrown.
SampleSet sample(const LaplaceFit& fit, const TargetModel& target, const ApproxConfig& config);

}  // namespace riemlap
