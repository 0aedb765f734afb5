#pragma once

#include <string>
#include <vector>

#include "riemlap/dataset.hpp"
#include "riemlap/laplace.hpp"
#include "riemlap/mlp.hpp"
#include "riemlap/types.hpp"

namespace riemlap {

struct EvaluationReport {
  std::string metric_name;
  double value_mean = 0.0;
  double value_std = 0.0;  // population std across runs
  int n_runs = 0;
  double mean_nfev = 0.0;
  int n_failed = 0;
  double wall_time_s = 0.0;
};

struct RunResult {
  double value = 0.0;
  double mean_nfev = 0.0;
  int n_failed = 0;
  double wall_time_s = 0.0;
};

/// Exact Wasserstein-1 distance between empirical distributions with uniform
/// weights and Euclidean ground cost. Rejects instances with n*m > 2^22 and
/// suggests subsampling.
double wasserstein1(const Mat& a, const Mat& b);

/// Exact 1D Wasserstein-1 for equal-length vectors: mean absolute difference
/// of the sorted values.
double wasserstein1_1d(const Vec& a, const Vec& b);

/// Predictive mean squared error and negative log likelihood of the sample
/// ensemble on a test set; the NLL averages the Gaussian mixture across
/// ok-status samples via log-sum-exp.
struct PredictiveMetrics {
  double mse = 0.0;
  double nll = 0.0;
};
PredictiveMetrics predictive_metrics(const SampleSet& samples, const MlpModel& model,
                                     const Dataset& test);

EvaluationReport summarize(const std::string& metric_name, const std::vector<RunResult>& runs);

/// Formats "[mean, std]" with 3 decimals, the convention used in the report
/// tables.
std::string format_mean_std(double mean, double std);

}  // namespace riemlap
