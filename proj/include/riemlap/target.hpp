#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "riemlap/dataset.hpp"
#include "riemlap/types.hpp"

namespace riemlap {

/// A posterior target: log density (up to a constant), analytic gradient and
/// Hessian-vector product, and optionally a Fisher metric tensor, a
/// closed-form geodesic acceleration for that metric, and per-datum score
/// vectors (for the empirical Fisher variant).
struct TargetModel {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> log_density;
  std::function<Vec(const Vec&)> grad;
  std::function<Vec(const Vec&, const Vec&)> hvp;
  std::function<Mat(const Vec&)> fisher;                  // may be empty
  std::function<Vec(const Vec&, const Vec&)> analytic_accel;  // Fisher-metric accel; may be empty
  std::function<Mat(const Vec&)> per_datum_scores;        // N x D; may be empty
  Mat prior_precision;                                    // 0x0 when absent

  bool has_fisher() const { return static_cast<bool>(fisher); }
};

struct BananaConfig {
  double sigma_theta = 2.0;
  double sigma_y = 2.0;
  int n_obs = 100;
  double theta1_true = 0.5;
  double theta2sq_true = 0.75;
};

/// Gaussian with the given mean and covariance; Fisher metric is the
/// constant precision. Rejects non-SPD covariance at construction.
TargetModel gaussian_target(const Vec& mean, const Mat& cov);

/// y_n ~ N(theta1 + theta2^2, sigma_y^2), independent N(0, sigma_theta^2)
/// priors on both coordinates. Closed-form Fisher metric.
TargetModel banana_target(const BananaConfig& cfg, const Vec& data);

/// y_n = theta1_true + theta2sq_true + sigma_y * eps_n, deterministic per seed.
Vec generate_banana_data(const BananaConfig& cfg, std::uint64_t seed);

/// Gaussian N(0, S) sheared by (theta1, theta2 + sin(a * theta1)).
TargetModel squiggle_target(double a, const Mat& S);

/// Pushforward of a standard 2D normal through
/// theta = (exp(sigma psi2 / 2) psi1, sigma psi2).
TargetModel funnel_target(double sigma);

/// Bayesian logistic regression with N(0, alpha) prior on each coefficient
/// (alpha is a variance). Fisher metric X' Lambda X + I / alpha equals the
/// negative Hessian everywhere.
TargetModel logreg_target(const Dataset& data, double alpha);

/// Sum of per-datum score outer products plus the target's prior-precision
/// term. Requires per_datum_scores.
Mat empirical_fisher(const TargetModel& target, const Vec& theta);

}  // namespace riemlap
