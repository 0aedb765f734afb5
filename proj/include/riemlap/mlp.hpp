#pragma once

#include "riemlap/dataset.hpp"
#include "riemlap/target.hpp"

namespace riemlap {

struct MlpConfig {
  int hidden = 10;
  double noise_std = 0.3;   // likelihood sigma
  double prior_prec = 1.0;  // Gaussian prior precision on every weight
};

/// 1-hidden-1 tanh regression network. Parameters are packed as
/// [w1 (hidden), b1 (hidden), w2 (hidden), b2], so dim() = 3*hidden + 1.
class MlpModel {
 public:
  explicit MlpModel(const MlpConfig& cfg);

  int dim() const { return 3 * cfg_.hidden + 1; }
  const MlpConfig& config() const { return cfg_; }

  double forward(const Vec& theta, double x) const;

  /// d f(x) / d theta, by backpropagation.
  Vec jacobian_row(const Vec& theta, double x) const;

  /// Hessian of f(x) times v, by central differences of jacobian_row along v
  /// with step sqrt(machine eps) * (1 + |theta|).
  Vec hess_vec(const Vec& theta, double x, const Vec& v) const;

 private:
  MlpConfig cfg_;
};

/// Gaussian-likelihood regression posterior over the network weights:
/// -sum_n (y_n - f(x_n))^2 / (2 sigma^2) - prior_prec/2 |theta|^2.
/// Fisher metric is the Gauss-Newton pullback (1/sigma^2) sum J_n' J_n +
/// prior_prec I; the closed-form geodesic acceleration for it is wired in.
TargetModel mlp_target(const MlpConfig& cfg, const Dataset& data);

}  // namespace riemlap
