#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "riemlap/laplace.hpp"
#include "riemlap/types.hpp"

namespace riemlap {

struct McmcConfig {
  int n_keep = 20000;
  int warmup = 50000;
  int thin = 10;
  std::uint64_t seed = 0;
  double target_accept = 0.234;
};

/// Exact draws from targets that are diffeomorphic images of Gaussians.
SampleSet exact_gaussian_samples(const Vec& mean, const Mat& cov, int n, std::uint64_t seed);
SampleSet exact_squiggle_samples(double a, const Mat& S, int n, std::uint64_t seed);
SampleSet exact_funnel_samples(double sigma, int n, std::uint64_t seed);

/// One logged Metropolis transition, for detailed-balance checks.
struct RwmTransition {
  Vec current, proposal;
  double log_ratio;
  double log_u;
  bool accepted;
};

struct RwmResult {
  SampleSet samples;
  double accept_rate = 0.0;       // post-warmup
  std::optional<std::string> warning;
};

/// Gaussian random-walk Metropolis with proposal covariance adapted during
/// warmup (empirical covariance scaled by 2.38^2/D times a Robbins-Monro
/// scale driven toward target_accept) and frozen afterwards. Keeps every
/// thin-th post-warmup state. Deterministic per seed. A post-warmup
/// acceptance rate outside [0.05, 0.7] attaches a warning.
RwmResult rwm_samples(const TargetModel& target, const Vec& init, const McmcConfig& cfg,
                      const std::function<void(const RwmTransition&)>& trace = nullptr);

}  // namespace riemlap
