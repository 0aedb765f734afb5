#include "riemlap/reference.hpp"

#include <cmath>

#include "riemlap/rng.hpp"

namespace riemlap {

namespace {

SampleSet plain_sample_set(Mat samples, std::uint64_t seed) {
  SampleSet s;
  s.samples = std::move(samples);
  s.nfev.assign(s.samples.rows(), 0);
  s.statuses.assign(s.samples.rows(), Status::Ok);
  s.seed = seed;
  return s;
}

}  // namespace

SampleSet exact_gaussian_samples(const Vec& mean, const Mat& cov, int n, std::uint64_t seed) {
  const int d = static_cast<int>(mean.size());
  Mat l = chol_spd(cov, "exact_gaussian_samples").matrixL();
  Mat out(n, d);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    out.row(i) = (mean + l * rng.normal_vec(d)).transpose();
  }
  return plain_sample_set(std::move(out), seed);
}

SampleSet exact_squiggle_samples(double a, const Mat& S, int n, std::uint64_t seed) {
  Mat l = chol_spd(S, "exact_squiggle_samples").matrixL();
  Mat out(n, 2);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    Vec psi = l * rng.normal_vec(2);
    out(i, 0) = psi[0];
    out(i, 1) = psi[1] - std::sin(a * psi[0]);
  }
  return plain_sample_set(std::move(out), seed);
}

SampleSet exact_funnel_samples(double sigma, int n, std::uint64_t seed) {
  Mat out(n, 2);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const double p1 = rng.normal();
    const double p2 = rng.normal();
    out(i, 0) = std::exp(0.5 * sigma * p2) * p1;
    out(i, 1) = sigma * p2;
  }
  return plain_sample_set(std::move(out), seed);
}

RwmResult rwm_samples(const TargetModel& target, const Vec& init, const McmcConfig& cfg,
                      const std::function<void(const RwmTransition&)>& trace) {
  if (cfg.warmup < 0 || cfg.thin < 1 || cfg.n_keep < 1)
    throw std::invalid_argument("rwm_samples: invalid chain configuration");
  const int d = target.dim;
  Rng rng(cfg.seed ^ 0x52574dull);

  Vec x = init;
  double lp = target.log_density(x);
  if (!std::isfinite(lp)) throw std::invalid_argument("rwm_samples: init has non-finite density");

  // running moments for the warmup covariance estimate
  Vec mean = x;
  Mat m2 = Mat::Identity(d, d) * 1e-6;
  long count = 1;

  const double base_scale = 2.38 * 2.38 / d;
  double log_scale = 0.0;
  Mat prop_chol = Mat::Identity(d, d);
  auto refresh_proposal = [&]() {
    Mat cov = m2 / std::max<long>(count - 1, 1);
    cov.diagonal().array() += 1e-10 + 1e-8 * cov.diagonal().mean();
    prop_chol = chol_spd(std::exp(log_scale) * base_scale * cov, "rwm proposal").matrixL();
  };
  if (cfg.warmup == 0) refresh_proposal();

  const long total = static_cast<long>(cfg.warmup) + static_cast<long>(cfg.n_keep) * cfg.thin;
  Mat kept(cfg.n_keep, d);
  int n_kept = 0;
  long accepted_post = 0, post_steps = 0;

  for (long it = 0; it < total; ++it) {
    const bool warm = it < cfg.warmup;
    if (warm) {
      // adapt every 200 iterations once some history has accumulated
      if (it % 200 == 0 && count > 2 * d) refresh_proposal();
    } else if (it == cfg.warmup) {
      refresh_proposal();
    }

    Vec z(d);
    for (int j = 0; j < d; ++j) z[j] = rng.normal();
    Vec prop = x + prop_chol * z;
    const double lp_prop = target.log_density(prop);
    const double log_ratio = lp_prop - lp;
    const double log_u = std::log(rng.uniform());
    const bool accept = std::isfinite(lp_prop) && log_u < log_ratio;
    if (trace) trace({x, prop, log_ratio, log_u, accept});
    if (accept) {
      x = prop;
      lp = lp_prop;
    }

    if (warm) {
      // Robbins-Monro drift of the proposal scale toward the target rate
      const double rate_sample = accept ? 1.0 : 0.0;
      log_scale += (rate_sample - cfg.target_accept) / std::sqrt(static_cast<double>(it + 1));
      ++count;
      Vec delta = x - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (x - mean).transpose();
    } else {
      ++post_steps;
      if (accept) ++accepted_post;
      if ((it - cfg.warmup) % cfg.thin == cfg.thin - 1 && n_kept < cfg.n_keep) {
        kept.row(n_kept++) = x.transpose();
      }
    }
  }

  RwmResult res;
  res.samples = plain_sample_set(std::move(kept), cfg.seed);
  res.accept_rate = post_steps == 0 ? 0.0 : static_cast<double>(accepted_post) / post_steps;
  if (res.accept_rate < 0.05 || res.accept_rate > 0.7) {
    res.warning = "post-warmup acceptance rate " + std::to_string(res.accept_rate) +
                  " outside [0.05, 0.7]";
  }
  return res;
}

}  // namespace riemlap
