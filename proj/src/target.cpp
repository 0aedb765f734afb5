#include "riemlap/target.hpp"

#include <cmath>
#include <memory>

#include "riemlap/metric.hpp"
#include "riemlap/rng.hpp"

namespace riemlap {

TargetModel gaussian_target(const Vec& mean, const Mat& cov) {
  const int d = static_cast<int>(mean.size());
  if (cov.rows() != d || cov.cols() != d)
    throw std::invalid_argument("gaussian_target: cov shape does not match mean");
  auto llt = std::make_shared<Eigen::LLT<Mat>>(chol_spd(cov, "gaussian_target"));
  auto prec = std::make_shared<Mat>(llt->solve(Mat::Identity(d, d)));
  auto mu = std::make_shared<Vec>(mean);

  TargetModel t;
  t.name = "gaussian";
  t.dim = d;
  t.log_density = [mu, prec](const Vec& th) {
    Vec r = th - *mu;
    return -0.5 * r.dot(*prec * r);
  };
  t.grad = [mu, prec](const Vec& th) -> Vec { return -(*prec) * (th - *mu); };
  t.hvp = [prec](const Vec&, const Vec& v) -> Vec { return -(*prec) * v; };
  t.fisher = [prec](const Vec&) -> Mat { return *prec; };
  return t;
}

TargetModel banana_target(const BananaConfig& cfg, const Vec& data) {
  if (cfg.sigma_theta <= 0 || cfg.sigma_y <= 0)
    throw std::invalid_argument("banana_target: sigmas must be positive");
  if (!data.allFinite()) throw std::invalid_argument("banana_target: data must be finite");
  const double n = static_cast<double>(data.size());
  const double sy2 = cfg.sigma_y * cfg.sigma_y;
  const double st2 = cfg.sigma_theta * cfg.sigma_theta;
  // the likelihood depends on the data only through these sums
  const double s1 = data.sum();
  const double s2 = data.squaredNorm();

  TargetModel t;
  t.name = "banana";
  t.dim = 2;
  t.log_density = [=](const Vec& th) {
    const double m = th[0] + th[1] * th[1];
    const double sse = s2 - 2.0 * m * s1 + n * m * m;
    return -0.5 * sse / sy2 - 0.5 * th.squaredNorm() / st2;
  };
  t.grad = [=](const Vec& th) -> Vec {
    const double m = th[0] + th[1] * th[1];
    const double r = s1 - n * m;  // sum of residuals
    Vec g(2);
    g[0] = r / sy2 - th[0] / st2;
    g[1] = 2.0 * th[1] * r / sy2 - th[1] / st2;
    return g;
  };
  t.hvp = [=](const Vec& th, const Vec& v) -> Vec {
    const double m = th[0] + th[1] * th[1];
    const double r = s1 - n * m;
    const double h11 = -n / sy2 - 1.0 / st2;
    const double h12 = -2.0 * n * th[1] / sy2;
    const double h22 = 2.0 * r / sy2 - 4.0 * n * th[1] * th[1] / sy2 - 1.0 / st2;
    Vec out(2);
    out[0] = h11 * v[0] + h12 * v[1];
    out[1] = h12 * v[0] + h22 * v[1];
    return out;
  };
  t.fisher = [=](const Vec& th) -> Mat {
    Mat g(2, 2);
    g(0, 0) = 1.0 / st2 + n / sy2;
    g(0, 1) = g(1, 0) = 2.0 * n * th[1] / sy2;
    g(1, 1) = 1.0 / st2 + 4.0 * n * th[1] * th[1] / sy2;
    return g;
  };
  t.per_datum_scores = [=](const Vec& th) -> Mat {
    const double m = th[0] + th[1] * th[1];
    Mat s(data.size(), 2);
    for (int i = 0; i < data.size(); ++i) {
      const double w = (data[i] - m) / sy2;
      s(i, 0) = w;
      s(i, 1) = 2.0 * th[1] * w;
    }
    return s;
  };
  t.prior_precision = Mat::Identity(2, 2) / st2;
  return t;
}

Vec generate_banana_data(const BananaConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Vec y(cfg.n_obs);
  const double mean = cfg.theta1_true + cfg.theta2sq_true;
  for (int i = 0; i < cfg.n_obs; ++i) y[i] = mean + cfg.sigma_y * rng.normal();
  return y;
}

TargetModel squiggle_target(double a, const Mat& S) {
  if (S.rows() != 2 || S.cols() != 2) throw std::invalid_argument("squiggle_target: S must be 2x2");
  auto llt = std::make_shared<Eigen::LLT<Mat>>(chol_spd(S, "squiggle_target"));
  auto sinv = std::make_shared<Mat>(llt->solve(Mat::Identity(2, 2)));

  auto pullback = [a](const Vec& th) -> Vec {
    Vec psi(2);
    psi[0] = th[0];
    psi[1] = th[1] + std::sin(a * th[0]);
    return psi;
  };
  // d psi / d theta; the shear has unit Jacobian determinant
  auto jac_inv = [a](const Vec& th) -> Mat {
    Mat j(2, 2);
    j << 1.0, 0.0, a * std::cos(a * th[0]), 1.0;
    return j;
  };

  TargetModel t;
  t.name = "squiggle";
  t.dim = 2;
  t.log_density = [=](const Vec& th) {
    Vec psi = pullback(th);
    return -0.5 * psi.dot(*sinv * psi);
  };
  t.grad = [=](const Vec& th) -> Vec {
    Vec psi = pullback(th);
    return -jac_inv(th).transpose() * (*sinv * psi);
  };
  t.hvp = [=](const Vec& th, const Vec& v) -> Vec {
    Vec psi = pullback(th);
    Mat j = jac_inv(th);
    Vec w = *sinv * psi;
    // H = -J' S^-1 J - (S^-1 psi)_2 * d2(psi_2), the latter nonzero only at (1,1)
    Vec out = -j.transpose() * (*sinv * (j * v));
    out[0] += a * a * std::sin(a * th[0]) * w[1] * v[0];
    return out;
  };
  t.fisher = [=](const Vec& th) -> Mat {
    Mat j = jac_inv(th);
    return j.transpose() * (*sinv) * j;
  };
  return t;
}

TargetModel funnel_target(double sigma) {
  if (sigma <= 0) throw std::invalid_argument("funnel_target: sigma must be positive");
  const double s2 = sigma * sigma;

  TargetModel t;
  t.name = "funnel";
  t.dim = 2;
  // pushforward density: psi = (theta1 e^{-theta2/2}, theta2/sigma),
  // log|det dphi/dpsi| = log sigma + theta2/2
  t.log_density = [=](const Vec& th) {
    const double e = std::exp(-th[1]);
    return -0.5 * th[0] * th[0] * e - 0.5 * th[1] * th[1] / s2 - 0.5 * th[1];
  };
  t.grad = [=](const Vec& th) -> Vec {
    const double e = std::exp(-th[1]);
    Vec g(2);
    g[0] = -th[0] * e;
    g[1] = 0.5 * th[0] * th[0] * e - th[1] / s2 - 0.5;
    return g;
  };
  t.hvp = [=](const Vec& th, const Vec& v) -> Vec {
    const double e = std::exp(-th[1]);
    const double h11 = -e;
    const double h12 = th[0] * e;
    const double h22 = -0.5 * th[0] * th[0] * e - 1.0 / s2;
    Vec out(2);
    out[0] = h11 * v[0] + h12 * v[1];
    out[1] = h12 * v[0] + h22 * v[1];
    return out;
  };
  t.fisher = [=](const Vec& th) -> Mat {
    Mat jinv(2, 2);
    const double e = std::exp(-0.5 * th[1]);
    jinv << e, -0.5 * th[0] * e, 0.0, 1.0 / sigma;
    return jinv.transpose() * jinv;
  };
  return t;
}

TargetModel logreg_target(const Dataset& data, double alpha) {
  if (alpha <= 0) throw std::invalid_argument("logreg_target: alpha must be positive");
  data.validate_binary_labels();
  auto X = std::make_shared<Mat>(data.X);
  auto y = std::make_shared<Vec>(data.y);
  const double inv_alpha = 1.0 / alpha;
  const int d = data.dim();

  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto probs = [X, sigmoid](const Vec& th) -> Vec {
    Vec z = *X * th;
    for (int i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
    return z;
  };

  TargetModel t;
  t.name = "logreg";
  t.dim = d;
  t.log_density = [=](const Vec& th) {
    Vec z = *X * th;
    double ll = 0.0;
    for (int i = 0; i < z.size(); ++i) {
      // y*log s + (1-y)*log(1-s) = y*z - log(1+e^z), stably
      const double zi = z[i];
      const double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
      ll += (*y)[i] * zi - softplus;
    }
    return ll - 0.5 * inv_alpha * th.squaredNorm();
  };
  t.grad = [=](const Vec& th) -> Vec {
    Vec s = probs(th);
    return X->transpose() * (*y - s) - inv_alpha * th;
  };
  t.hvp = [=](const Vec& th, const Vec& v) -> Vec {
    Vec s = probs(th);
    Vec xv = *X * v;
    Vec lam = s.array() * (1.0 - s.array());
    return -(X->transpose() * (lam.array() * xv.array()).matrix()) - inv_alpha * v;
  };
  t.fisher = [=](const Vec& th) -> Mat {
    Vec s = probs(th);
    Vec lam = s.array() * (1.0 - s.array());
    Mat g = X->transpose() * lam.asDiagonal() * (*X);
    g.diagonal().array() += inv_alpha;
    return g;
  };
  t.analytic_accel = [X, alpha](const Vec& th, const Vec& v) -> Vec {
    return logistic_accel(*X, alpha, th, v);
  };
  t.per_datum_scores = [=](const Vec& th) -> Mat {
    Vec s = probs(th);
    return (((*y) - s).asDiagonal()) * (*X);
  };
  t.prior_precision = Mat::Identity(d, d) * inv_alpha;
  return t;
}

Mat empirical_fisher(const TargetModel& target, const Vec& theta) {
  if (!target.per_datum_scores)
    throw std::invalid_argument("empirical_fisher: target has no per-datum scores");
  Mat s = target.per_datum_scores(theta);
  Mat g = s.transpose() * s;
  if (target.prior_precision.size() > 0) g += target.prior_precision;
  return g;
}

}  // namespace riemlap
