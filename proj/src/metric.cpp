#include "riemlap/metric.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

namespace riemlap {

namespace {

double default_metric_step() {
  // cube root of machine eps balances truncation and rounding for the
  // second-order central difference
  return std::cbrt(std::numeric_limits<double>::epsilon());
}

constexpr int kFullTensorMaxDim = 64;

}  // namespace

Eigen::LLT<Mat> chol_metric(const Mat& g, const Vec& theta) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() == Eigen::Success) return llt;
  Mat gj = g;
  gj.diagonal().array() += 1e-9 * g.diagonal().mean();
  llt.compute(gj);
  if (llt.info() == Eigen::Success) return llt;
  throw MetricError("metric tensor not SPD", theta);
}

Vec numeric_accel(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta,
                  const Vec& v, double h) {
  const int d = static_cast<int>(theta.size());
  if (d > kFullTensorMaxDim) return numeric_accel_directional(tensor_fn, theta, v, h);
  if (h <= 0.0) h = default_metric_step();

  Vec p1 = Vec::Zero(d), p2 = Vec::Zero(d), p3(d);
  Vec tp = theta, tm = theta;
  for (int i = 0; i < d; ++i) {
    const double hi = h * (1.0 + std::abs(theta[i]));
    tp[i] = theta[i] + hi;
    tm[i] = theta[i] - hi;
    Mat dg = (tensor_fn(tp) - tensor_fn(tm)) / (2.0 * hi);
    tp[i] = theta[i];
    tm[i] = theta[i];
    p1 += v[i] * (dg * v);
    p2 += v[i] * (dg.transpose() * v);
    p3[i] = v.dot(dg * v);
  }
  auto llt = chol_metric(tensor_fn(theta), theta);
  return -llt.solve(0.5 * (p1 + p2 - p3));
}

Vec numeric_accel_directional(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta,
                              const Vec& v, double h) {
  const int d = static_cast<int>(theta.size());
  if (h <= 0.0) h = default_metric_step();
  const double vn = v.norm();
  Vec p1 = Vec::Zero(d), p2 = Vec::Zero(d), p3 = Vec::Zero(d);
  if (vn > 0.0) {
    const double t = h * (1.0 + theta.norm()) / vn;
    Mat dgv = (tensor_fn(theta + t * v) - tensor_fn(theta - t * v)) / (2.0 * t);
    p1 = dgv * v;
    p2 = dgv.transpose() * v;
    Vec tp = theta, tm = theta;
    for (int l = 0; l < d; ++l) {
      const double hl = h * (1.0 + std::abs(theta[l]));
      tp[l] = theta[l] + hl;
      tm[l] = theta[l] - hl;
      Mat dg = (tensor_fn(tp) - tensor_fn(tm)) / (2.0 * hl);
      tp[l] = theta[l];
      tm[l] = theta[l];
      p3[l] = v.dot(dg * v);
    }
  }
  auto llt = chol_metric(tensor_fn(theta), theta);
  return -llt.solve(0.5 * (p1 + p2 - p3));
}

Vec monge_accel(const Vec& grad, const Vec& hvp_v, const Vec& v) {
  return -(v.dot(hvp_v) / (1.0 + grad.squaredNorm())) * grad;
}

Vec monge_inverse_apply(const Vec& grad, const Vec& w) {
  return w - grad * (grad.dot(w) / (1.0 + grad.squaredNorm()));
}

Vec logistic_accel(const Mat& X, double alpha, const Vec& theta, const Vec& v) {
  Vec z = X * theta;
  Vec s(z.size());
  for (int i = 0; i < z.size(); ++i) s[i] = 1.0 / (1.0 + std::exp(-z[i]));
  Vec lam = s.array() * (1.0 - s.array());
  Vec xv = X * v;
  Vec d = lam.array() * (1.0 - 2.0 * s.array()) * xv.array().square();
  Mat g = X.transpose() * lam.asDiagonal() * X;
  g.diagonal().array() += 1.0 / alpha;
  auto llt = chol_metric(g, theta);
  return -0.5 * llt.solve(X.transpose() * d);
}

Vec logistic_accel(const Dataset& data, const Vec& theta, const Vec& v, double alpha) {
  return logistic_accel(data.X, alpha, theta, v);
}

Vec log_det_grad_fd(const std::function<Mat(const Vec&)>& tensor_fn, const Vec& theta, double h) {
  const int d = static_cast<int>(theta.size());
  if (h <= 0.0) h = default_metric_step();
  Vec g(d);
  Vec tp = theta, tm = theta;
  for (int i = 0; i < d; ++i) {
    const double hi = h * (1.0 + std::abs(theta[i]));
    tp[i] = theta[i] + hi;
    tm[i] = theta[i] - hi;
    const double lp = log_det_spd(chol_metric(tensor_fn(tp), tp));
    const double lm = log_det_spd(chol_metric(tensor_fn(tm), tm));
    g[i] = (lp - lm) / (2.0 * hi);
    tp[i] = theta[i];
    tm[i] = theta[i];
  }
  return g;
}

MetricField euclidean_metric(int dim) {
  MetricField m;
  m.name = "euclidean";
  m.dim = dim;
  m.tensor = [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); };
  m.inverse_apply = [](const Vec&, const Vec& w) -> Vec { return w; };
  m.accel = [dim](const Vec&, const Vec&) -> Vec { return Vec::Zero(dim); };
  m.log_det = [](const Vec&) { return 0.0; };
  m.log_det_grad = [dim](const Vec&) -> Vec { return Vec::Zero(dim); };
  return m;
}

namespace {

MetricField monge_like_metric(std::string name, int dim,
                              std::function<Vec(const Vec&)> grad_fn,
                              std::function<Vec(const Vec&, const Vec&)> hvp_fn) {
  MetricField m;
  m.name = std::move(name);
  m.dim = dim;
  m.tensor = [grad_fn, dim](const Vec& th) -> Mat {
    Vec g = grad_fn(th);
    return Mat::Identity(dim, dim) + g * g.transpose();
  };
  m.inverse_apply = [grad_fn](const Vec& th, const Vec& w) -> Vec {
    return monge_inverse_apply(grad_fn(th), w);
  };
  m.accel = [grad_fn, hvp_fn](const Vec& th, const Vec& v) -> Vec {
    return monge_accel(grad_fn(th), hvp_fn(th, v), v);
  };
  m.log_det = [grad_fn](const Vec& th) { return std::log1p(grad_fn(th).squaredNorm()); };
  m.log_det_grad = [grad_fn, hvp_fn](const Vec& th) -> Vec {
    Vec g = grad_fn(th);
    return 2.0 * hvp_fn(th, g) / (1.0 + g.squaredNorm());
  };
  return m;
}

}  // namespace

MetricField monge_metric(const TargetModel& target) {
  return monge_like_metric("monge[" + target.name + "]", target.dim, target.grad, target.hvp);
}

MetricField gaussian_monge_metric(const Vec& center, const Mat& sigma) {
  const int d = static_cast<int>(center.size());
  auto llt = std::make_shared<Eigen::LLT<Mat>>(chol_spd(sigma, "gaussian_monge_metric"));
  auto mu = std::make_shared<Vec>(center);
  auto grad_fn = [llt, mu](const Vec& th) -> Vec { return -llt->solve(th - *mu); };
  auto hvp_fn = [llt](const Vec&, const Vec& v) -> Vec { return -llt->solve(v); };
  return monge_like_metric("gaussian_monge", d, grad_fn, hvp_fn);
}

namespace {

MetricField dense_spd_metric(std::string name, int dim, std::function<Mat(const Vec&)> tensor_fn,
                             std::function<Vec(const Vec&, const Vec&)> accel_fn) {
  MetricField m;
  m.name = std::move(name);
  m.dim = dim;
  m.tensor = tensor_fn;
  m.inverse_apply = [tensor_fn](const Vec& th, const Vec& w) -> Vec {
    return chol_metric(tensor_fn(th), th).solve(w);
  };
  m.accel = accel_fn ? std::move(accel_fn)
                     : [tensor_fn](const Vec& th, const Vec& v) -> Vec {
                         return numeric_accel(tensor_fn, th, v);
                       };
  m.log_det = [tensor_fn](const Vec& th) { return log_det_spd(chol_metric(tensor_fn(th), th)); };
  return m;
}

}  // namespace

MetricField fisher_metric(const TargetModel& target) {
  if (!target.has_fisher())
    throw std::invalid_argument("fisher_metric: target '" + target.name + "' has no Fisher metric");
  return dense_spd_metric("fisher[" + target.name + "]", target.dim, target.fisher,
                          target.analytic_accel);
}

MetricField empirical_fisher_metric(const TargetModel& target) {
  if (!target.per_datum_scores)
    throw std::invalid_argument("empirical_fisher_metric: target has no per-datum scores");
  // capture by value to keep the field self-contained
  TargetModel copy = target;
  auto tensor_fn = [copy](const Vec& th) -> Mat { return empirical_fisher(copy, th); };
  return dense_spd_metric("empirical_fisher[" + target.name + "]", target.dim, tensor_fn,
                          nullptr);
}

}  // namespace riemlap
