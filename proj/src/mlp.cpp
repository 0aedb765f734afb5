#include "riemlap/mlp.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace riemlap {

MlpModel::MlpModel(const MlpConfig& cfg) : cfg_(cfg) {
  if (cfg.hidden < 1) throw std::invalid_argument("MlpModel: hidden must be >= 1");
  if (cfg.noise_std <= 0 || cfg.prior_prec <= 0)
    throw std::invalid_argument("MlpModel: noise_std and prior_prec must be positive");
}

double MlpModel::forward(const Vec& theta, double x) const {
  const int h = cfg_.hidden;
  double out = theta[3 * h];  // output bias
  for (int i = 0; i < h; ++i) {
    out += theta[2 * h + i] * std::tanh(theta[i] * x + theta[h + i]);
  }
  return out;
}

Vec MlpModel::jacobian_row(const Vec& theta, double x) const {
  const int h = cfg_.hidden;
  Vec j(dim());
  for (int i = 0; i < h; ++i) {
    const double t = std::tanh(theta[i] * x + theta[h + i]);
    const double dt = 1.0 - t * t;
    const double w2 = theta[2 * h + i];
    j[i] = w2 * dt * x;
    j[h + i] = w2 * dt;
    j[2 * h + i] = t;
  }
  j[3 * h] = 1.0;
  return j;
}

Vec MlpModel::hess_vec(const Vec& theta, double x, const Vec& v) const {
  const double eps = std::numeric_limits<double>::epsilon();
  const double step = std::sqrt(eps) * (1.0 + theta.norm());
  const double vn = v.norm();
  if (vn == 0.0) return Vec::Zero(dim());
  const double h = step / vn;
  return (jacobian_row(theta + h * v, x) - jacobian_row(theta - h * v, x)) / (2.0 * h);
}

TargetModel mlp_target(const MlpConfig& cfg, const Dataset& data) {
  if (data.dim() != 1)
    throw std::invalid_argument("mlp_target: expects 1D inputs (one covariate column)");
  auto model = std::make_shared<MlpModel>(cfg);
  auto x = std::make_shared<Vec>(data.X.col(0));
  auto y = std::make_shared<Vec>(data.y);
  const double inv_s2 = 1.0 / (cfg.noise_std * cfg.noise_std);
  const double prec = cfg.prior_prec;
  const int n = data.n();
  const int d = model->dim();

  auto stack_jacobian = [model, x, n, d](const Vec& th) -> Mat {
    Mat j(n, d);
    for (int i = 0; i < n; ++i) j.row(i) = model->jacobian_row(th, (*x)[i]);
    return j;
  };

  TargetModel t;
  t.name = "mlp";
  t.dim = d;
  t.log_density = [=](const Vec& th) {
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (*y)[i] - model->forward(th, (*x)[i]);
      sse += r * r;
    }
    return -0.5 * inv_s2 * sse - 0.5 * prec * th.squaredNorm();
  };
  t.grad = [=](const Vec& th) -> Vec {
    Vec g = -prec * th;
    for (int i = 0; i < n; ++i) {
      const double r = (*y)[i] - model->forward(th, (*x)[i]);
      g += inv_s2 * r * model->jacobian_row(th, (*x)[i]);
    }
    return g;
  };
  t.hvp = [=](const Vec& th, const Vec& v) -> Vec {
    Vec out = -prec * v;
    for (int i = 0; i < n; ++i) {
      const double xi = (*x)[i];
      const Vec j = model->jacobian_row(th, xi);
      const double r = (*y)[i] - model->forward(th, xi);
      out += inv_s2 * (-j.dot(v) * j + r * model->hess_vec(th, xi, v));
    }
    return out;
  };
  t.fisher = [=](const Vec& th) -> Mat {
    Mat j = stack_jacobian(th);
    Mat g = inv_s2 * (j.transpose() * j);
    g.diagonal().array() += prec;
    return g;
  };
  t.analytic_accel = [=](const Vec& th, const Vec& v) -> Vec {
    Mat j = stack_jacobian(th);
    Vec curv(n);
    for (int i = 0; i < n; ++i) curv[i] = v.dot(model->hess_vec(th, (*x)[i], v));
    Mat g = inv_s2 * (j.transpose() * j);
    g.diagonal().array() += prec;
    auto llt = chol_spd(g, "mlp_accel");
    return -inv_s2 * llt.solve(j.transpose() * curv);
  };
  t.per_datum_scores = [=](const Vec& th) -> Mat {
    Mat s(n, d);
    for (int i = 0; i < n; ++i) {
      const double r = (*y)[i] - model->forward(th, (*x)[i]);
      s.row(i) = inv_s2 * r * model->jacobian_row(th, (*x)[i]);
    }
    return s;
  };
  t.prior_precision = Mat::Identity(d, d) * prec;
  return t;
}

}  // namespace riemlap
