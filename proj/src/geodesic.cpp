#include "riemlap/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riemlap {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order weights coincide with the last tableau row (FSAL); the error
// estimate uses b5 - b4.
constexpr double kE[7] = {71.0 / 57600,      0.0,        -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kExpo = 1.0 / 5.0;    // embedded order 4 -> exponent 1/(4+1)
constexpr double kBetaP = 0.7 / 5.0;   // PI controller
constexpr double kBetaI = 0.4 / 5.0;

struct System {
  const MetricField* metric;
  int d;

  Vec rhs(const Vec& y) const {
    Vec out(2 * d);
    const Vec theta = y.head(d);
    const Vec v = y.tail(d);
    out.head(d) = v;
    out.tail(d) = metric->accel(theta, v);
    return out;
  }
};

double error_norm(const Vec& err, const Vec& y, double rtol, double atol) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double scale = std::max(atol, rtol * std::abs(y[i]));
    const double q = err[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double scaled_rms(const Vec& x, const Vec& y, double rtol, double atol) {
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double scale = std::max(atol, rtol * std::abs(y[i]));
    const double q = x[i] / scale;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double initial_step(const System& sys, const Vec& y0, const Vec& f0, double rtol, double atol,
                    double t_end) {
  const double d0 = scaled_rms(y0, y0, rtol, atol);
  const double d1 = scaled_rms(f0, y0, rtol, atol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_end);
  Vec y1 = y0 + h0 * f0;
  double d2 = 0.0;
  try {
    Vec f1 = sys.rhs(y1);
    d2 = scaled_rms(f1 - f0, y0, rtol, atol) / h0;
  } catch (const MetricError&) {
    return std::min(1e-6, t_end);  // probe left the valid region; start tiny
  }
  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), kExpo);
  }
  return std::min({100.0 * h0, h1, t_end});
}

}  // namespace

GeodesicResult exp_map(const MetricField& metric, const Vec& theta0, const Vec& v0,
                       const IntegratorConfig& cfg, const StepObserver& observer) {
  const int d = static_cast<int>(theta0.size());
  System sys{&metric, d};

  GeodesicResult res;
  res.endpoint = theta0;
  res.end_velocity = v0;

  Vec y(2 * d);
  y.head(d) = theta0;
  y.tail(d) = v0;

  Vec k[7];
  try {
    k[0] = sys.rhs(y);
  } catch (const MetricError&) {
    res.status = Status::MetricFailure;
    return res;
  }
  if (observer) observer(0.0, theta0, v0);

  double t = 0.0;
  double h = initial_step(sys, y, k[0], cfg.rtol, cfg.atol, cfg.t_end);
  double err_prev = -1.0;
  int attempts = 0;

  while (t < cfg.t_end) {
    if (attempts >= cfg.max_steps) {
      res.status = Status::MaxSteps;
      break;
    }
    h = std::min(h, cfg.t_end - t);
    ++attempts;
    res.nfev += 6;

    bool metric_ok = true;
    Vec y_new;
    Vec err = Vec::Zero(2 * d);
    try {
      for (int s = 1; s < 7; ++s) {
        Vec ys = y;
        for (int j = 0; j < s; ++j) ys += (h * kA[s][j]) * k[j];
        if (s == 6) y_new = ys;  // stage 7 uses the 5th-order solution (FSAL)
        k[s] = sys.rhs(ys);
      }
      for (int s = 0; s < 7; ++s) err += (h * kE[s]) * k[s];
    } catch (const MetricError&) {
      metric_ok = false;
    }
    if (!metric_ok) {
      // shrink and retry; if the metric already failed at the current point
      // the step size collapses and we give up below
      h *= 0.25;
      if (h < 1e-14 * std::max(1.0, cfg.t_end)) {
        res.status = Status::MetricFailure;
        break;
      }
      continue;
    }

    const double err_norm = error_norm(err, y, cfg.rtol, cfg.atol);
    if (err_norm <= 1.0) {
      t += h;
      y = y_new;
      k[0] = k[6];  // FSAL
      if (observer) observer(t, y.head(d), y.tail(d));
      double factor;
      if (err_norm == 0.0) {
        factor = kMaxFactor;
      } else if (err_prev < 0.0) {
        factor = kSafety * std::pow(err_norm, -kExpo);
      } else {
        factor = kSafety * std::pow(err_norm, -kBetaP) * std::pow(err_prev, kBetaI);
      }
      h *= std::clamp(factor, kMinFactor, kMaxFactor);
      err_prev = std::max(err_norm, 1e-4);
    } else {
      const double factor = kSafety * std::pow(err_norm, -kExpo);
      h *= std::clamp(factor, kMinFactor, 1.0);
    }
  }

  res.endpoint = y.head(d);
  res.end_velocity = y.tail(d);
  if (res.status == Status::Ok && !res.endpoint.allFinite()) res.status = Status::MetricFailure;
  return res;
}

Vec log_map(const MetricField& metric, const Vec& theta0, const Vec& theta_target,
            const IntegratorConfig& cfg, const ShootConfig& shoot) {
  const int d = static_cast<int>(theta0.size());
  const double tol = 10.0 * cfg.atol;

  auto residual = [&](const Vec& v, Vec& r) -> bool {
    GeodesicResult g = exp_map(metric, theta0, v, cfg);
    if (g.status != Status::Ok) return false;
    r = g.endpoint - theta_target;
    return true;
  };

  Vec v = theta_target - theta0;
  Vec r;
  if (!residual(v, r)) {
    throw LogMapError("log_map: exponential map failed at the initial guess",
                      std::numeric_limits<double>::infinity());
  }
  double best = r.lpNorm<Eigen::Infinity>();
  double lambda = 1e-3;

  for (int iter = 0; iter < shoot.max_iters; ++iter) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) return v;

    const double delta = std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + v.norm());
    Mat jac(d, d);
    Vec rj;
    bool jac_ok = true;
    for (int j = 0; j < d; ++j) {
      Vec vj = v;
      vj[j] += delta;
      if (!residual(vj, rj)) {
        jac_ok = false;
        break;
      }
      jac.col(j) = (rj - r) / delta;
    }
    if (!jac_ok) throw LogMapError("log_map: exponential map failed while forming Jacobian", best);

    Mat jtj = jac.transpose() * jac;
    Vec jtr = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      Mat a = jtj;
      for (int i = 0; i < d; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      Vec step = a.ldlt().solve(-jtr);
      Vec v_new = v + step;
      Vec r_new;
      if (residual(v_new, r_new) && r_new.norm() < r.norm()) {
        v = v_new;
        r = r_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    best = std::min(best, r.lpNorm<Eigen::Infinity>());
    if (!improved && r.lpNorm<Eigen::Infinity>() > tol) {
      throw LogMapError("log_map: no progress in Levenberg-Marquardt", best);
    }
  }
  if (r.lpNorm<Eigen::Infinity>() <= tol) return v;
  throw LogMapError("log_map: max iterations reached", best);
}

std::vector<double> norm_trace(const MetricField& metric, const Vec& theta0, const Vec& v0,
                               const IntegratorConfig& cfg) {
  std::vector<double> trace;
  auto obs = [&](double, const Vec& th, const Vec& v) { trace.push_back(metric.quad_form(th, v)); };
  GeodesicResult g = exp_map(metric, theta0, v0, cfg, obs);
  if (g.status == Status::MetricFailure && trace.empty()) {
    throw MetricError("norm_trace: metric failed at the starting point", theta0);
  }
  return trace;
}

}  // namespace riemlap
