#include "riemlap/laplace.hpp"

#include <cmath>
#include <limits>

#include "riemlap/lbfgs.hpp"
#include "riemlap/parallel.hpp"
#include "riemlap/rng.hpp"

namespace riemlap {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::ELA: return "ELA";
    case Variant::RLA_B: return "RLA-B";
    case Variant::RLA_BLOG: return "RLA-BLog";
    case Variant::RLA_F: return "RLA-F";
  }
  return "?";
}

const char* to_string(MapKind m) {
  return m == MapKind::Euclidean ? "euclidean" : "hausdorff";
}

const char* to_string(PrecisionKind p) {
  return p == PrecisionKind::NegHessian ? "neg_hessian" : "fisher";
}

Variant variant_from_string(const std::string& s) {
  if (s == "ELA" || s == "ela") return Variant::ELA;
  if (s == "RLA-B" || s == "rla-b" || s == "RLA_B") return Variant::RLA_B;
  if (s == "RLA-BLog" || s == "rla-blog" || s == "RLA_BLOG") return Variant::RLA_BLOG;
  if (s == "RLA-F" || s == "rla-f" || s == "RLA_F") return Variant::RLA_F;
  throw std::invalid_argument("unknown variant: " + s);
}

MapKind map_kind_from_string(const std::string& s) {
  if (s == "euclidean") return MapKind::Euclidean;
  if (s == "hausdorff") return MapKind::Hausdorff;
  throw std::invalid_argument("unknown map kind: " + s);
}

PrecisionKind precision_from_string(const std::string& s) {
  if (s == "neg_hessian" || s == "hessian") return PrecisionKind::NegHessian;
  if (s == "fisher") return PrecisionKind::Fisher;
  throw std::invalid_argument("unknown precision kind: " + s);
}

int SampleSet::n_failed() const {
  int k = 0;
  for (Status s : statuses)
    if (s != Status::Ok) ++k;
  return k;
}

Mat SampleSet::ok_samples() const {
  const int n_ok = static_cast<int>(statuses.size()) - n_failed();
  Mat out(n_ok, samples.cols());
  int r = 0;
  for (size_t i = 0; i < statuses.size(); ++i) {
    if (statuses[i] == Status::Ok) out.row(r++) = samples.row(static_cast<int>(i));
  }
  return out;
}

double SampleSet::mean_nfev_ok() const {
  double acc = 0.0;
  int k = 0;
  for (size_t i = 0; i < statuses.size(); ++i) {
    if (statuses[i] == Status::Ok) {
      acc += nfev[i];
      ++k;
    }
  }
  return k == 0 ? 0.0 : acc / k;
}

namespace {

Vec multi_start_minimize(const Objective& objective, int dim, int restarts, std::uint64_t seed,
                         const std::string& what) {
  double best_f = std::numeric_limits<double>::infinity();
  Vec best_x;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r) + 0x6d6170ull);
    Vec x0 = rng.normal_vec(dim);
    LbfgsResult res;
    try {
      res = lbfgs_minimize(objective, x0);
    } catch (const MetricError&) {
      continue;  // wandered out of the SPD region; discard this start
    }
    if (!std::isfinite(res.f)) continue;
    if (res.f < best_f) {
      best_f = res.f;
      best_x = res.x;
    }
  }
  if (!best_x.size()) throw std::runtime_error(what + ": all restarts ended non-finite");
  return best_x;
}

}  // namespace

Vec find_map_euclidean(const TargetModel& target, int restarts, std::uint64_t seed) {
  Objective obj = [&target](const Vec& x, Vec& g) {
    g = -target.grad(x);
    return -target.log_density(x);
  };
  return multi_start_minimize(obj, target.dim, restarts, seed, "find_map_euclidean");
}

Vec find_map_hausdorff(const TargetModel& target, const MetricField& metric, int restarts,
                       std::uint64_t seed) {
  Objective obj = [&](const Vec& x, Vec& g) {
    const double ld = metric.log_det(x);
    Vec ldg = metric.log_det_grad ? metric.log_det_grad(x) : log_det_grad_fd(metric.tensor, x);
    g = -target.grad(x) + 0.5 * ldg;
    return -target.log_density(x) + 0.5 * ld;
  };
  return multi_start_minimize(obj, target.dim, restarts, seed, "find_map_hausdorff");
}

Mat build_precision(const TargetModel& target, const Vec& theta_hat, PrecisionKind kind) {
  if (!theta_hat.allFinite()) throw std::invalid_argument("build_precision: theta_hat not finite");
  const int d = target.dim;
  Mat p(d, d);
  if (kind == PrecisionKind::Fisher) {
    if (!target.has_fisher())
      throw std::invalid_argument("build_precision: target has no Fisher metric");
    p = target.fisher(theta_hat);
  } else {
    for (int j = 0; j < d; ++j) p.col(j) = -target.hvp(theta_hat, Vec::Unit(d, j));
    p = 0.5 * (p + p.transpose()).eval();
  }
  Eigen::LLT<Mat> llt(p);
  if (llt.info() != Eigen::Success) {
    if (kind == PrecisionKind::NegHessian) {
      throw SpdError(
          "build_precision: negative Hessian at theta_hat is not positive definite; "
          "consider precision_kind=fisher");
    }
    throw SpdError("build_precision: Fisher metric at theta_hat is not positive definite");
  }
  return p;
}

LaplaceFit make_laplace_fit(const Vec& theta_hat, const Mat& precision) {
  LaplaceFit fit;
  fit.theta_hat = theta_hat;
  fit.precision = precision;
  auto llt = chol_spd(precision, "make_laplace_fit");
  Mat cov = llt.solve(Mat::Identity(precision.rows(), precision.cols()));
  cov = 0.5 * (cov + cov.transpose()).eval();
  fit.cov_chol = chol_spd(cov, "make_laplace_fit (covariance)").matrixL();
  return fit;
}

SampleSet sample(const LaplaceFit& fit, const TargetModel& target, const ApproxConfig& config) {
  const int d = target.dim;
  const int n = config.n_samples;
  if (config.variant == Variant::RLA_F && !target.has_fisher())
    throw std::invalid_argument("sample: RLA-F requires a target with a Fisher metric");

  SampleSet out;
  out.samples.resize(n, d);
  out.nfev.assign(n, 0);
  out.statuses.assign(n, Status::Ok);
  out.seed = config.seed;

  MetricField metric;  // metric of the exponential map, when one is needed
  if (config.variant == Variant::RLA_B || config.variant == Variant::RLA_BLOG) {
    metric = monge_metric(target);
  } else if (config.variant == Variant::RLA_F) {
    metric = fisher_metric(target);
  }
  MetricField base_metric;  // log-map metric for RLA-BLog
  if (config.variant == Variant::RLA_BLOG) {
    Mat cov = fit.cov_chol * fit.cov_chol.transpose();
    base_metric = gaussian_monge_metric(fit.theta_hat, cov);
  }

  auto one = [&](int i) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(i));
    Vec v = fit.cov_chol * rng.normal_vec(d);
    switch (config.variant) {
      case Variant::ELA:
        out.samples.row(i) = (fit.theta_hat + v).transpose();
        break;
      case Variant::RLA_B:
      case Variant::RLA_F: {
        GeodesicResult g = exp_map(metric, fit.theta_hat, v, config.integrator);
        out.samples.row(i) = g.endpoint.transpose();
        out.nfev[i] = g.nfev;
        out.statuses[i] = g.status;
        break;
      }
      case Variant::RLA_BLOG: {
        Vec bar = fit.theta_hat + v;
        Vec v_corr;
        try {
          v_corr = log_map(base_metric, fit.theta_hat, bar, config.integrator);
        } catch (const LogMapError&) {
          out.samples.row(i) = bar.transpose();
          out.statuses[i] = Status::LogMapFailure;
          return;
        }
        GeodesicResult g = exp_map(metric, fit.theta_hat, v_corr, config.integrator);
        out.samples.row(i) = g.endpoint.transpose();
        out.nfev[i] = g.nfev;
        out.statuses[i] = g.status;
        break;
      }
    }
  };
  parallel_for(n, config.threads, one);
  return out;
}

}  // namespace riemlap
