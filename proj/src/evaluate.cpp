#include "riemlap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "riemlap/transport.hpp"

namespace riemlap {

double wasserstein1(const Mat& a, const Mat& b) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.rows());
  if (n < 1 || m < 1) throw std::invalid_argument("wasserstein1: empty sample set");
  if (a.cols() != b.cols()) throw std::invalid_argument("wasserstein1: dimension mismatch");
  if (static_cast<long>(n) * m > (1L << 22)) {
    throw std::invalid_argument(
        "wasserstein1: n*m exceeds 2^22; subsample the inputs before calling");
  }
  Mat cost(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  }
  // uniform weights 1/n and 1/m scaled to the integer transportation problem
  std::vector<std::int64_t> supply(n, m), demand(m, n);
  const double total = transport_simplex(cost, supply, demand);
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

double wasserstein1_1d(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein1_1d: inputs must have equal length");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double acc = 0.0;
  for (size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
  return acc / static_cast<double>(sa.size());
}

PredictiveMetrics predictive_metrics(const SampleSet& samples, const MlpModel& model,
                                     const Dataset& test) {
  Mat ok = samples.ok_samples();
  const int s = static_cast<int>(ok.rows());
  if (s < 1) throw std::invalid_argument("predictive_metrics: no ok-status samples");
  const double sigma = model.config().noise_std;
  const double log_norm = -0.5 * std::log(2.0 * M_PI * sigma * sigma);

  PredictiveMetrics pm;
  for (int t = 0; t < test.n(); ++t) {
    const double x = test.X(t, 0);
    const double y = test.y[t];
    double mean_pred = 0.0;
    double max_lp = -std::numeric_limits<double>::infinity();
    Vec lps(s);
    for (int k = 0; k < s; ++k) {
      const double f = model.forward(ok.row(k).transpose(), x);
      mean_pred += f;
      const double r = (y - f) / sigma;
      lps[k] = log_norm - 0.5 * r * r;
      max_lp = std::max(max_lp, lps[k]);
    }
    mean_pred /= s;
    pm.mse += (mean_pred - y) * (mean_pred - y);
    double mix = 0.0;
    for (int k = 0; k < s; ++k) mix += std::exp(lps[k] - max_lp);
    pm.nll -= max_lp + std::log(mix / s);
  }
  pm.mse /= test.n();
  pm.nll /= test.n();
  return pm;
}

EvaluationReport summarize(const std::string& metric_name, const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("summarize: need at least one run");
  EvaluationReport rep;
  rep.metric_name = metric_name;
  rep.n_runs = static_cast<int>(runs.size());
  double mean = 0.0, nfev = 0.0, wall = 0.0;
  for (const auto& r : runs) {
    mean += r.value;
    nfev += r.mean_nfev;
    wall += r.wall_time_s;
    rep.n_failed += r.n_failed;
  }
  mean /= rep.n_runs;
  double var = 0.0;
  for (const auto& r : runs) var += (r.value - mean) * (r.value - mean);
  rep.value_mean = mean;
  rep.value_std = std::sqrt(var / rep.n_runs);  // population convention
  rep.mean_nfev = nfev / rep.n_runs;
  rep.wall_time_s = wall;
  return rep;
}

std::string format_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "[%.3f, %.3f]", mean, std);
  return buf;
}

}  // namespace riemlap
