#include "riemlap/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <vector>

namespace riemlap {

namespace {

struct Pair {
  Vec s, y;
  double rho;
};

// Strong-Wolfe line search (bracket + zoom). Returns the accepted step, or
// 0 on failure. On success x, f, g hold the new point.
double wolfe_search(const Objective& objective, Vec& x, double& f, Vec& g, const Vec& p,
                    const LbfgsOptions& opts) {
  const double f0 = f;
  const double d0 = g.dot(p);
  if (d0 >= 0.0) return 0.0;

  auto eval = [&](double alpha, Vec& xt, double& ft, Vec& gt) {
    xt = x + alpha * p;
    ft = objective(xt, gt);
  };

  double alpha_prev = 0.0, f_prev = f0, d_prev = d0;
  double alpha = 1.0;
  Vec xt = x, gt = g;
  double ft = f0;

  double lo = 0.0, hi = 0.0, f_lo = f0, d_lo = d0;
  bool bracketed = false;
  int evals = 0;

  for (; evals < opts.max_linesearch && !bracketed; ++evals) {
    eval(alpha, xt, ft, gt);
    const double dt = gt.dot(p);
    if (!std::isfinite(ft) || ft > f0 + opts.c1 * alpha * d0 || (evals > 0 && ft >= f_prev)) {
      lo = alpha_prev; hi = alpha; f_lo = f_prev; d_lo = d_prev;
      bracketed = true;
      break;
    }
    if (std::abs(dt) <= -opts.c2 * d0) {
      x = xt; f = ft; g = gt;
      return alpha;
    }
    if (dt >= 0.0) {
      lo = alpha; hi = alpha_prev; f_lo = ft; d_lo = dt;
      bracketed = true;
      break;
    }
    alpha_prev = alpha; f_prev = ft; d_prev = dt;
    alpha *= 2.0;
  }
  if (!bracketed) return 0.0;

  // zoom
  for (; evals < opts.max_linesearch; ++evals) {
    const double mid = 0.5 * (lo + hi);
    eval(mid, xt, ft, gt);
    const double dt = gt.dot(p);
    if (!std::isfinite(ft) || ft > f0 + opts.c1 * mid * d0 || ft >= f_lo) {
      hi = mid;
    } else {
      if (std::abs(dt) <= -opts.c2 * d0) {
        x = xt; f = ft; g = gt;
        return mid;
      }
      if (dt * (hi - lo) >= 0.0) hi = lo;
      lo = mid; f_lo = ft; d_lo = dt;
    }
    if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
  }
  // fall back to the best sufficient-decrease point seen, if any
  if (std::isfinite(f_lo) && f_lo < f0 && lo > 0.0) {
    eval(lo, xt, ft, gt);
    if (std::isfinite(ft) && ft < f0) {
      x = xt; f = ft; g = gt;
      return lo;
    }
  }
  return 0.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, const Vec& x0, const LbfgsOptions& opts) {
  LbfgsResult res;
  res.x = x0;
  Vec g(x0.size());
  res.f = objective(res.x, g);
  if (!std::isfinite(res.f)) return res;

  std::deque<Pair> mem;
  Vec q, p;

  for (res.iters = 0; res.iters < opts.max_iters; ++res.iters) {
    res.gnorm = g.lpNorm<Eigen::Infinity>();
    if (res.gnorm <= opts.gtol) {
      res.converged = true;
      return res;
    }

    // two-loop recursion
    q = g;
    std::vector<double> alphas(mem.size());
    for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
      alphas[i] = mem[i].rho * mem[i].s.dot(q);
      q -= alphas[i] * mem[i].y;
    }
    if (!mem.empty()) {
      const auto& last = mem.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (size_t i = 0; i < mem.size(); ++i) {
      const double beta = mem[i].rho * mem[i].y.dot(q);
      q += (alphas[i] - beta) * mem[i].s;
    }
    p = -q;
    if (p.dot(g) >= 0.0) {  // not a descent direction; restart
      mem.clear();
      p = -g;
    }

    Vec x_old = res.x, g_old = g;
    double f_old = res.f;
    const double step = wolfe_search(objective, res.x, res.f, g, p, opts);
    if (step == 0.0) {
      res.x = x_old; res.f = f_old; g = g_old;
      res.gnorm = g.lpNorm<Eigen::Infinity>();
      return res;  // line search failed; best point so far
    }

    Pair pr;
    pr.s = res.x - x_old;
    pr.y = g - g_old;
    const double sy = pr.s.dot(pr.y);
    if (sy > 1e-12 * pr.s.norm() * pr.y.norm()) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
    }
  }
  res.gnorm = g.lpNorm<Eigen::Infinity>();
  return res;
}

}  // namespace riemlap
