#pragma once

#include <functional>

#include "riemlap/types.hpp"

namespace riemlap {

/// Objective: fills grad and returns the function value.
using Objective = std::function<double(const Vec& x, Vec& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iters = 1000000;
  double gtol = 1e-9;         // sup-norm of the gradient
  double c1 = 1e-4;           // sufficient decrease
  double c2 = 0.9;            // curvature (strong Wolfe)
  int max_linesearch = 50;
};

struct LbfgsResult {
  Vec x;
  double f = 0.0;
  double gnorm = 0.0;
  int iters = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a strong-Wolfe line search. Returns the best
/// point found even when the line search stalls.
LbfgsResult lbfgs_minimize(const Objective& objective, const Vec& x0,
                           const LbfgsOptions& opts = {});

}  // namespace riemlap
