#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rankrate {

using Objective = std::function<double(std::span<const double>)>;

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
};

// Maximizes a univariate function on [lo, hi] by golden-section search.
GoldenResult golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                     double tol = 1e-10);

struct BoxOptions {
  double fd_step = 1e-6;
  double grad_tol = 1e-8;   // on the projected gradient, infinity norm
  double value_tol = 1e-14;  // relative change that counts as stalled
  int max_iter = 1000;
};

struct BoxResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Central finite-difference gradient; one-sided at a bound.
std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, std::span<const double> lower,
                                std::span<const double> upper, double step);

// Maximizes f over the box [lower, upper] with a projected BFGS ascent and
// finite-difference gradients. Never returns a point worse than the
// (clamped) start.
BoxResult maximize_box(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                       std::span<const double> upper, const BoxOptions& options = {});

}  // namespace rankrate
