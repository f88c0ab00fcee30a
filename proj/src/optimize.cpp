#include "rankrate/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rankrate {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GoldenResult golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                                     double tol) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b)) * 0.5) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  GoldenResult best{c, fc};
  if (fd > best.value) best = {d, fd};
  // The endpoints are candidates too: the maximum may sit on the bracket.
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, std::span<const double> lower,
                                std::span<const double> upper, double step) {
  const std::size_t n = x.size();
  std::vector<double> g(n), probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = std::min(x[i] + step, upper[i]);
    const double lo = std::max(x[i] - step, lower[i]);
    probe[i] = hi;
    const double f_hi = f(probe);
    probe[i] = lo;
    const double f_lo = f(probe);
    probe[i] = x[i];
    g[i] = (hi > lo) ? (f_hi - f_lo) / (hi - lo) : 0.0;
  }
  return g;
}

BoxResult maximize_box(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                       std::span<const double> upper, const BoxOptions& options) {
  const std::size_t n = x0.size();
  for (std::size_t i = 0; i < n; ++i) x0[i] = std::clamp(x0[i], lower[i], upper[i]);

  // Minimize g = -f.
  auto g = [&](std::span<const double> x) { return -f(x); };
  auto gradient = [&](std::span<const double> x) {
    auto grad = fd_gradient(f, x, lower, upper, options.fd_step);
    for (double& v : grad) v = -v;
    return grad;
  };

  BoxResult result;
  std::vector<double> x = std::move(x0);
  double fx = g(x);
  if (!std::isfinite(fx)) {
    result.x = x;
    result.value = -fx;
    return result;
  }
  std::vector<double> grad = gradient(x);
  std::vector<double> H(n * n, 0.0);
  auto reset = [&](double scale) {
    std::fill(H.begin(), H.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = scale;
  };
  reset(1.0);
  bool h_is_identity = true;
  std::vector<char> free_prev(n, 1), free(n, 1);
  int stalled = 0;

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    double pg_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool at_lower = x[i] <= lower[i] && grad[i] > 0.0;
      const bool at_upper = x[i] >= upper[i] && grad[i] < 0.0;
      free[i] = !(at_lower || at_upper);
      if (free[i]) pg_norm = std::max(pg_norm, std::abs(grad[i]));
    }
    if (pg_norm < options.grad_tol) {
      result.converged = true;
      break;
    }
    if (free != free_prev) {
      reset(1.0);
      h_is_identity = true;
      free_prev = free;
    }

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!free[i]) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (free[j]) s -= H[i * n + j] * grad[j];
      }
      d[i] = s;
    }
    if (dot(d, grad) >= 0.0) {
      reset(1.0);
      h_is_identity = true;
      for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -grad[i] : 0.0;
    }

    std::vector<double> xn(n);
    double fn = fx;
    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = std::clamp(x[i] + alpha * d[i], lower[i], upper[i]);
      fn = g(xn);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += grad[i] * (xn[i] - x[i]);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * decrease && fn <= fx) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (h_is_identity) break;  // no descent even along the gradient
      reset(1.0);
      h_is_identity = true;
      continue;
    }

    std::vector<double> gn = gradient(xn);
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - grad[i];
    }
    const double sy = dot(s, y);
    const double change = fx - fn;
    x = std::move(xn);
    grad = std::move(gn);
    fx = fn;

    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y)) && sy > 0.0) {
      if (h_is_identity) reset(sy / dot(y, y));
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      std::vector<double> Hy(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
      }
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) + (rho * rho * yHy + rho) * s[i] * s[j];
        }
      }
      h_is_identity = false;
    }

    if (change <= options.value_tol * (1.0 + std::abs(fx))) {
      if (++stalled >= 3) {
        result.converged = true;
        ++iter;
        break;
      }
    } else {
      stalled = 0;
    }
  }

  result.x = std::move(x);
  result.value = -fx;
  result.iterations = iter;
  return result;
}

}  // namespace rankrate
