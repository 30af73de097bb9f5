#pragma once

// Reference computations written independently of the library: direct
// counting, lattice enumeration and closed forms typed in from scratch.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// mu_i = cell * #{j : v_j >= v_i}, double loop.
inline std::vector<double> superlevel(const std::vector<double>& v, double cell) {
  std::vector<double> mu(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t c = 0;
    for (double x : v) c += x >= v[i] ? 1 : 0;
    mu[i] = cell * static_cast<double>(c);
  }
  return mu;
}

// (1/eps) * integral over [top - eps, top] of cell * #{v_j >= t} dt
//   = (cell/eps) * sum_j |[top - eps, top] intersect (-inf, v_j]|
inline double window_average(const std::vector<double>& v, double cell, double top, double eps) {
  double s = 0.0;
  for (double x : v) s += std::clamp(x - (top - eps), 0.0, eps);
  return cell * s / eps;
}

// Lattice nodes c + h*k (integer k) strictly inside the sphere |x - c| < r.
inline std::size_t ball_nodes(double r, double h, int n) {
  const int m = static_cast<int>(std::ceil(r / h)) + 1;
  std::size_t count = 0;
  const int kz = n == 3 ? m : 0;
  const int ky = n >= 2 ? m : 0;
  for (int i = -m; i <= m; ++i) {
    for (int j = -ky; j <= ky; ++j) {
      for (int k = -kz; k <= kz; ++k) {
        const double d2 = (i * h) * (i * h) + (j * h) * (j * h) + (k * h) * (k * h);
        if (d2 < r * r) ++count;
      }
    }
  }
  return count;
}

inline std::size_t annulus_nodes(double r_in, double r_out, double h, int n) {
  const int m = static_cast<int>(std::ceil(r_out / h)) + 1;
  std::size_t count = 0;
  const int kz = n == 3 ? m : 0;
  const int ky = n >= 2 ? m : 0;
  for (int i = -m; i <= m; ++i) {
    for (int j = -ky; j <= ky; ++j) {
      for (int k = -kz; k <= kz; ++k) {
        const double d2 = (i * h) * (i * h) + (j * h) * (j * h) + (k * h) * (k * h);
        if (d2 < r_out * r_out && d2 > r_in * r_in) ++count;
      }
    }
  }
  return count;
}

// Unit-disk solution with r = 1: (pi/16)(1 - |x|^4).
inline double disk_solution(double x, double y) {
  const double s2 = x * x + y * y;
  return std::numbers::pi / 16.0 * (1.0 - s2 * s2);
}

// Interval (-1, 1): (1 - |x|^3) / 3.
inline double interval_solution(double x) { return (1.0 - std::abs(x) * std::abs(x) * std::abs(x)) / 3.0; }

// Values drawn from a small alphabet so that ties are common.
inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::vector<double> v(n);
  if (ties) {
    std::uniform_int_distribution<int> d(0, static_cast<int>(std::max<std::size_t>(2, n / 4)));
    for (double& x : v) x = 0.25 * d(rng) - 1.0;
  } else {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (double& x : v) x = d(rng);
  }
  return v;
}

}  // namespace oracle
