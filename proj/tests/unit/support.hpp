#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "yflow/grid.hpp"
#include "yflow/operators.hpp"

namespace testing {

using namespace yflow;

inline GridPtr cube(int size, double length, int n = 3) {
  return GridSpec::make(std::vector<int>(n, size), std::vector<double>(n, length));
}

inline ScalarField constant(const GridPtr& g, double v) { return ScalarField::constant(g, v); }

/// Uniform values in [lo, hi], reproducible from the seed.
inline ScalarField random_field(const GridPtr& g, double lo, double hi, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(g->size());
  for (auto& x : v) x = d(gen);
  return ScalarField(g, std::move(v));
}

/// Smooth positive field built from a few periodic modes.
inline ScalarField smooth_field(const GridPtr& g, double base, double amp, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  const int n = g->dim();
  std::vector<double> ph(3 * n);
  for (auto& p : ph) p = phase(gen);
  return ScalarField::from_function(g, [&](std::span<const double> x) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      const double k = 6.283185307179586 / g->lengths()[a];
      s += std::sin(k * x[a] + ph[a]) + 0.5 * std::cos(2 * k * x[a] + ph[n + a]);
    }
    return base + amp * s / n;
  });
}

/// Periodic index arithmetic independent of the grid's neighbor tables.
inline std::size_t shifted(const GridSpec& g, std::size_t i, int axis, int d) {
  auto m = g.multi_index(i);
  const int s = g.sizes()[axis];
  m[axis] = ((m[axis] + d) % s + s) % s;
  std::size_t flat = 0;
  for (int a = 0; a < g.dim(); ++a) flat = flat * g.sizes()[a] + m[a];
  return flat;
}

/// Dense matrix of the periodic 2n-point Laplacian, row-major.
inline std::vector<double> dense_laplacian(const GridSpec& g) {
  const std::size_t m = g.size();
  std::vector<double> A(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (int a = 0; a < g.dim(); ++a) {
      const double c = 1.0 / (g.spacings()[a] * g.spacings()[a]);
      A[i * m + shifted(g, i, a, +1)] += c;
      A[i * m + shifted(g, i, a, -1)] += c;
      A[i * m + i] -= 2.0 * c;
    }
  return A;
}

inline std::vector<double> matvec(const std::vector<double>& A, std::span<const double> x) {
  const std::size_t m = x.size();
  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) y[i] += A[i * m + j] * x[j];
  return y;
}

/// Owning copy, safe to iterate when the field is a temporary.
inline std::vector<double> values_of(const ScalarField& f) { return {f.values().begin(), f.values().end()}; }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs(std::span<const double> a) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(x));
  return d;
}

/// Closed-form spatially constant solution: v = u^{N-1} obeys v' = -R0 + f v.
inline double constant_solution(double n, double R0, double f, double u0, double t) {
  const double N = (n + 2) / (n - 2);
  const double v0 = std::pow(u0, N - 1);
  const double v = f != 0.0 ? (v0 - R0 / f) * std::exp(f * t) + R0 / f : v0 - R0 * t;
  return std::pow(v, 1.0 / (N - 1));
}

}  // namespace testing
