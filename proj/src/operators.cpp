#include "yflow/operators.hpp"

#include <algorithm>
#include <cmath>

#include "yflow/errors.hpp"
#include "yflow/parallel.hpp"

namespace yflow {

Background::Background(ScalarField R0, ScalarField f) : R0_(std::move(R0)), f_(std::move(f)) {
  require_same_grid(R0_.grid(), f_.grid());
  const double r0max = R0_.max();
  if (!(r0max < 0.0)) throw InvalidArgument("background curvature R0 must be negative everywhere (max R0 = " +
                                            std::to_string(r0max) + ")");
  n_ = R0_.grid().dim();
  c_n_ = 4.0 * (n_ - 1) / (n_ - 2);
  N_ = static_cast<double>(n_ + 2) / (n_ - 2);
}

void require_positive(std::span<const double> u) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0)) throw PositivityViolation(i, u[i]);
}

namespace detail {

void laplacian(const GridSpec& grid, std::span<const double> w, std::span<double> out) {
  const int dim = grid.dim();
  const auto ih2 = grid.inv_spacing_sq();
  parallel_for(grid.size(), [&](std::size_t j) {
    const double wj = w[j];
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double up = w[grid.neighbor(j, a, +1)] - wj;
      const double dn = wj - w[grid.neighbor(j, a, -1)];
      acc += (up - dn) * ih2[a];
    }
    out[j] = acc;
  });
}

void conformal_op(const Background& bg, std::span<const double> w, std::span<double> out) {
  laplacian(bg.grid(), w, out);
  const double c = bg.c_n();
  const auto r0 = bg.R0().values();
  parallel_for(w.size(), [&](std::size_t j) { out[j] = -c * out[j] + r0[j] * w[j]; });
}

void laplacian_g(const Background& bg, std::span<const double> u, std::span<const double> w,
                 std::span<double> out) {
  const GridSpec& grid = bg.grid();
  const int dim = grid.dim();
  const auto ih2 = grid.inv_spacing_sq();
  const double q = -bg.volume_exponent();
  parallel_for(grid.size(), [&](std::size_t j) {
    const double wj = w[j];
    const double uj = u[j];
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t jp = grid.neighbor(j, a, +1);
      const std::size_t jm = grid.neighbor(j, a, -1);
      const double up = (uj * u[jp]) * (w[jp] - wj);
      const double dn = (uj * u[jm]) * (wj - w[jm]);
      acc += (up - dn) * ih2[a];
    }
    out[j] = std::pow(uj, q) * acc;
  });
}

void curvature_defect(const Background& bg, std::span<const double> u, std::span<double> out) {
  conformal_op(bg, u, out);
  const double N = bg.N();
  const auto f = bg.f().values();
  parallel_for(u.size(), [&](std::size_t j) {
    const double uN = std::pow(u[j], N);
    out[j] = (out[j] - f[j] * uN) / uN;
  });
}

void scalar_curvature(const Background& bg, std::span<const double> u, std::span<double> out) {
  conformal_op(bg, u, out);
  const double N = bg.N();
  parallel_for(u.size(), [&](std::size_t j) { out[j] = out[j] / std::pow(u[j], N); });
}

double energy(const Background& bg, std::span<const double> u) {
  const GridSpec& grid = bg.grid();
  const int dim = grid.dim();
  const auto ih2 = grid.inv_spacing_sq();
  const auto r0 = bg.R0().values();
  const auto f = bg.f().values();
  const double c = bg.c_n();
  const double q = bg.volume_exponent();
  const double kf = (bg.n() - 2.0) / bg.n();
  KahanSum sum;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double grad2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = u[grid.neighbor(j, a, +1)] - u[j];
      grad2 += d * d * ih2[a];
    }
    sum.add(c * grad2 + r0[j] * u[j] * u[j] - kf * f[j] * std::pow(u[j], q));
  }
  return sum.value() * grid.cell_volume();
}

double weighted_dirichlet(const Background& bg, std::span<const double> u, std::span<const double> g) {
  const GridSpec& grid = bg.grid();
  const int dim = grid.dim();
  const auto ih2 = grid.inv_spacing_sq();
  KahanSum sum;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t jp = grid.neighbor(j, a, +1);
      const double d = g[jp] - g[j];
      acc += (u[j] * u[jp]) * d * d * ih2[a];
    }
    sum.add(acc);
  }
  return sum.value() * grid.cell_volume();
}

}  // namespace detail

ScalarField laplacian(const ScalarField& w) {
  std::vector<double> out(w.size());
  detail::laplacian(w.grid(), w.values(), out);
  return ScalarField(w.grid_ptr(), std::move(out));
}

ScalarField conformal_op(const Background& bg, const ScalarField& w) {
  require_same_grid(bg.grid(), w.grid());
  std::vector<double> out(w.size());
  detail::conformal_op(bg, w.values(), out);
  return ScalarField(w.grid_ptr(), std::move(out));
}

ScalarField scalar_curvature(const Background& bg, const ScalarField& u) {
  require_same_grid(bg.grid(), u.grid());
  require_positive(u.values());
  std::vector<double> out(u.size());
  detail::scalar_curvature(bg, u.values(), out);
  return ScalarField(u.grid_ptr(), std::move(out));
}

ScalarField laplacian_g(const Background& bg, const ScalarField& u, const ScalarField& w) {
  require_same_grid(bg.grid(), u.grid());
  require_same_grid(bg.grid(), w.grid());
  require_positive(u.values());
  std::vector<double> out(u.size());
  detail::laplacian_g(bg, u.values(), w.values(), out);
  return ScalarField(u.grid_ptr(), std::move(out));
}

double energy(const Background& bg, const ScalarField& u) {
  require_same_grid(bg.grid(), u.grid());
  require_positive(u.values());
  return detail::energy(bg, u.values());
}

double stationary_residual(const Background& bg, const ScalarField& u) {
  require_same_grid(bg.grid(), u.grid());
  require_positive(u.values());
  std::vector<double> Lu(u.size());
  detail::conformal_op(bg, u.values(), Lu);
  const auto f = bg.f().values();
  double worst = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    worst = std::max(worst, std::abs(Lu[j] - f[j] * std::pow(u[j], bg.N())));
  return worst;
}

double gradient_inner(const ScalarField& w1, const ScalarField& w2) {
  require_same_grid(w1.grid(), w2.grid());
  const GridSpec& grid = w1.grid();
  const auto ih2 = grid.inv_spacing_sq();
  KahanSum sum;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      const std::size_t jp = grid.neighbor(j, a, +1);
      acc += (w1[jp] - w1[j]) * (w2[jp] - w2[j]) * ih2[a];
    }
    sum.add(acc);
  }
  return sum.value() * grid.cell_volume();
}

}  // namespace yflow
