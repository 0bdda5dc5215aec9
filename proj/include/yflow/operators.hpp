#pragma once

#include <span>
#include <vector>

#include "yflow/grid.hpp"

namespace yflow {

/// Background data of the prescribed-curvature problem on the torus: the
/// (negative) background scalar curvature R0, the target curvature f, and the
/// dimensional constants c_n = 4(n-1)/(n-2) and N = (n+2)/(n-2).
class Background {
 public:
  Background(ScalarField R0, ScalarField f);

  const GridSpec& grid() const noexcept { return R0_.grid(); }
  const GridPtr& grid_ptr() const noexcept { return R0_.grid_ptr(); }
  const ScalarField& R0() const noexcept { return R0_; }
  const ScalarField& f() const noexcept { return f_; }
  int n() const noexcept { return n_; }
  double c_n() const noexcept { return c_n_; }
  /// Critical exponent (n+2)/(n-2).
  double N() const noexcept { return N_; }
  /// Exponent of the volume density, 2n/(n-2) = N + 1.
  double volume_exponent() const noexcept { return N_ + 1.0; }
  /// (n-2)/4, the speed factor of the flow in conformal-factor form.
  double flow_factor() const noexcept { return 0.25 * (n_ - 2); }

  /// Same background with f replaced.
  Background with_f(ScalarField f) const { return Background(R0_, std::move(f)); }

 private:
  ScalarField R0_;
  ScalarField f_;
  int n_;
  double c_n_;
  double N_;
};

/// Periodic second-order Laplacian of g0.
ScalarField laplacian(const ScalarField& w);
/// Conformal Laplacian L w = -c_n Lap w + R0 w.
ScalarField conformal_op(const Background& bg, const ScalarField& w);
/// R_g = u^{-N} L u for g = u^{4/(n-2)} g0.
ScalarField scalar_curvature(const Background& bg, const ScalarField& u);
/// Laplacian of g = u^{4/(n-2)} g0 in divergence form, u^{-2n/(n-2)} div(u^2 grad w).
ScalarField laplacian_g(const Background& bg, const ScalarField& u, const ScalarField& w);
/// E(u) = int (c_n |grad u|^2 + R0 u^2 - ((n-2)/n) f u^{2n/(n-2)}) dV0.
double energy(const Background& bg, const ScalarField& u);
/// max |L u - f u^N|.
double stationary_residual(const Background& bg, const ScalarField& u);
/// Matched discrete Dirichlet form, int grad w1 . grad w2 dV0 with forward differences.
double gradient_inner(const ScalarField& w1, const ScalarField& w2);

/// Throws PositivityViolation naming the first non-positive point.
void require_positive(std::span<const double> u);

namespace detail {

// Raw-span kernels shared by the flow and the diagnostics. Outputs are
// overwritten; inputs are assumed to be on `grid`.
void laplacian(const GridSpec& grid, std::span<const double> w, std::span<double> out);
void conformal_op(const Background& bg, std::span<const double> w, std::span<double> out);
/// Face coefficient u_j u_{j+e}: the geometric mean of u^2 across each face.
void laplacian_g(const Background& bg, std::span<const double> u, std::span<const double> w,
                 std::span<double> out);
/// R_g - f, evaluated as u^{-N} (L u - f u^N) so that it vanishes exactly at stationary points.
void curvature_defect(const Background& bg, std::span<const double> u, std::span<double> out);
void scalar_curvature(const Background& bg, std::span<const double> u, std::span<double> out);
double energy(const Background& bg, std::span<const double> u);
/// sum over faces of a_face (g_{j+e} - g_j)^2 / h^2 * dV0 with a_face = u_j u_{j+e}.
double weighted_dirichlet(const Background& bg, std::span<const double> u, std::span<const double> g);

}  // namespace detail
}  // namespace yflow
