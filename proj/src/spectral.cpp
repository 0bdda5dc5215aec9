#include "yflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yflow/errors.hpp"

namespace yflow {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

// (L - mu) restricted to the mask; vectors are full-grid with zeros outside.
class MaskedOperator {
 public:
  MaskedOperator(const Background& bg, const SubdomainMask& mask, double mu)
      : bg_(bg), inside_(mask.inside()), mu_(mu) {}

  void apply(std::span<const double> x, std::span<double> y) const {
    detail::conformal_op(bg_, x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = inside_[i] ? y[i] - mu_ * x[i] : 0.0;
  }

 private:
  const Background& bg_;
  std::span<const std::uint8_t> inside_;
  double mu_;
};

// Plain CG; returns the number of iterations used.
int conjugate_gradient(const MaskedOperator& A, std::span<const double> b, std::span<double> x,
                       double rel_tol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), Ap(n);
  A.apply(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }
  double rr = dot(r, r);
  p = r;
  int it = 0;
  while (it < max_iter && std::sqrt(rr) > rel_tol * bnorm) {
    A.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rr / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++it;
  }
  return it;
}

}  // namespace

EigenResult dirichlet_eigen(const Background& bg, const SubdomainMask& mask, double tol) {
  EigenOptions opt;
  opt.tol = tol;
  return dirichlet_eigen(bg, mask, opt);
}

EigenResult dirichlet_eigen(const Background& bg, const SubdomainMask& mask, const EigenOptions& options) {
  require_same_grid(bg.grid(), mask.grid());
  if (!(options.tol > 0.0)) throw InvalidArgument("eigen tolerance must be positive");

  const std::size_t n = mask.size();
  if (mask.is_empty()) {
    EigenResult res{std::numeric_limits<double>::infinity(), ScalarField::constant(mask.grid_ptr(), 0.0),
                    0.0, 0, true};
    return res;
  }

  const auto inside = mask.inside();
  const auto r0 = bg.R0().values();
  double r0min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (inside[i]) r0min = std::min(r0min, r0[i]);
  const double mu = r0min - 1.0;

  const MaskedOperator shifted(bg, mask, mu);
  const MaskedOperator plain(bg, mask, 0.0);

  std::vector<double> x(n, 0.0), y(n, 0.0), Ax(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = inside[i] ? 1.0 : 0.0;
  {
    const double s = 1.0 / std::sqrt(dot(x, x));
    for (auto& v : x) v *= s;
  }

  const int inner_cap = static_cast<int>(std::min<std::size_t>(20 * n + 100, 200000));
  double best = std::numeric_limits<double>::infinity();
  double theta = 0.0;
  double residual = 0.0;
  int it = 0;
  while (true) {
    // Inverse-iteration step with a warm start from the previous direction.
    plain.apply(x, Ax);
    theta = dot(x, Ax);
    const double scale = theta - mu > 0.0 ? 1.0 / (theta - mu) : 1.0;
    for (std::size_t i = 0; i < n; ++i) y[i] = scale * x[i];
    conjugate_gradient(shifted, x, y, options.inner_tol, inner_cap);
    const double ynorm = std::sqrt(dot(y, y));
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
    ++it;

    plain.apply(x, Ax);
    theta = dot(x, Ax);
    double xmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) xmax = std::max(xmax, std::abs(x[i]));
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (inside[i]) residual = std::max(residual, std::abs(Ax[i] - theta * x[i]));
    residual /= xmax;
    best = std::min(best, residual);
    if (residual <= options.tol) break;
    if (it >= options.max_iterations) throw EigenNonConvergence(best, it);
  }

  // The shifted inverse is entrywise nonnegative; clear round-off of either sign.
  double sign = 0.0;
  for (std::size_t i = 0; i < n; ++i) sign += x[i];
  double xmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = inside[i] ? std::max(0.0, sign < 0.0 ? -x[i] : x[i]) : 0.0;
    xmax = std::max(xmax, x[i]);
  }
  for (auto& v : x) v /= xmax;

  plain.apply(x, Ax);
  const double num = dot(x, Ax);
  const double den = dot(x, x);
  const double lambda = num / den;
  double final_residual = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (inside[i]) final_residual = std::max(final_residual, std::abs(Ax[i] - lambda * x[i]));

  return EigenResult{lambda, ScalarField(mask.grid_ptr(), std::move(x)), final_residual, it, false};
}

double rayleigh_quotient(const Background& bg, const ScalarField& w, const SubdomainMask& mask) {
  require_same_grid(bg.grid(), w.grid());
  require_same_grid(bg.grid(), mask.grid());
  bool nonzero = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!mask.contains(i) && w[i] != 0.0)
      throw InvalidArgument("rayleigh_quotient: field is nonzero outside the mask at index " + std::to_string(i));
    nonzero = nonzero || w[i] != 0.0;
  }
  if (!nonzero) throw InvalidArgument("rayleigh_quotient: zero field");
  const auto r0 = bg.R0().values();
  KahanSum pot, mass;
  for (std::size_t i = 0; i < w.size(); ++i) {
    pot.add(r0[i] * w[i] * w[i]);
    mass.add(w[i] * w[i]);
  }
  const double dv = bg.grid().cell_volume();
  return (bg.c_n() * gradient_inner(w, w) + pot.value() * dv) / (mass.value() * dv);
}

}  // namespace yflow
