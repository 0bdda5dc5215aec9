#include "yflow/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yflow/errors.hpp"

namespace yflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// C^2 quintic smoothstep on [0, 1].
double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Index-space Euclidean distance from every point to the nearest omega
// point, exact up to `reach` cells and +inf beyond.
std::vector<double> distance_to(const SubdomainMask& omega, int reach) {
  const GridSpec& g = omega.grid();
  const int dim = g.dim();
  std::vector<std::vector<int>> offsets;
  std::vector<int> o(dim, -reach);
  while (true) {
    offsets.push_back(o);
    int a = dim - 1;
    while (a >= 0 && o[a] == reach) o[a--] = -reach;
    if (a < 0) break;
    ++o[a];
  }
  std::vector<double> dist(g.size(), kInf);
  std::vector<int> m(dim);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (omega.contains(i)) {
      dist[i] = 0.0;
      continue;
    }
    const auto base = g.multi_index(i);
    double best = kInf;
    for (const auto& off : offsets) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        m[a] = base[a] + off[a];
        d2 += static_cast<double>(off[a]) * off[a];
      }
      if (d2 >= best) continue;
      if (omega.contains(g.flat_index(m))) best = d2;
    }
    dist[i] = std::sqrt(best);
  }
  return dist;
}

struct OmegaStats {
  double sup_f = -kInf;
  double max_f_out = -kInf;
  double inf_absf_out = kInf;
};

OmegaStats omega_stats(const Background& bg, const SubdomainMask& omega) {
  OmegaStats s;
  const auto f = bg.f().values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (omega.contains(i)) {
      s.sup_f = std::max(s.sup_f, f[i]);
    } else {
      s.max_f_out = std::max(s.max_f_out, f[i]);
      s.inf_absf_out = std::min(s.inf_absf_out, std::abs(f[i]));
    }
  }
  return s;
}

bool h2_inequality(double sup_f, double c_omega, double inf_absf) {
  if (sup_f <= 0.0) return true;
  return sup_f <= c_omega * inf_absf;
}

}  // namespace

SubdomainMask superlevel_mask(const Background& bg, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("superlevel_mask requires eps > 0");
  const auto f = bg.f().values();
  const double step = 2e-12 * std::max(1.0, std::abs(eps));
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const bool clash = std::any_of(f.begin(), f.end(), [&](double v) { return std::abs(v + eps) <= 1e-12; });
    if (!clash) break;
    eps += step;
  }
  std::vector<std::uint8_t> inside(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) inside[i] = f[i] > -eps ? 1 : 0;
  return SubdomainMask(bg.grid_ptr(), std::move(inside));
}

HypothesisReport check_h1(const Background& bg, const SubdomainMask& omega, double eigen_tol) {
  require_same_grid(bg.grid(), omega.grid());
  const auto eig = dirichlet_eigen(bg, omega, eigen_tol);
  const auto s = omega_stats(bg, omega);
  HypothesisReport r{omega};
  r.lambda_omega = eig.lambda;
  r.sup_f_omega = s.sup_f;
  r.inf_absf_complement = s.inf_absf_out;
  r.max_f_complement = s.max_f_out;
  r.h1_holds = eig.lambda > 0.0 && s.max_f_out < 0.0;
  r.c_omega = std::numeric_limits<double>::quiet_NaN();
  return r;
}

SupersolutionConstruction build_construction(const Background& bg, const SubdomainMask& omega,
                                             const SupersolutionOptions& options) {
  require_same_grid(bg.grid(), omega.grid());
  if (options.dilation < 1 || options.band < 1)
    throw InvalidArgument("supersolution dilation and band must be at least 1");
  if (options.band > options.dilation)
    throw InvalidArgument("supersolution band must not exceed the dilation (chi must vanish outside D)");

  const GridPtr& grid = bg.grid_ptr();
  const std::size_t n = grid->size();

  if (omega.is_empty()) {
    // chi = 0 and ubar is a constant multiple of 1.
    auto eig = dirichlet_eigen(bg, omega, options.eigen_tol);
    auto base = ScalarField::constant(grid, 1.0);
    const auto L1 = conformal_op(bg, base);
    double m1 = 0.0;
    for (double v : L1.values()) m1 = std::max(m1, std::abs(v));
    return SupersolutionConstruction{omega, std::move(eig), ScalarField::constant(grid, 0.0), std::move(base),
                                     1.0, m1, kInf};
  }

  SubdomainMask D = dilate(omega, options.dilation);
  auto eig = dirichlet_eigen(bg, D, options.eigen_tol);
  if (!(eig.lambda > 0.0))
    throw Error("first eigenvalue on the enlarged set D is not positive (lambda_D = " +
                std::to_string(eig.lambda) + "); reduce the dilation");

  // chi = 1 on omega and its face neighbors, so L(base) = lambda_D phi on omega.
  const auto dist = distance_to(omega, options.band + 1);
  std::vector<double> chi(n), base(n);
  const auto phi = eig.phi.values();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = dist[i];
    chi[i] = d <= 1.0 ? 1.0 : 1.0 - smoothstep((d - 1.0) / options.band);
    base[i] = chi[i] * phi[i] + 1.0 - chi[i];
  }
  ScalarField chi_f(grid, std::move(chi));
  ScalarField base_f(grid, std::move(base));

  const auto Lb = conformal_op(bg, base_f);
  double m1 = 0.0;
  for (double v : Lb.values()) m1 = std::max(m1, std::abs(v));
  const double m0 = base_f.min();
  const double lambda_D = eig.lambda;
  return SupersolutionConstruction{std::move(D), std::move(eig), std::move(chi_f), std::move(base_f), m0, m1,
                                   lambda_D};
}

HypothesisReport check_hypotheses(const Background& bg, const SubdomainMask& omega,
                                  const SupersolutionOptions& options) {
  auto report = check_h1(bg, omega, options.eigen_tol);
  if (!report.h1_holds) return report;
  const auto c = build_construction(bg, omega, options);
  report.c_omega = c.lambda_D * std::pow(c.m0, bg.N()) / c.m1;
  report.h2_holds = h2_inequality(report.sup_f_omega, report.c_omega, report.inf_absf_complement);
  report.h2_evaluated = true;
  return report;
}

SupersolutionCertificate build_supersolution(const Background& bg, const SubdomainMask& omega, int dilation,
                                             int band) {
  SupersolutionOptions opt;
  opt.dilation = dilation;
  opt.band = band;
  return build_supersolution(bg, omega, opt);
}

SupersolutionCertificate build_supersolution(const Background& bg, const SubdomainMask& omega,
                                             const SupersolutionOptions& options) {
  const auto h1 = check_h1(bg, omega, options.eigen_tol);
  if (!h1.h1_holds)
    throw InvalidArgument("build_supersolution requires H1 (lambda_Omega > 0 and f < 0 off Omega)");

  const auto c = build_construction(bg, omega, options);
  const double N = bg.N();
  const double sup_f = h1.sup_f_omega;
  const double inf_abs = h1.inf_absf_complement;

  const double delta_lo =
      std::isinf(inf_abs) ? 0.0 : std::pow(c.m1 * std::pow(c.m0, -N) / inf_abs, 1.0 / (N - 1.0));
  const double delta_hi = sup_f > 0.0 ? std::pow(c.lambda_D / sup_f, 1.0 / (N - 1.0)) : kInf;
  const double c_omega = c.lambda_D * std::pow(c.m0, N) / c.m1;
  if (delta_lo > delta_hi) throw H2Violated(delta_lo, delta_hi, c_omega);

  double delta;
  if (std::isinf(delta_hi))
    delta = delta_lo > 0.0 ? 2.0 * delta_lo : 1.0;
  else if (delta_lo > 0.0)
    delta = std::sqrt(delta_lo * delta_hi);
  else
    delta = 0.5 * delta_hi;

  std::vector<double> ubar(c.base.size());
  for (std::size_t i = 0; i < ubar.size(); ++i) ubar[i] = delta * c.base[i];
  ScalarField ubar_f(bg.grid_ptr(), std::move(ubar));
  const double min_L = verify_supersolution(bg, ubar_f);
  if (min_L < -options.verify_tol)
    throw Error("supersolution failed pointwise verification: min L(ubar) = " + std::to_string(min_L));

  return SupersolutionCertificate{std::move(ubar_f), delta,  c.m0,   c.m1,  c.lambda_D, min_L,
                                  delta_lo,          delta_hi, c_omega, sup_f, inf_abs};
}

double verify_supersolution(const Background& bg, const ScalarField& ubar) {
  require_same_grid(bg.grid(), ubar.grid());
  require_positive(ubar.values());
  std::vector<double> L(ubar.size());
  detail::conformal_op(bg, ubar.values(), L);
  const auto f = bg.f().values();
  double worst = kInf;
  for (std::size_t i = 0; i < L.size(); ++i)
    worst = std::min(worst, L[i] - f[i] * std::pow(ubar[i], bg.N()));
  return worst;
}

}  // namespace yflow
