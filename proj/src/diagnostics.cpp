#include "yflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace yflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double window_dt(const Background& bg, const FlowState& s0, const FlowState& s1, const FlowState& s2) {
  for (const FlowState* s : {&s0, &s1, &s2}) {
    require_same_grid(bg.grid(), s->u.grid());
    require_positive(s->u.values());
  }
  const double a = s1.t - s0.t;
  const double b = s2.t - s1.t;
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("window states must have increasing times");
  if (std::abs(a - b) > 1e-9 * std::max(a, b))
    throw InvalidArgument("window states must be equally spaced in time");
  return 0.5 * (a + b);
}

double relative(double diff, double scale) {
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : kInf;
}

std::vector<double> defect(const Background& bg, const ScalarField& u) {
  std::vector<double> w(u.size());
  detail::curvature_defect(bg, u.values(), w);
  return w;
}

std::size_t order_index(const Trajectory& traj, double p) {
  for (std::size_t k = 0; k < traj.lp_orders.size(); ++k)
    if (std::abs(traj.lp_orders[k] - p) <= 1e-12 * std::max(1.0, p)) return k;
  throw InvalidArgument("order p = " + std::to_string(p) + " was not recorded in this trajectory");
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double dissipation_identity_error(const Trajectory& traj) {
  if (traj.records.size() < 10) throw InvalidArgument("dissipation identity needs at least 10 records");
  const auto& first = traj.records.front();
  const auto& last = traj.records.back();
  const double drop = first.energy - last.energy;
  const double predicted = 0.5 * (traj.dimension - 2) * (last.dissipation_cum - first.dissipation_cum);
  const double diff = std::abs(drop - predicted);
  if (diff == 0.0) return 0.0;
  return diff / (std::abs(drop) + std::numeric_limits<double>::epsilon());
}

double curvature_evolution_error(const Background& bg, const FlowState& s0, const FlowState& s1,
                                 const FlowState& s2) {
  const double dt = window_dt(bg, s0, s1, s2);
  const std::size_t m = s1.u.size();
  std::vector<double> r0(m), r1(m), r2(m), lap(m);
  detail::scalar_curvature(bg, s0.u.values(), r0);
  detail::scalar_curvature(bg, s1.u.values(), r1);
  detail::scalar_curvature(bg, s2.u.values(), r2);
  const auto w = defect(bg, s1.u);
  detail::laplacian_g(bg, s1.u.values(), w, lap);
  const double n1 = bg.n() - 1.0;
  KahanSum diff2, ref2;
  for (std::size_t j = 0; j < m; ++j) {
    const double lhs = (r2[j] - r0[j]) / (2.0 * dt);
    const double rhs = n1 * lap[j] + r1[j] * w[j];
    diff2.add((lhs - rhs) * (lhs - rhs));
    ref2.add(rhs * rhs);
  }
  return relative(std::sqrt(diff2.value()), std::sqrt(ref2.value()));
}

LpIdentityTerms lp_identity_terms(const Background& bg, const FlowState& s0, const FlowState& s1,
                                  const FlowState& s2, double p) {
  if (!(p > 1.0)) throw InvalidArgument("the L^p identity needs p > 1");
  const double dt = window_dt(bg, s0, s1, s2);
  const auto w0 = defect(bg, s0.u);
  const auto w1 = defect(bg, s1.u);
  const auto w2 = defect(bg, s2.u);
  if (p < 2.0) {
    double lo = kInf, hi = 0.0;
    for (double x : w1) {
      lo = std::min(lo, std::abs(x));
      hi = std::max(hi, std::abs(x));
    }
    if (lo <= 1e-8 * hi) throw InvalidArgument("p < 2 needs R_g - f bounded away from zero");
  }

  const int n = bg.n();
  const auto u = s1.u.values();
  const auto f = bg.f().values();
  const double q = bg.volume_exponent();
  const double dV = bg.grid().cell_volume();

  LpIdentityTerms t;
  t.lhs = (defect_integral(bg, s2.u.values(), w2, p) - defect_integral(bg, s0.u.values(), w0, p)) / (2.0 * dt);

  std::vector<double> g(w1.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = std::pow(std::abs(w1[j]), 0.5 * p);
  t.gradient = -(4.0 * (n - 1) * (p - 1.0) / p) * detail::weighted_dirichlet(bg, u, g);

  KahanSum cubic, forcing;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double a = std::abs(w1[j]);
    const double ap = std::pow(a, p) * std::pow(u[j], q);
    cubic.add(w1[j] * ap);
    forcing.add(f[j] * ap);
  }
  t.cubic = (p - 0.5 * n) * cubic.value() * dV;
  t.forcing = p * forcing.value() * dV;
  return t;
}

double lp_identity_error(const Background& bg, const FlowState& s0, const FlowState& s1, const FlowState& s2,
                     double p) {
  const auto t = lp_identity_terms(bg, s0, s1, s2, p);
  const double rhs = t.rhs();
  return relative(std::abs(t.lhs - rhs), std::abs(rhs));
}

EnvelopeReport envelope_check(const Background& bg, const Trajectory& traj,
                              const SupersolutionCertificate* certificate, double tol) {
  EnvelopeReport rep;
  const int n = bg.n();
  const double k = 0.25 * (n - 2);
  double r0_min_abs = kInf, r0_max_abs = 0.0, f_max_abs = 0.0;
  for (double r : bg.R0().values()) {
    r0_min_abs = std::min(r0_min_abs, std::abs(r));
    r0_max_abs = std::max(r0_max_abs, std::abs(r));
  }
  for (double x : bg.f().values()) f_max_abs = std::max(f_max_abs, std::abs(x));

  rep.C1 = k * (r0_max_abs + f_max_abs);
  rep.lower_applicable = f_max_abs > 0.0;
  rep.C0 = rep.lower_applicable ? std::pow(r0_min_abs / f_max_abs, k) : kInf;
  if (traj.records.empty()) return rep;

  const double u0_min = traj.records.front().min_u;
  const double u0_max = traj.records.front().max_u;
  rep.lower_bound = rep.lower_applicable ? std::min(rep.C0, u0_min) : 0.0;
  if (certificate) {
    rep.trap_checked = true;
    rep.trap_bound = certificate->ubar.max();
  }
  const double base = std::max(1.0, u0_max);

  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    if (rep.lower_applicable ? r.min_u < rep.lower_bound - tol : !(r.min_u > 0.0))
      rep.violations.push_back({i, r.t, "lower", r.min_u, rep.lower_bound});
    const double upper = base * std::exp(rep.C1 * r.t);
    if (r.max_u > upper + tol) rep.violations.push_back({i, r.t, "upper", r.max_u, upper});
    if (rep.trap_checked && r.max_u > rep.trap_bound + tol)
      rep.violations.push_back({i, r.t, "trap", r.max_u, rep.trap_bound});
  }

  const double p = static_cast<double>(n) * n / (2.0 * (n - 2));
  for (std::size_t k2 = 0; k2 < traj.lp_orders.size(); ++k2) {
    if (std::abs(traj.lp_orders[k2] - p) > 1e-12 * p) continue;
    std::vector<double> x, y;
    for (const auto& r : traj.records)
      if (r.residual_lp[k2] > 0.0 && std::isfinite(r.residual_lp[k2])) {
        x.push_back(r.t);
        y.push_back(std::log(r.residual_lp[k2]));
      }
    rep.lp_points = x.size();
    if (x.size() >= 2) {
      const auto fit = least_squares(x, y);
      rep.lp_log_slope = fit.slope;
      rep.lp_log_intercept = fit.intercept;
    }
  }
  return rep;
}

bool DecayReport::ok() const {
  if (!applicable) return false;
  return std::all_of(orders.begin(), orders.end(),
                     [](const DecayOrder& o) { return o.below_threshold && o.eventually_decreasing; });
}

DecayReport decay_check(const Trajectory& traj, const std::vector<double>& orders, double threshold) {
  DecayReport rep;
  rep.threshold = threshold;
  if (traj.outcome == Outcome::BlowUp) {
    rep.applicable = false;
    return rep;
  }
  if (traj.records.empty()) throw InvalidArgument("decay check needs at least one record");
  const auto& use = orders.empty() ? traj.lp_orders : orders;
  const std::size_t m = traj.records.size();
  const std::size_t start = (3 * m) / 4;
  for (double p : use) {
    const std::size_t k = order_index(traj, p);
    DecayOrder o;
    o.p = p;
    o.final_value = traj.records.back().residual_lp[k];
    o.below_threshold = o.final_value <= threshold;
    o.eventually_decreasing = true;
    for (std::size_t i = start; i + 1 < m; ++i)
      if (traj.records[i + 1].residual_lp[k] > 1.05 * traj.records[i].residual_lp[k]) o.eventually_decreasing = false;
    rep.orders.push_back(o);
  }
  return rep;
}

GrowthFit growth_fit(const std::vector<double>& t, const std::vector<double>& max_u) {
  if (t.size() != max_u.size()) throw InvalidArgument("time and amplitude samples differ in length");
  if (t.empty()) throw InvalidArgument("growth fit needs samples");
  const double t_end = t.back();
  const double t_begin = t_end / 10.0;
  if (!(t_end > 0.0) || t.front() > t_begin)
    throw InvalidArgument("growth fit needs samples spanning a full decade of t");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_begin && t[i] > 0.0) {
      x.push_back(std::log(t[i]));
      y.push_back(std::log(max_u[i]));
    }
  if (x.size() < 3) throw InvalidArgument("growth fit needs at least 3 samples in the last decade");
  const auto fit = least_squares(x, y);
  return GrowthFit{fit.slope, fit.intercept, fit.r_squared, t_begin, t_end, x.size()};
}

GrowthFit growth_fit(const Trajectory& traj) {
  if (traj.outcome != Outcome::BlowUp) throw InvalidArgument("growth fit needs a blow-up trajectory");
  std::vector<double> t, a;
  for (const auto& r : traj.records) {
    t.push_back(r.t);
    a.push_back(r.max_u);
  }
  return growth_fit(t, a);
}

double weighted_mass(const Background& bg, const ScalarField& u, const ScalarField& phi, const SubdomainMask& mask) {
  require_same_grid(bg.grid(), u.grid());
  require_same_grid(bg.grid(), phi.grid());
  require_same_grid(bg.grid(), mask.grid());
  require_positive(u.values());
  const double N = bg.N();
  KahanSum mass, weighted;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!mask.contains(j)) continue;
    mass.add(phi[j]);
    weighted.add(std::pow(u[j], N) * phi[j]);
  }
  if (!(mass.value() > 0.0)) throw InvalidArgument("phi has no positive mass on the mask");
  return weighted.value() / mass.value();
}

}  // namespace yflow
