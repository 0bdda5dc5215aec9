#include "doctest.h"
#include "support.hpp"

#include <array>

#include "yflow/diagnostics.hpp"
#include "yflow/errors.hpp"

using namespace testing;

namespace {

Background constant_bg(const GridPtr& g, double R0, double f) { return Background(constant(g, R0), constant(g, f)); }

FlowState exact_state(const GridPtr& g, double R0, double f, double u0, double t) {
  return FlowState{constant(g, constant_solution(3, R0, f, u0, t)), t, 0, 0.0};
}

// Smooth data whose defect R_g - f stays positive.
struct SmoothCase {
  GridPtr g;
  Background bg;
  ScalarField u0;
};

SmoothCase smooth_case(int size) {
  auto g = cube(size, 4.0);
  auto f = smooth_field(g, -1.0, 0.3, 51);
  auto R0 = constant(g, -1.0);
  return {g, Background(R0, f), smooth_field(g, 2.0, 0.2, 52)};
}

// Ordinary least squares on log-log samples.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = std::log(t[i]), v = std::log(y[i]);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("stationary states satisfy every identity trivially") {
  auto g = cube(6, 2.0);
  auto bg = constant_bg(g, -1, -1);
  FlowState s0{constant(g, 1.0), 0.0, 0, 0.0}, s1{constant(g, 1.0), 0.1, 1, 0.1}, s2{constant(g, 1.0), 0.2, 2, 0.1};
  CHECK(curvature_evolution_error(bg, s0, s1, s2) == 0.0);
  CHECK(lp_identity_error(bg, s0, s1, s2) == 0.0);

  Trajectory tr;
  for (int i = 0; i < 12; ++i) {
    DiagnosticsRecord r;
    r.t = 0.1 * i;
    r.energy = energy(bg, constant(g, 1.0));
    tr.records.push_back(r);
  }
  CHECK(dissipation_identity_error(tr) == 0.0);
}

TEST_CASE("constant-data identities against the closed form") {
  auto g = cube(4, 1.0);
  for (auto [R0, f, u0] : {std::tuple{-2.0, -1.0, 1.0}, std::tuple{-1.0, 0.5, 0.9}}) {
    auto bg = constant_bg(g, R0, f);
    const double h = 1e-4, t = 0.3;
    const auto s0 = exact_state(g, R0, f, u0, t - h);
    const auto s1 = exact_state(g, R0, f, u0, t);
    const auto s2 = exact_state(g, R0, f, u0, t + h);
    CHECK(curvature_evolution_error(bg, s0, s1, s2) <= 1e-6);
    for (double p : {2.0, 1.5, 3.0, 4.5}) {
      const auto terms = lp_identity_terms(bg, s0, s1, s2, p);
      CHECK(terms.gradient == 0.0);
      CHECK(lp_identity_error(bg, s0, s1, s2, p) <= 1e-6);
    }
  }
}

TEST_CASE("identities hold along a smooth flow at second order in the window") {
  auto c = smooth_case(12);
  const double dt0 = stable_dt(c.bg, c.u0, 0.9);
  std::array<double, 3> prev{};
  for (double frac : {0.5, 0.25, 0.125}) {
    FlowState s0{c.u0, 0.0, 0, 0.0};
    const auto s1 = step(c.bg, s0, frac * dt0);
    const auto s2 = step(c.bg, s1, frac * dt0);
    const auto terms = lp_identity_terms(c.bg, s0, s1, s2, 2.0);
    CHECK(terms.gradient < 0.0);
    const std::array<double, 3> e{curvature_evolution_error(c.bg, s0, s1, s2), lp_identity_error(c.bg, s0, s1, s2, 2.0),
                                  lp_identity_error(c.bg, s0, s1, s2, 3.0)};
    for (int k = 0; k < 3; ++k) {
      CHECK(e[k] <= 5e-3);
      // p = 3 also carries an O(h^2) spatial term that does not shrink with dt.
      if (k < 2 && prev[k] > 0.0) CHECK(prev[k] / e[k] == doctest::Approx(4.0).epsilon(0.15));
    }
    prev = e;
  }
}

TEST_CASE("dissipation identity error shrinks with the step size") {
  auto c = smooth_case(8);
  FlowConfig cfg;
  cfg.t_max = 1.0;
  double prev = 0.0;
  for (double cfl : {0.8, 0.4}) {
    cfg.cfl_fraction = cfl;
    const double e = dissipation_identity_error(run(c.bg, c.u0, cfg));
    CHECK(e <= 1e-2);
    if (prev > 0.0) CHECK(prev / e > 3.0);
    prev = e;
  }
}

TEST_CASE("diagnostic input validation") {
  auto g = cube(4, 1.0);
  auto bg = constant_bg(g, -2, -1);
  const auto s0 = exact_state(g, -2, -1, 1, 0.0);
  const auto s1 = exact_state(g, -2, -1, 1, 0.1);
  const auto s2 = exact_state(g, -2, -1, 1, 0.3);
  CHECK_THROWS_AS(curvature_evolution_error(bg, s0, s1, s2), InvalidArgument);
  CHECK_THROWS_AS(curvature_evolution_error(bg, s2, s1, s0), InvalidArgument);
  const auto s2b = exact_state(g, -2, -1, 1, 0.2);
  CHECK_THROWS_AS(lp_identity_error(bg, s0, s1, s2b, 1.0), InvalidArgument);

  // A defect crossing zero is rejected below p = 2.
  auto fv = values_of(random_field(g, -2.0, 0.0, 3));
  fv[7] = -1.0;
  auto mixed = Background(constant(g, -1.0), ScalarField(g, fv));
  auto u = constant(g, 1.0);
  FlowState a{u, 0.0, 0, 0.0}, b{u, 0.1, 0, 0.0}, d{u, 0.2, 0, 0.0};
  CHECK_THROWS_AS(lp_identity_error(mixed, a, b, d, 1.5), InvalidArgument);

  Trajectory shortt;
  shortt.records.resize(5);
  CHECK_THROWS_AS(dissipation_identity_error(shortt), InvalidArgument);
}

TEST_CASE("growth fit") {
  std::vector<double> t, y;
  for (int i = 0; i <= 60; ++i) {
    t.push_back(std::pow(10.0, i / 30.0));
    y.push_back(2.0 * std::pow(t.back(), 0.3));
  }
  const auto fit = growth_fit(t, y);
  CHECK(fit.exponent == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.t_end == 100.0);
  CHECK(fit.points == 31);

  std::vector<double> late(t.begin() + 40, t.end()), latey(y.begin() + 40, y.end());
  CHECK_THROWS_AS(growth_fit(late, latey), InvalidArgument);

  // A constant-data blow-up run against a fit of the closed form at the same times.
  auto g = cube(4, 1.0);
  FlowConfig cfg;
  cfg.t_max = 100.0;
  cfg.blowup_ceiling = 1e4;
  const auto tr = run(constant_bg(g, -1, 1), constant(g, 1.0), cfg);
  REQUIRE(tr.outcome == Outcome::BlowUp);
  const auto got = growth_fit(tr);
  std::vector<double> ts, us;
  for (const auto& r : tr.records)
    if (r.t >= tr.records.back().t / 10) {
      ts.push_back(r.t);
      us.push_back(constant_solution(3, -1, 1, 1, r.t));
    }
  CHECK(got.exponent == doctest::Approx(loglog_slope(ts, us)).epsilon(0.02));
  CHECK(got.exponent > 0.25);

  Trajectory notblow = tr;
  notblow.outcome = Outcome::Timeout;
  CHECK_THROWS_AS(growth_fit(notblow), InvalidArgument);
}

TEST_CASE("envelopes and decay on a converging run") {
  auto g = cube(6, 2.0);
  auto bg = constant_bg(g, -2, -1);
  FlowConfig cfg;
  cfg.t_max = 40.0;
  cfg.residual_stop = 1e-10;
  const auto tr = run(bg, constant(g, 1.0), cfg);
  const auto env = envelope_check(bg, tr);
  CHECK(env.ok());
  CHECK(env.C0 == doctest::Approx(std::pow(2.0, 0.25)));
  CHECK(env.C1 == doctest::Approx(0.75));
  CHECK(env.lp_log_slope < 0.0);
  const auto dec = decay_check(tr);
  CHECK(dec.applicable);
  CHECK(dec.ok());
  CHECK_THROWS_AS(decay_check(tr, {7.0}), InvalidArgument);

  cfg.blowup_ceiling = 5.0;
  const auto up = run(constant_bg(g, -1, 1), constant(g, 1.0), cfg);
  CHECK_FALSE(decay_check(up).applicable);
  const auto env_up = envelope_check(constant_bg(g, -1, 1), up);
  CHECK(env_up.ok());
}

TEST_CASE("weighted mass") {
  auto g = cube(6, 2.0);
  auto bg = constant_bg(g, -1, 1);
  auto phi = random_field(g, 0.1, 1.0, 4);
  const auto full = SubdomainMask::full(g);
  CHECK(weighted_mass(bg, constant(g, 1.0), phi, full) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_mass(bg, constant(g, 2.0), phi, full) == doctest::Approx(32.0).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_mass(bg, constant(g, 1.0), constant(g, 0.0), full), InvalidArgument);
}
