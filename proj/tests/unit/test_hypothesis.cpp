#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "yflow/errors.hpp"
#include "yflow/hypothesis.hpp"

using namespace testing;

namespace {

ScalarField bump_f(const GridPtr& g, double base, double amp, double width) {
  const double L = g->lengths()[0];
  return ScalarField::from_function(g, [&](std::span<const double> x) {
    double d2 = 0.0;
    for (double xi : x) {
      double d = xi - L / 2;
      d2 += d * d;
    }
    return base + amp * std::exp(-d2 / (2 * width * width));
  });
}

double dense_min_eigen(const Background& bg, const SubdomainMask& mask) {
  const GridSpec& g = bg.grid();
  const auto idx = mask.indices();
  std::vector<long> pos(g.size(), -1);
  for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = static_cast<long>(k);
  const long m = static_cast<long>(idx.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (long k = 0; k < m; ++k) {
    const std::size_t i = idx[k];
    A(k, k) += bg.R0()[i];
    for (int a = 0; a < g.dim(); ++a) {
      const double c = bg.c_n() / (g.spacings()[a] * g.spacings()[a]);
      A(k, k) += 2.0 * c;
      for (int d : {-1, 1})
        if (pos[shifted(g, i, a, d)] >= 0) A(k, pos[shifted(g, i, a, d)]) -= c;
    }
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("superlevel masks") {
  auto g = cube(8, 4.0);
  CHECK(superlevel_mask(Background(constant(g, -1), constant(g, -1)), 0.5).is_empty());
  CHECK(superlevel_mask(Background(constant(g, -1), constant(g, 1)), 0.5).is_full());

  auto bg = Background(constant(g, -1), bump_f(g, -1.0, 1.5, 0.7));
  const auto m = superlevel_mask(bg, 0.1);
  for (std::size_t i = 0; i < g->size(); ++i) REQUIRE(m.contains(i) == (bg.f()[i] > -0.1));
  CHECK(superlevel_mask(bg, 0.05).subset_of(m));
  CHECK(m.subset_of(superlevel_mask(bg, 0.3)));
  CHECK_THROWS_AS(superlevel_mask(bg, 0.0), InvalidArgument);

  // A threshold sitting on a grid value is moved off it, upward.
  auto bgh = Background(constant(g, -1), constant(g, -0.5));
  CHECK(superlevel_mask(bgh, 0.5).is_full());
}

TEST_CASE("sign hypothesis") {
  auto g = cube(8, 4.0);
  auto neg = Background(constant(g, -1), constant(g, -1));
  const auto r = check_h1(neg, superlevel_mask(neg, 0.5));
  CHECK(r.h1_holds);
  CHECK(std::isinf(r.lambda_omega));

  auto pos = Background(constant(g, -1), constant(g, 1));
  const auto p = check_h1(pos, SubdomainMask::full(g));
  CHECK_FALSE(p.h1_holds);
  CHECK(p.lambda_omega == doctest::Approx(-1.0).epsilon(1e-9));

  auto bump = Background(constant(g, -1), bump_f(g, -1.0, 1.2, 0.5));
  const auto omega = superlevel_mask(bump, 0.1);
  const auto b = check_h1(bump, omega);
  CHECK(b.h1_holds == (dense_min_eigen(bump, omega) > 0.0));
  CHECK(b.lambda_omega == doctest::Approx(dense_min_eigen(bump, omega)).epsilon(1e-9));
}

TEST_CASE("supersolution on the empty set") {
  auto g = cube(8, 4.0);
  auto bg = Background(constant(g, -1), constant(g, -1));
  const auto c = build_supersolution(bg, SubdomainMask::empty(g), 2, 2);
  CHECK(c.delta_lo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::isinf(c.delta_hi));
  CHECK(c.delta == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.min_L_ubar == doctest::Approx(30.0).epsilon(1e-13));
  CHECK(verify_supersolution(bg, constant(g, 1.0)) == 0.0);
  CHECK(verify_supersolution(Background(constant(g, -1), constant(g, 1)), constant(g, 1.0)) == -2.0);
}

TEST_CASE("supersolution certificate on a faint bump") {
  auto g = cube(16, 4.0);
  auto bg = Background(constant(g, -1), bump_f(g, -1.0, 1.01, 0.6));
  const auto omega = superlevel_mask(bg, 0.5);
  SupersolutionOptions opt;
  opt.dilation = 4;
  opt.band = 4;
  const auto c = build_supersolution(bg, omega, opt);
  const double N = 5.0;

  // Window endpoints and constant re-derived from the certificate fields.
  CHECK(std::pow(c.delta_lo, N - 1) == doctest::Approx(c.m1 * std::pow(c.m0, -N) / c.inf_absf_complement));
  CHECK(std::pow(c.delta_hi, N - 1) == doctest::Approx(c.lambda_D / c.sup_f_omega));
  CHECK(c.c_omega == doctest::Approx(c.lambda_D * std::pow(c.m0, N) / c.m1));
  CHECK(c.delta_lo <= c.delta);
  CHECK(c.delta <= c.delta_hi);
  CHECK(c.delta == doctest::Approx(std::sqrt(c.delta_lo * c.delta_hi)));
  CHECK(c.sup_f_omega <= c.c_omega * c.inf_absf_complement);

  // Independent pointwise re-evaluation of L(ubar) - f ubar^N.
  const auto L = conformal_op(bg, c.ubar);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g->size(); ++i) {
    worst = std::min(worst, L[i] - bg.f()[i] * std::pow(c.ubar[i], N));
    REQUIRE(c.ubar[i] >= c.delta * c.m0 * (1 - 1e-15));
  }
  CHECK(worst >= -1e-9);
  CHECK(verify_supersolution(bg, c.ubar) == c.min_L_ubar);

  const auto rep = check_hypotheses(bg, omega, opt);
  CHECK(rep.h1_holds);
  CHECK(rep.h2_evaluated);
  CHECK(rep.h2_holds);
  CHECK(rep.c_omega == doctest::Approx(c.c_omega));
}

TEST_CASE("window scales with f and empties when the bump is too strong") {
  auto g = cube(16, 4.0);
  SupersolutionOptions opt;
  opt.dilation = 4;
  opt.band = 4;
  auto bg = Background(constant(g, -1), bump_f(g, -1.0, 1.01, 0.6));
  const auto omega = superlevel_mask(bg, 0.5);
  const auto c1 = build_supersolution(bg, omega, opt);
  std::vector<double> f2(bg.f().values().begin(), bg.f().values().end());
  for (auto& x : f2) x *= 3.0;
  auto bg2 = Background(constant(g, -1), ScalarField(g, f2));
  const auto c2 = build_supersolution(bg2, omega, opt);
  const double s = std::pow(3.0, -0.25);
  CHECK(c2.delta_lo == doctest::Approx(c1.delta_lo * s).epsilon(1e-12));
  CHECK(c2.delta_hi == doctest::Approx(c1.delta_hi * s).epsilon(1e-12));

  auto strong = Background(constant(g, -1), bump_f(g, -1.0, 1.5, 0.6));
  const auto om = superlevel_mask(strong, 0.5);
  try {
    build_supersolution(strong, om, opt);
    FAIL("empty window accepted");
  } catch (const H2Violated& e) {
    CHECK(e.delta_lo() > e.delta_hi());
    CHECK(e.c_omega() > 0.0);
  }
  CHECK_FALSE(check_hypotheses(strong, om, opt).h2_holds);

  opt.band = 5;
  CHECK_THROWS_AS(build_construction(bg, omega, opt), InvalidArgument);
  CHECK_THROWS_AS(build_supersolution(Background(constant(g, -1), constant(g, 1)), SubdomainMask::full(g), opt),
                  InvalidArgument);
}
