#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "yflow/errors.hpp"
#include "yflow/spectral.hpp"

using namespace testing;

namespace {

// Connected mask grown by random face-neighbor accretion.
SubdomainMask blob(const GridPtr& g, std::size_t target, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::uint8_t> v(g->size(), 0);
  std::vector<std::size_t> members{gen() % g->size()};
  v[members[0]] = 1;
  while (members.size() < target) {
    const auto from = members[gen() % members.size()];
    const auto to = shifted(*g, from, static_cast<int>(gen() % 3), (gen() & 1) ? 1 : -1);
    if (!v[to]) {
      v[to] = 1;
      members.push_back(to);
    }
  }
  return SubdomainMask(g, v);
}

// Smallest eigenpair of the masked operator by dense decomposition.
std::pair<double, std::vector<double>> dense_eigen(const Background& bg, const SubdomainMask& mask) {
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
      for (int d : {-1, 1}) {
        const long p = pos[shifted(g, i, a, d)];
        if (p >= 0) A(k, p) -= c;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  Eigen::VectorXd v = es.eigenvectors().col(0);
  if (v.sum() < 0) v = -v;
  v /= v.maxCoeff();
  std::vector<double> phi(g.size(), 0.0);
  for (long k = 0; k < m; ++k) phi[idx[k]] = v(k);
  return {es.eigenvalues()(0), phi};
}

}  // namespace

TEST_CASE("eigenpair matches dense decomposition on random connected masks") {
  auto g = cube(10, 2.5);
  auto bg = Background(random_field(g, -2.0, -0.5, 31), constant(g, 0.0));
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto mask = blob(g, 150 + 60 * seed, seed);
    const auto res = dirichlet_eigen(bg, mask, 1e-10);
    const auto [lam, phi] = dense_eigen(bg, mask);
    CHECK(res.lambda == doctest::Approx(lam).epsilon(1e-10));
    CHECK(max_abs_diff(res.phi.values(), phi) <= 1e-7);
    CHECK(res.residual <= 1e-10);
    CHECK(res.phi.max() == 1.0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (mask.contains(i))
        REQUIRE(res.phi[i] > 0.0);
      else
        REQUIRE(res.phi[i] == 0.0);
    }
    CHECK(rayleigh_quotient(bg, res.phi, mask) == doctest::Approx(res.lambda).epsilon(1e-9));
  }
}

TEST_CASE("slab eigenvalue has the discrete sine form") {
  for (int s : {16, 32}) {
    auto g = GridSpec::make({s, 4, 4}, {1.0, 1.0, 1.0});
    auto bg = Background(constant(g, -1.0), constant(g, 0.0));
    std::vector<std::uint8_t> v(g->size(), 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double x = g->coordinates(i)[0];
      v[i] = (x > 0.25 && x < 0.75) ? 1 : 0;
    }
    const double h = 1.0 / s;
    const double pi = 3.141592653589793;
    const double exact = 8.0 * 4.0 / (h * h) * std::pow(std::sin(pi * h / (2 * 0.5)), 2) - 1.0;
    const auto res = dirichlet_eigen(bg, SubdomainMask(g, v), 1e-11);
    CHECK(res.lambda == doctest::Approx(exact).epsilon(1e-11));
    CHECK(exact == doctest::Approx(8 * pi * pi / 0.25 - 1).epsilon(0.05));
  }
}

TEST_CASE("shift covariance and domain monotonicity") {
  auto g = cube(8, 2.0);
  auto R0 = random_field(g, -2.0, -1.0, 5);
  std::vector<double> shifted_r0(R0.values().begin(), R0.values().end());
  for (auto& x : shifted_r0) x -= 0.75;
  auto bg = Background(R0, constant(g, 0.0));
  auto bg2 = Background(ScalarField(g, shifted_r0), constant(g, 0.0));
  const auto small = blob(g, 80, 9);
  const auto big = dilate(small, 1);
  const auto a = dirichlet_eigen(bg, small, 1e-11);
  const auto b = dirichlet_eigen(bg2, small, 1e-11);
  CHECK(b.lambda == doctest::Approx(a.lambda - 0.75).epsilon(1e-12));
  CHECK(max_abs_diff(a.phi.values(), b.phi.values()) <= 1e-8);
  const auto c = dirichlet_eigen(bg, big, 1e-11);
  CHECK(c.lambda <= a.lambda + 1e-11);
  CHECK(rayleigh_quotient(bg, a.phi, big) >= c.lambda - 1e-9);
}

TEST_CASE("degenerate masks") {
  auto g = cube(6, 1.0);
  auto bg = Background(constant(g, -1.0), constant(g, 0.0));
  const auto e = dirichlet_eigen(bg, SubdomainMask::empty(g), 1e-9);
  CHECK(e.empty_domain);
  CHECK(std::isinf(e.lambda));
  const auto full = dirichlet_eigen(bg, SubdomainMask::full(g), 1e-10);
  CHECK(full.lambda == doctest::Approx(-1.0).epsilon(1e-10));

  EigenOptions opt;
  opt.tol = 1e-14;
  opt.max_iterations = 1;
  CHECK_THROWS_AS(dirichlet_eigen(bg, blob(g, 40, 1), opt), EigenNonConvergence);
  CHECK_THROWS_AS(rayleigh_quotient(bg, constant(g, 0.0), SubdomainMask::full(g)), InvalidArgument);
  CHECK_THROWS_AS(rayleigh_quotient(bg, constant(g, 1.0), SubdomainMask::empty(g)), InvalidArgument);
}
