#include <doctest.h>

#include <cmath>
#include <vector>

#include "bvgm/quadrature.hpp"
#include "bvgm/rng.hpp"
#include "bvgm/shrinkage.hpp"
#include "test_util.hpp"

using bvgm::ChainState;
using bvgm::KappaDensity;
using bvgm::PriorKind;
using bvgm::PriorSpec;
using bvgm::RngHandle;

namespace {
constexpr double kPi = 3.14159265358979323846;

ChainState one_coef_state(double beta, double phi) {
  ChainState s = ChainState::linear_init(1);
  s.beta[0] = beta;
  s.phi = phi;
  return s;
}
}  // namespace

TEST_CASE("kappa transform basics") {
  CHECK(bvgm::kappa_of_tau(3.0, 1.0, 1.0) == doctest::Approx(0.75));
  CHECK(bvgm::kappa_of_tau(1.0, 1.0, 1.0) == doctest::Approx(0.5));  // tau = b^2 phi
  CHECK(bvgm::kappa_of_tau(1e-12, 1.0, 1.0) < 1e-11);
  double prev = 0.0;
  for (double tau : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double k = bvgm::kappa_of_tau(tau, 2.0, 0.5);
    CHECK(k > prev);
    CHECK(k > 0.0);
    CHECK(k < 1.0);
    prev = k;
  }
  CHECK_THROWS_AS(bvgm::kappa_of_tau(-1.0, 1.0, 1.0), bvgm::DomainError);
}

TEST_CASE("update_tau conditional moments") {
  const int n = 100000;

  SUBCASE("Laplace: ING mean b*/|beta|") {
    PriorSpec prior;
    prior.kind = PriorKind::Laplace;
    prior.b = 2.0;  // phi = 1 so b* = 2
    RngHandle rng(21, 0);
    ChainState s = one_coef_state(1.0, 1.0);
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = bvgm::update_tau(s, 0, prior, rng);
    CHECK(testutil::sample_mean(draws) == doctest::Approx(2.0).epsilon(0.015));
  }

  SUBCASE("Laplace b* tracks the current phi") {
    PriorSpec prior;
    prior.kind = PriorKind::Laplace;
    prior.b = 2.0;
    RngHandle rng(22, 0);
    ChainState s = one_coef_state(1.0, 4.0);  // b* = 2/sqrt(4) = 1
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = bvgm::update_tau(s, 0, prior, rng);
    CHECK(testutil::sample_mean(draws) == doctest::Approx(1.0).epsilon(0.015));
  }

  SUBCASE("Cauchy at beta = 0: Gamma(1, 1/2)") {
    PriorSpec prior;
    prior.kind = PriorKind::Cauchy;
    prior.b = 1.0;
    RngHandle rng(23, 0);
    ChainState s = one_coef_state(0.0, 1.0);
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = bvgm::update_tau(s, 0, prior, rng);
    CHECK(testutil::sample_mean(draws) == doctest::Approx(2.0).epsilon(0.015));
  }

  SUBCASE("Laplace underflow guard keeps tau finite") {
    PriorSpec prior;
    prior.kind = PriorKind::Laplace;
    prior.b = 1.0;
    RngHandle rng(24, 0);
    ChainState s = one_coef_state(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double tau = bvgm::update_tau(s, 0, prior, rng);
      CHECK(std::isfinite(tau));
      CHECK(tau > 0.0);
    }
  }
}

TEST_CASE("horseshoe (u,v) subchain matches the 2-D conditional by quadrature") {
  // Joint over (u, v) given beta, b*: f ~ v^{-1} exp(-u alpha(v)) e^{-v/2}
  // with alpha(v) = (beta^2/(b*^2 v) + 1)/2; tau = u/v. The CDF of tau has
  // the analytic inner u-integral F(t) ~ int v^{-1} e^{-v/2} (1-e^{-t v a})/a dv.
  const double beta = 0.7, b_star = 1.3;
  auto alpha = [&](double v) { return 0.5 * (beta * beta / (b_star * b_star * v) + 1.0); };
  const double z =
      bvgm::quad::integrate_positive_axis(
          [&](double v) { return std::exp(-0.5 * v) / (v * alpha(v)); }, 1e-11)
          .value;
  auto tau_cdf = [&](double t) {
    return bvgm::quad::integrate_positive_axis(
               [&](double v) {
                 const double a = alpha(v);
                 return std::exp(-0.5 * v) * (1.0 - std::exp(-t * v * a)) / (v * a);
               },
               1e-11)
               .value /
           z;
  };

  PriorSpec prior;
  prior.kind = PriorKind::Horseshoe;
  prior.b = b_star;  // phi = 1
  RngHandle rng(25, 0);
  ChainState s = one_coef_state(beta, 1.0);
  const int n = 1000000;
  const int warmup = 1000;
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < warmup + n; ++i) {
    const double tau = bvgm::update_tau(s, 0, prior, rng);
    REQUIRE(tau == s.u[0] / s.v[0]);
    if (i >= warmup) draws.push_back(tau);
  }
  std::vector<double> grid, cdf;
  for (double q = 0.02; q < 1.0; q += 0.02) {
    // invert the CDF by bisection on a log scale
    double lo = 1e-8, hi = 1e8;
    for (int it = 0; it < 60; ++it) {
      const double mid = std::sqrt(lo * hi);
      (tau_cdf(mid) < q ? lo : hi) = mid;
    }
    grid.push_back(std::sqrt(lo * hi));
    cdf.push_back(q);
  }
  CHECK(testutil::ks_against_cdf(draws, grid, cdf) <= 0.01);
}

TEST_CASE("kappa density normalization against the analytic constants") {
  for (double b : {0.1, 1.0, 100.0}) {
    CHECK(KappaDensity(PriorKind::Cauchy, b).norm_constant() ==
          doctest::Approx(std::sqrt(2.0 * kPi) / b).epsilon(1e-6));
    CHECK(KappaDensity(PriorKind::Laplace, b).norm_constant() ==
          doctest::Approx(2.0 * b * b).epsilon(1e-6));
    CHECK(KappaDensity(PriorKind::Horseshoe, b).norm_constant() ==
          doctest::Approx(kPi / b).epsilon(1e-6));
  }
}

TEST_CASE("horseshoe kappa density at b = 1 is Beta(1/2,1/2)") {
  const KappaDensity d(PriorKind::Horseshoe, 1.0);
  CHECK(d(0.5) == doctest::Approx(2.0 / kPi).epsilon(1e-8));
  CHECK(d(0.1) == doctest::Approx(1.0 / (kPi * std::sqrt(0.1 * 0.9))).epsilon(1e-8));
}

TEST_CASE("prior tau draws pushed through kappa match the kappa density") {
  const int n = 100000;
  for (auto kind : {PriorKind::Cauchy, PriorKind::Laplace, PriorKind::Horseshoe}) {
    for (double b : {0.1, 1.0, 10.0}) {
      RngHandle rng(26 + static_cast<int>(kind), 0);
      std::vector<double> kappas(n);
      for (int i = 0; i < n; ++i) {
        kappas[i] = bvgm::kappa_of_tau(bvgm::sample_tau_prior(kind, rng), b, 1.0);
      }
      const KappaDensity dens(kind, b);
      // CDF of the kappa density on a grid by quadrature
      std::vector<double> grid, cdf;
      double acc = 0.0, prev = 0.0;
      for (int g = 1; g <= 40; ++g) {
        const double x = static_cast<double>(g) / 41.0;
        acc += bvgm::quad::integrate([&](double k) { return dens(k); }, prev, x, 1e-10,
                                     2000, bvgm::quad::unit_breakpoints())
                   .value;
        grid.push_back(x);
        cdf.push_back(acc);
        prev = x;
      }
      CHECK(testutil::ks_against_cdf(kappas, grid, cdf) <= 0.02);
    }
  }
}

TEST_CASE("marginal beta densities") {
  CHECK(bvgm::marginal_beta_density(PriorKind::Laplace, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(bvgm::marginal_beta_density(PriorKind::Cauchy, 1.0, 0.0) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-12));

  // horseshoe at beta = 2 against a Monte Carlo mixture oracle
  RngHandle rng(29, 0);
  const int n = 4000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double tau = bvgm::sample_tau_prior(PriorKind::Horseshoe, rng);
    acc += std::sqrt(tau / (2.0 * kPi)) * std::exp(-0.5 * 4.0 * tau);
  }
  const double mc = acc / n;
  CHECK(bvgm::marginal_beta_density(PriorKind::Horseshoe, 1.0, 2.0) ==
        doctest::Approx(mc).epsilon(0.01));
}
