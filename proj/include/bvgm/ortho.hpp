#pragma once

#include <Eigen/Dense>

#include "bvgm/dataset.hpp"
#include "bvgm/ising.hpp"
#include "bvgm/model.hpp"
#include "bvgm/rng.hpp"

namespace bvgm {

enum class OddsMethod { ClosedForm, Quadrature, MonteCarlo };

/// Marginal-odds query in the phi-scaled units of the orthogonal theory
/// (phi = 1 convention; a_j is the signal projection x_j^T y).
struct OddsQuery {
  double a = 0.0;
  double b = 1.0;
  PriorKind kind = PriorKind::Horseshoe;
  OddsMethod method = OddsMethod::Quadrature;
  long mc_draws = 100000;
  std::uint64_t mc_seed = 20240901;

  void validate() const;
};

/// Conditional odds at one shrinkage value:
/// pi = kappa^{1/2} exp[(a^2/2)(1 - kappa)].
double pointwise_odds(double a, double kappa);

/// log of the marginal odds integral over p(kappa); safe at extreme a, b.
double log_marginal_odds(const OddsQuery& q);

/// Marginal odds; may overflow to +inf for extreme queries (use the log
/// form there). For MonteCarlo the optional out-param receives the MC
/// standard error of the odds estimate.
double marginal_odds(const OddsQuery& q, double* mc_se = nullptr);

/// odds -> probability transform pi / (1 + pi).
double selection_probability(double odds);

/// Posterior mean of the shrinkage coefficient given inclusion,
/// E(kappa | y, gamma_j = 1), by quadrature.
double posterior_kappa_mean(PriorKind kind, double a, double b);

/// Central finite difference (one Richardson step) of log marginal odds in
/// a. The companion identity value is [1 - E(kappa)] a.
double log_odds_derivative_a(const OddsQuery& q, double fd_step = 1e-4);

/// Central finite difference (one Richardson step) of log marginal odds in b.
double log_odds_derivative_b(const OddsQuery& q, double fd_step = 1e-4);

struct EnumerationResult {
  Eigen::VectorXd marginals;
  double log_partition = 0.0;
};

/// Exact per-node inclusion marginals of the Boltzmann distribution by
/// summation over all 2^p states (log-sum-exp throughout). Hard cap p <= 20.
/// Includes the graph prior of the field when present.
EnumerationResult enumerate_gamma_given_beta(const IsingField& field);

/// Exact marginals of p(gamma | y, tau, phi, b) with beta integrated out
/// per configuration (collapsed Gaussian evidence). Hard cap p <= 15.
Eigen::VectorXd enumerate_gamma_beta_integrated(const Dataset& d, const Eigen::VectorXd& tau,
                                                double phi, double b);

/// log Phi(x), stable far into the lower tail.
double log_normal_cdf(double x);

}  // namespace bvgm
