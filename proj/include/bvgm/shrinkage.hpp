#pragma once

#include "bvgm/model.hpp"
#include "bvgm/rng.hpp"

namespace bvgm {

/// Shrinkage coefficient kappa = (tau/(b^2 phi)) / (1 + tau/(b^2 phi)).
/// Strictly increasing in tau with range (0,1).
double kappa_of_tau(double tau, double b, double phi);

/// One local-precision update for predictor j. Laplace draws
/// tau_j ~ ING(b*/|beta_j|, 1); Cauchy draws tau_j ~ Gamma(1, (beta^2/b*^2+1)/2);
/// the horseshoe updates the (u_j, v_j) pair and sets tau_j = u_j / v_j.
/// b* = b/sqrt(phi) is recomputed from the current phi.
double update_tau(ChainState& state, int j, const PriorSpec& prior, RngHandle& rng);

/// Draw from the prior p(tau) of the given setting (b-free parameterization).
double sample_tau_prior(PriorKind kind, RngHandle& rng);

/// Normalized density of the shrinkage coefficient for one (kind, b);
/// the normalization constant is computed once by adaptive quadrature.
class KappaDensity {
 public:
  KappaDensity(PriorKind kind, double b);

  double operator()(double kappa) const;
  double log_unnormalized(double kappa) const;
  double norm_constant() const { return norm_; }
  PriorKind kind() const { return kind_; }
  double b() const { return b_; }

 private:
  PriorKind kind_;
  double b_;
  double norm_;  // normalized density = exp(log_unnormalized) / norm_
};

KappaDensity kappa_density(PriorKind kind, double b);

/// Marginal prior density p(beta_j | b). Cauchy and Laplace are closed
/// forms; the horseshoe integrates the normal mixture over tau by
/// quadrature.
double marginal_beta_density(PriorKind kind, double b, double beta);

}  // namespace bvgm
