#pragma once

#include <string>

#include <Eigen/Dense>

#include "bvgm/errors.hpp"

namespace bvgm {

enum class PriorKind { Cauchy, Laplace, Horseshoe };

PriorKind prior_kind_from_string(const std::string& s);
std::string to_string(PriorKind k);

/// Prior configuration shared by a whole run.
struct PriorSpec {
  PriorKind kind = PriorKind::Horseshoe;
  double b = 1.0;              // global shrinkage
  double lambda_cluster = 1.0; // partial-clustering parameter
  bool intercept = false;
  double intercept_shape = 4.0;  // tau_mu ~ Gamma(shape, rate)
  double intercept_rate = 2.0;

  void validate() const {
    if (!(b > 0.0)) throw DomainError("prior: b must be positive");
    if (lambda_cluster < 0.0 || lambda_cluster > 1.0) {
      throw DomainError("prior: lambda must lie in [0,1]");
    }
    if (!(intercept_shape > 0.0) || !(intercept_rate > 0.0)) {
      throw DomainError("prior: intercept gamma parameters must be positive");
    }
  }
};

/// Mutable per-chain state. Owned exclusively by one chain.
/// In BSAM mode `beta` stacks the per-predictor blocks and the two-variance
/// precisions live in tau_e / tau_d; the parametric sampler uses tau (and
/// the horseshoe auxiliaries u, v with tau_j = u_j / v_j).
struct ChainState {
  Eigen::VectorXi gamma;
  Eigen::VectorXd beta;
  Eigen::VectorXd tau;
  Eigen::VectorXd u, v;
  Eigen::VectorXd tau_e, tau_d;
  double phi = 1.0;
  double mu = 0.0;
  double tau_mu = 1.0;

  /// Parametric-model state: gamma = 0, beta = 0, tau = u = v = 1, phi = 1.
  static ChainState linear_init(int p) {
    ChainState s;
    s.gamma = Eigen::VectorXi::Zero(p);
    s.beta = Eigen::VectorXd::Zero(p);
    s.tau = Eigen::VectorXd::Ones(p);
    s.u = Eigen::VectorXd::Ones(p);
    s.v = Eigen::VectorXd::Ones(p);
    return s;
  }

  /// BSAM state with total coefficient length M over p blocks.
  static ChainState bsam_init(int p, int total_m) {
    ChainState s;
    s.gamma = Eigen::VectorXi::Zero(p);
    s.beta = Eigen::VectorXd::Zero(total_m);
    s.tau_e = Eigen::VectorXd::Ones(p);
    s.tau_d = Eigen::VectorXd::Ones(p);
    return s;
  }
};

}  // namespace bvgm
