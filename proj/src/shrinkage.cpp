#include "bvgm/shrinkage.hpp"

#include <cmath>
#include <limits>

#include "bvgm/quadrature.hpp"

namespace bvgm {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kIngMeanCap = 1e12;  // Laplace |beta| underflow guard
}  // namespace

PriorKind prior_kind_from_string(const std::string& s) {
  if (s == "cauchy") return PriorKind::Cauchy;
  if (s == "laplace") return PriorKind::Laplace;
  if (s == "horseshoe") return PriorKind::Horseshoe;
  throw ConfigError("unknown prior kind '" + s + "'");
}

std::string to_string(PriorKind k) {
  switch (k) {
    case PriorKind::Cauchy: return "cauchy";
    case PriorKind::Laplace: return "laplace";
    case PriorKind::Horseshoe: return "horseshoe";
  }
  return "?";
}

double kappa_of_tau(double tau, double b, double phi) {
  if (!(tau > 0.0) || !(b > 0.0) || !(phi > 0.0)) {
    throw DomainError("kappa_of_tau: inputs must be positive");
  }
  const double r = tau / (b * b * phi);
  double kappa = r / (1.0 + r);
  // keep the open interval under fp rounding of extreme tau
  if (kappa >= 1.0) kappa = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (kappa <= 0.0) kappa = std::numeric_limits<double>::min();
  return kappa;
}

double update_tau(ChainState& state, int j, const PriorSpec& prior, RngHandle& rng) {
  const double beta = state.beta[j];
  if (!std::isfinite(beta) || !std::isfinite(state.phi)) {
    throw NonFiniteError("update_tau: non-finite state");
  }
  const double b_star = prior.b / std::sqrt(state.phi);
  double tau;
  switch (prior.kind) {
    case PriorKind::Laplace: {
      const double abeta = std::abs(beta);
      double mean = abeta < 1e-300 ? kIngMeanCap : b_star / abeta;
      if (mean > kIngMeanCap) mean = kIngMeanCap;
      tau = rng.inverse_gaussian(mean, 1.0);
      break;
    }
    case PriorKind::Cauchy: {
      const double rate = 0.5 * (beta * beta / (b_star * b_star) + 1.0);
      tau = rng.gamma(1.0, rate);
      break;
    }
    case PriorKind::Horseshoe: {
      const double v = state.v[j];
      const double u_rate = 0.5 * (beta * beta / (b_star * b_star * v) + 1.0);
      const double u = rng.gamma(1.0, u_rate);
      double chi = beta * beta * u / (b_star * b_star);
      if (chi < 1e-300) chi = 1e-300;  // exact beta = 0 would make (9) improper
      const double v_new = rng.gig_zero(chi, 1.0);
      state.u[j] = u;
      state.v[j] = v_new;
      tau = u / v_new;
      break;
    }
    default:
      throw DomainError("update_tau: bad kind");
  }
  state.tau[j] = tau;
  return tau;
}

double sample_tau_prior(PriorKind kind, RngHandle& rng) {
  switch (kind) {
    case PriorKind::Cauchy:
      return rng.gamma(0.5, 0.5);
    case PriorKind::Laplace:
      // tau ~ IG(1, 1/2): reciprocal of Gamma(1, 1/2).
      return 1.0 / rng.gamma(1.0, 0.5);
    case PriorKind::Horseshoe: {
      const double half_cauchy = std::tan(0.5 * kPi * rng.uniform());
      return half_cauchy * half_cauchy;
    }
  }
  throw DomainError("sample_tau_prior: bad kind");
}

KappaDensity::KappaDensity(PriorKind kind, double b) : kind_(kind), b_(b) {
  if (!(b > 0.0)) throw DomainError("kappa_density: b must be positive");
  auto res = quad::integrate_unit(
      [this](double k) {
        const double lg = log_unnormalized(k);
        return std::isfinite(lg) ? std::exp(lg) : 0.0;
      },
      1e-9, 8000);
  norm_ = res.value;
}

double KappaDensity::log_unnormalized(double kappa) const {
  if (kappa <= 0.0 || kappa >= 1.0) return -std::numeric_limits<double>::infinity();
  const double omk = 1.0 - kappa;
  const double b2 = b_ * b_;
  switch (kind_) {
    case PriorKind::Cauchy:
      return -0.5 * std::log(kappa) - 1.5 * std::log(omk) - 0.5 * b2 * kappa / omk;
    case PriorKind::Laplace:
      return -2.0 * std::log(kappa) - omk / (2.0 * b2 * kappa);
    case PriorKind::Horseshoe:
      return -0.5 * std::log(kappa) - 0.5 * std::log(omk) - std::log(omk + b2 * kappa);
  }
  return -std::numeric_limits<double>::infinity();
}

double KappaDensity::operator()(double kappa) const {
  const double lg = log_unnormalized(kappa);
  return std::isfinite(lg) ? std::exp(lg) / norm_ : 0.0;
}

KappaDensity kappa_density(PriorKind kind, double b) { return KappaDensity(kind, b); }

double marginal_beta_density(PriorKind kind, double b, double beta) {
  if (!(b > 0.0)) throw DomainError("marginal_beta_density: b must be positive");
  switch (kind) {
    case PriorKind::Cauchy:
      // Table entry normalized as the standard Cauchy density.
      return b / (kPi * (beta * beta + b * b));
    case PriorKind::Laplace:
      return std::exp(-std::abs(beta) / b) / (2.0 * b);
    case PriorKind::Horseshoe: {
      if (beta == 0.0) return std::numeric_limits<double>::infinity();  // log spike at 0
      // Integral of N(beta; 0, b^2/tau) against the half-Cauchy^2 prior;
      // the sqrt(tau) factors of the normal and the prior cancel.
      const double c = 1.0 / (kPi * b * std::sqrt(2.0 * kPi));
      auto res = quad::integrate_positive_axis(
          [&](double tau) {
            return std::exp(-0.5 * beta * beta * tau / (b * b)) / (1.0 + tau);
          },
          1e-10);
      return c * res.value;
    }
  }
  throw DomainError("marginal_beta_density: bad kind");
}

}  // namespace bvgm
