#include "bvgm/ortho.hpp"

#include <cmath>
#include <limits>

#include "bvgm/quadrature.hpp"
#include "bvgm/shrinkage.hpp"

namespace bvgm {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)

/// Streaming log-sum-exp accumulator.
struct LogSumExp {
  double max_term = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max_term) {
      sum += std::exp(x - max_term);
    } else {
      sum = sum * std::exp(max_term - x) + 1.0;
      max_term = x;
    }
  }
  double value() const {
    return sum > 0.0 ? max_term + std::log(sum) : -std::numeric_limits<double>::infinity();
  }
};

// Quadrature of kappa^{w} * kappa^{1/2} exp(-a^2 kappa / 2) p(kappa); the
// common factor exp(a^2/2) is kept outside so nothing overflows. Two passes:
// the first locates the scale, the second refines to a relative target.
double scaled_odds_integral(const KappaDensity& dens, double a, double weight_power) {
  auto f = [&](double k) {
    if (k <= 0.0 || k >= 1.0) return 0.0;
    const double lg = dens.log_unnormalized(k) + 0.5 * std::log(k) - 0.5 * a * a * k +
                      weight_power * std::log(k);
    return std::isfinite(lg) ? std::exp(lg) : 0.0;
  };
  auto rough = quad::integrate_unit(f, 1e-12, 4000);
  const double target = std::max(1e-300, std::abs(rough.value) * 1e-10);
  auto fine = quad::integrate_unit(f, target, 20000);
  return fine.value / dens.norm_constant();
}

double log_marginal_odds_quadrature(PriorKind kind, double a, double b) {
  const KappaDensity dens(kind, b);
  return 0.5 * a * a + std::log(scaled_odds_integral(dens, a, 0.0));
}

double log_marginal_odds_laplace_closed(double a, double b) {
  // sqrt(pi/2) b^{-1} exp[(|a| - 1/b)^2 / 2] {Phi(|a| - 1/b) +
  //   exp(2|a|/b) Phi(-|a| - 1/b)}, evaluated in log space.
  const double aa = std::abs(a);
  const double ib = 1.0 / b;
  const double lead = 0.5 * std::log(3.14159265358979323846 / 2.0) - std::log(b) +
                      0.5 * (aa - ib) * (aa - ib);
  LogSumExp bracket;
  bracket.add(log_normal_cdf(aa - ib));
  bracket.add(2.0 * aa * ib + log_normal_cdf(-aa - ib));
  return lead + bracket.value();
}

double monte_carlo_odds(const OddsQuery& q, double* mc_se) {
  RngHandle rng(q.mc_seed, 7);
  double sum = 0.0, sum2 = 0.0;
  for (long i = 0; i < q.mc_draws; ++i) {
    const double tau = sample_tau_prior(q.kind, rng);
    const double kappa = kappa_of_tau(tau, q.b, 1.0);
    const double pi = pointwise_odds(q.a, kappa);
    sum += pi;
    sum2 += pi * pi;
  }
  const double n = static_cast<double>(q.mc_draws);
  const double mean = sum / n;
  if (mc_se != nullptr) {
    const double var = (sum2 - n * mean * mean) / (n - 1.0);
    *mc_se = std::sqrt(var > 0.0 ? var / n : 0.0);
  }
  return mean;
}

}  // namespace

void OddsQuery::validate() const {
  if (!(b > 0.0)) throw DomainError("odds query: b must be positive");
  if (!std::isfinite(a)) throw DomainError("odds query: a must be finite");
  if (method == OddsMethod::MonteCarlo && mc_draws < 10000) {
    throw DomainError("odds query: monte_carlo needs at least 1e4 draws");
  }
  if (method == OddsMethod::ClosedForm && kind != PriorKind::Laplace) {
    throw MethodUnavailableError("closed form only available for the Laplace prior");
  }
}

double pointwise_odds(double a, double kappa) {
  if (!(kappa > 0.0) || !(kappa < 1.0)) throw DomainError("pointwise_odds: kappa in (0,1)");
  return std::sqrt(kappa) * std::exp(0.5 * a * a * (1.0 - kappa));
}

double log_normal_cdf(double x) {
  if (x > -12.0) {
    // erfc keeps full relative accuracy down to about x = -26
    return std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
  }
  // Lower-tail asymptotic: Phi(x) ~ phi(x)/|x| (1 - 1/x^2 + 3/x^4 - ...).
  const double z = -x;
  const double z2 = z * z;
  const double series =
      1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2) + 105.0 / (z2 * z2 * z2 * z2);
  return -0.5 * z2 - kLogSqrt2Pi - std::log(z) + std::log(series);
}

double log_marginal_odds(const OddsQuery& q) {
  q.validate();
  switch (q.method) {
    case OddsMethod::ClosedForm:
      return log_marginal_odds_laplace_closed(q.a, q.b);
    case OddsMethod::Quadrature:
      return log_marginal_odds_quadrature(q.kind, q.a, q.b);
    case OddsMethod::MonteCarlo:
      return std::log(monte_carlo_odds(q, nullptr));
  }
  throw DomainError("log_marginal_odds: bad method");
}

double marginal_odds(const OddsQuery& q, double* mc_se) {
  q.validate();
  if (q.method == OddsMethod::MonteCarlo) return monte_carlo_odds(q, mc_se);
  if (mc_se != nullptr) *mc_se = 0.0;
  return std::exp(log_marginal_odds(q));
}

double selection_probability(double odds) {
  if (odds < 0.0 || std::isnan(odds)) throw DomainError("selection_probability: odds >= 0");
  if (std::isinf(odds)) return 1.0;
  return odds / (1.0 + odds);
}

double posterior_kappa_mean(PriorKind kind, double a, double b) {
  const KappaDensity dens(kind, b);
  const double denom = scaled_odds_integral(dens, a, 0.0);
  const double num = scaled_odds_integral(dens, a, 1.0);
  return num / denom;
}

namespace {

template <typename F>
double central_fd(const F& f, double x, double h) {
  // one Richardson extrapolation step
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double log_odds_derivative_a(const OddsQuery& q, double fd_step) {
  q.validate();
  if (!(fd_step >= 1e-6 && fd_step <= 1e-2)) throw DomainError("fd_step in [1e-6, 1e-2]");
  const double h = fd_step * std::max(std::abs(q.a), 1.0);
  return central_fd(
      [&](double a) {
        OddsQuery qq = q;
        qq.a = a;
        return log_marginal_odds(qq);
      },
      q.a, h);
}

double log_odds_derivative_b(const OddsQuery& q, double fd_step) {
  q.validate();
  if (!(fd_step >= 1e-6 && fd_step <= 1e-2)) throw DomainError("fd_step in [1e-6, 1e-2]");
  const double h = fd_step * q.b;
  return central_fd(
      [&](double b) {
        OddsQuery qq = q;
        qq.b = b;
        return log_marginal_odds(qq);
      },
      q.b, h);
}

EnumerationResult enumerate_gamma_given_beta(const IsingField& field) {
  const int p = field.p();
  if (p > 20) throw TooLargeError("enumeration limited to p <= 20");
  const std::uint64_t n_states = 1ull << p;

  Eigen::VectorXi gamma = Eigen::VectorXi::Zero(p);
  double u = 0.0;  // Eq.-11 gauge: U(all-zero) = 0
  LogSumExp z;
  std::vector<LogSumExp> node(p);

  for (std::uint64_t g = 0; g < n_states; ++g) {
    if (g > 0) {
      // Gray-code step: state index g^(g>>1) flips bit ctz(g).
      const int j = __builtin_ctzll(g);
      const double du10 = delta_energy_01(field, gamma, j);
      u += gamma[j] == 0 ? du10 : -du10;
      gamma[j] = 1 - gamma[j];
    }
    const double log_w = -u;
    z.add(log_w);
    for (int j = 0; j < p; ++j) {
      if (gamma[j] != 0) node[j].add(log_w);
    }
  }

  EnumerationResult out;
  out.log_partition = z.value();
  out.marginals.resize(p);
  for (int j = 0; j < p; ++j) {
    out.marginals[j] = std::exp(node[j].value() - out.log_partition);
  }
  return out;
}

Eigen::VectorXd enumerate_gamma_beta_integrated(const Dataset& d, const Eigen::VectorXd& tau,
                                                double phi, double b) {
  const int p = d.p;
  if (p > 15) throw TooLargeError("collapsed enumeration limited to p <= 15");
  if (tau.size() != p) throw DomainError("tau length mismatch");
  if (!(phi > 0.0) || !(b > 0.0)) throw DomainError("phi and b must be positive");

  const auto [a, C] = projections(d);
  const std::uint64_t n_states = 1ull << p;
  LogSumExp z;
  std::vector<LogSumExp> node(p);

  for (std::uint64_t g = 0; g < n_states; ++g) {
    // P = phi (gamma gamma^T .* C) + D, rhs = phi (gamma .* a)
    Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < p; ++i) {
      const bool gi = (g >> i) & 1u;
      if (gi) {
        for (int j = 0; j < p; ++j) {
          if ((g >> j) & 1u) prec(i, j) = phi * C(i, j);
        }
        rhs[i] = phi * a[i];
      }
      prec(i, i) += tau[i] / (b * b);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(prec);
    if (llt.info() != Eigen::Success) throw NotSpdError("collapsed evidence factorization failed");
    const Eigen::MatrixXd L = llt.matrixL();
    double log_det_prec = 0.0;
    for (int i = 0; i < p; ++i) log_det_prec += 2.0 * std::log(L(i, i));
    const Eigen::VectorXd half = L.triangularView<Eigen::Lower>().solve(rhs);
    // log evidence up to a gamma-free constant:
    // -log|P|/2 + mu^T P mu / 2 with mu = P^{-1} rhs.
    const double log_ev = -0.5 * log_det_prec + 0.5 * half.squaredNorm();
    z.add(log_ev);
    for (int j = 0; j < p; ++j) {
      if ((g >> j) & 1u) node[j].add(log_ev);
    }
  }

  Eigen::VectorXd marg(p);
  const double log_z = z.value();
  for (int j = 0; j < p; ++j) marg[j] = std::exp(node[j].value() - log_z);
  return marg;
}

}  // namespace bvgm
