#include "bvgm/gibbs.hpp"

#include <cmath>

#include "bvgm/shrinkage.hpp"

namespace bvgm {

LinearModel::LinearModel(const Dataset& d) : data(&d) {
  d.validate();
  std::tie(a, C) = projections(d);
}

IsingField build_field(const LinearModel& m, const ChainState& s, const PriorSpec& prior,
                       const GraphPrior* graph) {
  // gram(R) = diag(beta) C diag(beta); R^T y = diag(beta) a. The intercept
  // drops out of both because the columns are centered.
  const Eigen::ArrayXd beta = s.beta.array();
  Eigen::MatrixXd gram = m.C;
  gram.array().colwise() *= beta;
  gram.array().rowwise() *= beta.transpose();
  const Eigen::VectorXd rty = (beta * m.a.array()).matrix();
  return build_field_gram(gram, rty, s.phi, graph, prior.b);
}

BlockConditional beta_block_conditional(const LinearModel& m, const ChainState& s,
                                        const std::vector<int>& c, const PriorSpec& prior) {
  const int k = static_cast<int>(c.size());
  BlockConditional out;
  out.indices = c;
  if (k == 0) return out;

  const double b2 = prior.b * prior.b;
  bool all_in = true, all_out = true;
  for (int j : c) (s.gamma[j] != 0 ? all_out : all_in) = false;
  if (!all_in && !all_out) {
    throw DomainError("beta_block_conditional: mixed gamma block");
  }

  if (all_out) {
    out.sigma = Eigen::MatrixXd::Zero(k, k);
    out.mu = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) out.sigma(i, i) = b2 / s.tau[c[i]];
    return out;
  }

  Eigen::MatrixXd prec(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) prec(i, j) = s.phi * m.C(c[i], c[j]);
    prec(i, i) += s.tau[c[i]] / b2;
  }
  // rhs = phi X_c^T (y - mu - X_{gamma, cbar} beta_cbar); X^T 1 = 0 kills mu.
  Eigen::VectorXd rhs(k);
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(m.p());
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) gb[j] = s.beta[j];
  }
  for (int j : c) gb[j] = 0.0;
  const Eigen::VectorXd cross = m.C * gb;
  for (int i = 0; i < k; ++i) rhs[i] = s.phi * (m.a[c[i]] - cross[c[i]]);

  const Eigen::MatrixXd L = cholesky_with_jitter(prec);
  Eigen::MatrixXd inv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(k, k));
  out.sigma = L.transpose().triangularView<Eigen::Upper>().solve(inv);
  out.mu = out.sigma * rhs;
  return out;
}

namespace {

// Draw the included block jointly through the precision factorization
// (Eq.-5 quantities, no explicit inverse).
void draw_included_block(const LinearModel& m, ChainState& s, const std::vector<int>& c,
                         const PriorSpec& prior, RngHandle& rng) {
  const int k = static_cast<int>(c.size());
  if (k == 0) return;
  const double b2 = prior.b * prior.b;
  Eigen::MatrixXd prec(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      prec(i, j) = prec(j, i) = s.phi * m.C(c[i], c[j]);
    }
    prec(i, i) += s.tau[c[i]] / b2;
  }
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(m.p());
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) gb[j] = s.beta[j];
  }
  for (int j : c) gb[j] = 0.0;
  const Eigen::VectorXd cross = m.C * gb;
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) rhs[i] = s.phi * (m.a[c[i]] - cross[c[i]]);

  const Eigen::MatrixXd L = cholesky_with_jitter(prec);
  // mean = prec^{-1} rhs via the factor
  Eigen::VectorXd mean = L.triangularView<Eigen::Lower>().solve(rhs);
  mean = L.transpose().triangularView<Eigen::Upper>().solve(mean);
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = rng.normal();
  const Eigen::VectorXd noise = L.transpose().triangularView<Eigen::Upper>().solve(z);
  for (int i = 0; i < k; ++i) s.beta[c[i]] = mean[i] + noise[i];
}

void update_beta(const LinearModel& m, ChainState& s, const PriorSpec& prior,
                 const SweepOptions& opt, RngHandle& rng) {
  std::vector<int> included;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) included.push_back(j);
  }
  if (opt.beta_coordinatewise) {
    for (int j : included) draw_included_block(m, s, {j}, prior, rng);
  } else {
    draw_included_block(m, s, included, prior, rng);
  }
  const double b = prior.b;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] == 0) s.beta[j] = b / std::sqrt(s.tau[j]) * rng.normal();
  }
}

}  // namespace

Eigen::VectorXd residual(const LinearModel& m, const ChainState& s) {
  Eigen::VectorXd res = m.data->y;
  if (s.mu != 0.0) res.array() -= s.mu;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) res -= s.beta[j] * m.data->X.col(j);
  }
  return res;
}

double update_phi(const LinearModel& m, ChainState& s, RngHandle& rng) {
  const double rss = residual(m, s).squaredNorm();
  if (rss < 1e-300) throw DegenerateResidualError("zero residual sum of squares");
  s.phi = rng.gamma(0.5 * m.n(), 0.5 * rss);
  return s.phi;
}

std::pair<double, double> update_intercept(const LinearModel& m, ChainState& s,
                                           const PriorSpec& prior, RngHandle& rng) {
  Eigen::VectorXd r = m.data->y;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) r -= s.beta[j] * m.data->X.col(j);
  }
  const double n = static_cast<double>(m.n());
  const double prec = n * s.phi + s.tau_mu;
  const double mean = s.phi * r.sum() / prec;
  s.mu = mean + rng.normal() / std::sqrt(prec);
  s.tau_mu = rng.gamma(prior.intercept_shape + 0.5,
                       prior.intercept_rate + 0.5 * s.mu * s.mu);
  return {s.mu, s.tau_mu};
}

void gibbs_sweep(const LinearModel& m, ChainState& s, const PriorSpec& prior,
                 const SweepOptions& opt, RngHandle& rng, const GraphPrior* graph,
                 ClusterComembership* stats) {
  prior.validate();
  for (SweepStage stage : opt.order) {
    switch (stage) {
      case SweepStage::Gamma: {
        if (opt.gamma_update == GammaUpdate::None) break;
        const IsingField field = build_field(m, s, prior, graph);
        if (opt.gamma_update == GammaUpdate::SingleSiteGibbs) {
          single_site_sweep(field, s.gamma, rng, SiteFlavor::Gibbs);
        } else if (opt.gamma_update == GammaUpdate::SingleSiteMh) {
          single_site_sweep(field, s.gamma, rng, SiteFlavor::MhAntithetic);
        } else {
          cluster_sweep(field, s.gamma, prior.lambda_cluster, rng, stats);
        }
        break;
      }
      case SweepStage::Beta:
        if (opt.update_beta) update_beta(m, s, prior, opt, rng);
        break;
      case SweepStage::Tau:
        if (opt.update_tau) {
          for (int j = 0; j < m.p(); ++j) update_tau(s, j, prior, rng);
        }
        break;
      case SweepStage::Phi:
        if (opt.update_phi) update_phi(m, s, rng);
        break;
      case SweepStage::Mu:
        if (prior.intercept) update_intercept(m, s, prior, rng);
        break;
    }
  }
}

}  // namespace bvgm
