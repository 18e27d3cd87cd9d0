#include "bvgm/spline.hpp"

#include <algorithm>
#include <cmath>

#include "bvgm/shrinkage.hpp"

namespace bvgm {

namespace {

// Interpolated order-statistic quantiles at (k)/(K-1), k = 0..K-1.
Eigen::VectorXd quantile_knots(const Eigen::VectorXd& x, int K) {
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(sorted.size());
  Eigen::VectorXd knots(K);
  for (int k = 0; k < K; ++k) {
    const double pos = static_cast<double>(k) / (K - 1) * (n - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, n - 1);
    const double frac = pos - lo;
    knots[k] = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  return knots;
}

}  // namespace

void SplineBasisEntry::eval_phi_psi(double x, Eigen::VectorXd& phi,
                                    Eigen::VectorXd& psi) const {
  phi = Eigen::VectorXd::Zero(K);
  psi = Eigen::VectorXd::Zero(K);
  // locate the segment [knots_i, knots_{i+1}]; clamp outside the range
  int i = static_cast<int>(std::upper_bound(knots.data(), knots.data() + K, x) -
                           knots.data()) - 1;
  i = std::clamp(i, 0, K - 2);
  const double len = knots[i + 1] - knots[i];
  const double dl = x - knots[i];      // distance from the left knot
  const double dr = x - knots[i + 1];  // distance from the right knot
  // left knot of the segment: its right-hand branch
  phi[i] = (2.0 / (len * len * len)) * dr * dr * (dl + 0.5 * len);
  psi[i] = (dr * dr * dl) / (len * len);
  // right knot: its left-hand branch
  phi[i + 1] = -(2.0 / (len * len * len)) * dl * dl * (dr - 0.5 * len);
  psi[i + 1] = (dl * dl * dr) / (len * len);
}

Eigen::RowVectorXd SplineBasisEntry::eval_t_row(double x) const {
  Eigen::VectorXd phi, psi;
  eval_phi_psi(x, phi, psi);
  return (phi + S.transpose() * psi).transpose();
}

Eigen::RowVectorXd SplineBasisEntry::eval_zstar_row(double x) const {
  const Eigen::RowVectorXd t = eval_t_row(x);
  Eigen::RowVectorXd z(K - 1);
  for (int k = 0; k < K - 1; ++k) z[k] = t[k + 1] - t[0];
  return z;
}

Eigen::RowVectorXd SplineBasisEntry::eval_z_row(double x) const {
  return eval_zstar_row(x) * DeltaInv;
}

Eigen::VectorXd SplineBasisEntry::block_precision(double tau_e, double tau_d,
                                                  double b) const {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(M, tau_d);
  d[0] = tau_e;
  d[M - 1] = tau_e;
  return d / (b * b);
}

SplineBasisEntry build_ls_basis(const Eigen::VectorXd& x, int K) {
  if (K < 4) throw DomainError("build_ls_basis: need K >= 4 knots");
  const int n = static_cast<int>(x.size());
  if (n < K) throw DomainError("build_ls_basis: need at least K observations");

  SplineBasisEntry e;
  e.K = K;
  e.M = K - 1;
  e.knots = quantile_knots(x, K);
  const double range = e.knots[K - 1] - e.knots[0];
  if (!(range > 0.0)) throw DomainError("build_ls_basis: degenerate knots (constant x)");
  for (int k = 1; k < K; ++k) {
    if (e.knots[k] <= e.knots[k - 1]) {
      e.knots[k] = e.knots[k - 1] + 1e-9 * range;  // tied quantiles
      e.jittered_knots = true;
    }
  }

  // segment lengths: len[i] = knots[i+1] - knots[i]
  Eigen::VectorXd len(K - 1);
  for (int i = 0; i < K - 1; ++i) len[i] = e.knots[i + 1] - e.knots[i];

  e.A = Eigen::MatrixXd::Zero(K, K);
  e.Cm = Eigen::MatrixXd::Zero(K, K);
  e.A(0, 0) = 2.0;
  e.A(0, 1) = 1.0;
  e.Cm(0, 0) = -1.0 / len[0];
  e.Cm(0, 1) = 1.0 / len[0];
  for (int k = 1; k < K - 1; ++k) {
    const double om = len[k - 1] / (len[k - 1] + len[k]);
    const double mu = 1.0 - om;
    e.A(k, k - 1) = om;
    e.A(k, k) = 2.0;
    e.A(k, k + 1) = mu;
    e.Cm(k, k - 1) = -om / len[k - 1];
    e.Cm(k, k) = om / len[k - 1] - mu / len[k];
    e.Cm(k, k + 1) = mu / len[k];
  }
  e.A(K - 1, K - 2) = 1.0;
  e.A(K - 1, K - 1) = 2.0;
  e.Cm(K - 1, K - 2) = -1.0 / len[K - 2];
  e.Cm(K - 1, K - 1) = 1.0 / len[K - 2];
  e.S = e.A.partialPivLu().solve(e.Cm);

  e.Delta = Eigen::MatrixXd::Zero(K - 1, K - 1);
  e.Delta(0, 0) = 2.0 / len[0];
  for (int c = 1; c < K - 1; ++c) e.Delta(0, c) = 1.0 / len[0];
  for (int r = 1; r < K - 2; ++r) {
    e.Delta(r, r - 1) = 1.0 / len[r - 1];
    e.Delta(r, r) = -(1.0 / len[r - 1] + 1.0 / len[r]);
    e.Delta(r, r + 1) = 1.0 / len[r];
  }
  e.Delta(K - 2, K - 3) = -1.0 / len[K - 2];
  e.Delta(K - 2, K - 2) = 1.0 / len[K - 2];
  e.DeltaInv = e.Delta.partialPivLu().solve(Eigen::MatrixXd::Identity(K - 1, K - 1));

  e.Zstar.resize(n, K - 1);
  e.Z.resize(n, K - 1);
  for (int i = 0; i < n; ++i) {
    e.Zstar.row(i) = e.eval_zstar_row(x[i]);
    e.Z.row(i) = e.Zstar.row(i) * e.DeltaInv;
  }
  return e;
}

SplineBasis build_basis(const Dataset& d, int knots) {
  SplineBasis b;
  b.offset.resize(d.p);
  for (int j = 0; j < d.p; ++j) {
    b.offset[j] = b.total_m;
    b.entries.push_back(build_ls_basis(d.X.col(j), knots));
    b.total_m += b.entries.back().M;
  }
  return b;
}

BsamModel::BsamModel(const Dataset& d, int knots)
    : BsamModel(d, build_basis(d, knots)) {}

BsamModel::BsamModel(const Dataset& d, SplineBasis prebuilt)
    : data(&d), basis(std::move(prebuilt)) {
  Eigen::MatrixXd Z(d.n, basis.total_m);
  for (int j = 0; j < d.p; ++j) {
    Z.middleCols(basis.offset[j], basis.entries[j].M) = basis.entries[j].Z;
  }
  Gz.resize(basis.total_m, basis.total_m);
  Gz.setZero();
  Gz.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
  Gz.triangularView<Eigen::StrictlyUpper>() = Gz.transpose();
  az = Z.transpose() * d.y;
  zt1 = Z.transpose() * Eigen::VectorXd::Ones(d.n);
}

Eigen::MatrixXd BsamModel::regression_columns(const ChainState& s) const {
  Eigen::MatrixXd R(n(), p());
  for (int j = 0; j < p(); ++j) {
    R.col(j) = basis.entries[j].Z * s.beta.segment(basis.offset[j], basis.entries[j].M);
  }
  return R;
}

IsingField build_field(const BsamModel& m, const ChainState& s, const PriorSpec& prior,
                       const GraphPrior* graph) {
  const Eigen::MatrixXd R = m.regression_columns(s);
  Eigen::VectorXd y_eff = m.data->y;
  if (s.mu != 0.0) y_eff.array() -= s.mu;
  return build_field(R, y_eff, s.phi, graph, prior.b);
}

BlockConditional bsam_block_conditional(const BsamModel& m, const ChainState& s,
                                        const std::vector<int>& c, const PriorSpec& prior) {
  BlockConditional out;
  out.indices = c;
  if (c.empty()) return out;

  bool all_in = true, all_out = true;
  for (int j : c) (s.gamma[j] != 0 ? all_out : all_in) = false;
  if (!all_in && !all_out) throw DomainError("bsam_block_conditional: mixed gamma block");

  std::vector<int> cols;
  for (int j : c) {
    for (int k = 0; k < m.basis.entries[j].M; ++k) cols.push_back(m.basis.offset[j] + k);
  }
  const int dim = static_cast<int>(cols.size());

  Eigen::VectorXd dprec(dim);
  {
    int at = 0;
    for (int j : c) {
      const auto& ent = m.basis.entries[j];
      dprec.segment(at, ent.M) = ent.block_precision(s.tau_e[j], s.tau_d[j], prior.b);
      at += ent.M;
    }
  }

  if (all_out) {
    out.sigma = Eigen::MatrixXd::Zero(dim, dim);
    out.sigma.diagonal() = dprec.cwiseInverse();
    out.mu = Eigen::VectorXd::Zero(dim);
    return out;
  }

  Eigen::MatrixXd prec(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) prec(i, j) = s.phi * m.Gz(cols[i], cols[j]);
  }
  prec.diagonal() += dprec;

  // stacked coefficients of the other included blocks
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(m.total_m());
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) {
      gb.segment(m.basis.offset[j], m.basis.entries[j].M) =
          s.beta.segment(m.basis.offset[j], m.basis.entries[j].M);
    }
  }
  for (int col : cols) gb[col] = 0.0;
  const Eigen::VectorXd cross = m.Gz * gb;

  Eigen::VectorXd rhs(dim);
  for (int i = 0; i < dim; ++i) {
    const double a_eff = m.az[cols[i]] - s.mu * m.zt1[cols[i]];
    rhs[i] = s.phi * (a_eff - cross[cols[i]]);
  }

  const Eigen::MatrixXd L = cholesky_with_jitter(prec);
  Eigen::MatrixXd inv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim, dim));
  out.sigma = L.transpose().triangularView<Eigen::Upper>().solve(inv);
  out.mu = out.sigma * rhs;
  return out;
}

std::pair<double, double> update_bsam_variances(ChainState& s, const SplineBasis& basis,
                                                int j, const PriorSpec& prior, RngHandle& rng) {
  const auto& ent = basis.entries[j];
  const Eigen::VectorXd beta = s.beta.segment(basis.offset[j], ent.M);
  const double b2 = prior.b * prior.b;
  const double ss_edge = beta[0] * beta[0] + beta[ent.M - 1] * beta[ent.M - 1];
  double ss_int = 0.0;
  for (int k = 1; k < ent.M - 1; ++k) ss_int += beta[k] * beta[k];
  const int n_int = ent.M - 2;
  const double tau_e = rng.gamma(0.5 + 1.0, 0.5 + 0.5 * ss_edge / b2);
  const double tau_d = rng.gamma(0.5 + 0.5 * n_int, 0.5 + 0.5 * ss_int / b2);
  s.tau_e[j] = tau_e;
  s.tau_d[j] = tau_d;
  return {tau_e, tau_d};
}

Eigen::VectorXd bsam_residual(const BsamModel& m, const ChainState& s) {
  Eigen::VectorXd res = m.data->y;
  if (s.mu != 0.0) res.array() -= s.mu;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) {
      res -= m.basis.entries[j].Z * s.beta.segment(m.basis.offset[j], m.basis.entries[j].M);
    }
  }
  return res;
}

double update_phi(const BsamModel& m, ChainState& s, RngHandle& rng) {
  const double rss = bsam_residual(m, s).squaredNorm();
  if (rss < 1e-300) throw DegenerateResidualError("zero residual sum of squares");
  s.phi = rng.gamma(0.5 * m.n(), 0.5 * rss);
  return s.phi;
}

std::pair<double, double> update_intercept(const BsamModel& m, ChainState& s,
                                           const PriorSpec& prior, RngHandle& rng) {
  Eigen::VectorXd r = m.data->y;
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) {
      r -= m.basis.entries[j].Z * s.beta.segment(m.basis.offset[j], m.basis.entries[j].M);
    }
  }
  const double n = static_cast<double>(m.n());
  const double prec = n * s.phi + s.tau_mu;
  const double mean = s.phi * r.sum() / prec;
  s.mu = mean + rng.normal() / std::sqrt(prec);
  s.tau_mu = rng.gamma(prior.intercept_shape + 0.5,
                       prior.intercept_rate + 0.5 * s.mu * s.mu);
  return {s.mu, s.tau_mu};
}

namespace {

void draw_bsam_included(const BsamModel& m, ChainState& s, const std::vector<int>& c,
                        const PriorSpec& prior, RngHandle& rng) {
  if (c.empty()) return;
  std::vector<int> cols;
  for (int j : c) {
    for (int k = 0; k < m.basis.entries[j].M; ++k) cols.push_back(m.basis.offset[j] + k);
  }
  const int dim = static_cast<int>(cols.size());

  Eigen::MatrixXd prec(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      prec(i, j) = prec(j, i) = s.phi * m.Gz(cols[i], cols[j]);
    }
  }
  {
    int at = 0;
    for (int j : c) {
      const auto& ent = m.basis.entries[j];
      prec.diagonal().segment(at, ent.M) += ent.block_precision(s.tau_e[j], s.tau_d[j], prior.b);
      at += ent.M;
    }
  }

  Eigen::VectorXd gb = Eigen::VectorXd::Zero(m.total_m());
  for (int j = 0; j < m.p(); ++j) {
    if (s.gamma[j] != 0) {
      gb.segment(m.basis.offset[j], m.basis.entries[j].M) =
          s.beta.segment(m.basis.offset[j], m.basis.entries[j].M);
    }
  }
  for (int col : cols) gb[col] = 0.0;
  const Eigen::VectorXd cross = m.Gz * gb;
  Eigen::VectorXd rhs(dim);
  for (int i = 0; i < dim; ++i) {
    rhs[i] = s.phi * (m.az[cols[i]] - s.mu * m.zt1[cols[i]] - cross[cols[i]]);
  }

  const Eigen::MatrixXd L = cholesky_with_jitter(prec);
  Eigen::VectorXd mean = L.triangularView<Eigen::Lower>().solve(rhs);
  mean = L.transpose().triangularView<Eigen::Upper>().solve(mean);
  Eigen::VectorXd z(dim);
  for (int i = 0; i < dim; ++i) z[i] = rng.normal();
  const Eigen::VectorXd noise = L.transpose().triangularView<Eigen::Upper>().solve(z);
  for (int i = 0; i < dim; ++i) s.beta[cols[i]] = mean[i] + noise[i];
}

}  // namespace

void bsam_sweep(const BsamModel& m, ChainState& s, const PriorSpec& prior,
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
      case SweepStage::Beta: {
        if (!opt.update_beta) break;
        std::vector<int> included;
        for (int j = 0; j < m.p(); ++j) {
          if (s.gamma[j] != 0) included.push_back(j);
        }
        draw_bsam_included(m, s, included, prior, rng);
        for (int j = 0; j < m.p(); ++j) {
          if (s.gamma[j] == 0) {
            const auto& ent = m.basis.entries[j];
            const Eigen::VectorXd dprec =
                ent.block_precision(s.tau_e[j], s.tau_d[j], prior.b);
            for (int k = 0; k < ent.M; ++k) {
              s.beta[m.basis.offset[j] + k] = rng.normal() / std::sqrt(dprec[k]);
            }
          }
        }
        break;
      }
      case SweepStage::Tau:
        if (opt.update_tau) {
          for (int j = 0; j < m.p(); ++j) update_bsam_variances(s, m.basis, j, prior, rng);
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

FunctionEstimate estimate_function(const Eigen::MatrixXd& beta_draws,
                                   const Eigen::VectorXi& gamma_draws,
                                   const SplineBasisEntry& entry,
                                   const Eigen::VectorXd& x_eval, EstimateMode mode) {
  const int t = static_cast<int>(beta_draws.rows());
  if (gamma_draws.size() != t) throw DomainError("estimate_function: draw count mismatch");
  const int e = static_cast<int>(x_eval.size());

  FunctionEstimate out;
  out.x = x_eval;
  Eigen::MatrixXd z_eval(e, entry.M);
  for (int i = 0; i < e; ++i) z_eval.row(i) = entry.eval_z_row(x_eval[i]);

  std::vector<int> use;
  for (int i = 0; i < t; ++i) {
    if (mode == EstimateMode::Unconditional || gamma_draws[i] != 0) use.push_back(i);
  }
  if (use.empty()) {
    out.f_hat = Eigen::VectorXd::Zero(e);
    out.lo95 = Eigen::VectorXd::Zero(e);
    out.hi95 = Eigen::VectorXd::Zero(e);
    out.never_selected = true;
    return out;
  }

  Eigen::VectorXd mean_beta = Eigen::VectorXd::Zero(entry.M);
  for (int i : use) mean_beta += beta_draws.row(i).transpose();
  mean_beta /= static_cast<double>(use.size());
  out.f_hat = z_eval * mean_beta;

  out.lo95.resize(e);
  out.hi95.resize(e);
  std::vector<double> vals(use.size());
  for (int i = 0; i < e; ++i) {
    for (std::size_t k = 0; k < use.size(); ++k) {
      vals[k] = z_eval.row(i).dot(beta_draws.row(use[k]));
    }
    std::sort(vals.begin(), vals.end());
    auto quantile = [&](double q) {
      const double pos = q * (static_cast<double>(vals.size()) - 1.0);
      const int lo = static_cast<int>(std::floor(pos));
      const int hi = std::min<int>(lo + 1, static_cast<int>(vals.size()) - 1);
      return vals[lo] + (pos - lo) * (vals[hi] - vals[lo]);
    };
    out.lo95[i] = quantile(0.025);
    out.hi95[i] = quantile(0.975);
  }
  return out;
}

}  // namespace bvgm
