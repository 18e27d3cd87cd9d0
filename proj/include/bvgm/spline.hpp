#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bvgm/dataset.hpp"
#include "bvgm/gibbs.hpp"
#include "bvgm/model.hpp"
#include "bvgm/rng.hpp"

namespace bvgm {

/// Natural-cubic-spline basis in the ordinate/slope (LS) parameterization
/// for one predictor: quantile knots, the slope-constraint system s = A^{-1}C g,
/// the sum-to-zero reduction Z*, and the final basis Z = Z* Delta^{-1} whose
/// coefficient prior splits into edge and interior variance components.
struct SplineBasisEntry {
  Eigen::VectorXd knots;   // K strictly increasing
  Eigen::MatrixXd A, Cm;   // K x K slope-constraint matrices
  Eigen::MatrixXd S;       // A^{-1} C
  Eigen::MatrixXd Delta;   // (K-1) x (K-1) reparameterization
  Eigen::MatrixXd DeltaInv;
  Eigen::MatrixXd Zstar;   // n x (K-1)
  Eigen::MatrixXd Z;       // n x M, M = K-1
  int K = 0, M = 0;
  bool jittered_knots = false;

  /// Cardinal ordinate/slope bases evaluated at x.
  void eval_phi_psi(double x, Eigen::VectorXd& phi, Eigen::VectorXd& psi) const;
  /// Row t(x)^T with the natural-spline slope constraint folded in.
  Eigen::RowVectorXd eval_t_row(double x) const;
  /// Row of Z* (sum-to-zero constraint folded in).
  Eigen::RowVectorXd eval_zstar_row(double x) const;
  /// Row of the final basis Z.
  Eigen::RowVectorXd eval_z_row(double x) const;
  /// diag(tau_e, tau_d I, tau_e) / b^2 — the block prior precision.
  Eigen::VectorXd block_precision(double tau_e, double tau_d, double b) const;
};

/// Build the basis for one predictor with K >= 4 knots at the
/// 100 (k-1)/(K-1) % quantiles. Tied quantiles are jittered by
/// 1e-9 * range (flagged on the entry).
SplineBasisEntry build_ls_basis(const Eigen::VectorXd& x, int K);

/// Per-predictor bases plus stacked-block bookkeeping.
struct SplineBasis {
  std::vector<SplineBasisEntry> entries;
  std::vector<int> offset;  // start of block j in the stacked coefficient vector
  int total_m = 0;

  int p() const { return static_cast<int>(entries.size()); }
  int block_size(int j) const { return entries[j].M; }
};

SplineBasis build_basis(const Dataset& d, int knots);  // knots = K for every predictor

/// BSAM model with the cached Gram pieces of the stacked basis.
struct BsamModel {
  const Dataset* data;
  SplineBasis basis;
  Eigen::MatrixXd Gz;   // M x M, Z^T Z
  Eigen::VectorXd az;   // Z^T y
  Eigen::VectorXd zt1;  // Z^T 1 (for the intercept adjustment)

  BsamModel(const Dataset& d, int knots);
  BsamModel(const Dataset& d, SplineBasis prebuilt);
  int p() const { return data->p; }
  int n() const { return data->n; }
  int total_m() const { return basis.total_m; }

  /// Columns r_j = Z_j beta_j of the marginal-regression matrix.
  Eigen::MatrixXd regression_columns(const ChainState& s) const;
};

/// Field from the current BSAM state (same J, h, h* construction with
/// r_j = Z_j beta_j).
IsingField build_field(const BsamModel& m, const ChainState& s, const PriorSpec& prior,
                       const GraphPrior* graph = nullptr);

/// Gaussian conditional of the stacked included blocks (Eq.-47 layout with
/// block-diagonal D); excluded blocks are drawn from N(0, b^2 T_j).
BlockConditional bsam_block_conditional(const BsamModel& m, const ChainState& s,
                                        const std::vector<int>& c, const PriorSpec& prior);

/// Conjugate updates of the edge/interior precisions for block j given
/// beta_j ~ N(0, b^2 T_j) and G(1/2, 1/2) priors.
std::pair<double, double> update_bsam_variances(ChainState& s, const SplineBasis& basis,
                                                int j, const PriorSpec& prior, RngHandle& rng);

Eigen::VectorXd bsam_residual(const BsamModel& m, const ChainState& s);
double update_phi(const BsamModel& m, ChainState& s, RngHandle& rng);
std::pair<double, double> update_intercept(const BsamModel& m, ChainState& s,
                                           const PriorSpec& prior, RngHandle& rng);

/// One full BSAM sweep: gamma -> beta blocks -> (tau_e, tau_d) -> phi -> (mu).
void bsam_sweep(const BsamModel& m, ChainState& s, const PriorSpec& prior,
                const SweepOptions& opt, RngHandle& rng,
                const GraphPrior* graph = nullptr, ClusterComembership* stats = nullptr);

enum class EstimateMode { Conditional, Unconditional };

/// Posterior function estimate for one predictor from stored draws.
struct FunctionEstimate {
  Eigen::VectorXd x;      // evaluation points
  Eigen::VectorXd f_hat;  // Z E(beta | .)
  Eigen::VectorXd lo95, hi95;
  bool never_selected = false;
};

/// beta_draws: one row per stored iteration (block j coefficients);
/// gamma_draws: matching inclusion flags. Conditional mode averages over
/// gamma = 1 draws and falls back to the zero function when there are none.
FunctionEstimate estimate_function(const Eigen::MatrixXd& beta_draws,
                                   const Eigen::VectorXi& gamma_draws,
                                   const SplineBasisEntry& entry,
                                   const Eigen::VectorXd& x_eval, EstimateMode mode);

}  // namespace bvgm
