#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bvgm/model.hpp"
#include "bvgm/rng.hpp"

namespace bvgm {

/// Prior interaction graph. The schedule controls how the base strength
/// scales with the global shrinkage b; delta_w boosts pairs whose both ends
/// lie in `boost_set`.
struct GraphPrior {
  Eigen::MatrixXi adjacency;  // symmetric 0/1, zero diagonal
  double w0 = 0.0;
  double delta_w = 0.0;
  enum class Schedule { Fixed, PhiLogB };
  Schedule schedule = Schedule::Fixed;
  std::vector<int> boost_set;

  void validate() const;
};

/// Linear chain with wraparound: nodes i, j adjacent when |i-j| = 1 or p-1.
GraphPrior linear_chain_prior(int p, double w0, GraphPrior::Schedule schedule);

/// Edge-list CSV (one "i,j" pair per row, 1-based indices or names).
Eigen::MatrixXi load_adjacency_csv(const std::string& path, int p,
                                   const std::vector<std::string>& names);

/// W = base * adjacency (+ delta_w on boosted pairs); base = w0, or
/// w0 * Phi(log b) under the PhiLogB schedule.
Eigen::MatrixXd build_graph_prior_matrix(const GraphPrior& g, double b);

/// The Ising representation of the inclusion-vector conditional. J is the
/// full interaction matrix -phi R^T R / 2, h = phi R^T y and
/// h* = phi R^T (y - R 1/2). With a graph prior, j_eff = J + W carries the
/// posterior couplings and `lambda_mask` restricts cluster bonds to prior
/// edges.
struct IsingField {
  Eigen::MatrixXd J;
  Eigen::VectorXd h;
  Eigen::VectorXd h_star;
  Eigen::MatrixXd W;            // empty when no graph prior
  Eigen::MatrixXd j_eff;        // J + W (aliases J when W empty)
  Eigen::MatrixXd lambda_mask;  // empty when no graph prior

  bool has_graph_prior() const { return W.size() != 0; }
  int p() const { return static_cast<int>(h.size()); }

  /// Bond matrix for cluster growth: adjacency-masked j_eff with a prior,
  /// plain J without.
  const Eigen::MatrixXd& bond_matrix() const { return has_graph_prior() ? bond_ : J; }
  Eigen::MatrixXd bond_;  // Lambda .* j_eff when a prior is present
};

/// Field from the Gram pieces gram = R^T R and rty = R^T y. This is the
/// cheap per-sweep path: the parametric model reuses its cached correlation
/// matrix and only rescales by beta.
IsingField build_field_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rty,
                            double phi, const GraphPrior* graph = nullptr, double b = 1.0);

/// Field from the raw column matrix R = (beta_1 x_1, ..., beta_p x_p)
/// (or Z_j beta_j columns in BSAM mode).
IsingField build_field(const Eigen::MatrixXd& R, const Eigen::VectorXd& y, double phi,
                       const GraphPrior* graph = nullptr, double b = 1.0);

/// Energy U(gamma) = -gamma^T J gamma - h^T gamma (no prior term).
double energy(const IsingField& field, const Eigen::VectorXi& gamma);

/// Pairwise-form energy -sum_{i<j} Jeff_ij delta_ij - sum_j h*_j gamma_j;
/// differs from energy() by a gamma-independent constant and includes the
/// graph prior when present.
double energy_pairwise(const IsingField& field, const Eigen::VectorXi& gamma);

/// Energy change of setting gamma_j: 0 -> 1 with the rest held fixed.
double delta_energy_01(const IsingField& field, const Eigen::VectorXi& gamma, int j);

enum class SiteFlavor { Gibbs, MhAntithetic };

/// One single-site update at j. Gibbs draws gamma_j from its conditional;
/// MhAntithetic proposes the flip and accepts with min(1, exp(-dU)).
void single_site_step(const IsingField& field, Eigen::VectorXi& gamma, int j,
                      RngHandle& rng, SiteFlavor flavor = SiteFlavor::MhAntithetic);

/// Full pass over the sites in a fresh random order.
void single_site_sweep(const IsingField& field, Eigen::VectorXi& gamma, RngHandle& rng,
                       SiteFlavor flavor = SiteFlavor::MhAntithetic);

/// Fisher-Yates permutation of 0..n-1 drawn from rng.
std::vector<int> random_permutation(int n, RngHandle& rng);

}  // namespace bvgm
