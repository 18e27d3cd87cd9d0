#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bvgm/ising.hpp"
#include "bvgm/rng.hpp"

namespace bvgm {

/// A grown cluster: members split into the spin-1 sub-cluster c1 and the
/// spin-0 sub-cluster c0 (the seed is always a member). The running sums
/// cache per-node couplings to the current cluster so growth passes stay
/// O(p) each.
struct ClusterState {
  std::vector<int> members;
  std::vector<int> c1, c0;
  std::vector<std::uint8_t> in_cluster;
  // sum over c1 / c0 of j_eff(j, k) and of the bond matrix, per node j
  Eigen::VectorXd se1, se0, sv1, sv0;
};

/// Probability of admitting node j (currently outside) into the cluster:
/// max{1 - exp[lambda (-1)^{gamma_j} (sum_{c1} V_jk - sum_{c0} V_jl)], 0}
/// with V the bond matrix (adjacency-masked j_eff under a graph prior).
double add_probability(const IsingField& field, const ClusterState& cluster, int j,
                       const Eigen::VectorXi& gamma, double lambda);

/// Grow a cluster from `seed`: repeated full passes over the outside nodes
/// in fresh random order, each admission updating the running sums, until a
/// pass admits nobody.
ClusterState grow_cluster(const IsingField& field, const Eigen::VectorXi& gamma,
                          int seed, double lambda, RngHandle& rng);

/// Acceptance probability for flipping the grown cluster wholesale.
double flip_acceptance(const IsingField& field, const Eigen::VectorXi& gamma,
                       const ClusterState& cluster, double lambda);

/// Aligned / anti-aligned co-membership counters for the cluster heatmaps.
/// A node is always self-aligned and never self-anti-aligned.
struct ClusterComembership {
  Eigen::MatrixXd aligned;
  Eigen::MatrixXd anti;
  std::int64_t sweeps = 0;

  explicit ClusterComembership(int p)
      : aligned(Eigen::MatrixXd::Zero(p, p)), anti(Eigen::MatrixXd::Zero(p, p)) {}
  Eigen::MatrixXd aligned_frequency() const;
  Eigen::MatrixXd anti_frequency() const;
};

/// One cluster sweep: uniform seed, growth, wholesale flip with
/// flip_acceptance, then a single-site MH pass over the remaining outside
/// nodes. Returns the cluster size.
int cluster_sweep(const IsingField& field, Eigen::VectorXi& gamma, double lambda,
                  RngHandle& rng, ClusterComembership* stats = nullptr);

}  // namespace bvgm
