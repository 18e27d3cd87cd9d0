#include "bvgm/wolff.hpp"

#include <cmath>

namespace bvgm {

namespace {

inline double sign_of(int gamma_j) { return gamma_j == 0 ? 1.0 : -1.0; }  // (-1)^gamma

void admit(ClusterState& c, const IsingField& field, int j, const Eigen::VectorXi& gamma) {
  c.members.push_back(j);
  c.in_cluster[j] = 1;
  (gamma[j] != 0 ? c.c1 : c.c0).push_back(j);
  const auto& je = field.j_eff.col(j);
  const auto& bo = field.bond_matrix().col(j);
  if (gamma[j] != 0) {
    c.se1 += je;
    c.sv1 += bo;
  } else {
    c.se0 += je;
    c.sv0 += bo;
  }
}

inline double bond_exponent(const ClusterState& c, const Eigen::VectorXi& gamma, int j,
                            double lambda) {
  return lambda * sign_of(gamma[j]) * (c.sv1[j] - c.sv0[j]);
}

}  // namespace

double add_probability(const IsingField& field, const ClusterState& cluster, int j,
                       const Eigen::VectorXi& gamma, double lambda) {
  if (cluster.in_cluster[j]) throw DomainError("add_probability: node already in cluster");
  const double p = 1.0 - std::exp(bond_exponent(cluster, gamma, j, lambda));
  return p > 0.0 ? p : 0.0;
}

ClusterState grow_cluster(const IsingField& field, const Eigen::VectorXi& gamma,
                          int seed, double lambda, RngHandle& rng) {
  const int p = field.p();
  ClusterState c;
  c.in_cluster.assign(p, 0);
  c.se1 = Eigen::VectorXd::Zero(p);
  c.se0 = Eigen::VectorXd::Zero(p);
  c.sv1 = Eigen::VectorXd::Zero(p);
  c.sv0 = Eigen::VectorXd::Zero(p);
  admit(c, field, seed, gamma);

  // Each candidate is re-examined only against the members added since its
  // last test (watermark = signed bond sum already consumed). Every
  // node-member bond is thereby attempted exactly once, which is what makes
  // the forward/reverse growth probabilities in the detailed-balance
  // argument telescope to the final boundary product.
  Eigen::VectorXd tested = Eigen::VectorXd::Zero(p);
  bool added = true;
  while (added && static_cast<int>(c.members.size()) < p) {
    added = false;
    for (int j : random_permutation(p, rng)) {
      if (c.in_cluster[j]) continue;
      const double total = c.sv1[j] - c.sv0[j];
      const double expo = lambda * sign_of(gamma[j]) * (total - tested[j]);
      tested[j] = total;
      // p_a = max(1 - exp(expo), 0); skip the uniform when the bond is dead
      if (expo >= 0.0) continue;
      if (rng.uniform() < 1.0 - std::exp(expo)) {
        admit(c, field, j, gamma);
        added = true;
      }
    }
  }
  return c;
}

double flip_acceptance(const IsingField& field, const Eigen::VectorXi& gamma,
                       const ClusterState& cluster, double lambda) {
  if (cluster.members.empty()) throw DomainError("flip_acceptance: empty cluster");
  const int p = field.p();
  double log_alpha = 0.0;
  for (int j = 0; j < p; ++j) {
    if (cluster.in_cluster[j]) continue;
    const double full = cluster.se1[j] - cluster.se0[j];
    const double bonded = cluster.sv1[j] - cluster.sv0[j];
    log_alpha += sign_of(gamma[j]) * (full - lambda * bonded);
  }
  for (int j : cluster.c0) log_alpha += field.h_star[j];
  for (int j : cluster.c1) log_alpha -= field.h_star[j];
  return log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
}

Eigen::MatrixXd ClusterComembership::aligned_frequency() const {
  return sweeps > 0 ? (aligned / static_cast<double>(sweeps)).eval() : aligned;
}

Eigen::MatrixXd ClusterComembership::anti_frequency() const {
  return sweeps > 0 ? (anti / static_cast<double>(sweeps)).eval() : anti;
}

int cluster_sweep(const IsingField& field, Eigen::VectorXi& gamma, double lambda,
                  RngHandle& rng, ClusterComembership* stats) {
  const int p = field.p();
  const int seed = rng.uniform_int(p);
  ClusterState cluster = grow_cluster(field, gamma, seed, lambda, rng);

  if (stats != nullptr) {
    stats->sweeps += 1;
    stats->aligned.diagonal().array() += 1.0;  // every node is self-aligned
    auto count_pairs = [&](const std::vector<int>& a, const std::vector<int>& b,
                           Eigen::MatrixXd& m) {
      for (int i : a) {
        for (int j : b) {
          if (i != j) m(i, j) += 1.0;
        }
      }
    };
    count_pairs(cluster.c1, cluster.c1, stats->aligned);
    count_pairs(cluster.c0, cluster.c0, stats->aligned);
    count_pairs(cluster.c1, cluster.c0, stats->anti);
    count_pairs(cluster.c0, cluster.c1, stats->anti);
  }

  const double alpha = flip_acceptance(field, gamma, cluster, lambda);
  if (alpha >= 1.0 || rng.uniform() < alpha) {
    for (int j : cluster.members) gamma[j] = 1 - gamma[j];
  }

  // One-step MH pass over every node. Restricting this pass to the outside
  // nodes would couple its domain to the cluster draw, whose generation
  // probability depends on the outside spins, and the composed kernel would
  // lose the target as its stationary law (the enumeration oracle rejects
  // that variant). A full fixed-domain pass composes cleanly.
  single_site_sweep(field, gamma, rng, SiteFlavor::MhAntithetic);
  return static_cast<int>(cluster.members.size());
}

}  // namespace bvgm
