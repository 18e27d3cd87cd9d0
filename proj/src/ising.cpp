#include "bvgm/ising.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace bvgm {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void attach_graph(IsingField& f, const GraphPrior& g, double b) {
  const int p = f.p();
  if (g.adjacency.rows() != p || g.adjacency.cols() != p) {
    throw DomainError("graph prior adjacency does not match p");
  }
  f.W = build_graph_prior_matrix(g, b);
  f.j_eff = f.J + f.W;
  f.lambda_mask = g.adjacency.cast<double>();
  f.bond_ = f.lambda_mask.cwiseProduct(f.j_eff);
}

}  // namespace

void GraphPrior::validate() const {
  if (adjacency.rows() != adjacency.cols()) throw DomainError("adjacency must be square");
  if (w0 < 0.0 || delta_w < 0.0) throw DomainError("graph prior strengths must be >= 0");
  for (int i = 0; i < adjacency.rows(); ++i) {
    if (adjacency(i, i) != 0) throw DomainError("adjacency diagonal must be zero");
    for (int j = 0; j < adjacency.cols(); ++j) {
      const int v = adjacency(i, j);
      if (v != 0 && v != 1) throw DomainError("adjacency entries must be 0/1");
      if (v != adjacency(j, i)) throw DomainError("adjacency must be symmetric");
    }
  }
}

GraphPrior linear_chain_prior(int p, double w0, GraphPrior::Schedule schedule) {
  GraphPrior g;
  g.adjacency = Eigen::MatrixXi::Zero(p, p);
  for (int i = 0; i + 1 < p; ++i) {
    g.adjacency(i, i + 1) = g.adjacency(i + 1, i) = 1;
  }
  if (p > 2) {
    // exchangeable chain: the two boundary nodes are neighbors
    g.adjacency(0, p - 1) = g.adjacency(p - 1, 0) = 1;
  }
  g.w0 = w0;
  g.schedule = schedule;
  return g;
}

Eigen::MatrixXi load_adjacency_csv(const std::string& path, int p,
                                   const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file " + path);
  std::unordered_map<std::string, int> index;
  for (std::size_t k = 0; k < names.size(); ++k) index[names[k]] = static_cast<int>(k);

  auto resolve = [&](const std::string& tok) -> int {
    auto it = index.find(tok);
    if (it != index.end()) return it->second;
    try {
      const int v = std::stoi(tok) - 1;  // 1-based indices
      if (v < 0 || v >= p) throw ConfigError("graph node index out of range: " + tok);
      return v;
    } catch (const std::invalid_argument&) {
      throw ConfigError("unknown graph node '" + tok + "'");
    }
  };

  Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(p, p);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw ConfigError("bad edge row '" + line + "' in " + path);
    }
    const int i = resolve(a), j = resolve(b);
    if (i == j) continue;
    adj(i, j) = adj(j, i) = 1;
  }
  return adj;
}

Eigen::MatrixXd build_graph_prior_matrix(const GraphPrior& g, double b) {
  g.validate();
  double base = g.w0;
  if (g.schedule == GraphPrior::Schedule::PhiLogB) base *= normal_cdf(std::log(b));
  Eigen::MatrixXd W = base * g.adjacency.cast<double>();
  if (g.delta_w > 0.0 && !g.boost_set.empty()) {
    double boost = g.delta_w;
    if (g.schedule == GraphPrior::Schedule::PhiLogB) boost *= normal_cdf(std::log(b));
    for (int i : g.boost_set) {
      for (int j : g.boost_set) {
        if (i != j && g.adjacency(i, j) != 0) W(i, j) += boost;
      }
    }
  }
  return W;
}

IsingField build_field_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rty,
                            double phi, const GraphPrior* graph, double b) {
  IsingField f;
  f.J = -0.5 * phi * gram;
  f.h = phi * rty;
  // h* = phi R^T (y - R 1/2) = h + J * 1
  f.h_star = f.h + f.J.rowwise().sum();
  if (graph != nullptr) {
    attach_graph(f, *graph, b);
  } else {
    f.j_eff = f.J;
  }
  return f;
}

IsingField build_field(const Eigen::MatrixXd& R, const Eigen::VectorXd& y, double phi,
                       const GraphPrior* graph, double b) {
  Eigen::MatrixXd gram(R.cols(), R.cols());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(R.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return build_field_gram(gram, R.transpose() * y, phi, graph, b);
}

double energy(const IsingField& field, const Eigen::VectorXi& gamma) {
  const Eigen::VectorXd g = gamma.cast<double>();
  return -g.dot(field.J * g) - field.h.dot(g);
}

double energy_pairwise(const IsingField& field, const Eigen::VectorXi& gamma) {
  const int p = field.p();
  const Eigen::MatrixXd& Je = field.j_eff;
  double pair_sum = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (gamma[i] == gamma[j]) pair_sum += Je(i, j);
    }
  }
  double field_sum = 0.0;
  for (int j = 0; j < p; ++j) {
    if (gamma[j] != 0) field_sum += field.h_star[j];
  }
  return -pair_sum - field_sum;
}

namespace {

// Shared decision rule given dU(0->1); returns the new gamma_j.
inline int decide_site(double du10, int gamma_j, RngHandle& rng, SiteFlavor flavor) {
  if (flavor == SiteFlavor::Gibbs) {
    const double p1 = 1.0 / (1.0 + std::exp(du10));
    return rng.uniform() < p1 ? 1 : 0;
  }
  // Antithetic MH: flip with min(1, exp(-dU_flip)).
  const double du_flip = gamma_j == 0 ? du10 : -du10;
  if (du_flip <= 0.0 || rng.uniform() < std::exp(-du_flip)) return 1 - gamma_j;
  return gamma_j;
}

}  // namespace

double delta_energy_01(const IsingField& field, const Eigen::VectorXi& gamma, int j) {
  // dU(0->1) = -sum_{i != j} Jeff_ij (2 gamma_i - 1) - h*_j; O(p).
  const int p = field.p();
  const Eigen::MatrixXd& Je = field.j_eff;
  double s = 0.0;
  for (int i = 0; i < p; ++i) {
    if (i == j) continue;
    s += Je(i, j) * (2.0 * gamma[i] - 1.0);
  }
  return -s - field.h_star[j];
}

void single_site_step(const IsingField& field, Eigen::VectorXi& gamma, int j,
                      RngHandle& rng, SiteFlavor flavor) {
  gamma[j] = decide_site(delta_energy_01(field, gamma, j), gamma[j], rng, flavor);
}

std::vector<int> random_permutation(int n, RngHandle& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  }
  return perm;
}

void single_site_sweep(const IsingField& field, Eigen::VectorXi& gamma, RngHandle& rng,
                       SiteFlavor flavor) {
  const int p = field.p();
  Eigen::VectorXd spin = 2.0 * gamma.cast<double>().array() - 1.0;
  for (int j : random_permutation(p, rng)) {
    const double s = field.j_eff.col(j).dot(spin) - field.j_eff(j, j) * spin[j];
    const int next = decide_site(-s - field.h_star[j], gamma[j], rng, flavor);
    gamma[j] = next;
    spin[j] = 2.0 * next - 1.0;
  }
}

}  // namespace bvgm
