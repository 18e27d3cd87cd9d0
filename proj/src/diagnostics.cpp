#include "bvgm/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace bvgm {

Eigen::VectorXd magnetization(const Eigen::MatrixXi& gamma_draws) {
  if (gamma_draws.rows() < 1) throw DomainError("magnetization: need at least one draw");
  return gamma_draws.cast<double>().rowwise().mean();
}

Eigen::VectorXd acf(const Eigen::VectorXd& series, int max_lag) {
  const int n = static_cast<int>(series.size());
  if (max_lag >= n) throw DomainError("acf: max lag must be below the series length");
  const double mean = series.mean();
  const Eigen::VectorXd d = series.array() - mean;
  const double denom = d.squaredNorm();
  if (denom <= 0.0) throw ZeroVarianceError("constant magnetization series");
  Eigen::VectorXd c(max_lag + 1);
  for (int t = 0; t <= max_lag; ++t) {
    c[t] = d.head(n - t).dot(d.tail(n - t)) / denom;
  }
  return c;
}

MixingReport mixing_report(const Eigen::MatrixXi& gamma_draws, int max_lag,
                           double fit_threshold) {
  if (gamma_draws.rows() < 2 * max_lag) {
    throw DomainError("mixing_report: need at least 2L draws");
  }
  MixingReport r;
  r.series = magnetization(gamma_draws);
  r.C = acf(r.series, max_lag);
  r.acf_abs_sum = r.C.array().abs().sum();

  // least squares of log|C(t)| = log C0 - t/tau over the above-threshold lags
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int t = 0; t <= max_lag; ++t) {
    const double a = std::abs(r.C[t]);
    if (a <= fit_threshold) continue;
    const double x = t, y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  r.fit_points = m;
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double inter = (sy - slope * sx) / m;
    r.exp_corr_time = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
    r.fit_c0 = std::exp(inter);
  } else {
    r.exp_corr_time = 0.0;  // chain decorrelates within one lag
    r.fit_c0 = m == 1 ? std::abs(r.C[0]) : 0.0;
  }
  return r;
}

Eigen::VectorXd log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("log_grid: bad range");
  Eigen::VectorXd g(points);
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = std::exp(std::log(lo) + i * step);
  return g;
}

ProfileCurve profile_sweep(
    const Eigen::VectorXd& b_grid,
    const std::function<Eigen::VectorXd(double b, std::uint64_t stream)>& run_chain,
    std::uint64_t seed, int iters, int burn_in) {
  const int g = static_cast<int>(b_grid.size());
  if (g < 1) throw DomainError("profile_sweep: empty grid");
  for (int i = 1; i < g; ++i) {
    if (!(b_grid[i] > b_grid[i - 1])) throw DomainError("profile_sweep: grid must increase");
  }
  if (iters <= burn_in || burn_in < 0) throw DomainError("profile_sweep: iters > burn_in >= 0");

  ProfileCurve out;
  out.b_grid = b_grid;
  out.iters = iters;
  out.burn_in = burn_in;
  out.seed = seed;
  for (int i = 0; i < g; ++i) {
    const Eigen::VectorXd probs = run_chain(b_grid[i], static_cast<std::uint64_t>(i));
    if (i == 0) out.probs.resize(g, probs.size());
    if (probs.minCoeff() < 0.0 || probs.maxCoeff() > 1.0) {
      throw DomainError("profile_sweep: probabilities outside [0,1]");
    }
    out.probs.row(i) = probs;
  }
  return out;
}

}  // namespace bvgm
