#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "bvgm/errors.hpp"

namespace bvgm {

/// Per-sweep magnetization M_i = mean_j gamma_j of stored draws (rows).
Eigen::VectorXd magnetization(const Eigen::MatrixXi& gamma_draws);

/// Time-delayed autocorrelation with the truncated-numerator convention:
/// C(t) = sum_{i<=N-t} (M_i - Mbar)(M_{i+t} - Mbar) / sum_i (M_i - Mbar)^2.
/// Throws ZeroVarianceError on a constant series (a frozen chain).
Eigen::VectorXd acf(const Eigen::VectorXd& series, int max_lag);

struct MixingReport {
  Eigen::VectorXd series;
  Eigen::VectorXd C;            // lags 0..L
  double acf_abs_sum = 0.0;     // sum_t |C(t)|
  double exp_corr_time = 0.0;   // tau from |C(t)| ~ C0 exp(-t/tau)
  double fit_c0 = 0.0;
  int fit_points = 0;
};

/// ACF summary of the magnetization series; the exponential time is a least
/// squares fit of log|C(t)| over lags with |C(t)| above `fit_threshold`.
MixingReport mixing_report(const Eigen::MatrixXi& gamma_draws, int max_lag = 100,
                           double fit_threshold = 0.05);

struct ProfileCurve {
  Eigen::VectorXd b_grid;
  Eigen::MatrixXd probs;  // grid x p marginal selection probabilities
  int iters = 0, burn_in = 0;
  std::uint64_t seed = 0;
  std::string prior, algorithm;
};

/// Log-spaced grid of `points` values over [lo, hi].
Eigen::VectorXd log_grid(double lo, double hi, int points);

/// One chain per grid point with an isolated RNG stream; `run_chain` maps
/// (b, stream) to the vector of post-burn-in inclusion probabilities.
/// Grid points are independent, so results do not depend on execution order.
ProfileCurve profile_sweep(
    const Eigen::VectorXd& b_grid,
    const std::function<Eigen::VectorXd(double b, std::uint64_t stream)>& run_chain,
    std::uint64_t seed, int iters, int burn_in);

}  // namespace bvgm
