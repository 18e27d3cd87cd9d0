#pragma once

#include <vector>

#include <Eigen/Dense>

namespace bvgm {

struct SelectionMetrics {
  double fp_rate = 0.0;  // FP / (FP + TN)
  double fn_rate = 0.0;  // FN / (FN + TP)
  int model_size = 0;    // selected predictor count
};

/// Threshold the marginal probabilities at `cutoff` and score against the
/// true support (0-based indices).
SelectionMetrics selection_metrics(const Eigen::VectorXd& probs,
                                   const std::vector<int>& truth, double cutoff = 0.5);

/// SE = sum_i (f_i - fhat_i)^2 / n; both curves centered before comparison
/// (the fitted components are centered by construction).
double function_se(const Eigen::VectorXd& f_true, const Eigen::VectorXd& f_hat);

}  // namespace bvgm
