#include "bvgm/metrics.hpp"

#include <algorithm>

#include "bvgm/errors.hpp"

namespace bvgm {

SelectionMetrics selection_metrics(const Eigen::VectorXd& probs,
                                   const std::vector<int>& truth, double cutoff) {
  const int p = static_cast<int>(probs.size());
  std::vector<bool> is_true(p, false);
  for (int j : truth) {
    if (j < 0 || j >= p) throw DomainError("selection_metrics: truth index out of range");
    is_true[j] = true;
  }
  int fp = 0, tn = 0, fn = 0, tp = 0;
  SelectionMetrics m;
  for (int j = 0; j < p; ++j) {
    const bool sel = probs[j] > cutoff;
    if (sel) ++m.model_size;
    if (is_true[j]) {
      (sel ? tp : fn) += 1;
    } else {
      (sel ? fp : tn) += 1;
    }
  }
  m.fp_rate = fp + tn > 0 ? static_cast<double>(fp) / (fp + tn) : 0.0;
  m.fn_rate = fn + tp > 0 ? static_cast<double>(fn) / (fn + tp) : 0.0;
  return m;
}

double function_se(const Eigen::VectorXd& f_true, const Eigen::VectorXd& f_hat) {
  if (f_true.size() != f_hat.size()) throw DomainError("function_se: length mismatch");
  const Eigen::VectorXd a = f_true.array() - f_true.mean();
  const Eigen::VectorXd b = f_hat.array() - f_hat.mean();
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace bvgm
