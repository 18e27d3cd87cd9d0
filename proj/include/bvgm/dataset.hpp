#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bvgm/errors.hpp"

namespace bvgm {

/// Standardized design and centered response. Immutable after construction;
/// safe to share across concurrent chains.
struct Dataset {
  Eigen::MatrixXd X;  // n x p, each column sums to 0 with unit sum of squares
  Eigen::VectorXd y;  // centered
  int n = 0;
  int p = 0;
  std::vector<std::string> names;

  // Scaling provenance: x_std = (x_raw - col_mean) / col_scale,
  // y_std = y_raw - y_mean. Lets fitted coefficients map back to raw units.
  Eigen::VectorXd col_mean;
  Eigen::VectorXd col_scale;
  double y_mean = 0.0;

  /// Checks the standardization invariants; throws on violation.
  void validate() const;

  /// Map a coefficient vector on the standardized scale back to raw units.
  Eigen::VectorXd beta_to_raw(const Eigen::VectorXd& beta_std) const;
};

/// Center/rescale columns to sum 0 and unit sum of squares; center y.
/// Throws ConstantColumnError for a zero-variance column and NonFiniteError
/// on NaN/Inf input.
Dataset standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y,
                    std::vector<std::string> names = {});

/// a = X^T y and the correlation matrix C = X^T X.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> projections(const Dataset& d);

/// CSV with a header row; the response column is picked by name and the
/// remaining columns become predictors (in file order).
Dataset load_dataset_csv(const std::string& path, const std::string& response);

/// Raw-valued CSV writer used by the data generators.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const std::vector<std::string>& names,
                      const std::string& response_name = "y");

}  // namespace bvgm
