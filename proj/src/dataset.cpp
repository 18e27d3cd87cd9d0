#include "bvgm/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bvgm {

void Dataset::validate() const {
  if (n < 2 || p < 1) throw DomainError("dataset needs n >= 2 and p >= 1");
  if (X.rows() != n || X.cols() != p || y.size() != n) {
    throw DomainError("dataset dimension mismatch");
  }
  if (!X.allFinite() || !y.allFinite()) throw NonFiniteError("dataset has non-finite entries");
  for (int j = 0; j < p; ++j) {
    if (std::abs(X.col(j).sum()) > 1e-10) throw DomainError("column not centered");
    if (std::abs(X.col(j).squaredNorm() - 1.0) > 1e-10) throw DomainError("column not unit scale");
  }
  if (std::abs(y.sum()) > 1e-10) throw DomainError("response not centered");
}

Eigen::VectorXd Dataset::beta_to_raw(const Eigen::VectorXd& beta_std) const {
  return beta_std.array() / col_scale.array();
}

Dataset standardize(const Eigen::MatrixXd& raw_X, const Eigen::VectorXd& raw_y,
                    std::vector<std::string> names) {
  const int n = static_cast<int>(raw_X.rows());
  const int p = static_cast<int>(raw_X.cols());
  if (n < 2) throw DomainError("standardize: need n >= 2");
  if (raw_y.size() != n) throw DomainError("standardize: y length mismatch");
  if (!raw_X.allFinite() || !raw_y.allFinite()) {
    throw NonFiniteError("standardize: non-finite input");
  }

  Dataset d;
  d.n = n;
  d.p = p;
  d.X.resize(n, p);
  d.col_mean.resize(p);
  d.col_scale.resize(p);
  for (int j = 0; j < p; ++j) {
    const double mean = raw_X.col(j).mean();
    Eigen::VectorXd centered = raw_X.col(j).array() - mean;
    const double scale = centered.norm();
    if (scale <= 0.0) throw ConstantColumnError(j);
    d.col_mean[j] = mean;
    d.col_scale[j] = scale;
    d.X.col(j) = centered / scale;
  }
  d.y_mean = raw_y.mean();
  d.y = raw_y.array() - d.y_mean;

  if (names.empty()) {
    for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (static_cast<int>(names.size()) != p) throw DomainError("standardize: name count mismatch");
  d.names = std::move(names);
  d.validate();
  return d;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> projections(const Dataset& d) {
  Eigen::VectorXd a = d.X.transpose() * d.y;
  Eigen::MatrixXd C = d.X.transpose() * d.X;
  return {std::move(a), std::move(C)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  int y_col = -1;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == response) {
      y_col = static_cast<int>(k);
    } else {
      names.push_back(header[k]);
    }
  }
  if (y_col < 0) throw ConfigError("response column '" + response + "' not in " + path);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError("ragged CSV row in " + path);
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      try {
        row[k] = std::stod(cells[k]);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric cell '" + cells[k] + "' in " + path);
      }
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size()) - 1;
  if (n < 2 || p < 1) throw ConfigError("CSV too small: " + path);

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    int jj = 0;
    for (int k = 0; k < static_cast<int>(header.size()); ++k) {
      if (k == y_col) {
        y[i] = rows[i][k];
      } else {
        X(i, jj++) = rows[i][k];
      }
    }
  }
  return standardize(X, y, names);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const std::vector<std::string>& names,
                      const std::string& response_name) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  for (std::size_t j = 0; j < names.size(); ++j) out << names[j] << ',';
  out << response_name << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", y[i]);
    out << buf << '\n';
  }
}

}  // namespace bvgm
