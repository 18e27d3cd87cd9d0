#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bvgm/dataset.hpp"
#include "bvgm/rng.hpp"

using bvgm::ConstantColumnError;
using bvgm::Dataset;
using bvgm::NonFiniteError;

TEST_CASE("standardize forces the two column constraints") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 0, 0, 0;
  const Dataset d = bvgm::standardize(X, y);
  CHECK(d.X(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(d.X(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.X(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("response is centered, not rescaled") {
  Eigen::MatrixXd X(2, 1);
  X << 0, 1;
  Eigen::VectorXd y(2);
  y << 4, 6;
  const Dataset d = bvgm::standardize(X, y);
  CHECK(d.y[0] == doctest::Approx(-1.0));
  CHECK(d.y[1] == doctest::Approx(1.0));
  CHECK(d.y_mean == doctest::Approx(5.0));
}

TEST_CASE("constant column is a hard error") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 5, 2, 5, 3, 5;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(bvgm::standardize(X, y), ConstantColumnError);
  try {
    bvgm::standardize(X, y);
  } catch (const ConstantColumnError& e) {
    CHECK(e.column == 1);
  }
}

TEST_CASE("non-finite input rejected") {
  Eigen::MatrixXd X(2, 1);
  X << 1, std::nan("");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(bvgm::standardize(X, y), NonFiniteError);
}

TEST_CASE("standardize is idempotent") {
  bvgm::RngHandle rng(11, 0);
  Eigen::MatrixXd X(20, 4);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    y[i] = rng.normal();
    for (int j = 0; j < 4; ++j) X(i, j) = 3.0 * rng.normal() + j;
  }
  const Dataset d1 = bvgm::standardize(X, y);
  const Dataset d2 = bvgm::standardize(d1.X, d1.y);
  CHECK((d1.X - d2.X).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d1.y - d2.y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projections against a naive triple-loop oracle") {
  bvgm::RngHandle rng(12, 0);
  Eigen::MatrixXd X(5, 3);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    y[i] = rng.normal();
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
  }
  const Dataset d = bvgm::standardize(X, y);
  const auto [a, C] = bvgm::projections(d);

  for (int j = 0; j < 3; ++j) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += d.X(i, j) * d.y[i];
    CHECK(std::abs(a[j] - s) < 1e-12);
  }
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += d.X(i, j) * d.X(i, k);
      CHECK(std::abs(C(j, k) - s) < 1e-12);
    }
    CHECK(C(j, j) == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(C.cwiseAbs().maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("orthogonality and duplicated-column examples") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 1, -1, 1, 1, -1, -1, -1;
  Eigen::VectorXd y = X.col(0);
  Dataset d = bvgm::standardize(X, y);
  auto [a, C] = bvgm::projections(d);
  CHECK(a[0] == doctest::Approx(y.norm()).epsilon(1e-12));  // y is x1 up to scale
  CHECK(std::abs(a[1]) < 1e-12);
  CHECK(std::abs(C(0, 1)) < 1e-12);

  Eigen::MatrixXd Xd(4, 2);
  Xd.col(0) = X.col(0);
  Xd.col(1) = 2.0 * X.col(0);  // duplicated direction
  const Dataset dd = bvgm::standardize(Xd, y);
  const auto [ad, Cd] = bvgm::projections(dd);
  CHECK(Cd(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CSV round trip preserves the dataset") {
  bvgm::RngHandle rng(13, 0);
  Eigen::MatrixXd X(12, 3);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) {
    y[i] = rng.normal() * 2 + 1;
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal() * (j + 1);
  }
  const auto path = std::filesystem::temp_directory_path() / "bvgm_test_data.csv";
  bvgm::write_matrix_csv(path.string(), X, y, {"alpha", "beta", "gamma"});
  const Dataset d = bvgm::load_dataset_csv(path.string(), "y");
  const Dataset ref = bvgm::standardize(X, y, {"alpha", "beta", "gamma"});
  CHECK((d.X - ref.X).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((d.y - ref.y).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(d.names[1] == "beta");
  d.validate();
  std::filesystem::remove(path);
}
