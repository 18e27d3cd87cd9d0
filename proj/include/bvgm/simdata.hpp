#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bvgm/rng.hpp"

namespace bvgm {

/// Raw (unstandardized) simulated regression data plus the generating truth.
struct SimulatedData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
  std::vector<int> support;     // 0-based true-signal indices
  Eigen::MatrixXd true_f;       // n x |support| true component values (BSAM)
};

struct LinearSimSpec {
  int n = 50;
  int p = 100;
  std::vector<int> support;       // 0-based
  std::vector<double> beta;       // matching support
  std::uint64_t seed = 1;
  double noise_sd = 1.0;
};

/// y = sum_{j in S} beta_j x_j + eps with x ~ N(0,1), eps ~ N(0, sd^2).
SimulatedData generate_linear(const LinearSimSpec& spec);

/// Named presets: case1-large, case1-small, modelIA, modelIB, modelIIA,
/// modelIIB, chain15 (the linear-chain-prior setting).
LinearSimSpec linear_preset(const std::string& name);

struct BsamSimSpec {
  int n = 100;
  int p = 10;
  double t = 0.0;   // predictor correlation knob: cor = t^2/(1+t^2)
  std::uint64_t seed = 1;
  double noise_var = 1.74;
  // component amplitudes; the defaults give the benchmark's ~3:1 signal-to-
  // noise ratio against the 1.74 noise variance
  double amplitude[4] = {5.0, 3.0, 4.0, 6.0};
};

/// Additive truth on the first four predictors:
/// f1(x) = x, f2(x) = (2x-1)^2, f3(x) = sin(2 pi x)/(2 - sin(2 pi x)),
/// f4(x) = 0.1 sin + 0.2 cos + 0.3 sin^2 + 0.4 cos^3 + 0.5 sin^3 (all 2 pi x);
/// x_j = (w_j + t u)/(1 + t) with w_j, u ~ U(0,1).
SimulatedData generate_bsam(const BsamSimSpec& spec);

/// The four component functions (used by the generator and the SE metrics).
double bsam_f(int which, double x);

}  // namespace bvgm
