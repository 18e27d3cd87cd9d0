#include "bvgm/simdata.hpp"

#include <cmath>

#include "bvgm/errors.hpp"

namespace bvgm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<std::string> default_names(int p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}
}  // namespace

SimulatedData generate_linear(const LinearSimSpec& spec) {
  if (spec.support.size() != spec.beta.size()) {
    throw ConfigError("generate_linear: support and beta sizes differ");
  }
  for (int j : spec.support) {
    if (j < 0 || j >= spec.p) throw ConfigError("generate_linear: support index out of range");
  }
  RngHandle rng(spec.seed, 0);
  SimulatedData out;
  out.X.resize(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.p; ++j) out.X(i, j) = rng.normal();
  }
  out.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) out.y[i] = spec.noise_sd * rng.normal();
  for (std::size_t k = 0; k < spec.support.size(); ++k) {
    out.y += spec.beta[k] * out.X.col(spec.support[k]);
  }
  out.names = default_names(spec.p);
  out.support = spec.support;
  return out;
}

LinearSimSpec linear_preset(const std::string& name) {
  LinearSimSpec s;
  auto seq_union = [](int a0, int step_a, int a_max, int b0, int step_b, int b_max) {
    std::vector<int> v;
    for (int x = a0; x <= a_max; x += step_a) v.push_back(x - 1);
    for (int x = b0; x <= b_max; x += step_b) v.push_back(x - 1);
    return v;
  };
  if (name == "case1-large" || name == "case1-small") {
    s.n = 50;
    s.p = 100;
    s.support = {1, 2, 4, 9};  // predictors 2, 3, 5, 10
    s.beta = name == "case1-large" ? std::vector<double>{-4.0, 2.0, -1.0, 2.5}
                                   : std::vector<double>{-0.9, 0.7, -0.6, 0.8};
  } else if (name == "modelIA" || name == "modelIB") {
    s.p = 1000;
    s.n = name == "modelIA" ? 200 : 500;
    s.support = seq_union(31, 60, 931, 60, 60, 960);
    for (int j : s.support) s.beta.push_back((j + 1) % 2 == 1 ? 0.8 : 1.0);
  } else if (name == "modelIIA" || name == "modelIIB") {
    s.p = 500;
    s.n = name == "modelIIA" ? 100 : 500;
    s.support = seq_union(31, 60, 451, 60, 60, 480);
    for (int j : s.support) s.beta.push_back((j + 1) % 2 == 1 ? -0.8 : 0.8);
  } else if (name == "chain15") {
    // contiguous true block for the linear-chain-prior study
    s.p = 100;
    s.n = 100;
    for (int j = 1; j <= 15; ++j) {
      s.support.push_back(j - 1);
      s.beta.push_back(j % 2 == 1 ? 0.4 : 0.8);
    }
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return s;
}

double bsam_f(int which, double x) {
  const double s = std::sin(kTwoPi * x);
  const double c = std::cos(kTwoPi * x);
  switch (which) {
    case 0: return x;
    case 1: return (2.0 * x - 1.0) * (2.0 * x - 1.0);
    case 2: return s / (2.0 - s);
    case 3: return 0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c * c * c + 0.5 * s * s * s;
  }
  throw ConfigError("bsam_f: which must be 0..3");
}

SimulatedData generate_bsam(const BsamSimSpec& spec) {
  if (spec.p < 4) throw ConfigError("generate_bsam: need p >= 4");
  if (spec.t < 0.0) throw ConfigError("generate_bsam: t must be >= 0");
  RngHandle rng(spec.seed, 0);
  SimulatedData out;
  out.X.resize(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    const double u = rng.uniform();
    for (int j = 0; j < spec.p; ++j) {
      out.X(i, j) = (rng.uniform() + spec.t * u) / (1.0 + spec.t);
    }
  }
  out.true_f.resize(spec.n, 4);
  out.y.resize(spec.n);
  const double sd = std::sqrt(spec.noise_var);
  for (int i = 0; i < spec.n; ++i) {
    double mean = 0.0;
    for (int k = 0; k < 4; ++k) {
      out.true_f(i, k) = spec.amplitude[k] * bsam_f(k, out.X(i, k));
      mean += out.true_f(i, k);
    }
    out.y[i] = mean + sd * rng.normal();
  }
  out.names = default_names(spec.p);
  out.support = {0, 1, 2, 3};
  return out;
}

}  // namespace bvgm
