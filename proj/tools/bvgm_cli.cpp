#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bvgm/dataset.hpp"
#include "bvgm/diagnostics.hpp"
#include "bvgm/metrics.hpp"
#include "bvgm/ortho.hpp"
#include "bvgm/runner.hpp"
#include "bvgm/shrinkage.hpp"
#include "bvgm/simdata.hpp"

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_ints(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection as a binary random-field sampler"};
  app.require_subcommand(1);

  // ---- generate-linear ----------------------------------------------------
  auto* gen_lin = app.add_subcommand("generate-linear", "simulate a linear-model dataset");
  std::string gl_preset, gl_out = "data.csv", gl_support, gl_values;
  int gl_n = 50, gl_p = 100;
  std::uint64_t gl_seed = 1;
  gen_lin->add_option("--preset", gl_preset,
                      "case1-large|case1-small|modelIA|modelIB|modelIIA|modelIIB|chain15");
  gen_lin->add_option("--n", gl_n);
  gen_lin->add_option("--p", gl_p);
  gen_lin->add_option("--support", gl_support, "1-based true indices, comma separated");
  gen_lin->add_option("--beta", gl_values, "matching coefficients");
  gen_lin->add_option("--seed", gl_seed);
  gen_lin->add_option("--out", gl_out);

  // ---- generate-bsam ------------------------------------------------------
  auto* gen_bsam = app.add_subcommand("generate-bsam", "simulate the additive-model dataset");
  int gb_n = 100, gb_p = 10;
  double gb_t = 0.0;
  std::uint64_t gb_seed = 1;
  std::string gb_out = "data.csv", gb_truth;
  gen_bsam->add_option("--n", gb_n);
  gen_bsam->add_option("--p", gb_p);
  gen_bsam->add_option("--t", gb_t, "correlation knob: cor = t^2/(1+t^2)");
  gen_bsam->add_option("--seed", gb_seed);
  gen_bsam->add_option("--out", gb_out);
  gen_bsam->add_option("--truth-out", gb_truth, "optional CSV of the true component values");

  // ---- run / sweep --------------------------------------------------------
  auto add_run_options = [](CLI::App* cmd, std::string& config, std::string& replay,
                            std::string& data, std::string& out_dir, std::string& prior,
                            std::string& algorithm, std::uint64_t& seed,
                            std::uint64_t& stream, double& b, int& iters, int& burn) {
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--replay", replay, "manifest.json from a previous run");
    cmd->add_option("--data", data, "dataset CSV (overrides config)");
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
    cmd->add_option("--prior", prior, "cauchy|laplace|horseshoe");
    cmd->add_option("--algorithm", algorithm, "single_site|cluster");
    cmd->add_option("--seed", seed);
    cmd->add_option("--stream", stream, "base RNG stream id");
    cmd->add_option("--b", b);
    cmd->add_option("--iters", iters);
    cmd->add_option("--burn-in", burn);
  };

  auto* run_cmd = app.add_subcommand("run", "single-b posterior run");
  std::string r_config, r_replay, r_data, r_out, r_prior, r_algorithm;
  std::uint64_t r_seed = 0, r_stream = 0;
  double r_b = 0.0;
  int r_iters = 0, r_burn = -1;
  add_run_options(run_cmd, r_config, r_replay, r_data, r_out, r_prior, r_algorithm, r_seed,
                  r_stream, r_b, r_iters, r_burn);

  auto* sweep_cmd = app.add_subcommand("sweep", "profile curve over a b grid");
  std::string s_config, s_replay, s_data, s_out, s_prior, s_algorithm, s_grid;
  std::uint64_t s_seed = 0, s_stream = 0;
  double s_b = 0.0;
  int s_iters = 0, s_burn = -1;
  add_run_options(sweep_cmd, s_config, s_replay, s_data, s_out, s_prior, s_algorithm, s_seed,
                  s_stream, s_b, s_iters, s_burn);
  sweep_cmd->add_option("--b-grid", s_grid, "min:max:points (log spaced)");

  // ---- theory ---------------------------------------------------------------
  auto* theory_cmd = app.add_subcommand("theory", "orthogonal-design odds curves");
  std::string t_kinds = "cauchy,laplace,horseshoe", t_a = "0,2,4", t_grid = "1e-3:1e4:30";
  std::string t_method = "quadrature", t_out = "theory.csv";
  theory_cmd->add_option("--kind", t_kinds, "comma separated prior kinds");
  theory_cmd->add_option("--a", t_a, "signal projections");
  theory_cmd->add_option("--b-grid", t_grid, "min:max:points (log spaced)");
  theory_cmd->add_option("--method", t_method, "closed_form|quadrature|monte_carlo");
  theory_cmd->add_option("--out", t_out);

  // ---- metrics --------------------------------------------------------------
  auto* metrics_cmd = app.add_subcommand("metrics", "selection metrics from probabilities");
  std::string m_probs, m_truth;
  double m_cutoff = 0.5;
  metrics_cmd->add_option("--summary", m_probs, "state_summary.csv of a run")->required();
  metrics_cmd->add_option("--truth", m_truth, "1-based true indices")->required();
  metrics_cmd->add_option("--cutoff", m_cutoff);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_lin->parsed()) {
      bvgm::LinearSimSpec spec;
      if (!gl_preset.empty()) {
        spec = bvgm::linear_preset(gl_preset);
      } else {
        spec.n = gl_n;
        spec.p = gl_p;
        for (int j : parse_ints(gl_support)) spec.support.push_back(j - 1);
        spec.beta = parse_doubles(gl_values);
      }
      spec.seed = gl_seed;
      const auto sim = bvgm::generate_linear(spec);
      bvgm::write_matrix_csv(gl_out, sim.X, sim.y, sim.names);
      std::cout << "wrote " << gl_out << " (n=" << sim.X.rows() << ", p=" << sim.X.cols()
                << ")\n";
      return 0;
    }

    if (gen_bsam->parsed()) {
      bvgm::BsamSimSpec spec;
      spec.n = gb_n;
      spec.p = gb_p;
      spec.t = gb_t;
      spec.seed = gb_seed;
      const auto sim = bvgm::generate_bsam(spec);
      bvgm::write_matrix_csv(gb_out, sim.X, sim.y, sim.names);
      if (!gb_truth.empty()) {
        std::ofstream out(gb_truth);
        out << "predictor,i,x,f\n";
        for (int k = 0; k < 4; ++k) {
          for (int i = 0; i < spec.n; ++i) {
            out << sim.names[k] << ',' << i << ',' << fmt(sim.X(i, k)) << ','
                << fmt(sim.true_f(i, k)) << '\n';
          }
        }
      }
      std::cout << "wrote " << gb_out << " (n=" << sim.X.rows() << ", p=" << sim.X.cols()
                << ")\n";
      return 0;
    }

    auto finish_config = [](const std::string& config, const std::string& replay,
                            const std::string& data, const std::string& out_dir,
                            const std::string& prior, const std::string& algorithm,
                            std::uint64_t seed, std::uint64_t stream, double b, int iters,
                            int burn) {
      bvgm::RunConfig cfg;
      if (!replay.empty()) {
        cfg = bvgm::RunConfig::from_json_file(replay);
      } else if (!config.empty()) {
        cfg = bvgm::RunConfig::from_json_file(config);
      }
      if (!data.empty()) cfg.data_csv = data;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!prior.empty()) cfg.prior = bvgm::prior_kind_from_string(prior);
      if (!algorithm.empty()) cfg.algorithm = bvgm::algorithm_from_string(algorithm);
      if (seed != 0) cfg.seed = seed;
      if (stream != 0) cfg.stream = stream;
      if (b > 0.0) cfg.b = b;
      if (iters > 0) cfg.iters = iters;
      if (burn >= 0) cfg.burn_in = burn;
      return cfg;
    };

    if (run_cmd->parsed()) {
      auto cfg = finish_config(r_config, r_replay, r_data, r_out, r_prior, r_algorithm,
                               r_seed, r_stream, r_b, r_iters, r_burn);
      cfg.b_points = 0;  // force single-b
      bvgm::run(cfg);
      std::cout << "run complete: " << cfg.out_dir << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      auto cfg = finish_config(s_config, s_replay, s_data, s_out, s_prior, s_algorithm,
                               s_seed, s_stream, s_b, s_iters, s_burn);
      if (!s_grid.empty()) {
        double lo, hi;
        int pts;
        if (std::sscanf(s_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &pts) != 3) {
          throw bvgm::ConfigError("--b-grid expects min:max:points");
        }
        cfg.b_min = lo;
        cfg.b_max = hi;
        cfg.b_points = pts;
      }
      if (!cfg.is_sweep()) throw bvgm::ConfigError("sweep needs a b grid");
      bvgm::run(cfg);
      std::cout << "sweep complete: " << cfg.out_dir << "\n";
      return 0;
    }

    if (theory_cmd->parsed()) {
      double lo, hi;
      int pts;
      if (std::sscanf(t_grid.c_str(), "%lf:%lf:%d", &lo, &hi, &pts) != 3) {
        throw bvgm::ConfigError("--b-grid expects min:max:points");
      }
      const Eigen::VectorXd grid = bvgm::log_grid(lo, hi, pts);
      std::ofstream out(t_out);
      out << "kind,a,b,odds,probability\n";
      std::stringstream kinds(t_kinds);
      std::string kind_tok;
      while (std::getline(kinds, kind_tok, ',')) {
        const auto kind = bvgm::prior_kind_from_string(kind_tok);
        for (double a : parse_doubles(t_a)) {
          for (int i = 0; i < grid.size(); ++i) {
            bvgm::OddsQuery q;
            q.kind = kind;
            q.a = a;
            q.b = grid[i];
            if (t_method == "closed_form") {
              q.method = bvgm::OddsMethod::ClosedForm;
            } else if (t_method == "monte_carlo") {
              q.method = bvgm::OddsMethod::MonteCarlo;
            } else {
              q.method = bvgm::OddsMethod::Quadrature;
            }
            const double odds = bvgm::marginal_odds(q);
            out << kind_tok << ',' << fmt(a) << ',' << fmt(grid[i]) << ',' << fmt(odds)
                << ',' << fmt(bvgm::selection_probability(odds)) << '\n';
          }
        }
      }
      std::cout << "wrote " << t_out << "\n";
      return 0;
    }

    if (metrics_cmd->parsed()) {
      std::ifstream in(m_probs);
      if (!in) throw bvgm::ConfigError("cannot open " + m_probs);
      std::string line;
      std::getline(in, line);  // header
      std::vector<double> probs;
      while (std::getline(in, line)) {
        if (line.rfind("prob_", 0) != 0) continue;
        const auto comma = line.find(',');
        const auto next = line.find(',', comma + 1);
        probs.push_back(std::stod(line.substr(comma + 1, next - comma - 1)));
      }
      Eigen::VectorXd pv = Eigen::Map<Eigen::VectorXd>(probs.data(), probs.size());
      std::vector<int> truth;
      for (int j : parse_ints(m_truth)) truth.push_back(j - 1);
      const auto m = bvgm::selection_metrics(pv, truth, m_cutoff);
      std::cout << "fp_rate," << fmt(m.fp_rate) << "\nfn_rate," << fmt(m.fn_rate)
                << "\nmodel_size," << m.model_size << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
