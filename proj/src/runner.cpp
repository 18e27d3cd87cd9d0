#include "bvgm/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "bvgm/shrinkage.hpp"

namespace bvgm {

const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

RunMode run_mode_from_string(const std::string& s) {
  if (s == "linear") return RunMode::Linear;
  if (s == "bsam") return RunMode::Bsam;
  if (s == "gamma_only") return RunMode::GammaOnly;
  throw ConfigError("unknown mode '" + s + "'");
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "single_site") return Algorithm::SingleSite;
  if (s == "cluster") return Algorithm::Cluster;
  throw ConfigError("unknown algorithm '" + s + "'");
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Linear: return "linear";
    case RunMode::Bsam: return "bsam";
    case RunMode::GammaOnly: return "gamma_only";
  }
  return "?";
}

std::string to_string(Algorithm a) {
  return a == Algorithm::SingleSite ? "single_site" : "cluster";
}

void RunConfig::validate() const {
  if (iters <= burn_in || burn_in < 0) throw ConfigError("need iters > burn_in >= 0");
  if (!(b > 0.0)) throw ConfigError("b must be positive");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0,1]");
  if (is_sweep() && (!(b_min > 0.0) || !(b_max > b_min) || b_points < 2)) {
    throw ConfigError("sweep grid needs 0 < b_min < b_max and at least 2 points");
  }
  if (data_csv.empty()) throw ConfigError("data_csv is required");
  if (!fs::exists(data_csv)) throw ConfigError("data file not found: " + data_csv);
  if (!graph_csv.empty() && !fs::exists(graph_csv)) {
    throw ConfigError("graph file not found: " + graph_csv);
  }
  if (mode == RunMode::Bsam && knots_m < 3) throw ConfigError("bsam needs M >= 3");
}

std::string RunConfig::to_json() const {
  json j;
  j["mode"] = bvgm::to_string(mode);
  j["prior"] = bvgm::to_string(prior);
  j["algorithm"] = bvgm::to_string(algorithm);
  j["b"] = b;
  if (is_sweep()) {
    j["b_grid"] = {{"min", b_min}, {"max", b_max}, {"points", b_points}};
  }
  j["iters"] = iters;
  j["burn_in"] = burn_in;
  j["lambda"] = lambda;
  j["intercept"] = intercept;
  j["intercept_prior"] = {{"shape", intercept_shape}, {"rate", intercept_rate}};
  j["knots_m"] = knots_m;
  j["seed"] = seed;
  j["stream"] = stream;
  j["threads"] = threads;
  j["data_csv"] = data_csv;
  j["response"] = response;
  j["out_dir"] = out_dir;
  j["emit_comembership"] = emit_comembership;
  j["emit_functions"] = emit_functions;
  j["function_grid"] = function_grid;
  if (!graph_csv.empty() || graph_chain || graph_complete) {
    json g;
    g["edges_csv"] = graph_csv;
    g["chain"] = graph_chain;
    g["complete"] = graph_complete;
    g["schedule"] = graph_schedule;
    g["w0"] = graph_w0;
    g["delta_w"] = graph_delta_w;
    g["boost_set"] = graph_boost_set;
    j["graph"] = g;
  }
  if (mode == RunMode::GammaOnly) {
    j["fixed_beta"] = fixed_beta;
    j["fixed_phi"] = fixed_phi;
  }
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  if (j.contains("mode")) c.mode = run_mode_from_string(j["mode"]);
  if (j.contains("prior")) c.prior = prior_kind_from_string(j["prior"]);
  if (j.contains("algorithm")) c.algorithm = algorithm_from_string(j["algorithm"]);
  if (j.contains("b")) c.b = j["b"];
  if (j.contains("b_grid")) {
    c.b_min = j["b_grid"]["min"];
    c.b_max = j["b_grid"]["max"];
    c.b_points = j["b_grid"]["points"];
  }
  if (j.contains("iters")) c.iters = j["iters"];
  if (j.contains("burn_in")) c.burn_in = j["burn_in"];
  if (j.contains("lambda")) c.lambda = j["lambda"];
  if (j.contains("intercept")) c.intercept = j["intercept"];
  if (j.contains("intercept_prior")) {
    c.intercept_shape = j["intercept_prior"]["shape"];
    c.intercept_rate = j["intercept_prior"]["rate"];
  }
  if (j.contains("knots_m")) c.knots_m = j["knots_m"];
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("stream")) c.stream = j["stream"];
  if (j.contains("threads")) c.threads = j["threads"];
  if (j.contains("data_csv")) c.data_csv = j["data_csv"];
  if (j.contains("response")) c.response = j["response"];
  if (j.contains("out_dir")) c.out_dir = j["out_dir"];
  if (j.contains("emit_comembership")) c.emit_comembership = j["emit_comembership"];
  if (j.contains("emit_functions")) c.emit_functions = j["emit_functions"];
  if (j.contains("function_grid")) c.function_grid = j["function_grid"];
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    if (g.contains("edges_csv")) c.graph_csv = g["edges_csv"];
    if (g.contains("chain")) c.graph_chain = g["chain"];
    if (g.contains("complete")) c.graph_complete = g["complete"];
    if (g.contains("schedule")) c.graph_schedule = g["schedule"];
    if (g.contains("w0")) c.graph_w0 = g["w0"];
    if (g.contains("delta_w")) c.graph_delta_w = g["delta_w"];
    if (g.contains("boost_set")) c.graph_boost_set = g["boost_set"].get<std::vector<int>>();
  }
  if (j.contains("fixed_beta")) c.fixed_beta = j["fixed_beta"].get<std::vector<double>>();
  if (j.contains("fixed_phi")) c.fixed_phi = j["fixed_phi"];
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // a manifest wraps the config under "config"
  json j = json::parse(text);
  if (j.contains("config")) return from_json(j["config"].dump());
  return from_json(text);
}

namespace {

std::optional<GraphPrior> make_graph_prior(const RunConfig& cfg, const Dataset& d) {
  if (cfg.graph_csv.empty() && !cfg.graph_chain && !cfg.graph_complete) return std::nullopt;
  GraphPrior g;
  if (cfg.graph_chain) {
    g = linear_chain_prior(d.p, cfg.graph_w0,
                           cfg.graph_schedule == "phi-of-log-b"
                               ? GraphPrior::Schedule::PhiLogB
                               : GraphPrior::Schedule::Fixed);
  } else {
    if (cfg.graph_complete) {
      g.adjacency = Eigen::MatrixXi::Ones(d.p, d.p);
      g.adjacency.diagonal().setZero();
    } else {
      g.adjacency = load_adjacency_csv(cfg.graph_csv, d.p, d.names);
    }
    g.w0 = cfg.graph_w0;
    g.schedule = cfg.graph_schedule == "phi-of-log-b" ? GraphPrior::Schedule::PhiLogB
                                                      : GraphPrior::Schedule::Fixed;
  }
  g.delta_w = cfg.graph_delta_w;
  g.boost_set = cfg.graph_boost_set;
  g.validate();
  return g;
}

struct Recorder {
  const ChainStorage& store;
  int kept = 0;
  Eigen::VectorXd gamma_sum;
  Eigen::VectorXd beta_sum;
  Eigen::MatrixXi gamma;
  Eigen::MatrixXd beta, scalars, tau;

  Recorder(const ChainStorage& st, int kept_total, int p, int beta_dim, int tau_dim)
      : store(st),
        gamma_sum(Eigen::VectorXd::Zero(p)),
        beta_sum(Eigen::VectorXd::Zero(beta_dim)) {
    if (st.gamma_draws) gamma.resize(kept_total, p);
    if (st.beta_draws) beta.resize(kept_total, beta_dim);
    if (st.scalar_draws) scalars.resize(kept_total, 3);
    if (st.tau_draws) tau.resize(kept_total, tau_dim);
  }

  void record(const ChainState& s) {
    gamma_sum += s.gamma.cast<double>();
    beta_sum += s.beta;
    if (store.gamma_draws) gamma.row(kept) = s.gamma;
    if (store.beta_draws) beta.row(kept) = s.beta;
    if (store.scalar_draws) scalars.row(kept) << s.phi, s.mu, s.tau_mu;
    if (store.tau_draws) {
      if (s.tau.size() > 0) {
        tau.row(kept) = s.tau;
      } else {
        tau.row(kept).head(s.tau_e.size()) = s.tau_e;
        tau.row(kept).tail(s.tau_d.size()) = s.tau_d;
      }
    }
    ++kept;
  }

  ChainOutput finish(std::optional<ClusterComembership>&& stats) {
    ChainOutput out;
    out.probs = gamma_sum / std::max(kept, 1);
    out.beta_mean = beta_sum / std::max(kept, 1);
    out.gamma = std::move(gamma);
    out.beta = std::move(beta);
    out.scalars = std::move(scalars);
    out.tau = std::move(tau);
    out.stats = std::move(stats);
    return out;
  }
};

}  // namespace

ChainOutput run_single_chain(const RunConfig& cfg, const Dataset& d, double b,
                             std::uint64_t stream, const ChainStorage& store) {
  PriorSpec prior;
  prior.kind = cfg.prior;
  prior.b = b;
  prior.lambda_cluster = cfg.lambda;
  prior.intercept = cfg.intercept;
  prior.intercept_shape = cfg.intercept_shape;
  prior.intercept_rate = cfg.intercept_rate;
  prior.validate();

  const auto graph = make_graph_prior(cfg, d);
  const GraphPrior* gp = graph ? &*graph : nullptr;

  SweepOptions opt;
  opt.gamma_update = cfg.algorithm == Algorithm::Cluster ? GammaUpdate::Cluster
                                                         : GammaUpdate::SingleSiteMh;
  RngHandle rng(cfg.seed, stream);
  const int kept_total = cfg.iters - cfg.burn_in;

  std::optional<ClusterComembership> stats;
  if (store.comembership) stats.emplace(d.p);
  ClusterComembership* stats_ptr = stats ? &*stats : nullptr;

  if (cfg.mode == RunMode::Linear) {
    LinearModel m(d);
    ChainState s = ChainState::linear_init(d.p);
    s.tau_mu = cfg.intercept_shape / cfg.intercept_rate;
    // Start at the marginal-regression state (everything included, beta =
    // X^T y, local precisions matched to it). A cold all-zero start can sit
    // in the fit-nothing mode for the whole run at strong shrinkage, where
    // the posterior actually keeps strong signals included.
    s.gamma.setOnes();
    s.beta = m.a;
    for (int j = 0; j < d.p; ++j) update_tau(s, j, prior, rng);
    Recorder rec(store, kept_total, d.p, d.p, d.p);
    for (int it = 0; it < cfg.iters; ++it) {
      gibbs_sweep(m, s, prior, opt, rng, gp, it >= cfg.burn_in ? stats_ptr : nullptr);
      if (it >= cfg.burn_in) rec.record(s);
    }
    return rec.finish(std::move(stats));
  }

  if (cfg.mode == RunMode::Bsam) {
    BsamModel m(d, cfg.knots_m + 1);  // K = M + 1 knots
    ChainState s = ChainState::bsam_init(d.p, m.total_m());
    s.tau_mu = cfg.intercept_shape / cfg.intercept_rate;
    Recorder rec(store, kept_total, d.p, m.total_m(), 2 * d.p);
    for (int it = 0; it < cfg.iters; ++it) {
      bsam_sweep(m, s, prior, opt, rng, gp, it >= cfg.burn_in ? stats_ptr : nullptr);
      if (it >= cfg.burn_in) rec.record(s);
    }
    return rec.finish(std::move(stats));
  }

  // gamma_only: fixed (beta, phi) field, gamma updates alone
  if (static_cast<int>(cfg.fixed_beta.size()) != d.p) {
    throw ConfigError("gamma_only needs fixed_beta of length p");
  }
  LinearModel m(d);
  ChainState s = ChainState::linear_init(d.p);
  s.beta = Eigen::Map<const Eigen::VectorXd>(cfg.fixed_beta.data(), d.p);
  s.phi = cfg.fixed_phi;
  const IsingField field = build_field(m, s, prior, gp);
  Recorder rec(store, kept_total, d.p, d.p, d.p);
  for (int it = 0; it < cfg.iters; ++it) {
    if (cfg.algorithm == Algorithm::Cluster) {
      cluster_sweep(field, s.gamma, cfg.lambda, rng, it >= cfg.burn_in ? stats_ptr : nullptr);
    } else {
      single_site_sweep(field, s.gamma, rng, SiteFlavor::MhAntithetic);
      if (stats_ptr != nullptr && it >= cfg.burn_in) stats_ptr->sweeps += 1;
    }
    if (it >= cfg.burn_in) rec.record(s);
  }
  return rec.finish(std::move(stats));
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_profile_csv(const fs::path& path, const ProfileCurve& curve,
                       const std::vector<std::string>& names) {
  std::ofstream out(path);
  out << "b,predictor,probability\n";
  for (Eigen::Index i = 0; i < curve.b_grid.size(); ++i) {
    for (Eigen::Index j = 0; j < curve.probs.cols(); ++j) {
      out << fmt(curve.b_grid[i]) << ',' << names[j] << ',' << fmt(curve.probs(i, j)) << '\n';
    }
  }
}

void write_mixing_csv(const fs::path& path, const MixingReport& rep) {
  std::ofstream out(path);
  out << "t,C\n";
  for (Eigen::Index t = 0; t < rep.C.size(); ++t) {
    out << t << ',' << fmt(rep.C[t]) << '\n';
  }
  out << "acf_abs_sum," << fmt(rep.acf_abs_sum) << '\n';
  out << "exp_corr_time," << fmt(rep.exp_corr_time) << '\n';
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m,
                  const std::vector<std::string>& names) {
  std::ofstream out(path);
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << names[j] << (j + 1 < names.size() ? ',' : '\n');
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << fmt(m(i, j)) << (j + 1 < m.cols() ? ',' : '\n');
    }
  }
}

struct SummaryRow {
  std::string name;
  double mean = 0, sd = 0, median = 0, q025 = 0, q975 = 0;
  bool has_quantiles = false;
};

SummaryRow summarize(const std::string& name, Eigen::VectorXd draws) {
  SummaryRow r;
  r.name = name;
  const int n = static_cast<int>(draws.size());
  r.mean = draws.mean();
  r.sd = n > 1 ? std::sqrt((draws.array() - r.mean).square().sum() / (n - 1)) : 0.0;
  std::sort(draws.data(), draws.data() + n);
  auto q = [&](double frac) {
    const double pos = frac * (n - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, n - 1);
    return draws[lo] + (pos - lo) * (draws[hi] - draws[lo]);
  };
  r.median = q(0.5);
  r.q025 = q(0.025);
  r.q975 = q(0.975);
  r.has_quantiles = true;
  return r;
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  out << "parameter,mean,sd,median,q025,q975\n";
  for (const auto& r : rows) {
    out << r.name << ',' << fmt(r.mean) << ',' << fmt(r.sd) << ',';
    if (r.has_quantiles) {
      out << fmt(r.median) << ',' << fmt(r.q025) << ',' << fmt(r.q975) << '\n';
    } else {
      out << ",,\n";
    }
  }
}

}  // namespace

void run(const RunConfig& cfg) {
  cfg.validate();
  const Dataset d = load_dataset_csv(cfg.data_csv, cfg.response);
  fs::create_directories(cfg.out_dir);

  // manifest first: the run is replayable from it
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = json::parse(cfg.to_json());
  write_text(fs::path(cfg.out_dir) / "manifest.json", manifest.dump(2) + "\n");

  if (cfg.is_sweep()) {
    const Eigen::VectorXd grid = log_grid(cfg.b_min, cfg.b_max, cfg.b_points);
    ChainStorage store;  // probabilities only
    Eigen::MatrixXd probs(grid.size(), d.p);
    const int nthreads = std::max(1, cfg.threads);
    if (nthreads == 1) {
      for (int i = 0; i < grid.size(); ++i) {
        probs.row(i) = run_single_chain(cfg, d, grid[i], cfg.stream + i, store).probs;
      }
    } else {
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= grid.size()) return;
          probs.row(i) = run_single_chain(cfg, d, grid[i], cfg.stream + i, store).probs;
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    ProfileCurve curve;
    curve.b_grid = grid;
    curve.probs = probs;
    curve.iters = cfg.iters;
    curve.burn_in = cfg.burn_in;
    curve.seed = cfg.seed;
    write_profile_csv(fs::path(cfg.out_dir) / "profile.csv", curve, d.names);
    return;
  }

  // single-b run: full summaries
  ChainStorage store;
  store.gamma_draws = true;
  store.scalar_draws = true;
  const long param_budget = 5000;
  const bool small = static_cast<long>(d.p) * std::max(1, cfg.knots_m) <= param_budget;
  store.beta_draws = cfg.mode == RunMode::Bsam ? cfg.emit_functions || small : small;
  store.tau_draws = small && cfg.mode != RunMode::GammaOnly;
  store.comembership = cfg.emit_comembership && cfg.algorithm == Algorithm::Cluster;

  const ChainOutput out = run_single_chain(cfg, d, cfg.b, cfg.stream, store);

  std::vector<SummaryRow> rows;
  for (int j = 0; j < d.p; ++j) {
    SummaryRow r;
    r.name = "prob_" + d.names[j];
    r.mean = out.probs[j];
    rows.push_back(r);
  }
  if (cfg.mode == RunMode::Linear && out.beta.size() > 0) {
    for (int j = 0; j < d.p; ++j) {
      rows.push_back(summarize("beta_" + d.names[j], out.beta.col(j)));
    }
    for (int j = 0; j < d.p; ++j) {
      rows.push_back(summarize("beta_raw_" + d.names[j],
                               out.beta.col(j) / d.col_scale[j]));
    }
  } else if (cfg.mode == RunMode::Linear) {
    for (int j = 0; j < d.p; ++j) {
      SummaryRow r;
      r.name = "beta_" + d.names[j];
      r.mean = out.beta_mean[j];
      rows.push_back(r);
      r.name = "beta_raw_" + d.names[j];
      r.mean = out.beta_mean[j] / d.col_scale[j];
      rows.push_back(r);
    }
  }
  if (out.tau.size() > 0) {
    if (cfg.mode == RunMode::Bsam) {
      for (int j = 0; j < d.p; ++j) {
        rows.push_back(summarize("tau_e_" + d.names[j], out.tau.col(j)));
      }
      for (int j = 0; j < d.p; ++j) {
        rows.push_back(summarize("tau_d_" + d.names[j], out.tau.col(d.p + j)));
      }
    } else {
      for (int j = 0; j < d.p; ++j) {
        rows.push_back(summarize("tau_" + d.names[j], out.tau.col(j)));
      }
    }
  }
  if (cfg.mode != RunMode::GammaOnly) {
    rows.push_back(summarize("phi", out.scalars.col(0)));
    if (cfg.intercept) {
      rows.push_back(summarize("mu", out.scalars.col(1)));
      rows.push_back(summarize("tau_mu", out.scalars.col(2)));
    }
  }
  write_summary_csv(fs::path(cfg.out_dir) / "state_summary.csv", rows);

  try {
    const MixingReport rep = mixing_report(out.gamma, std::min(100, (cfg.iters - cfg.burn_in) / 2 - 1));
    write_mixing_csv(fs::path(cfg.out_dir) / "mixing.csv", rep);
  } catch (const ZeroVarianceError&) {
    write_text(fs::path(cfg.out_dir) / "mixing.csv", "t,C\nfrozen_chain,1\n");
  }

  if (cfg.mode == RunMode::Bsam && cfg.emit_functions && out.beta.size() > 0) {
    BsamModel m(d, cfg.knots_m + 1);
    std::ofstream fn(fs::path(cfg.out_dir) / "functions.csv");
    fn << "predictor,x,f_hat,lo95,hi95\n";
    for (int j = 0; j < d.p; ++j) {
      const auto& ent = m.basis.entries[j];
      Eigen::VectorXd grid(cfg.function_grid);
      const double lo = ent.knots[0], hi = ent.knots[ent.K - 1];
      for (int i = 0; i < cfg.function_grid; ++i) {
        grid[i] = lo + (hi - lo) * i / (cfg.function_grid - 1);
      }
      Eigen::MatrixXd bd = out.beta.middleCols(m.basis.offset[j], ent.M);
      const auto est = estimate_function(bd, out.gamma.col(j), ent, grid,
                                         EstimateMode::Conditional);
      for (int i = 0; i < grid.size(); ++i) {
        fn << d.names[j] << ',' << fmt(grid[i]) << ',' << fmt(est.f_hat[i]) << ','
           << fmt(est.lo95[i]) << ',' << fmt(est.hi95[i]) << '\n';
      }
    }
  }

  if (out.stats) {
    write_matrix(fs::path(cfg.out_dir) / "comembership_aligned.csv",
                 out.stats->aligned_frequency(), d.names);
    write_matrix(fs::path(cfg.out_dir) / "comembership_anti.csv",
                 out.stats->anti_frequency(), d.names);
  }
}

}  // namespace bvgm
