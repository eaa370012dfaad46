// Command-line front end for the robnet library: network metrics, information
// indices, worst-case posterior reweighting, graphon-ball chains, and the
// synthetic experiment harness. All numeric output uses shortest round-trip
// formatting so seeded runs are byte-identical.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robnet/experiments.hpp"
#include "robnet/graphon_nbhd.hpp"
#include "robnet/metrics.hpp"

namespace {

using nlohmann::json;
using namespace robnet;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return robnet::detail::format_double(v);
}

// Run `fn` against --out if given, stdout otherwise.
template <class Fn>
void with_output(const std::string& out_path, Fn&& fn) {
  if (out_path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + out_path);
  fn(out);
  if (!out) throw io_error("write failed: " + out_path);
}

int run_metrics(const std::string& in_path, int refs, std::uint64_t seed,
                const std::string& out_path) {
  const Graph g = read_edge_list(in_path);
  double clustering = std::numeric_limits<double>::quiet_NaN();
  double path_len = std::numeric_limits<double>::quiet_NaN();
  double small_world = std::numeric_limits<double>::quiet_NaN();
  try {
    clustering = global_clustering(g);
  } catch (const parameter_error&) {
  }
  try {
    path_len = average_path_length(g);
  } catch (const degenerate_input_error&) {
  }
  try {
    std::vector<std::uint64_t> ref_seeds;
    for (int i = 0; i < refs; ++i)
      ref_seeds.push_back(Rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
    small_world = small_world_index(g, ref_seeds);
  } catch (const std::exception&) {
    // Undefined for graphs whose references have no triangles or paths.
  }
  const double lambda1 = leading_eigenvalue(g);
  const ComponentDecomposition cd = connected_components(g);
  with_output(out_path, [&](std::ostream& out) {
    out << "n,m,C,L,S,lambda1,susceptibility,lcc_size\n";
    out << g.n << ',' << num_edges(g) << ',' << fmt(clustering) << ','
        << fmt(path_len) << ',' << fmt(small_world) << ',' << fmt(lambda1) << ','
        << fmt(empirical_susceptibility(g)) << ',' << largest_component_size(cd)
        << '\n';
  });
  return 0;
}

int run_indices(double c, double lambda, int n, int t_grid,
                const std::string& out_path) {
  const InfoIndexReport r = info_index_report(c, lambda, n, t_grid);
  with_output(out_path, [&](std::ostream& out) {
    out << "c,lambda,I_exact,I_approx,J_exact,J_approx,t_star,Dn_over_n,Cn_over_n\n";
    out << fmt(r.c) << ',' << fmt(r.lambda) << ',' << fmt(r.I_exact) << ','
        << fmt(r.I_smallsignal) << ',' << fmt(r.J_exact) << ','
        << fmt(r.J_smallsignal) << ',' << fmt(r.t_star) << ',' << fmt(r.Dn_over_n)
        << ',' << fmt(r.Cn_over_n) << '\n';
  });
  return 0;
}

Normalization parse_normalization(const std::string& name) {
  if (name == "rho") return Normalization::RhoSqrtC;
  if (name == "var") return Normalization::VarSqrtC;
  if (name == "none") return Normalization::None;
  throw parameter_error("unknown normalization: " + name);
}

void write_reweighted(std::ostream& out, const WeightedSample& sample,
                      const std::vector<double>& tilted) {
  const bool with_loss = !sample.losses.empty();
  out << (with_loss ? "atom,weight,loss,tilted_weight\n"
                    : "atom,weight,tilted_weight\n");
  for (std::size_t i = 0; i < sample.atoms.size(); ++i) {
    out << fmt(sample.atoms[i]) << ',' << fmt(sample.weights[i]);
    if (with_loss) out << ',' << fmt(sample.losses[i]);
    out << ',' << fmt(tilted[i]) << '\n';
  }
}

int run_tilt(const std::string& in_path, const std::vector<double>& radii,
             double tol, const std::string& normalization,
             const std::string& out_path) {
  const WeightedSample sample = read_weighted_sample_csv(in_path);
  if (radii.empty()) throw parameter_error("tilt: provide --radius or --radii");
  if (radii.size() == 1) {
    const TiltSolution sol = kl_tilt_solve(sample, radii[0], tol);
    with_output(out_path, [&](std::ostream& out) {
      out << "# lambda_star=" << fmt(sol.lambda_star)
          << " robust_risk=" << fmt(sol.robust_risk)
          << " achieved_kl=" << fmt(sol.achieved_kl) << '\n';
      write_reweighted(out, sample, sol.tilted_weights);
    });
    return 0;
  }
  const SensitivityCurve curve =
      sensitivity_curve(sample, radii, parse_normalization(normalization), tol);
  with_output(out_path, [&](std::ostream& out) {
    out << "# baseline_risk=" << fmt(curve.baseline_risk) << '\n';
    out << "C,sqrt_C,robust_risk,excess,normalized\n";
    for (std::size_t i = 0; i < curve.radii.size(); ++i) {
      const double C = curve.radii[i];
      out << fmt(C) << ',' << fmt(std::sqrt(C)) << ',' << fmt(curve.robust_risks[i])
          << ',' << fmt(curve.robust_risks[i] - curve.baseline_risk) << ','
          << fmt(curve.normalized[i]) << '\n';
    }
  });
  return 0;
}

int run_mirror(const std::string& in_path, double radius, const std::string& ball,
               double step, int iters, const std::string& out_path) {
  const WeightedSample sample = read_weighted_sample_csv(in_path);
  PhiBall b;
  if (ball == "kl") b = PhiBall{BallKind::KL, radius};
  else if (ball == "chi2") b = PhiBall{BallKind::ChiSquared, radius};
  else throw parameter_error("unknown ball kind: " + ball);
  if (step <= 0.0) step = default_mirror_step(sample);
  const TiltSolution sol = mirror_descent_adversary(sample, b, step, iters);
  with_output(out_path, [&](std::ostream& out) {
    out << "# ball=" << ball << " robust_risk=" << fmt(sol.robust_risk)
        << " achieved_divergence=" << fmt(sol.achieved_kl) << '\n';
    write_reweighted(out, sample, sol.tilted_weights);
  });
  return 0;
}

StepGraphon read_center_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open center file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("center file is not valid JSON: " + std::string(e.what()));
  }
  StepGraphon w;
  w.K = j.at("K").get<int>();
  w.pi = j.at("pi").get<std::vector<double>>();
  w.B = j.at("B").get<std::vector<std::vector<double>>>();
  validate(w);
  return w;
}

int run_graphon(const std::string& center_path, double radius, int n, int moves,
                std::uint64_t seed, double alpha, double rho,
                const std::string& out_path) {
  const StepGraphon center = read_center_file(center_path);
  const GraphonBall ball = make_graphon_ball(center, radius, n);
  const std::vector<double> alpha_vec(
      static_cast<std::size_t>(center.K) * center.K, alpha);
  with_output(out_path, [&](std::ostream& out) {
    out << "step,accepted,kl_to_center";
    for (int a = 0; a < center.K; ++a)
      for (int b = 0; b < center.K; ++b) out << ",B_" << a << '_' << b;
    out << '\n';
    auto emit = [&](int step, int accepted, const StepGraphon& w) {
      out << step << ',' << accepted << ','
          << fmt(graph_law_kl(w, center, n));
      for (int a = 0; a < center.K; ++a)
        for (int b = 0; b < center.K; ++b) out << ',' << fmt(w.B[a][b]);
      out << '\n';
    };
    StepGraphon current = center;
    emit(0, 1, current);
    for (int step = 1; step <= moves; ++step) {
      const std::uint64_t move_seed =
          Rng::derive_seed(seed, static_cast<std::uint64_t>(step));
      const MoveResult mv =
          (step % 2 == 1)
              ? perturb_step(current, ball, alpha_vec, move_seed)
              : rescale_step(current, ball, rho, move_seed);
      current = mv.next;
      emit(step, mv.accepted ? 1 : 0, current);
    }
  });
  return 0;
}

// --- experiment config parsing ---------------------------------------------

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& who) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed)
      if (it.key() == k) known = true;
    if (!known)
      throw parameter_error(who + ": unknown config key '" + it.key() + "'");
  }
}

RadiusPath parse_path(const json& j, double c, double lambda) {
  require_keys(j, {"kind", "param"}, "experiment d path");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exp_shrink") {
    // Default rate: the limiting Chernoff index of the (c, lambda) signal.
    const double alpha = j.contains("param") ? j.at("param").get<double>()
                                             : chernoff_J(c, lambda).J;
    return RadiusPath::exp_shrink(alpha);
  }
  if (!j.contains("param"))
    throw parameter_error("experiment d path: 'param' required for kind " + kind);
  const double param = j.at("param").get<double>();
  if (kind == "polynomial") return RadiusPath::polynomial(param);
  if (kind == "constant") return RadiusPath::constant(param);
  if (kind == "linear_grow") return RadiusPath::linear_grow(param);
  throw parameter_error("experiment d path: unknown kind " + kind);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("config is not valid JSON: " + std::string(e.what()));
  }
  return j;
}

int run_experiment(const std::string& which, const std::string& config_path,
                   std::uint64_t seed, const std::string& out_path, int threads) {
  const json cfg = load_config(config_path);
  ExperimentResult result;
  if (which == "a") {
    require_keys(cfg, {"n", "c", "lambda", "n_reps", "radii"}, "experiment a");
    result = run_experiment_a(cfg.at("n").get<int>(), cfg.at("c").get<double>(),
                              cfg.at("lambda").get<double>(),
                              cfg.at("n_reps").get<int>(),
                              cfg.at("radii").get<std::vector<double>>(), seed,
                              threads);
  } else if (which == "b") {
    require_keys(cfg,
                 {"n", "deltas", "n_reps", "n_post_draws", "radii", "C_slope",
                  "delta_star"},
                 "experiment b");
    const double delta_star = cfg.contains("delta_star")
                                  ? cfg.at("delta_star").get<double>()
                                  : std::numeric_limits<double>::quiet_NaN();
    result = run_experiment_b(
        cfg.at("n").get<int>(), cfg.at("deltas").get<std::vector<double>>(),
        cfg.at("n_reps").get<int>(), cfg.at("n_post_draws").get<int>(),
        cfg.at("radii").get<std::vector<double>>(), cfg.at("C_slope").get<double>(),
        seed, threads, delta_star);
  } else if (which == "d") {
    require_keys(cfg, {"n_grid", "c", "lambda", "paths", "n_reps"}, "experiment d");
    const double c = cfg.at("c").get<double>();
    const double lambda = cfg.at("lambda").get<double>();
    std::vector<RadiusPath> paths;
    for (const json& pj : cfg.at("paths")) paths.push_back(parse_path(pj, c, lambda));
    result = run_experiment_d(cfg.at("n_grid").get<std::vector<int>>(), c, lambda,
                              paths, cfg.at("n_reps").get<int>(), seed, threads);
  } else {
    throw parameter_error("unknown experiment: " + which);
  }
  write_experiment_csv(result, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust Bayesian network analysis toolkit"};
  app.require_subcommand(1);

  // metrics
  std::string m_in, m_out;
  int m_refs = 20;
  std::uint64_t m_seed = 1;
  auto* metrics_cmd = app.add_subcommand("metrics", "summary metrics for an edge list");
  metrics_cmd->add_option("--in", m_in, "edge-list file")->required();
  metrics_cmd->add_option("--refs", m_refs, "reference graphs for the small-world index");
  metrics_cmd->add_option("--seed", m_seed, "seed for the reference graphs");
  metrics_cmd->add_option("--out", m_out, "output CSV (default stdout)");

  // indices
  double i_c = 0.0, i_lambda = 0.0;
  int i_n = 0, i_tgrid = 201;
  std::string i_out;
  auto* indices_cmd = app.add_subcommand("indices", "information indices for a two-block signal");
  indices_cmd->add_option("--c", i_c, "mean degree")->required();
  indices_cmd->add_option("--lambda", i_lambda, "block signal strength")->required();
  indices_cmd->add_option("--n", i_n, "also emit per-vertex divergences at this size");
  indices_cmd->add_option("--t-grid", i_tgrid, "grid size for the Chernoff sup");
  indices_cmd->add_option("--out", i_out, "output CSV (default stdout)");

  // tilt
  std::string t_in, t_out, t_norm = "rho";
  std::vector<double> t_radii;
  double t_radius = -1.0, t_tol = 1e-10;
  auto* tilt_cmd = app.add_subcommand("tilt", "worst-case reweighting over a KL ball");
  tilt_cmd->add_option("--in", t_in, "weighted sample CSV (atom,weight[,loss])")->required();
  tilt_cmd->add_option("--radius", t_radius, "single KL radius");
  tilt_cmd->add_option("--radii", t_radii, "increasing radii for a sensitivity curve")
      ->delimiter(',');
  tilt_cmd->add_option("--tol", t_tol, "solver tolerance");
  tilt_cmd->add_option("--normalization", t_norm, "curve normalization: rho|var|none");
  tilt_cmd->add_option("--out", t_out, "output CSV (default stdout)");

  // mirror
  std::string mr_in, mr_out, mr_ball = "kl";
  double mr_radius = 0.0, mr_step = 0.0;
  int mr_iters = 2000;
  auto* mirror_cmd = app.add_subcommand("mirror", "mirror-descent adversary over a divergence ball");
  mirror_cmd->add_option("--in", mr_in, "weighted sample CSV (atom,weight[,loss])")->required();
  mirror_cmd->add_option("--radius", mr_radius, "ball radius")->required();
  mirror_cmd->add_option("--ball", mr_ball, "ball kind: kl|chi2");
  mirror_cmd->add_option("--step", mr_step, "step size (0 = auto)");
  mirror_cmd->add_option("--iters", mr_iters, "iteration count");
  mirror_cmd->add_option("--out", mr_out, "output CSV (default stdout)");

  // graphon
  std::string g_center, g_out;
  double g_radius = 0.0, g_alpha = 50.0, g_rho = 0.1;
  int g_moves = 100, g_n = 100;
  std::uint64_t g_seed = 1;
  auto* graphon_cmd = app.add_subcommand("graphon", "random walk inside a graphon KL ball");
  graphon_cmd->add_option("--center-file", g_center, "JSON with K, pi, B")->required();
  graphon_cmd->add_option("--radius", g_radius, "graph-law KL radius")->required();
  graphon_cmd->add_option("--n", g_n, "graph size defining the graph-law KL");
  graphon_cmd->add_option("--moves", g_moves, "number of chain moves");
  graphon_cmd->add_option("--seed", g_seed, "chain seed");
  graphon_cmd->add_option("--alpha", g_alpha, "concentration of perturb moves");
  graphon_cmd->add_option("--rho", g_rho, "spread of rescale moves");
  graphon_cmd->add_option("--out", g_out, "output CSV (default stdout)");

  // experiment
  std::string e_which, e_config, e_out;
  std::uint64_t e_seed = 0;
  int e_threads = 1;
  auto* exp_cmd = app.add_subcommand("experiment", "synthetic experiment harness");
  exp_cmd->add_option("which", e_which, "one of: a, b, d")->required();
  exp_cmd->add_option("--config", e_config, "JSON config mirroring the run parameters")
      ->required();
  exp_cmd->add_option("--seed", e_seed, "master seed")->required();
  exp_cmd->add_option("--out", e_out, "output CSV path")->required();
  exp_cmd->add_option("--threads", e_threads, "parallel replicate workers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (metrics_cmd->parsed()) return run_metrics(m_in, m_refs, m_seed, m_out);
    if (indices_cmd->parsed()) return run_indices(i_c, i_lambda, i_n, i_tgrid, i_out);
    if (tilt_cmd->parsed()) {
      std::vector<double> radii = t_radii;
      if (tilt_cmd->count("--radius") > 0) {
        if (!radii.empty())
          throw parameter_error("tilt: --radius and --radii are exclusive");
        radii = {t_radius};
      }
      return run_tilt(t_in, radii, t_tol, t_norm, t_out);
    }
    if (mirror_cmd->parsed())
      return run_mirror(mr_in, mr_radius, mr_ball, mr_step, mr_iters, mr_out);
    if (graphon_cmd->parsed())
      return run_graphon(g_center, g_radius, g_n, g_moves, g_seed, g_alpha, g_rho,
                         g_out);
    if (exp_cmd->parsed())
      return run_experiment(e_which, e_config, e_seed, e_out, e_threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
