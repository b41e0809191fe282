#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "pw/barycenter.hpp"
#include "pw/clustering.hpp"
#include "pw/errors.hpp"
#include "pw/io.hpp"
#include "pw/parallel.hpp"
#include "pw/pw_distance.hpp"
#include "pw/shapes.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;

struct CommonFlags {
  std::string init = "fiedler";
  int knn_k = 10;
  int gw_iters = 200;
  double tol = 1e-8;
  int max_iters = 200;
  std::uint64_t seed = 0;
  int pgm_threshold = 128;
  std::string output = "pw_out";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_init = true) {
  if (with_init)
    cmd->add_option("--init", f.init,
                    "initial coupling: euc-gw|geo-gw|fiedler|upca|emd|"
                    "provided:FILE");
  cmd->add_option("--knn-k", f.knn_k, "kNN graph neighbor count");
  cmd->add_option("--gw-iters", f.gw_iters, "GW conditional-gradient cap");
  cmd->add_option("--tol", f.tol, "relative objective tolerance");
  cmd->add_option("--max-iters", f.max_iters, "alternation cap");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--pgm-threshold", f.pgm_threshold,
                  "gray level at or above which a pixel is lit");
  cmd->add_option("-o,--output", f.output, "output file prefix");
}

pw::InitStrategy parse_init(const std::string& name, const CommonFlags& f) {
  if (name == "euc-gw") return pw::InitStrategy::euc_gw(f.gw_iters);
  if (name == "geo-gw") return pw::InitStrategy::geo_gw(f.knn_k, f.gw_iters);
  if (name == "fiedler") return pw::InitStrategy::fiedler_w(f.knn_k);
  if (name == "upca") return pw::InitStrategy::upca_w();
  if (name == "emd") return pw::InitStrategy::emd_w();
  if (name.rfind("provided:", 0) == 0) {
    const std::string file = name.substr(9);
    Eigen::MatrixXd m = pw::io::read_matrix(file);
    pw::TransportPlan plan;
    plan.row_marginal = m.rowwise().sum();
    plan.col_marginal = m.colwise().sum();
    plan.coupling = std::move(m);
    return pw::InitStrategy::from_plan(std::move(plan));
  }
  throw pw::Error("unknown --init '" + name + "'");
}

pw::DiscreteMeasure load_cloud(const std::string& path, const CommonFlags& f,
                               pwcli::RunManifest& manifest) {
  if (path == "dog2d") return pw::shapes::dog2d();
  if (path == "torus3d") return pw::shapes::torus3d();
  pw::io::ReadOptions opts;
  opts.pgm_threshold = f.pgm_threshold;
  pw::DiscreteMeasure m = pw::io::read_cloud(path, opts);
  manifest.add_input(path);
  return m;
}

json map_to_json(const pw::OrthogonalMap& map) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < map.dim(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < map.dim(); ++j) row.push_back(map.matrix(i, j));
    rows.push_back(row);
  }
  return rows;
}

json plan_summary(const pw::TransportPlan& plan) {
  Eigen::Index nonzeros = 0;
  for (Eigen::Index i = 0; i < plan.coupling.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.coupling.cols(); ++j)
      if (plan.coupling(i, j) > 1e-12) ++nonzeros;
  return {{"nonzeros", nonzeros},
          {"max_entry", plan.coupling.maxCoeff()},
          {"marginal_error", plan.marginal_error()}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw pw::Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// distance / align

int run_distance(const std::string& patha, const std::string& pathb,
                 const CommonFlags& f, bool write_aligned, bool write_plan,
                 pwcli::RunManifest& manifest) {
  const pw::DiscreteMeasure a = load_cloud(patha, f, manifest);
  const pw::DiscreteMeasure b = load_cloud(pathb, f, manifest);
  manifest.read_s = manifest.lap();

  const pw::PwStopRule stop{f.tol, f.max_iters};
  const pw::PwSolution sol =
      pw::pw_distance(a, b, parse_init(f.init, f), stop);
  manifest.solve_s = manifest.lap();

  json j;
  j["cost"] = sol.cost;
  j["distance"] = sol.distance;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["map"] = map_to_json(sol.map);
  j["plan_summary"] = plan_summary(sol.plan);
  write_json(f.output + ".json", j);

  if (write_aligned) {
    pw::DiscreteMeasure rotated(b.support * sol.map.matrix, b.weights);
    pw::io::write_cloud(f.output + "-aligned.xyz", rotated);
  }
  if (write_plan) {
    std::ofstream out(f.output + "-plan.txt");
    char buf[64];
    for (Eigen::Index i = 0; i < sol.plan.coupling.rows(); ++i) {
      for (Eigen::Index jj = 0; jj < sol.plan.coupling.cols(); ++jj) {
        std::snprintf(buf, sizeof buf, "%.17g", sol.plan.coupling(i, jj));
        out << buf << (jj + 1 == sol.plan.coupling.cols() ? "" : " ");
      }
      out << "\n";
    }
  }
  manifest.write_s = manifest.lap();
  manifest.write(f.output + "-manifest.json");
  return sol.converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------
// barycenter

int run_barycenter(const std::vector<std::string>& paths,
                   const std::string& lambdas_csv, Eigen::Index size,
                   double epsilon, bool optimize_weights, const CommonFlags& f,
                   pwcli::RunManifest& manifest) {
  pw::BarycenterProblem problem;
  for (const auto& p : paths)
    problem.inputs.push_back(load_cloud(p, f, manifest));
  if (!lambdas_csv.empty()) {
    const auto vals = parse_double_list(lambdas_csv);
    problem.lambdas =
        Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  }
  problem.target_size = size > 0 ? size : problem.inputs.front().size();
  manifest.read_s = manifest.lap();

  pw::BarycenterOptions opts;
  opts.optimize_weights = optimize_weights;
  opts.seed = f.seed;
  const pw::PwStopRule stop{f.tol, f.max_iters};
  const pw::InitStrategy init = parse_init(f.init, f);
  const pw::BarycenterState state =
      epsilon > 0.0
          ? pw::solve_barycenter_entropic(problem, epsilon, init, stop, opts)
          : pw::solve_barycenter(problem, init, stop, opts);
  manifest.solve_s = manifest.lap();

  pw::io::write_cloud(f.output + "-barycenter.xyz", state.measure());
  {
    std::ofstream trace(f.output + "-trace.csv");
    trace << "iteration,objective\n";
    char buf[64];
    for (std::size_t i = 0; i < state.objective_trace.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", state.objective_trace[i]);
      trace << (i + 1) << "," << buf << "\n";
    }
  }
  json j;
  j["objective"] = state.objective;
  j["iterations"] = state.iterations;
  j["converged"] = state.converged;
  j["epsilon"] = epsilon;
  write_json(f.output + ".json", j);
  manifest.write_s = manifest.lap();
  manifest.write(f.output + "-manifest.json");
  return state.converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------
// interpolate

int run_interpolate(const std::string& patha, const std::string& pathb,
                    const std::string& etas_csv, Eigen::Index size,
                    double epsilon, bool optimize_weights,
                    const CommonFlags& f, pwcli::RunManifest& manifest) {
  const pw::DiscreteMeasure a = load_cloud(patha, f, manifest);
  const pw::DiscreteMeasure b = load_cloud(pathb, f, manifest);
  const std::vector<double> etas = parse_double_list(etas_csv);
  if (etas.empty()) throw pw::Error("--etas is empty");
  manifest.read_s = manifest.lap();

  pw::BarycenterOptions opts;
  opts.optimize_weights = optimize_weights;
  opts.epsilon = epsilon;
  opts.seed = f.seed;
  const pw::PwStopRule stop{f.tol, f.max_iters};
  const std::vector<pw::BarycenterState> states = pw::interpolate(
      a, b, etas, size > 0 ? size : a.size(), parse_init(f.init, f), stop,
      opts);
  manifest.solve_s = manifest.lap();

  json objs = json::array();
  bool all_converged = true;
  {
    std::ofstream trace(f.output + "-trace.csv");
    trace << "eta,iteration,objective\n";
    char buf[64];
    for (std::size_t e = 0; e < etas.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%g", etas[e]);
      const std::string eta_tag = buf;
      pw::io::write_cloud(f.output + "-eta-" + eta_tag + ".xyz",
                          states[e].measure());
      objs.push_back(states[e].objective);
      all_converged = all_converged && states[e].converged;
      for (std::size_t i = 0; i < states[e].objective_trace.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", states[e].objective_trace[i]);
        trace << eta_tag << "," << (i + 1) << "," << buf << "\n";
      }
    }
  }
  json j;
  j["etas"] = etas;
  j["objectives"] = objs;
  j["epsilon"] = epsilon;
  write_json(f.output + ".json", j);
  manifest.write_s = manifest.lap();
  manifest.write(f.output + "-manifest.json");
  return all_converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------
// bench-init

int run_bench_init(const std::string& pivot_path, int trials, double noise,
                   int extra, double threshold, const CommonFlags& f,
                   pwcli::RunManifest& manifest) {
  const pw::DiscreteMeasure pivot = load_cloud(pivot_path, f, manifest);
  manifest.read_s = manifest.lap();

  if (threshold < 0.0)
    threshold = 4.0 * double(pivot.dim()) * noise * noise + 1e-6;

  const std::vector<std::pair<std::string, pw::InitStrategy>> inits = {
      {"euc-gw", pw::InitStrategy::euc_gw(f.gw_iters)},
      {"geo-gw", pw::InitStrategy::geo_gw(f.knn_k, f.gw_iters)},
      {"fiedler", pw::InitStrategy::fiedler_w(f.knn_k)},
      {"upca", pw::InitStrategy::upca_w()},
  };
  const pw::PwStopRule stop{f.tol, f.max_iters};

  struct Cell {
    bool success = false;
    double cost = std::numeric_limits<double>::quiet_NaN();
    std::string error;
  };
  std::vector<std::vector<Cell>> grid(inits.size(),
                                      std::vector<Cell>(trials));

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(pw::jobs())
  for (int t = 0; t < trials; ++t) {
    pw::DiscreteMeasure copy;
    try {
      pw::PerturbationConfig cfg;
      cfg.noise_sigma = noise;
      cfg.extra_vertex_count = extra;
      cfg.apply_random_rotation = true;
      cfg.apply_random_reflection = (t % 2) == 1;
      cfg.rng_seed = f.seed + 1000003ULL * (t + 1);
      copy = pw::perturb(pivot, cfg);
    } catch (const std::exception& e) {
      for (std::size_t r = 0; r < inits.size(); ++r)
        grid[r][t].error = e.what();
      continue;
    }
    for (std::size_t r = 0; r < inits.size(); ++r) {
      try {
        const pw::PwSolution sol =
            pw::pw_distance(pivot, copy, inits[r].second, stop);
        grid[r][t].cost = sol.cost;
        grid[r][t].success = sol.converged && sol.cost <= threshold;
      } catch (const std::exception& e) {
        grid[r][t].error = e.what();  // recorded, never aborts the grid
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  manifest.solve_s = manifest.lap();

  {
    std::ofstream csv(f.output + "-grid.csv");
    csv << "init";
    for (int t = 0; t < trials; ++t) csv << ",trial" << (t + 1);
    csv << "\n";
    for (std::size_t r = 0; r < inits.size(); ++r) {
      csv << inits[r].first;
      for (int t = 0; t < trials; ++t) csv << "," << (grid[r][t].success ? 1 : 0);
      csv << "\n";
    }
  }
  json j;
  j["threshold"] = threshold;
  j["trials"] = trials;
  j["noise"] = noise;
  j["extra_vertices"] = extra;
  json rates = json::object();
  json cells = json::array();
  for (std::size_t r = 0; r < inits.size(); ++r) {
    int wins = 0;
    for (int t = 0; t < trials; ++t) {
      const Cell& c = grid[r][t];
      wins += c.success ? 1 : 0;
      json cell = {{"init", inits[r].first},
                   {"trial", t + 1},
                   {"success", c.success}};
      if (std::isfinite(c.cost)) cell["cost"] = c.cost;
      if (!c.error.empty()) cell["error"] = c.error;
      cells.push_back(cell);
    }
    rates[inits[r].first] = double(wins) / double(trials);
  }
  j["success_rates"] = rates;
  j["cells"] = cells;
  write_json(f.output + ".json", j);
  manifest.write_s = manifest.lap();
  manifest.write(f.output + "-manifest.json");
  return kExitOk;
}

// ---------------------------------------------------------------------
// cluster

int run_cluster(const std::string& data_dir, int k, const std::string& metric,
                int centroid_size, int max_rounds, const CommonFlags& f,
                pwcli::RunManifest& manifest) {
  std::vector<std::string> paths;
  std::vector<std::string> classes;
  std::vector<std::string> class_names;
  {
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(data_dir))
      if (entry.is_directory()) subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    if (subdirs.empty())
      throw pw::Error("cluster: no class subdirectories under " + data_dir);
    for (const auto& dir : subdirs) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& file : files) {
        paths.push_back(file.string());
        classes.push_back(dir.filename().string());
      }
      class_names.push_back(dir.filename().string());
    }
  }
  if (paths.empty()) throw pw::Error("cluster: no input files");

  std::vector<pw::DiscreteMeasure> clouds;
  clouds.reserve(paths.size());
  for (const auto& p : paths) clouds.push_back(load_cloud(p, f, manifest));
  manifest.read_s = manifest.lap();

  pw::ClusteringConfig cfg;
  cfg.k = k > 0 ? k : static_cast<int>(class_names.size());
  cfg.centroid_size = centroid_size;
  cfg.max_rounds = max_rounds;
  cfg.rng_seed = f.seed;
  cfg.init = parse_init(f.init, f);
  cfg.stop = pw::PwStopRule{f.tol, f.max_iters};
  cfg.gw_iters = f.gw_iters;
  const std::map<std::string, pw::CloudMetric> metric_names = {
      {"pw", pw::CloudMetric::PW},
      {"emd", pw::CloudMetric::EMD},
      {"euc-gw", pw::CloudMetric::EucGW},
      {"geo-gw", pw::CloudMetric::GeoGW}};
  if (!metric_names.count(metric))
    throw pw::Error("unknown --metric '" + metric + "'");
  cfg.metric = metric_names.at(metric);

  std::string note;
  if (cfg.metric == pw::CloudMetric::EucGW ||
      cfg.metric == pw::CloudMetric::GeoGW) {
    note = "GW metric uses medoid centroids (GW barycenters live in "
           "distance-matrix space)";
    std::cout << "# " << note << "\n";
  }

  const auto solve_start = std::chrono::steady_clock::now();
  const pw::ClusteringResult result = pw::pw_kmeans(clouds, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    solve_start)
          .count();
  manifest.solve_s = manifest.lap();

  std::vector<int> truth(paths.size());
  {
    std::map<std::string, int> ids;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (!ids.count(classes[i]))
        ids[classes[i]] = static_cast<int>(ids.size());
      truth[i] = ids[classes[i]];
    }
  }
  const double ari = pw::adjusted_rand_index(truth, result.labels);
  const double nmi = pw::normalized_mutual_info(truth, result.labels);

  {
    std::ofstream labels(f.output + "-labels.csv");
    labels << "path,class,cluster\n";
    for (std::size_t i = 0; i < paths.size(); ++i)
      labels << paths[i] << "," << classes[i] << "," << result.labels[i]
             << "\n";
  }
  {
    std::ofstream confusion(f.output + "-confusion.csv");
    confusion << "class";
    for (int c = 0; c < cfg.k; ++c) confusion << ",cluster" << c;
    confusion << "\n";
    std::map<std::string, std::vector<int>> counts;
    for (const auto& name : class_names)
      counts[name] = std::vector<int>(cfg.k, 0);
    for (std::size_t i = 0; i < paths.size(); ++i)
      ++counts[classes[i]][result.labels[i]];
    for (const auto& name : class_names) {
      confusion << name;
      for (int c = 0; c < cfg.k; ++c) confusion << "," << counts[name][c];
      confusion << "\n";
    }
  }
  for (std::size_t c = 0; c < result.centroids.size(); ++c)
    pw::io::write_cloud(f.output + "-centroid-" + std::to_string(c) + ".xyz",
                        result.centroids[c]);

  json j;
  j["ari"] = ari;
  j["nmi"] = nmi;
  j["seconds"] = seconds;
  j["rounds"] = result.rounds;
  j["k"] = cfg.k;
  j["metric"] = metric;
  if (!note.empty()) j["note"] = note;
  write_json(f.output + ".json", j);
  manifest.write_s = manifest.lap();
  manifest.write(f.output + "-manifest.json");
  std::cout << "ARI " << ari << "  NMI " << nmi << "  (" << seconds << " s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procrustes-Wasserstein distances, barycenters and clustering"};
  app.require_subcommand(1);

  int jobs = 0;
  app.add_option("--jobs", jobs,
                 "worker threads (default: PW_JOBS env or logical cores)");

  CommonFlags fd, fa, fb, fi, fbench, fc;
  std::string patha, pathb;
  bool write_plan = false;

  auto* distance = app.add_subcommand("distance", "PW distance between two clouds");
  distance->add_option("a", patha, "first cloud")->required();
  distance->add_option("b", pathb, "second cloud")->required();
  add_common(distance, fd);
  distance->add_flag("--write-plan", write_plan, "also write the coupling");

  std::string al_a, al_b;
  bool al_write_plan = false;
  auto* align = app.add_subcommand(
      "align", "PW distance plus the aligned copy of the second cloud");
  align->add_option("a", al_a, "first cloud")->required();
  align->add_option("b", al_b, "second cloud")->required();
  add_common(align, fa);
  align->add_flag("--write-plan", al_write_plan, "also write the coupling");

  std::vector<std::string> bary_inputs;
  std::string lambdas_csv;
  Eigen::Index bary_size = 0;
  double bary_eps = 0.0;
  bool bary_weights = false;
  auto* bary = app.add_subcommand("barycenter", "free-support PW barycenter");
  bary->add_option("inputs", bary_inputs, "input clouds")->required();
  bary->add_option("--lambdas", lambdas_csv, "comma list, defaults uniform");
  bary->add_option("--size", bary_size, "barycenter support size");
  bary->add_option("--epsilon", bary_eps, "entropic regularization (0 = exact)");
  bary->add_flag("--optimize-weights", bary_weights,
                 "also optimize the barycenter histogram");
  add_common(bary, fb);

  std::string ip_a, ip_b, etas_csv = "0,0.25,0.5,0.75,1";
  Eigen::Index ip_size = 0;
  double ip_eps = 0.0;
  bool ip_weights = false;
  auto* interp = app.add_subcommand(
      "interpolate", "barycenter path between two clouds over eta");
  interp->add_option("a", ip_a, "first cloud")->required();
  interp->add_option("b", ip_b, "second cloud")->required();
  interp->add_option("--etas", etas_csv, "ascending eta values in [0,1]");
  interp->add_option("--size", ip_size, "barycenter support size");
  interp->add_option("--epsilon", ip_eps, "entropic regularization (0 = exact)");
  interp->add_flag("--optimize-weights", ip_weights,
                   "also optimize the barycenter histogram");
  add_common(interp, fi);

  std::string pivot = "dog2d";
  int trials = 50, extra = 5;
  double noise = 0.01, threshold = -1.0;
  auto* bench = app.add_subcommand(
      "bench-init", "initializer convergence grid on perturbed copies");
  bench->add_option("--pivot", pivot,
                    "pivot cloud file, or the bundled dog2d / torus3d");
  bench->add_option("--trials", trials, "number of perturbed copies");
  bench->add_option("--noise", noise, "Gaussian noise sigma");
  bench->add_option("--extra-vertices", extra, "extra vertices per copy");
  bench->add_option("--success-threshold", threshold,
                    "cost threshold (default 4*d*noise^2 + 1e-6)");
  add_common(bench, fbench, /*with_init=*/false);

  std::string data_dir, metric = "pw";
  int k = 0, centroid_size = 30, max_rounds = 20;
  auto* cluster = app.add_subcommand(
      "cluster", "k-means over clouds; class labels from subdirectory names");
  cluster->add_option("data", data_dir, "directory of class subdirectories")
      ->required();
  cluster->add_option("--k", k, "cluster count (default: class count)");
  cluster->add_option("--metric", metric, "pw|emd|euc-gw|geo-gw");
  cluster->add_option("--centroid-size", centroid_size, "points per centroid");
  cluster->add_option("--max-rounds", max_rounds, "Lloyd round cap");
  fc.init = "emd";
  add_common(cluster, fc);

  CLI11_PARSE(app, argc, argv);
  if (jobs > 0) pw::set_jobs(jobs);

  pwcli::RunManifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.push_back(argv[i]);

  auto fill_common = [&](const char* name, const CommonFlags& f) {
    manifest.command = name;
    manifest.config = {{"init", f.init},         {"knn_k", f.knn_k},
                       {"gw_iters", f.gw_iters}, {"tol", f.tol},
                       {"max_iters", f.max_iters}, {"seed", f.seed},
                       {"pgm_threshold", f.pgm_threshold},
                       {"jobs", pw::jobs()},     {"output", f.output}};
  };

  try {
    if (*distance) {
      fill_common("distance", fd);
      return run_distance(patha, pathb, fd, false, write_plan, manifest);
    }
    if (*align) {
      fill_common("align", fa);
      return run_distance(al_a, al_b, fa, true, al_write_plan, manifest);
    }
    if (*bary) {
      fill_common("barycenter", fb);
      manifest.config["lambdas"] = lambdas_csv;
      manifest.config["size"] = bary_size;
      manifest.config["epsilon"] = bary_eps;
      manifest.config["optimize_weights"] = bary_weights;
      return run_barycenter(bary_inputs, lambdas_csv, bary_size, bary_eps,
                            bary_weights, fb, manifest);
    }
    if (*interp) {
      fill_common("interpolate", fi);
      manifest.config["etas"] = etas_csv;
      manifest.config["size"] = ip_size;
      manifest.config["epsilon"] = ip_eps;
      manifest.config["optimize_weights"] = ip_weights;
      return run_interpolate(ip_a, ip_b, etas_csv, ip_size, ip_eps, ip_weights,
                             fi, manifest);
    }
    if (*bench) {
      fill_common("bench-init", fbench);
      manifest.config["pivot"] = pivot;
      manifest.config["trials"] = trials;
      manifest.config["noise"] = noise;
      manifest.config["extra_vertices"] = extra;
      manifest.config["success_threshold"] = threshold;
      return run_bench_init(pivot, trials, noise, extra, threshold, fbench,
                            manifest);
    }
    if (*cluster) {
      fill_common("cluster", fc);
      manifest.config["data"] = data_dir;
      manifest.config["k"] = k;
      manifest.config["metric"] = metric;
      manifest.config["centroid_size"] = centroid_size;
      manifest.config["max_rounds"] = max_rounds;
      return run_cluster(data_dir, k, metric, centroid_size, max_rounds, fc,
                         manifest);
    }
  } catch (const pw::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
