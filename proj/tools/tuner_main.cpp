// tuner: reproduction harness for safe high-dimensional PID auto-tuning.
// Subcommands: prior | select | tune | simulate | report.
// Exit codes: 0 ok, 2 config/argument error, 3 I/O error, 4 numerical failure.

#include "tuner/config.hpp"
#include "tuner/io.hpp"
#include "tuner/parallel.hpp"
#include "tuner/sampling.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace tuner;

namespace {

constexpr std::uint64_t kStagePrior = 1;
constexpr std::uint64_t kStageSelect = 2;
constexpr std::uint64_t kStageTune = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: take the config value
};

Config load_config(const CommonArgs& args) {
  Config cfg = args.config_path.empty() ? Config::defaults() : Config::load(args.config_path);
  if (args.threads > 0) cfg.cli.threads = args.threads;
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

io::RunManifest start_manifest(const std::string& run_id, const std::string& command,
                               const Config& cfg, std::uint64_t seed) {
  io::RunManifest m;
  m.run_id = run_id;
  m.command = command;
  m.config = cfg.to_json();
  m.master_seed = seed;
  m.started_at = io::utc_timestamp();
  m.version = TUNER_VERSION;
  return m;
}

void finish_manifest(io::RunManifest& m, const std::string& out_dir) {
  m.finished_at = io::utc_timestamp();
  io::write_manifest(out_dir + "/manifest.json", m);
}

int run_prior(const CommonArgs& args) {
  const Config cfg = load_config(args);
  ensure_out_dir(args.out_dir);
  const quad::Environment env = cfg.environment();

  io::RunManifest manifest =
      start_manifest("prior-seed" + std::to_string(args.seed), "prior", cfg, args.seed);
  manifest.stage_streams.emplace_back("prior", kStagePrior);

  const Matrix points = latin_hypercube(cfg.cli.n_prior, 9, RngStream{args.seed, kStagePrior});
  Vector values(points.rows());
  parallel_for(static_cast<std::size_t>(points.rows()), cfg.cli.threads, [&](std::size_t i) {
    values(static_cast<Eigen::Index>(i)) = env.objective(points.row(static_cast<Eigen::Index>(i)));
  });

  const Dataset prior(points, values);
  io::write_prior_csv(args.out_dir + "/prior.csv", prior);
  manifest.artifacts = {"prior.csv"};
  finish_manifest(manifest, args.out_dir);

  int safe = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) >= cfg.bo.p_min) ++safe;
  std::cout << "prior: " << points.rows() << " observations, " << safe
            << " safe, best P = " << values.maxCoeff() << "\n";
  return 0;
}

int run_select(const std::string& prior_path, const CommonArgs& args) {
  const Config cfg = load_config(args);
  ensure_out_dir(args.out_dir);
  const Dataset prior = io::read_prior_csv(prior_path);
  const int dims = static_cast<int>(prior.dims());
  const BaseKernelParams base = cfg.base_params(dims);

  io::RunManifest manifest =
      start_manifest("select-seed" + std::to_string(args.seed), "select", cfg, args.seed);
  manifest.stage_streams.emplace_back("select", kStageSelect);

  const RngStream stage{args.seed, kStageSelect};
  const KernelRanking ranking =
      rank_additive_kernels(prior, dims, base, cfg.selection.nystrom, cfg.selection.top_m,
                            stage.child(1), cfg.cli.threads);
  const Forest forest = fit_forest(prior, cfg.selection.forest_trees, cfg.selection.forest_min_leaf,
                                   stage.child(2), cfg.cli.threads);
  const KernelSpec reduced =
      build_reduced_kernel(ranking, forest, dims, base, std::min(cfg.selection.dim_keep, dims));

  io::write_selection_json(args.out_dir + "/selection.json", {ranking, forest.importance, reduced});
  manifest.artifacts = {"selection.json"};
  finish_manifest(manifest, args.out_dir);

  std::cout << "selection: orders ranked best-first:";
  for (int o : ranking.sorted_orders) std::cout << " " << o;
  std::cout << "\nselected orders:";
  for (int o : ranking.selected) std::cout << " " << o;
  std::cout << "\n";
  return 0;
}

KernelSpec spec_from_orders(const std::vector<int>& orders, int dims, const BaseKernelParams& base) {
  for (int o : orders)
    if (o < 1 || o > dims)
      throw ArgumentError("--kernel-orders: order " + std::to_string(o) + " outside 1.." +
                          std::to_string(dims));
  return KernelSpec::make(dims, orders, base);
}

int run_tune(const std::string& prior_path, const std::string& selection_path,
             const std::vector<int>& kernel_orders, const std::string& method, int iterations,
             const CommonArgs& args) {
  Config cfg = load_config(args);
  if (iterations > 0) cfg.bo.iterations = iterations;
  cfg.bo.threads = cfg.cli.threads;
  ensure_out_dir(args.out_dir);

  const Dataset prior = io::read_prior_csv(prior_path);
  const int dims = static_cast<int>(prior.dims());
  const BaseKernelParams base = cfg.base_params(dims);
  const quad::Environment env = cfg.environment();
  const Objective objective = [&env](const Eigen::Ref<const Vector>& x) {
    return env.objective(x);
  };

  KernelSpec spec;
  if (method == "standard") {
    spec = standard_kernel_baseline(dims, base);
  } else if (method == "linebo") {
    spec = KernelSpec::make(1, {1}, cfg.base_params(1));  // recorded in best.json
  } else if (!selection_path.empty()) {
    spec = io::read_selection_json(selection_path).reduced;
  } else if (!kernel_orders.empty()) {
    spec = spec_from_orders(kernel_orders, dims, base);
  } else {
    throw ArgumentError("method '" + method + "' needs a selection.json or --kernel-orders");
  }

  io::RunManifest manifest = start_manifest("tune-" + method + "-seed" + std::to_string(args.seed),
                                            "tune --method " + method, cfg, args.seed);
  manifest.stage_streams.emplace_back("tune", kStageTune);
  const RngStream stage{args.seed, kStageTune};

  BoTrace trace;
  if (method == "ours" || method == "standard") {
    trace = run_safe_bo(objective, prior, spec, cfg.bo, stage);
  } else if (method == "unconstrained") {
    trace = run_unconstrained_bo(objective, prior, spec, cfg.bo, stage);
  } else if (method == "linebo") {
    trace = run_linebo(objective, prior, cfg.base_params(1), cfg.bo, stage);
  } else {
    throw ArgumentError("unknown method '" + method +
                        "' (expected ours|standard|linebo|unconstrained)");
  }

  io::write_trace_csv(args.out_dir + "/trace.csv", trace);

  const quad::PidGains best_gains = cfg.gains_bounds.denormalize(trace.best_params);
  nlohmann::ordered_json best;
  best["method"] = method;
  best["performance"] = trace.best_performance;
  best["gains"] = {{"x", {best_gains.x.p, best_gains.x.i, best_gains.x.d}},
                   {"z", {best_gains.z.p, best_gains.z.i, best_gains.z.d}},
                   {"theta", {best_gains.theta.p, best_gains.theta.i, best_gains.theta.d}}};
  best["gains_normalized"] =
      std::vector<double>(trace.best_params.begin(), trace.best_params.end());
  best["kernel"] = io::kernel_spec_to_json(spec);
  io::write_json_file(args.out_dir + "/best.json", best);

  manifest.artifacts = {"trace.csv", "best.json"};
  finish_manifest(manifest, args.out_dir);

  int unsafe = 0;
  for (const auto& r : trace.records)
    if (!r.safe) ++unsafe;
  std::cout << "tune(" << method << "): " << trace.records.size()
            << " iterations, best P = " << trace.best_performance << ", unsafe evaluations = "
            << unsafe << "\n";
  return 0;
}

quad::PidGains gains_from_json_file(const std::string& path) {
  const nlohmann::json doc = io::read_json_file(path);
  try {
    const auto& g = doc.at("gains");
    quad::PidGains gains;
    const auto read = [&](const char* key, quad::Pid& out) {
      const auto arr = g.at(key).get<std::vector<double>>();
      if (arr.size() != 3) throw IoError(path + ": gains." + key + " needs 3 entries");
      out = {arr[0], arr[1], arr[2]};
    };
    read("x", gains.x);
    read("z", gains.z);
    read("theta", gains.theta);
    return gains;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed gains file: " + e.what());
  }
}

int run_simulate(const std::string& gains_path, const std::vector<double>& gains_flat,
                 const CommonArgs& args) {
  const Config cfg = load_config(args);
  ensure_out_dir(args.out_dir);

  quad::PidGains gains = cfg.default_gains;
  if (!gains_flat.empty()) {
    if (gains_flat.size() != 9)
      throw ArgumentError("--gains expects 9 values: x.p,x.i,x.d,z.p,z.i,z.d,theta.p,theta.i,theta.d");
    std::array<double, 9> flat{};
    std::copy(gains_flat.begin(), gains_flat.end(), flat.begin());
    gains = quad::PidGains::from_flat(flat);
  } else if (!gains_path.empty()) {
    gains = gains_from_json_file(gains_path);
  }

  const quad::Environment env = cfg.environment();
  const quad::EpisodeResult result = env.run(gains);  // validates bounds, names the gain
  const double perf = quad::performance(result, cfg.episode);

  io::RunManifest manifest =
      start_manifest("simulate-seed" + std::to_string(args.seed), "simulate", cfg, args.seed);
  io::write_trajectory_csv(args.out_dir + "/trajectory.csv", result);

  nlohmann::ordered_json summary;
  summary["quadratic_cost"] = result.quadratic_cost;
  summary["reward"] = -result.quadratic_cost;
  summary["steps_completed"] = result.steps_completed;
  summary["terminated_early"] = result.terminated_early;
  summary["cause"] = to_string(result.cause);
  summary["performance"] = perf;
  io::write_json_file(args.out_dir + "/summary.json", summary);

  manifest.artifacts = {"trajectory.csv", "summary.json"};
  finish_manifest(manifest, args.out_dir);

  std::cout << "simulate: J^Q = " << result.quadratic_cost << ", L = " << result.steps_completed
            << ", P = " << perf << (result.terminated_early ? " (terminated early)" : "") << "\n";
  return 0;
}

int run_report(const std::vector<std::string>& run_dirs, const CommonArgs& args) {
  if (run_dirs.empty()) throw ArgumentError("report: no run directories given");
  ensure_out_dir(args.out_dir);

  struct Run {
    std::string label;
    BoTrace trace;
    nlohmann::json config;
  };
  std::vector<Run> runs;
  for (const auto& dir : run_dirs) {
    const io::RunManifest manifest = io::read_manifest(dir + "/manifest.json");
    bool has_trace = false;
    for (const auto& artifact : manifest.artifacts) has_trace |= artifact == "trace.csv";
    if (!has_trace) throw IoError(dir + ": manifest lists no trace.csv artifact");
    runs.push_back({manifest.run_id, io::read_trace_csv(dir + "/trace.csv"), manifest.config});
  }

  std::string warning;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].config != runs[0].config) {
      warning = "warning: run configs differ across directories; comparison may be apples-to-oranges";
      break;
    }

  std::ostringstream csv;
  csv << "method,iteration,best_so_far,unsafe_count\n";
  std::ostringstream txt;
  if (!warning.empty()) txt << warning << "\n";
  txt << "method, final_best, iters_to_90pct, unsafe_evaluations\n";
  for (const auto& run : runs) {
    int unsafe = 0;
    for (const auto& r : run.trace.records) {
      if (!r.safe) ++unsafe;
      csv << run.label << "," << r.iteration << "," << io::format_double(r.best_so_far) << ","
          << unsafe << "\n";
    }
    const auto& recs = run.trace.records;
    const double initial = recs.empty() ? 0.0 : recs.front().best_so_far;
    const double final_best = recs.empty() ? 0.0 : recs.back().best_so_far;
    const double threshold = initial + 0.9 * (final_best - initial);
    int to90 = static_cast<int>(recs.size());
    for (const auto& r : recs)
      if (r.best_so_far >= threshold) {
        to90 = r.iteration;
        break;
      }
    txt << run.label << ", " << io::format_double(final_best) << ", " << to90 << ", " << unsafe
        << "\n";
  }
  io::write_text_file(args.out_dir + "/report.csv", csv.str());
  io::write_text_file(args.out_dir + "/report.txt", txt.str());

  Config placeholder = Config::defaults();
  io::RunManifest manifest = start_manifest("report", "report", placeholder, args.seed);
  if (!runs.empty()) manifest.config = runs[0].config;
  manifest.artifacts = {"report.csv", "report.txt"};
  finish_manifest(manifest, args.out_dir);

  std::cout << txt.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe high-dimensional Bayesian optimization for cascaded PID tuning"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string prior_path, selection_path, gains_path, method = "ours";
  std::vector<int> kernel_orders;
  std::vector<double> gains_flat;
  std::vector<std::string> run_dirs;
  int iterations = 0;

  const auto add_common = [&common](CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--config", common.config_path, "JSON configuration file");
    cmd->add_option("--out", common.out_dir, "output directory");
    if (with_seed) cmd->add_option("--seed", common.seed, "master seed");
    cmd->add_option("--threads", common.threads, "worker threads (1 = bit-reproducible reference)");
  };

  auto* prior_cmd = app.add_subcommand("prior", "LHS-sample and evaluate the initial observations");
  add_common(prior_cmd);

  auto* select_cmd = app.add_subcommand("select", "rank additive kernels and build the reduced kernel");
  select_cmd->add_option("prior", prior_path, "prior.csv from the prior stage")->required();
  add_common(select_cmd);

  auto* tune_cmd = app.add_subcommand("tune", "run a tuning campaign");
  tune_cmd->add_option("prior", prior_path, "prior.csv from the prior stage")->required();
  tune_cmd->add_option("selection", selection_path, "selection.json from the select stage");
  tune_cmd->add_option("--method", method, "ours|standard|linebo|unconstrained");
  tune_cmd->add_option("--kernel-orders", kernel_orders, "explicit additive orders (alternative to selection.json)");
  tune_cmd->add_option("--iterations", iterations, "evaluation budget override");
  add_common(tune_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "run one episode and dump the trajectory");
  sim_cmd->add_option("gains_file", gains_path, "best.json from a tuning run (defaults to the default controller)");
  sim_cmd->add_option("--gains", gains_flat, "nine physical gains x.p,x.i,x.d,z.p,z.i,z.d,theta.p,theta.i,theta.d");
  add_common(sim_cmd, /*with_seed=*/false);

  auto* report_cmd = app.add_subcommand("report", "merge tuning runs into comparison tables");
  report_cmd->add_option("runs", run_dirs, "run directories containing manifest.json + trace.csv")
      ->required();
  add_common(report_cmd, /*with_seed=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (prior_cmd->parsed()) return run_prior(common);
    if (select_cmd->parsed()) return run_select(prior_path, common);
    if (tune_cmd->parsed())
      return run_tune(prior_path, selection_path, kernel_orders, method, iterations, common);
    if (sim_cmd->parsed()) return run_simulate(gains_path, gains_flat, common);
    if (report_cmd->parsed()) return run_report(run_dirs, common);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
