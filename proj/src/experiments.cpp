#include "steinmc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "steinmc/boolean_model.hpp"
#include "steinmc/distance.hpp"
#include "steinmc/gamma.hpp"
#include "steinmc/knn.hpp"
#include "steinmc/parallel.hpp"
#include "steinmc/report_io.hpp"
#include "steinmc/resample.hpp"
#include "steinmc/sigma_series.hpp"

namespace steinmc {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

const std::vector<std::string> kExperiments = {
    "gamma", "boolean-model", "sigma-series", "knn", "rate-study"};

}  // namespace

std::string config_schema() {
  return R"schema({
  "experiment": "gamma | boolean-model | sigma-series | knn | rate-study",
  "seed": "uint64 master seed (default 1)",
  "workers": "worker count; results are worker-count independent (default 2)",
  "output_dir": "artifact directory (default: $STEINMC_OUTDIR or .)",
  "model": {
    "d": "ambient/output dimension (1 or 2 for geometry experiments)",
    "n_grid": "strictly increasing sample sizes",
    "R": "grain radius (> 0)",
    "k": "nearest-neighbour count (>= 1)",
    "p": "moment order for the local-dependence bounds (>= 8)",
    "law": "rate-study coordinates: cube-vertices | uniform-cube | normal"
  },
  "estimator": {
    "reps": "outer Monte-Carlo replicates",
    "inner_reps": "inner replicates for nested estimators (>= 2)",
    "replicates": "scene replicates for empirical covariances",
    "k_max": "series truncation depth (>= 2)",
    "mc_samples": "integration samples per series term",
    "samples_per_n": "statistic samples per grid point (rate-study)",
    "class_directions": "half-space directions",
    "class_thresholds": "thresholds per direction",
    "corners_per_axis": "rectangle corner grid resolution"
  }
})schema";
}

ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& default_output_dir) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  ExperimentConfig config;
  std::vector<std::string> errors;

  config.experiment = parsed.value("experiment", "");
  if (std::find(kExperiments.begin(), kExperiments.end(), config.experiment) ==
      kExperiments.end())
    errors.push_back("experiment: must be one of gamma, boolean-model, "
                     "sigma-series, knn, rate-study");
  config.seed = parsed.value("seed", std::uint64_t{1});
  config.workers = parsed.value("workers", 2u);
  if (config.workers == 0) errors.push_back("workers: must be >= 1");
  config.output_dir = parsed.value("output_dir", default_output_dir);

  const json model = parsed.value("model", json::object());
  config.d = model.value("d", 2);
  if (config.d < 1) errors.push_back("model.d: must be >= 1");
  if ((config.experiment == "boolean-model" ||
       config.experiment == "sigma-series") &&
      config.d > 2)
    errors.push_back("model.d: geometry kernels cover d in {1,2}");
  if (model.contains("n_grid")) {
    for (const auto& v : model["n_grid"])
      config.n_grid.push_back(v.get<std::size_t>());
  }
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1]) {
      errors.push_back("model.n_grid: must be strictly increasing");
      break;
    }
  config.radius = model.value("R", 0.3);
  if (config.radius <= 0.0) errors.push_back("model.R: must be > 0");
  config.k = model.value("k", std::size_t{1});
  if (config.k == 0) errors.push_back("model.k: must be >= 1");
  config.p = model.value("p", 12.0);
  if (config.experiment == "knn" && config.p < 8.0)
    errors.push_back("model.p: local-dependence bounds require p >= 8");
  config.law = model.value("law", "cube-vertices");
  if (config.law != "cube-vertices" && config.law != "uniform-cube" &&
      config.law != "normal")
    errors.push_back(
        "model.law: must be cube-vertices, uniform-cube, or normal");

  const json est = parsed.value("estimator", json::object());
  config.reps = est.value("reps", std::size_t{20000});
  if (config.reps < 2) errors.push_back("estimator.reps: must be >= 2");
  config.inner_reps = est.value("inner_reps", std::size_t{2});
  if (config.inner_reps < 2)
    errors.push_back("estimator.inner_reps: must be >= 2");
  config.replicates = est.value("replicates", std::size_t{10000});
  if (config.replicates < 2)
    errors.push_back("estimator.replicates: must be >= 2");
  config.k_max = est.value("k_max", std::size_t{12});
  if (config.k_max < 2) errors.push_back("estimator.k_max: must be >= 2");
  config.mc_samples = est.value("mc_samples", std::size_t{200000});
  if (config.mc_samples == 0)
    errors.push_back("estimator.mc_samples: must be >= 1");
  config.samples_per_n = est.value("samples_per_n", std::size_t{100000});
  if (config.samples_per_n < 2)
    errors.push_back("estimator.samples_per_n: must be >= 2");
  config.class_directions = est.value("class_directions", std::size_t{64});
  config.class_thresholds = est.value("class_thresholds", std::size_t{256});
  config.corners_per_axis = est.value("corners_per_axis", std::size_t{16});
  if (config.class_directions == 0 || config.class_thresholds == 0)
    errors.push_back("estimator.class_*: must be >= 1");

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "config validation failed:";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
  }
  // Canonical rendering: sorted keys via nlohmann's object ordering.
  config.canonical = parsed.dump();
  return config;
}

namespace {

struct ArtifactWriter {
  const ExperimentConfig& config;
  std::uint64_t hash;
  RunResult& result;

  void write(const std::string& stem, const std::string& extension,
             const std::string& content) {
    std::filesystem::create_directories(config.output_dir);
    std::ostringstream name;
    name << stem << "-" << std::hex << hash << extension;
    const std::filesystem::path path = config.output_dir / name.str();
    write_file_atomic(path, content);
    result.artifacts.push_back(path);
  }
};

// W samples of the standardized linear statistic under the configured
// coordinate law.
Eigen::MatrixXd sampled_linear_statistic(std::size_t n, int d,
                                         const std::string& law,
                                         std::size_t count, RngStream rng,
                                         unsigned workers) {
  Eigen::MatrixXd samples(count, d);
  const double unit_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double cube_scale = std::sqrt(12.0 / static_cast<double>(n));
  const int mode = law == "cube-vertices" ? 0 : (law == "uniform-cube" ? 1 : 2);
  parallel_for(count, workers, [&](std::size_t s) {
    RngStream stream = rng.substream(s);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) {
        switch (mode) {
          case 0: acc[c] += stream.uniform() < 0.5 ? -1.0 : 1.0; break;
          case 1: acc[c] += stream.uniform() - 0.5; break;
          default: acc[c] += stream.normal(); break;
        }
      }
    }
    samples.row(s) =
        (mode == 1 ? cube_scale : unit_scale) * acc.transpose();
  });
  return samples;
}

RunResult run_rate_study(const ExperimentConfig& config) {
  RunResult result;
  const std::uint64_t hash = config_hash(config.canonical);
  ArtifactWriter writer{config, hash, result};
  std::vector<std::size_t> grid = config.n_grid;
  if (grid.empty()) grid = {16, 32, 64, 128, 256, 512, 1024};

  const GaussianTarget target(
      Eigen::MatrixXd::Identity(config.d, config.d));
  const TestClass half_spaces = default_half_spaces(
      config.d, config.class_directions, config.class_thresholds);
  const bool rectangles_enabled = config.d <= 3;
  TestClass rectangles;
  if (rectangles_enabled)
    rectangles = default_rectangles(config.d, config.corners_per_axis);

  CsvBuilder csv(hash, config.seed, "n,metric,value,stderr,class_size");
  std::vector<std::pair<double, double>> fit_pairs;
  RngStream rng(config.seed, 0xace);
  std::ostringstream summary;
  summary << "rate-study d=" << config.d << " law=" << config.law << "\n";
  for (std::size_t n : grid) {
    const Eigen::MatrixXd samples = sampled_linear_statistic(
        n, config.d, config.law, config.samples_per_n, rng.substream(n),
        config.workers);
    const double member_stderr =
        0.5 / std::sqrt(static_cast<double>(config.samples_per_n));
    const ProxyDistance hs =
        proxy_convex_distance(samples, target, half_spaces);
    double value = hs.value;
    std::size_t class_size = hs.class_size;
    csv.add_row(std::to_string(n) + ",proxy_halfspace," +
                format_double(hs.value) + "," + format_double(member_stderr) +
                "," + std::to_string(hs.class_size));
    if (rectangles_enabled) {
      const ProxyDistance rect =
          proxy_convex_distance(samples, target, rectangles);
      csv.add_row(std::to_string(n) + ",proxy_rectangle," +
                  format_double(rect.value) + "," +
                  format_double(member_stderr) + "," +
                  std::to_string(rect.class_size));
      value = std::max(value, rect.value);
      class_size += rect.class_size;
    }
    csv.add_row(std::to_string(n) + ",proxy_convex," + format_double(value) +
                "," + format_double(member_stderr) + "," +
                std::to_string(class_size));
    fit_pairs.emplace_back(static_cast<double>(n), value);
    summary << "  n=" << n << " proxy=" << value << "\n";
  }
  const RateFit fit = rate_fit(fit_pairs);
  summary << "  fitted slope " << fit.slope << " +/- " << fit.half_width
          << " (intercept " << fit.intercept << ")\n";
  writer.write("rate-study", ".csv", csv.content());
  json fit_json{{"slope", fit.slope},
                {"half_width", fit.half_width},
                {"intercept", fit.intercept},
                {"seed", config.seed}};
  writer.write("rate-study-fit", ".json", fit_json.dump(2));
  result.summary = summary.str();
  return result;
}

RunResult run_gamma(const ExperimentConfig& config) {
  RunResult result;
  const std::uint64_t hash = config_hash(config.canonical);
  ArtifactWriter writer{config, hash, result};
  const std::size_t n = config.n_grid.empty() ? 64 : config.n_grid.front();
  const Functional f = make_linear_statistic(n, config.d);
  const BatchSampler sampler = make_standard_normal_sampler(n, config.d);
  const Eigen::MatrixXd sigma =
      Eigen::MatrixXd::Identity(config.d, config.d);

  GammaEstimationPlan plan;
  plan.reps12 = config.reps;
  plan.g34.reps_outer = std::max<std::size_t>(config.reps / 10, 100);
  plan.g34.reps_inner = config.inner_reps;
  plan.g34.workers = config.workers;
  plan.sigma_term.reps_outer = plan.g34.reps_outer;
  plan.sigma_term.reps_inner = config.inner_reps;
  plan.sigma_term.workers = config.workers;
  const GammaEstimates gammas = estimate_all_gammas(
      f, sigma, sampler, plan, RngStream(config.seed, 0x6a));

  SmoothnessBudget unit{1.0, 1.0, 1.0, 1.0};
  const BoundReport smooth =
      assemble_smooth_bound(gammas, unit, sigma, /*posdef=*/false);
  const BoundReport smooth_pd =
      assemble_smooth_bound(gammas, unit, sigma, /*posdef=*/true);
  const BoundReport convex = assemble_convex_bound(gammas, sigma);

  writer.write("gamma-estimates", ".json", to_json(gammas));
  writer.write("bound-smooth", ".json", to_json(smooth));
  writer.write("bound-smooth-posdef", ".json", to_json(smooth_pd));
  writer.write("bound-convex", ".json", to_json(convex));

  CsvBuilder csv(hash, config.seed, "n,metric,value,stderr,class_size");
  auto row = [&](const char* metric, const ValueWithError& v) {
    csv.add_row(std::to_string(n) + "," + metric + "," +
                format_double(v.value) + "," + format_double(v.std_error) +
                ",0");
  };
  row("gamma1", gammas.gamma1);
  row("gamma2", gammas.gamma2);
  row("gamma3", gammas.gamma3);
  row("gamma4", gammas.gamma4);
  row("sigma_term", gammas.sigma_term);
  csv.add_row(std::to_string(n) + ",bound_convex," +
              format_double(convex.bound_value) + ",0,0");
  writer.write("gamma", ".csv", csv.content());

  std::ostringstream summary;
  summary << "gamma estimates (linear statistic, d=" << config.d
          << ", n=" << n << ")\n"
          << "  gamma1=" << gammas.gamma1.value << " +/- "
          << gammas.gamma1.std_error << "\n"
          << "  gamma2=" << gammas.gamma2.value << "\n"
          << "  gamma3=" << gammas.gamma3.value << "\n"
          << "  gamma4=" << gammas.gamma4.value << "\n"
          << "  sigma_term=" << gammas.sigma_term.value << "\n"
          << "  convex bound=" << convex.bound_value << "\n";
  result.summary = summary.str();
  return result;
}

RunResult run_boolean_model(const ExperimentConfig& config) {
  RunResult result;
  const std::uint64_t hash = config_hash(config.canonical);
  ArtifactWriter writer{config, hash, result};
  std::vector<std::size_t> grid = config.n_grid;
  if (grid.empty()) grid = {64, 128, 256, 512, 1024, 2048, 4096};

  SigmaSeriesOptions series_opts;
  series_opts.k_max = config.k_max;
  series_opts.mc_samples = config.mc_samples;
  series_opts.workers = config.workers;
  const SigmaSeries series = sigma_series(
      config.d, config.radius, series_opts, RngStream(config.seed, 0x515));
  writer.write("sigma-series", ".json", to_json(series));

  CsvBuilder csv(hash, config.seed, "n,metric,value,stderr,class_size");
  std::vector<std::pair<double, double>> fit_pairs;
  std::ostringstream summary;
  summary << "boolean-model d=" << config.d << " R=" << config.radius << "\n";
  RngStream rng(config.seed, 0xb00);
  for (std::size_t n : grid) {
    // All grid points share replicate streams, which couples the Monte
    // Carlo error across n and stabilizes the gap differences.
    const Eigen::VectorXd center =
        Eigen::VectorXd::Zero(config.d + 1);
    const Functional f =
        boolean_functional(config.d, n, config.radius, center);
    const Eigen::MatrixXd sigma_n = empirical_covariance(
        f, n, static_cast<std::size_t>(config.d),
        boolean_coord_draw(config.d, n), config.replicates, rng,
        config.workers);
    const CovarianceGap gap = covariance_gap(sigma_n, series.sigma);
    csv.add_row(std::to_string(n) + ",cov_gap_max," +
                format_double(gap.max_entry) + ",0,0");
    for (int i = 0; i <= config.d; ++i)
      for (int j = i; j <= config.d; ++j)
        csv.add_row(std::to_string(n) + ",sigma_n_" + std::to_string(i) +
                    std::to_string(j) + "," + format_double(sigma_n(i, j)) +
                    ",0,0");
    fit_pairs.emplace_back(static_cast<double>(n), gap.max_entry);
    summary << "  n=" << n << " max|Sigma_n - Sigma|=" << gap.max_entry
            << "\n";
  }
  if (fit_pairs.size() >= 4) {
    const RateFit fit = rate_fit(fit_pairs);
    summary << "  fitted exponent " << fit.slope << " +/- " << fit.half_width
            << "\n";
    json fit_json{{"exponent", fit.slope},
                  {"half_width", fit.half_width},
                  {"seed", config.seed}};
    writer.write("cov-gap-fit", ".json", fit_json.dump(2));
  }
  writer.write("boolean-model", ".csv", csv.content());

  // Replay artifacts: per-scene intrinsic-volume rows and one scene record.
  {
    const std::size_t n = grid.front();
    std::string columns = "seed";
    for (int c = 0; c <= config.d; ++c)
      columns += ",v" + std::to_string(c);
    CsvBuilder scene_csv(hash, config.seed, columns);
    const std::size_t scene_rows = std::min<std::size_t>(config.replicates, 64);
    for (std::size_t rep = 0; rep < scene_rows; ++rep) {
      const std::uint64_t scene_seed =
          derive_stream_id(config.seed, 0xce11 + rep);
      const GermGrainScene scene =
          sample_scene(config.d, n, config.radius, scene_seed);
      const Eigen::VectorXd v = intrinsic_volumes(scene);
      std::string row = std::to_string(scene_seed);
      for (int c = 0; c <= config.d; ++c)
        row += "," + format_double(v[c]);
      scene_csv.add_row(row);
    }
    writer.write("scenes", ".csv", scene_csv.content());
    const GermGrainScene sample =
        sample_scene(config.d, n, config.radius,
                     derive_stream_id(config.seed, 0xce11));
    writer.write("scene-replay", ".txt", scene_to_text(sample));
  }
  result.summary = summary.str();
  return result;
}

RunResult run_sigma_series(const ExperimentConfig& config) {
  RunResult result;
  const std::uint64_t hash = config_hash(config.canonical);
  ArtifactWriter writer{config, hash, result};
  SigmaSeriesOptions opts;
  opts.k_max = config.k_max;
  opts.mc_samples = config.mc_samples;
  opts.workers = config.workers;
  const SigmaSeries series = sigma_series(config.d, config.radius, opts,
                                          RngStream(config.seed, 0x515));
  writer.write("sigma-series", ".json", to_json(series));
  CsvBuilder csv(hash, config.seed, "n,metric,value,stderr,class_size");
  for (std::size_t t = 0; t < series.term_max.size(); ++t)
    csv.add_row(std::to_string(t + 2) + ",term_max," +
                format_double(series.term_max[t]) + ",0,0");
  writer.write("sigma-series", ".csv", csv.content());
  std::ostringstream summary;
  summary << "sigma-series d=" << config.d << " R=" << config.radius
          << " k_used=" << series.k_used << "\n  sigma=\n";
  summary << series.sigma << "\n";
  result.summary = summary.str();
  return result;
}

RunResult run_knn(const ExperimentConfig& config) {
  RunResult result;
  const std::uint64_t hash = config_hash(config.canonical);
  ArtifactWriter writer{config, hash, result};
  std::vector<std::size_t> grid = config.n_grid;
  if (grid.empty()) grid = {128, 256, 512, 1024, 2048};

  CsvBuilder csv(hash, config.seed, "n,metric,value,stderr,class_size");
  std::vector<std::pair<double, double>> fit_pairs;
  std::ostringstream summary;
  summary << "knn m=2 k=" << config.k << " p=" << config.p << "\n";
  std::string last_report;
  for (std::size_t n : grid) {
    // Indicator thresholds live on the k-NN scale, so the summand moments
    // stay comparable across the grid.
    const double unit = 1.0 / std::sqrt(static_cast<double>(n));
    const std::vector<double> thresholds = {0.5 * unit, 1.0 * unit};
    KnnReportOptions opts;
    opts.workers = config.workers;
    opts.moment_replicates = std::max<std::size_t>(config.reps / 100, 50);
    opts.delta_replicates = std::max<std::size_t>(config.reps / 10, 500);
    opts.eta_replicates = std::max<std::size_t>(config.reps / 300, 48);
    // The gamma estimators cost O(n^2) per replicate; keep the block
    // bounded as the grid grows.
    opts.gamma_reps = std::min(
        config.reps,
        std::max<std::size_t>(200, std::size_t{2000000000} / (n * n)));
    const LocalDependenceReport report =
        knn_bound_report(n, 2, config.k, config.p, thresholds, opts,
                         RngStream(config.seed, 0x77 + n));
    for (const auto& [tag, value] : report.bounds)
      csv.add_row(std::to_string(n) + ",bound_" + tag + "," +
                  format_double(value) + ",0,0");
    csv.add_row(std::to_string(n) + ",eta_p," + format_double(report.eta_p) +
                ",0,0");
    csv.add_row(std::to_string(n) + ",delta_moment4," +
                format_double(report.delta_moment4) + ",0,0");
    fit_pairs.emplace_back(static_cast<double>(n), report.bounds.at("4.4"));
    summary << "  n=" << n << " bound(4.4)=" << report.bounds.at("4.4")
            << "\n";
    last_report = to_json(report);
  }
  writer.write("knn-report", ".json", last_report);
  if (fit_pairs.size() >= 4) {
    const RateFit fit = rate_fit(fit_pairs);
    summary << "  fitted slope " << fit.slope << " (target "
            << -(config.p - 8.0) / (2.0 * config.p) << ")\n";
  }
  writer.write("knn", ".csv", csv.content());

  // Point-set replay record for the smallest grid entry.
  {
    const std::size_t n = grid.front();
    const std::uint64_t replay_seed = derive_stream_id(config.seed, 0x4e11);
    RngStream stream(replay_seed, 0);
    CoordMatrix points(n, 2);
    for (std::size_t i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) points.mutable_row(i)[c] = stream.uniform();
    writer.write("points-replay", ".txt",
                 points_to_text(points, replay_seed));
  }
  result.summary = summary.str();
  return result;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  if (config.experiment == "rate-study") return run_rate_study(config);
  if (config.experiment == "gamma") return run_gamma(config);
  if (config.experiment == "boolean-model") return run_boolean_model(config);
  if (config.experiment == "sigma-series") return run_sigma_series(config);
  if (config.experiment == "knn") return run_knn(config);
  throw std::invalid_argument("run_experiment: unknown experiment " +
                              config.experiment);
}

bool SelfTestResult::all_passed() const {
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

std::string SelfTestResult::render() const {
  std::ostringstream out;
  for (const auto& [name, ok] : checks)
    out << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
  out << (all_passed() ? "selftest: all invariants hold"
                       : "selftest: FAILURES present")
      << "\n";
  return out.str();
}

}  // namespace steinmc
