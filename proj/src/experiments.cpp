#include "riemlap/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "riemlap/evaluate.hpp"
#include "riemlap/io.hpp"
#include "riemlap/rng.hpp"
#include "riemlap/svgplot.hpp"

namespace riemlap {

namespace fs = std::filesystem;

const char* kTimingsNote =
    "wall-clock values vary between runs; all other outputs are deterministic";

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t s = base;
  splitmix64(s);
  s ^= 0x9E3779B97F4A7C15ull * (salt + 1);
  return splitmix64(s);
}

std::string resolve_path(const std::string& path, const std::string& data_dir) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute() || fs::exists(p) || data_dir.empty()) return path;
  return (fs::path(data_dir) / p).string();
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (j.contains(key)) return j.at(key).get<T>();
  return fallback;
}

Mat json_to_matrix(const json& j) {
  const auto rows = j.size();
  const auto cols = j.at(0).size();
  Mat m(rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec json_to_vector(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

IntegratorConfig integrator_from_json(const json& j) {
  IntegratorConfig cfg;
  cfg.rtol = get_or(j, "rtol", cfg.rtol);
  cfg.atol = get_or(j, "atol", cfg.atol);
  cfg.max_steps = get_or(j, "max_steps", cfg.max_steps);
  cfg.t_end = get_or(j, "t_end", cfg.t_end);
  return cfg;
}

json integrator_to_json(const IntegratorConfig& cfg) {
  return {{"rtol", cfg.rtol}, {"atol", cfg.atol}, {"max_steps", cfg.max_steps},
          {"t_end", cfg.t_end}};
}

PrecisionKind default_precision(MapKind kind) {
  return kind == MapKind::Euclidean ? PrecisionKind::NegHessian : PrecisionKind::Fisher;
}

}  // namespace

// ---------------------------------------------------------------------------
// synthetic datasets
// ---------------------------------------------------------------------------

namespace {

std::string rows_to_csv(const std::vector<std::vector<double>>& rows) {
  std::string out;
  char buf[40];
  for (const auto& r : rows) {
    for (size_t j = 0; j < r.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", r[j]);
      out += buf;
      out += (j + 1 < r.size()) ? ',' : '\n';
    }
  }
  return out;
}

// two-Gaussian mixture per class, the classic two-feature benchmark layout
std::string gen_ripley_csv(std::uint64_t seed) {
  Rng rng(seed);
  const double centers0[2][2] = {{-0.3, 0.7}, {0.4, 0.7}};
  const double centers1[2][2] = {{-0.7, 0.3}, {0.3, 0.3}};
  const double sd = std::sqrt(0.03);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 125; ++i) {
    const auto& c = centers0[i % 2];
    rows.push_back({c[0] + sd * rng.normal(), c[1] + sd * rng.normal(), 0.0});
    const auto& d = centers1[i % 2];
    rows.push_back({d[0] + sd * rng.normal(), d[1] + sd * rng.normal(), 1.0});
  }
  return rows_to_csv(rows);
}

// class-conditional logistic data with heterogeneous raw feature scales
std::string gen_logistic_csv(int n, const std::vector<std::pair<double, double>>& scales,
                             const std::vector<double>& w, double b, std::uint64_t seed) {
  Rng rng(seed);
  const int d = static_cast<int>(scales.size());
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(d + 1);
    double lin = b;
    for (int j = 0; j < d; ++j) {
      const double z = rng.normal();
      row[j] = scales[j].first + scales[j].second * z;
      lin += w[j] * z;
    }
    const double p = 1.0 / (1.0 + std::exp(-lin));
    row[d] = rng.uniform() < p ? 1.0 : 0.0;
    rows.push_back(std::move(row));
  }
  return rows_to_csv(rows);
}

std::string gen_snelson_csv(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 200; ++i) {
    const double x = 6.0 * (i + 0.5) / 200.0 + 0.01 * rng.normal();
    const double f = std::sin(1.2 * x) + 0.4 * std::cos(2.5 * x + 1.0);
    rows.push_back({x, f + 0.3 * rng.normal()});
  }
  return rows_to_csv(rows);
}

std::vector<std::pair<double, double>> spread_scales(int d, std::uint64_t seed, double big) {
  // a few large-scale columns, the rest near unit scale
  Rng rng(seed);
  std::vector<std::pair<double, double>> s(d);
  for (int j = 0; j < d; ++j) {
    const double u = rng.uniform();
    double scale = 1.0 + 4.0 * u;
    if (j % 5 == 3) scale = big * (0.5 + u);
    s[j] = {scale * (0.2 + rng.uniform()), scale};
  }
  return s;
}

std::vector<double> spread_weights(int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(d);
  for (int j = 0; j < d; ++j) w[j] = 0.9 * rng.normal();
  return w;
}

}  // namespace

void write_synthetic_datasets(const std::string& dir) {
  fs::create_directories(dir);
  auto put = [&dir](const std::string& name, const std::string& content) {
    write_text_file((fs::path(dir) / name).string(), content);
  };
  put("ripley.csv", gen_ripley_csv(0xA1));
  {
    std::vector<std::pair<double, double>> scales = {{3.3, 3.3},  {120, 30},   {70, 12},
                                                     {29, 12},    {32, 7},     {0.45, 0.3},
                                                     {30, 10}};
    std::vector<double> w = {0.3, 1.2, -0.3, 0.1, 0.8, 0.6, 0.9};
    put("pima.csv", gen_logistic_csv(532, scales, w, -0.8, 0xA2));
  }
  put("heart.csv", gen_logistic_csv(270, spread_scales(13, 0xB3, 200.0),
                                    spread_weights(13, 0xC3), -0.3, 0xA3));
  put("australian.csv", gen_logistic_csv(690, spread_scales(14, 0xB4, 1000.0),
                                         spread_weights(14, 0xC4), 0.2, 0xA4));
  put("german.csv", gen_logistic_csv(1000, spread_scales(24, 0xB5, 500.0),
                                     spread_weights(24, 0xC5), -0.5, 0xA5));
  put("snelson.csv", gen_snelson_csv(0xA6));
}

MlpSplit split_mlp_dataset(const Dataset& full, const std::string& split_kind) {
  const int n = full.n();
  std::vector<int> train_idx, test_idx;
  if (split_kind == "complete") {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Rng rng(1);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
    const int n_test = std::min(50, n / 4);
    test_idx.assign(perm.begin(), perm.begin() + n_test);
    train_idx.assign(perm.begin() + n_test, perm.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
  } else if (split_kind == "gap") {
    for (int i = 0; i < n; ++i) {
      const double x = full.X(i, 0);
      (x >= 1.5 && x <= 3.0 ? test_idx : train_idx).push_back(i);
    }
  } else if (split_kind == "none") {
    for (int i = 0; i < n; ++i) {
      train_idx.push_back(i);
      test_idx.push_back(i);
    }
  } else {
    throw std::invalid_argument("split_mlp_dataset: unknown split '" + split_kind + "'");
  }
  auto take = [&full](const std::vector<int>& idx) {
    Dataset d;
    d.X.resize(idx.size(), full.dim());
    d.y.resize(idx.size());
    for (size_t k = 0; k < idx.size(); ++k) {
      d.X.row(k) = full.X.row(idx[k]);
      d.y[k] = full.y[idx[k]];
    }
    return d;
  };
  return {take(train_idx), take(test_idx)};
}

// ---------------------------------------------------------------------------
// config resolution
// ---------------------------------------------------------------------------

ResolvedTarget resolve_target(const json& spec, const std::string& data_dir) {
  ResolvedTarget rt;
  const std::string name = spec.at("name").get<std::string>();
  json resolved = spec;

  if (name == "gaussian") {
    Vec mean = spec.contains("mean") ? json_to_vector(spec.at("mean")) : Vec::Zero(2);
    Mat cov = spec.contains("cov") ? json_to_matrix(spec.at("cov"))
                                   : Mat::Identity(mean.size(), mean.size());
    rt.target = gaussian_target(mean, cov);
    resolved["mean"] = vector_to_json(mean);
    resolved["cov"] = matrix_to_json(cov);
    rt.exact_sampler = [mean, cov](int n, std::uint64_t seed) {
      return exact_gaussian_samples(mean, cov, n, seed);
    };
  } else if (name == "banana") {
    BananaConfig cfg;
    cfg.sigma_theta = get_or(spec, "sigma_theta", cfg.sigma_theta);
    cfg.sigma_y = get_or(spec, "sigma_y", cfg.sigma_y);
    cfg.n_obs = get_or(spec, "n_obs", cfg.n_obs);
    cfg.theta1_true = get_or(spec, "theta1_true", cfg.theta1_true);
    cfg.theta2sq_true = get_or(spec, "theta2sq_true", cfg.theta2sq_true);
    const std::uint64_t data_seed = get_or<std::uint64_t>(spec, "data_seed", 0);
    Vec data = spec.contains("data") ? json_to_vector(spec.at("data"))
                                     : generate_banana_data(cfg, data_seed);
    rt.target = banana_target(cfg, data);
    resolved["sigma_theta"] = cfg.sigma_theta;
    resolved["sigma_y"] = cfg.sigma_y;
    resolved["n_obs"] = cfg.n_obs;
    resolved["theta1_true"] = cfg.theta1_true;
    resolved["theta2sq_true"] = cfg.theta2sq_true;
    resolved["data_seed"] = data_seed;
  } else if (name == "squiggle") {
    const double a = get_or(spec, "a", 1.5);
    Mat S = spec.contains("S") ? json_to_matrix(spec.at("S"))
                               : (Mat(2, 2) << 5.0, 0.0, 0.0, 0.05).finished();
    rt.target = squiggle_target(a, S);
    resolved["a"] = a;
    resolved["S"] = matrix_to_json(S);
    rt.exact_sampler = [a, S](int n, std::uint64_t seed) {
      return exact_squiggle_samples(a, S, n, seed);
    };
  } else if (name == "funnel") {
    const double sigma = get_or(spec, "sigma", 3.0);
    rt.target = funnel_target(sigma);
    resolved["sigma"] = sigma;
    rt.exact_sampler = [sigma](int n, std::uint64_t seed) {
      return exact_funnel_samples(sigma, n, seed);
    };
  } else if (name == "logreg") {
    const std::string path = resolve_path(spec.at("dataset").get<std::string>(), data_dir);
    const bool standardize = get_or(spec, "standardize", true);
    const bool add_intercept = get_or(spec, "add_intercept", true);
    const double alpha = get_or(spec, "alpha", 100.0);
    rt.train = std::make_shared<Dataset>(load_csv_dataset(path, standardize, add_intercept));
    rt.target = logreg_target(*rt.train, alpha);
    resolved["dataset"] = path;
    resolved["standardize"] = standardize;
    resolved["add_intercept"] = add_intercept;
    resolved["alpha"] = alpha;
  } else if (name == "mlp") {
    const std::string path = resolve_path(spec.at("dataset").get<std::string>(), data_dir);
    MlpConfig cfg;
    cfg.hidden = get_or(spec, "hidden", cfg.hidden);
    cfg.noise_std = get_or(spec, "noise_std", cfg.noise_std);
    cfg.prior_prec = get_or(spec, "prior_prec", cfg.prior_prec);
    const std::string split = get_or<std::string>(spec, "split", "complete");
    Dataset full = load_csv_dataset(path, false, false);
    MlpSplit sp = split_mlp_dataset(full, split);
    rt.train = std::make_shared<Dataset>(std::move(sp.train));
    rt.test = std::make_shared<Dataset>(std::move(sp.test));
    rt.mlp = std::make_shared<MlpModel>(cfg);
    rt.target = mlp_target(cfg, *rt.train);
    resolved["dataset"] = path;
    resolved["split"] = split;
    resolved["hidden"] = cfg.hidden;
    resolved["noise_std"] = cfg.noise_std;
    resolved["prior_prec"] = cfg.prior_prec;
  } else {
    throw std::invalid_argument("unknown target name: " + name);
  }
  rt.spec = resolved;
  return rt;
}

SampleSet resolve_reference(const json& spec, const ResolvedTarget& rt, std::uint64_t seed,
                            const std::string& data_dir) {
  const std::string kind = get_or<std::string>(spec, "kind", "exact");
  if (kind == "exact") {
    if (!rt.exact_sampler)
      throw std::invalid_argument("reference kind 'exact' needs a diffeomorphic-Gaussian target");
    return rt.exact_sampler(get_or(spec, "n", 2000), seed);
  }
  if (kind == "rwm") {
    McmcConfig cfg;
    cfg.n_keep = get_or(spec, "n_keep", cfg.n_keep);
    cfg.warmup = get_or(spec, "warmup", cfg.warmup);
    cfg.thin = get_or(spec, "thin", cfg.thin);
    cfg.seed = seed;
    Vec init = find_map_euclidean(rt.target, 20, mix_seed(seed, 0x494e49ull));
    RwmResult res = rwm_samples(rt.target, init, cfg);
    if (res.warning) std::cerr << "[riemlap] rwm reference warning: " << *res.warning << "\n";
    return std::move(res.samples);
  }
  if (kind == "csv") {
    const std::string path = resolve_path(spec.at("path").get<std::string>(), data_dir);
    SampleSet s;
    s.samples = read_matrix_csv(path);
    s.nfev.assign(s.samples.rows(), 0);
    s.statuses.assign(s.samples.rows(), Status::Ok);
    s.seed = seed;
    return s;
  }
  throw std::invalid_argument("unknown reference kind: " + kind);
}

LaplaceFit fit_laplace(const TargetModel& target, MapKind map_kind, PrecisionKind precision,
                       int restarts, std::uint64_t seed) {
  Vec theta_hat;
  if (map_kind == MapKind::Euclidean) {
    theta_hat = find_map_euclidean(target, restarts, seed);
  } else {
    MetricField metric =
        target.has_fisher() ? fisher_metric(target) : monge_metric(target);
    theta_hat = find_map_hausdorff(target, metric, restarts, seed);
  }
  Mat prec = build_precision(target, theta_hat, precision);
  return make_laplace_fit(theta_hat, prec);
}

Mat subsample_rows(const Mat& m, int n_max) {
  const int n = static_cast<int>(m.rows());
  if (n <= n_max) return m;
  const int stride = n / n_max;
  Mat out(n_max, m.cols());
  for (int i = 0; i < n_max; ++i) out.row(i) = m.row(i * stride);
  return out;
}

// ---------------------------------------------------------------------------
// experiment drivers
// ---------------------------------------------------------------------------

namespace {

constexpr Variant kAllVariants[4] = {Variant::ELA, Variant::RLA_B, Variant::RLA_BLOG,
                                     Variant::RLA_F};

struct VariantRun {
  std::vector<RunResult> w_runs;
  double wall = 0.0;
};

json report_entry(const std::string& metric, const std::vector<RunResult>& runs) {
  EvaluationReport rep = summarize(metric, runs);
  return {{"metric", rep.metric_name},
          {"mean", rep.value_mean},
          {"std", rep.value_std},
          {"n_runs", rep.n_runs},
          {"t_mean", rep.mean_nfev},
          {"n_failed", rep.n_failed}};
}

// W1 of the ok samples against the (possibly subsampled) reference
RunResult one_w_run(const SampleSet& set, const Mat& reference, int n_cap) {
  RunResult run;
  Mat ok = set.ok_samples();
  if (ok.rows() == 0) throw std::runtime_error("no successful samples to evaluate");
  Mat ref = subsample_rows(reference, n_cap);
  Mat mine = subsample_rows(ok, n_cap);
  const double t0 = now_s();
  run.value = wasserstein1(mine, ref);
  run.wall_time_s = now_s() - t0;
  run.mean_nfev = set.mean_nfev_ok();
  run.n_failed = set.n_failed();
  return run;
}

}  // namespace

json run_banana_experiment(const ReproduceOptions& opts) {
  json rows = json::array();
  json timings = json::object();
  std::map<std::string, std::map<std::string, std::vector<RunResult>>> acc;

  for (int rep = 0; rep < opts.n_repeats; ++rep) {
    const std::uint64_t seed = opts.seed + rep;
    BananaConfig cfg;
    Vec data = generate_banana_data(cfg, seed);
    TargetModel target = banana_target(cfg, data);

    McmcConfig mcfg;
    mcfg.n_keep = opts.ref_keep;
    mcfg.warmup = opts.ref_warmup;
    mcfg.thin = opts.ref_thin;
    mcfg.seed = mix_seed(seed, 0x726566ull);
    Vec init = find_map_euclidean(target, 20, mix_seed(seed, 0x696eull));
    RwmResult ref = rwm_samples(target, init, mcfg);
    Mat ref_samples = ref.samples.samples;

    for (MapKind mk : {MapKind::Euclidean, MapKind::Hausdorff}) {
      LaplaceFit fit = fit_laplace(target, mk, default_precision(mk), 20, seed);
      for (Variant var : kAllVariants) {
        ApproxConfig acfg;
        acfg.variant = var;
        acfg.map_kind = mk;
        acfg.precision_kind = default_precision(mk);
        acfg.n_samples = opts.n_samples;
        acfg.seed = mix_seed(seed, static_cast<std::uint64_t>(var) * 16 + static_cast<int>(mk));
        acfg.integrator = opts.integrator;
        acfg.threads = opts.threads;
        SampleSet set = sample(fit, target, acfg);
        acc[to_string(mk)][to_string(var)].push_back(
            one_w_run(set, ref_samples, opts.n_samples));
      }
    }
  }

  for (const auto& [mk, methods] : acc) {
    json row = {{"map_kind", mk}, {"methods", json::object()}};
    for (const auto& [name, runs] : methods) {
      row["methods"][name] = report_entry("wasserstein1", runs);
      double wall = 0.0;
      for (const auto& r : runs) wall += r.wall_time_s;
      timings[mk + "/" + name] = wall;
    }
    rows.push_back(row);
  }
  return {{"experiment", "banana"},
          {"n_repeats", opts.n_repeats},
          {"n_samples", opts.n_samples},
          {"reference",
           {{"kind", "rwm"}, {"n_keep", opts.ref_keep}, {"warmup", opts.ref_warmup},
            {"thin", opts.ref_thin}}},
          {"rows", rows},
          {"timings", timings}};
}

namespace {

// squiggle and funnel share the exact-reference protocol
json run_exact_reference_experiment(const std::string& name, const ReproduceOptions& opts,
                                    const std::function<ResolvedTarget()>& make_target) {
  ResolvedTarget rt = make_target();
  std::map<std::string, std::map<std::string, std::vector<RunResult>>> acc;
  std::vector<RunResult> floors;
  json timings = json::object();

  for (int rep = 0; rep < opts.n_repeats; ++rep) {
    const std::uint64_t seed = opts.seed + rep;
    Mat ref = rt.exact_sampler(opts.n_samples, mix_seed(seed, 0x7265ull)).samples;
    Mat floor_a = rt.exact_sampler(opts.n_samples, mix_seed(seed, 0x666c31ull)).samples;
    Mat floor_b = rt.exact_sampler(opts.n_samples, mix_seed(seed, 0x666c32ull)).samples;
    RunResult floor;
    floor.value = wasserstein1(floor_a, floor_b);
    floors.push_back(floor);

    for (MapKind mk : {MapKind::Euclidean, MapKind::Hausdorff}) {
      LaplaceFit fit = fit_laplace(rt.target, mk, default_precision(mk), 20, seed);
      for (Variant var : kAllVariants) {
        ApproxConfig acfg;
        acfg.variant = var;
        acfg.map_kind = mk;
        acfg.precision_kind = default_precision(mk);
        acfg.n_samples = opts.n_samples;
        acfg.seed = mix_seed(seed, static_cast<std::uint64_t>(var) * 16 + static_cast<int>(mk));
        acfg.integrator = opts.integrator;
        acfg.threads = opts.threads;
        SampleSet set = sample(fit, rt.target, acfg);
        acc[to_string(mk)][to_string(var)].push_back(one_w_run(set, ref, opts.n_samples));
      }
    }
  }

  json rows = json::array();
  for (const auto& [mk, methods] : acc) {
    json row = {{"map_kind", mk}, {"methods", json::object()}};
    for (const auto& [vname, runs] : methods) {
      row["methods"][vname] = report_entry("wasserstein1", runs);
      double wall = 0.0;
      for (const auto& r : runs) wall += r.wall_time_s;
      timings[mk + "/" + vname] = wall;
    }
    rows.push_back(row);
  }
  json floor_entry = report_entry("wasserstein1_floor", floors);
  return {{"experiment", name},      {"n_repeats", opts.n_repeats},
          {"n_samples", opts.n_samples}, {"reference", {{"kind", "exact"}}},
          {"floor", floor_entry},    {"rows", rows},
          {"target", rt.spec},       {"timings", timings}};
}

}  // namespace

json run_squiggle_experiment(const ReproduceOptions& opts) {
  return run_exact_reference_experiment("squiggle", opts, [&] {
    return resolve_target({{"name", "squiggle"}}, opts.data_dir);
  });
}

json run_funnel_experiment(const ReproduceOptions& opts) {
  return run_exact_reference_experiment("funnel", opts, [&] {
    return resolve_target({{"name", "funnel"}, {"sigma", 3.0}}, opts.data_dir);
  });
}

json run_bias_experiment(const ReproduceOptions& opts) {
  const std::vector<int> dims = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  json curves = {{"ELA", json::array()}, {"RLA-B", json::array()}};
  json timings = json::object();

  for (int d : dims) {
    std::map<std::string, std::vector<RunResult>> acc;
    for (int rep = 0; rep < opts.n_repeats; ++rep) {
      const std::uint64_t seed = opts.seed + rep;
      TargetModel target = gaussian_target(Vec::Zero(d), Mat::Identity(d, d));
      Mat ref = exact_gaussian_samples(Vec::Zero(d), Mat::Identity(d, d), opts.n_samples,
                                       mix_seed(seed, 0xD0 + d))
                    .samples;
      LaplaceFit fit = make_laplace_fit(Vec::Zero(d), Mat::Identity(d, d));
      for (Variant var : {Variant::ELA, Variant::RLA_B}) {
        ApproxConfig acfg;
        acfg.variant = var;
        acfg.n_samples = opts.n_samples;
        acfg.seed = mix_seed(seed, 0xE0 + d * 4 + static_cast<int>(var));
        acfg.integrator = opts.integrator;
        acfg.threads = opts.threads;
        SampleSet set = sample(fit, target, acfg);
        RunResult run;
        const double t0 = now_s();
        run.value = wasserstein1_1d(set.ok_samples().col(0), ref.col(0));
        run.wall_time_s = now_s() - t0;
        run.mean_nfev = set.mean_nfev_ok();
        run.n_failed = set.n_failed();
        acc[to_string(var)].push_back(run);
      }
    }
    for (const auto& [vname, runs] : acc) {
      EvaluationReport rep = summarize("wasserstein1_dim1", runs);
      curves[vname].push_back({{"dim", d},
                               {"mean", rep.value_mean},
                               {"std", rep.value_std},
                               {"lo", rep.value_mean - 2.0 * rep.value_std},
                               {"hi", rep.value_mean + 2.0 * rep.value_std},
                               {"t_mean", rep.mean_nfev}});
    }
  }
  return {{"experiment", "bias"},
          {"n_repeats", opts.n_repeats},
          {"n_samples", opts.n_samples},
          {"dims", dims},
          {"curves", curves},
          {"timings", timings}};
}

json run_logreg_experiment(const ReproduceOptions& opts) {
  std::vector<std::string> names = opts.datasets;
  if (names.empty()) names = {"ripley", "pima", "heart", "australian", "german"};
  // fail early when files are missing
  std::vector<std::string> missing;
  for (const auto& nm : names) {
    const std::string path = resolve_path(nm + ".csv", opts.data_dir);
    if (!fs::exists(path)) missing.push_back(path);
  }
  if (!missing.empty()) {
    std::string msg = "missing logistic-regression dataset files:";
    for (const auto& p : missing) msg += " " + p;
    msg += " (generate stand-ins with `riemlap gen-data` or point RIEMLAP_DATA_DIR at them)";
    throw std::invalid_argument(msg);
  }

  json blocks = json::array();
  json timings = json::object();
  for (const auto& nm : names) {
    for (bool standardize : {true, false}) {
      json spec = {{"name", "logreg"},
                   {"dataset", nm + ".csv"},
                   {"standardize", standardize},
                   {"alpha", 100.0}};
      ResolvedTarget rt = resolve_target(spec, opts.data_dir);
      std::map<std::string, std::vector<RunResult>> acc;
      for (int rep = 0; rep < opts.n_repeats; ++rep) {
        const std::uint64_t seed = opts.seed + rep;
        McmcConfig mcfg;
        mcfg.n_keep = opts.ref_keep;
        mcfg.warmup = opts.ref_warmup;
        mcfg.thin = opts.ref_thin;
        mcfg.seed = mix_seed(seed, 0x6c72ull + standardize);
        LaplaceFit fit = fit_laplace(rt.target, MapKind::Euclidean, PrecisionKind::Fisher, 20,
                                     seed);
        RwmResult ref = rwm_samples(rt.target, fit.theta_hat, mcfg);
        for (Variant var : kAllVariants) {
          ApproxConfig acfg;
          acfg.variant = var;
          acfg.precision_kind = PrecisionKind::Fisher;  // equals the negative Hessian here
          acfg.n_samples = opts.n_samples;
          acfg.seed = mix_seed(seed, 0xF0 + static_cast<int>(var) + 8 * standardize);
          acfg.integrator = opts.integrator;
          acfg.threads = opts.threads;
          SampleSet set = sample(fit, rt.target, acfg);
          acc[to_string(var)].push_back(one_w_run(set, ref.samples.samples, opts.n_samples));
        }
      }
      json block = {{"data", nm}, {"standardized", standardize}, {"methods", json::object()}};
      for (const auto& [vname, runs] : acc) {
        block["methods"][vname] = report_entry("wasserstein1", runs);
        double wall = 0.0;
        for (const auto& r : runs) wall += r.wall_time_s;
        timings[nm + (standardize ? "/stand" : "/raw") + "/" + vname] = wall;
      }
      blocks.push_back(block);
    }
  }
  return {{"experiment", "logreg"},
          {"n_repeats", opts.n_repeats},
          {"n_samples", opts.n_samples},
          {"reference",
           {{"kind", "rwm"}, {"n_keep", opts.ref_keep}, {"warmup", opts.ref_warmup},
            {"thin", opts.ref_thin}}},
          {"blocks", blocks},
          {"timings", timings}};
}

json run_mlp_experiment(const ReproduceOptions& opts) {
  json splits = json::array();
  json neg_hessian_outcomes = json::array();
  json timings = json::object();

  for (const std::string split : {"complete", "gap"}) {
    json spec = {{"name", "mlp"}, {"dataset", "snelson.csv"}, {"split", split}};
    ResolvedTarget rt = resolve_target(spec, opts.data_dir);
    std::map<std::string, std::vector<RunResult>> mse_acc, nll_acc;
    std::vector<RunResult> ref_mse, ref_nll;

    for (int rep = 0; rep < opts.n_repeats; ++rep) {
      const std::uint64_t seed = opts.seed + rep;
      // Fisher precision; the negative Hessian of an NN posterior may fail
      // SPD, which is recorded as an outcome rather than used
      LaplaceFit fit = fit_laplace(rt.target, MapKind::Euclidean, PrecisionKind::Fisher, 20,
                                   seed);
      try {
        build_precision(rt.target, fit.theta_hat, PrecisionKind::NegHessian);
        neg_hessian_outcomes.push_back(
            {{"split", split}, {"seed", seed}, {"outcome", "spd"}});
      } catch (const SpdError& e) {
        neg_hessian_outcomes.push_back(
            {{"split", split}, {"seed", seed}, {"outcome", "non_spd"}, {"error", e.what()}});
      }

      McmcConfig mcfg;
      mcfg.n_keep = opts.ref_keep;
      mcfg.warmup = opts.ref_warmup;
      mcfg.thin = opts.ref_thin;
      mcfg.seed = mix_seed(seed, 0x6d6cull);
      RwmResult ref = rwm_samples(rt.target, fit.theta_hat, mcfg);
      SampleSet ref_subset;
      ref_subset.samples = subsample_rows(ref.samples.samples, opts.mlp_samples);
      ref_subset.nfev.assign(ref_subset.samples.rows(), 0);
      ref_subset.statuses.assign(ref_subset.samples.rows(), Status::Ok);
      PredictiveMetrics ref_pm = predictive_metrics(ref_subset, *rt.mlp, *rt.test);
      ref_mse.push_back({ref_pm.mse, 0.0, 0, 0.0});
      ref_nll.push_back({ref_pm.nll, 0.0, 0, 0.0});

      for (Variant var : kAllVariants) {
        ApproxConfig acfg;
        acfg.variant = var;
        acfg.precision_kind = PrecisionKind::Fisher;
        acfg.n_samples = opts.mlp_samples;
        acfg.seed = mix_seed(seed, 0x100 + static_cast<int>(var));
        acfg.integrator = opts.integrator;
        acfg.threads = opts.threads;
        const double t0 = now_s();
        SampleSet set = sample(fit, rt.target, acfg);
        const double wall = now_s() - t0;
        PredictiveMetrics pm = predictive_metrics(set, *rt.mlp, *rt.test);
        mse_acc[to_string(var)].push_back(
            {pm.mse, set.mean_nfev_ok(), set.n_failed(), wall});
        nll_acc[to_string(var)].push_back({pm.nll, set.mean_nfev_ok(), set.n_failed(), wall});
      }
    }

    json methods = json::object();
    for (const auto& [vname, runs] : mse_acc) {
      json m = report_entry("mse", runs);
      json nll = report_entry("nll", nll_acc[vname]);
      m["nll_mean"] = nll["mean"];
      m["nll_std"] = nll["std"];
      methods[vname] = m;
      double wall = 0.0;
      for (const auto& r : runs) wall += r.wall_time_s;
      timings[split + "/" + vname] = wall;
    }
    json ref_entry = report_entry("mse", ref_mse);
    json ref_nll_entry = report_entry("nll", ref_nll);
    ref_entry["nll_mean"] = ref_nll_entry["mean"];
    ref_entry["nll_std"] = ref_nll_entry["std"];
    splits.push_back({{"split", split},
                      {"methods", methods},
                      {"reference", ref_entry},
                      {"n_test", rt.test->n()}});
  }
  return {{"experiment", "mlp"},
          {"n_repeats", opts.n_repeats},
          {"n_samples", opts.mlp_samples},
          {"reference",
           {{"kind", "rwm"}, {"n_keep", opts.ref_keep}, {"warmup", opts.ref_warmup},
            {"thin", opts.ref_thin}}},
          {"splits", splits},
          {"neg_hessian_outcomes", neg_hessian_outcomes},
          {"timings", timings}};
}

// ---------------------------------------------------------------------------
// rendering and commands
// ---------------------------------------------------------------------------

std::string render_report_markdown(const json& report) {
  std::string md;
  const std::string exp = report.at("experiment").get<std::string>();
  md += "# " + exp + " report\n\n";
  char buf[256];

  auto method_table = [&md, &buf](const json& methods) {
    md += "| method | W | T | failed |\n|---|---|---|---|\n";
    for (auto it = methods.begin(); it != methods.end(); ++it) {
      const json& m = it.value();
      std::snprintf(buf, sizeof(buf), "| %s | %s | %.1f | %d |\n", it.key().c_str(),
                    format_mean_std(m.at("mean").get<double>(), m.at("std").get<double>()).c_str(),
                    m.at("t_mean").get<double>(), m.at("n_failed").get<int>());
      md += buf;
    }
    md += "\n";
  };

  if (report.contains("rows")) {
    if (report.contains("floor")) {
      const json& f = report.at("floor");
      std::snprintf(buf, sizeof(buf), "same-distribution floor: %s\n\n",
                    format_mean_std(f.at("mean").get<double>(), f.at("std").get<double>()).c_str());
      md += buf;
    }
    for (const json& row : report.at("rows")) {
      md += "## MAP: " + row.at("map_kind").get<std::string>() + "\n\n";
      method_table(row.at("methods"));
    }
  } else if (report.contains("blocks")) {
    for (const json& block : report.at("blocks")) {
      md += "## " + block.at("data").get<std::string>() +
            (block.at("standardized").get<bool>() ? " (standardized)" : " (raw)") + "\n\n";
      method_table(block.at("methods"));
    }
  } else if (report.contains("curves")) {
    md += "| D | ELA W1(dim1) | RLA-B W1(dim1) |\n|---|---|---|\n";
    const json& ela = report.at("curves").at("ELA");
    const json& rlab = report.at("curves").at("RLA-B");
    for (size_t i = 0; i < ela.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "| %d | %s | %s |\n", ela[i].at("dim").get<int>(),
                    format_mean_std(ela[i].at("mean").get<double>(),
                                    ela[i].at("std").get<double>())
                        .c_str(),
                    format_mean_std(rlab[i].at("mean").get<double>(),
                                    rlab[i].at("std").get<double>())
                        .c_str());
      md += buf;
    }
    md += "\n";
  } else if (report.contains("splits")) {
    for (const json& split : report.at("splits")) {
      md += "## split: " + split.at("split").get<std::string>() + "\n\n";
      md += "| method | MSE | NLL | T | failed |\n|---|---|---|---|---|\n";
      const json& methods = split.at("methods");
      for (auto it = methods.begin(); it != methods.end(); ++it) {
        const json& m = it.value();
        std::snprintf(
            buf, sizeof(buf), "| %s | %s | %s | %.1f | %d |\n", it.key().c_str(),
            format_mean_std(m.at("mean").get<double>(), m.at("std").get<double>()).c_str(),
            format_mean_std(m.at("nll_mean").get<double>(), m.at("nll_std").get<double>())
                .c_str(),
            m.at("t_mean").get<double>(), m.at("n_failed").get<int>());
        md += buf;
      }
      const json& r = split.at("reference");
      std::snprintf(
          buf, sizeof(buf), "| reference (rwm) | %s | %s | - | - |\n\n",
          format_mean_std(r.at("mean").get<double>(), r.at("std").get<double>()).c_str(),
          format_mean_std(r.at("nll_mean").get<double>(), r.at("nll_std").get<double>()).c_str());
      md += buf;
    }
    if (report.contains("neg_hessian_outcomes")) {
      md += "## negative-Hessian precision outcomes\n\n";
      for (const json& o : report.at("neg_hessian_outcomes")) {
        md += "- split " + o.at("split").get<std::string>() + ", seed " +
              std::to_string(o.at("seed").get<std::uint64_t>()) + ": " +
              o.at("outcome").get<std::string>() + "\n";
      }
      md += "\n";
    }
  }
  return md;
}

namespace {

json strip_timings(json report) {
  report.erase("timings");
  return report;
}

void write_report_files(const json& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json timings = report.contains("timings") ? report.at("timings") : json::object();
  timings["note"] = kTimingsNote;
  write_text_file((fs::path(out_dir) / "report.json").string(), strip_timings(report).dump(2) + "\n");
  write_text_file((fs::path(out_dir) / "report.md").string(), render_report_markdown(report));
  write_text_file((fs::path(out_dir) / "timings.json").string(), timings.dump(2) + "\n");
}

}  // namespace

int cmd_sample(const json& config, const std::string& out_dir) {
  const std::string data_dir = get_or<std::string>(config, "data_dir", "");
  ResolvedTarget rt = resolve_target(config.at("target"), data_dir);

  ApproxConfig acfg;
  acfg.variant = variant_from_string(get_or<std::string>(config, "variant", "ELA"));
  acfg.map_kind = map_kind_from_string(get_or<std::string>(config, "map_kind", "euclidean"));
  const std::string prec_str =
      get_or<std::string>(config, "precision", to_string(default_precision(acfg.map_kind)));
  acfg.precision_kind = precision_from_string(prec_str);
  acfg.n_samples = get_or(config, "n_samples", 1000);
  acfg.seed = get_or<std::uint64_t>(config, "seed", 0);
  acfg.threads = get_or(config, "threads", 1);
  acfg.integrator = integrator_from_json(config.contains("integrator") ? config.at("integrator")
                                                                       : json::object());
  const int restarts = get_or(config, "restarts", 20);

  LaplaceFit fit = fit_laplace(rt.target, acfg.map_kind, acfg.precision_kind, restarts, acfg.seed);
  SampleSet set = sample(fit, rt.target, acfg);

  fs::create_directories(out_dir);
  write_matrix_csv((fs::path(out_dir) / "samples.csv").string(), set.ok_samples());

  json status_counts = json::object();
  for (Status s : set.statuses) {
    const std::string key = to_string(s);
    status_counts[key] = status_counts.contains(key) ? status_counts[key].get<int>() + 1 : 1;
  }
  Mat cov = fit.cov_chol * fit.cov_chol.transpose();
  double nfev_total = 0;
  int nfev_max = 0;
  for (size_t i = 0; i < set.nfev.size(); ++i) {
    nfev_total += set.nfev[i];
    nfev_max = std::max(nfev_max, set.nfev[i]);
  }
  json diagnostics = {{"theta_hat", vector_to_json(fit.theta_hat)},
                      {"precision", matrix_to_json(fit.precision)},
                      {"covariance", matrix_to_json(cov)},
                      {"variant", to_string(acfg.variant)},
                      {"map_kind", to_string(acfg.map_kind)},
                      {"precision_kind", to_string(acfg.precision_kind)},
                      {"n_samples", acfg.n_samples},
                      {"n_ok", acfg.n_samples - set.n_failed()},
                      {"n_failed", set.n_failed()},
                      {"statuses", status_counts},
                      {"nfev", {{"mean_ok", set.mean_nfev_ok()},
                                {"max", nfev_max},
                                {"total", nfev_total}}},
                      {"seed", acfg.seed}};
  write_text_file((fs::path(out_dir) / "diagnostics.json").string(),
                  diagnostics.dump(2) + "\n");

  json run = config;
  run["target"] = rt.spec;
  run["variant"] = to_string(acfg.variant);
  run["map_kind"] = to_string(acfg.map_kind);
  run["precision"] = to_string(acfg.precision_kind);
  run["n_samples"] = acfg.n_samples;
  run["seed"] = acfg.seed;
  run["restarts"] = restarts;
  run["integrator"] = integrator_to_json(acfg.integrator);
  write_text_file((fs::path(out_dir) / "run.json").string(), run.dump(2) + "\n");

  std::cout << "wrote " << acfg.n_samples - set.n_failed() << " samples ("
            << set.n_failed() << " failed) to " << out_dir << "\n";
  return 0;
}

int cmd_map(const json& config, const std::string& out_dir) {
  const std::string data_dir = get_or<std::string>(config, "data_dir", "");
  ResolvedTarget rt = resolve_target(config.at("target"), data_dir);
  const MapKind mk = map_kind_from_string(get_or<std::string>(config, "map_kind", "euclidean"));
  const std::uint64_t seed = get_or<std::uint64_t>(config, "seed", 0);
  const int restarts = get_or(config, "restarts", 20);

  Vec theta_hat;
  if (mk == MapKind::Euclidean) {
    theta_hat = find_map_euclidean(rt.target, restarts, seed);
  } else {
    MetricField metric =
        rt.target.has_fisher() ? fisher_metric(rt.target) : monge_metric(rt.target);
    theta_hat = find_map_hausdorff(rt.target, metric, restarts, seed);
  }
  json out = {{"theta_hat", vector_to_json(theta_hat)},
              {"map_kind", to_string(mk)},
              {"log_density", rt.target.log_density(theta_hat)},
              {"grad_norm", rt.target.grad(theta_hat).norm()}};
  fs::create_directories(out_dir);
  write_text_file((fs::path(out_dir) / "map.json").string(), out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_reproduce(const std::string& experiment, const ReproduceOptions& opts,
                  const std::string& out_dir) {
  json report;
  if (experiment == "banana") {
    report = run_banana_experiment(opts);
  } else if (experiment == "squiggle") {
    report = run_squiggle_experiment(opts);
  } else if (experiment == "funnel") {
    report = run_funnel_experiment(opts);
  } else if (experiment == "logreg") {
    report = run_logreg_experiment(opts);
  } else if (experiment == "bias") {
    report = run_bias_experiment(opts);
  } else if (experiment == "mlp") {
    report = run_mlp_experiment(opts);
  } else {
    throw std::invalid_argument(
        "unknown experiment '" + experiment +
        "' (expected banana|squiggle|funnel|logreg|bias|mlp)");
  }
  write_report_files(report, out_dir);
  std::cout << render_report_markdown(report);
  return 0;
}

int cmd_evaluate(const std::string& csv_a, const std::string& csv_b, bool first_dim_only,
                 const std::string& out_path) {
  Mat a = read_matrix_csv(csv_a);
  Mat b = read_matrix_csv(csv_b);
  json out = {{"a", csv_a}, {"b", csv_b}, {"n_a", a.rows()}, {"n_b", b.rows()}};
  if (first_dim_only) {
    out["w1_dim1"] = wasserstein1_1d(a.col(0), b.col(0));
  } else {
    out["w1"] = wasserstein1(a, b);
  }
  if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_plot(const std::string& samples_csv, const json& target_spec, const std::string& out_svg,
             const std::string& data_dir) {
  Mat samples = read_matrix_csv(samples_csv);
  ResolvedTarget rt = resolve_target(target_spec, data_dir);
  if (rt.target.dim != 2)
    throw std::invalid_argument("cmd_plot: only 2D targets can be plotted");
  plot_samples_svg(out_svg, samples, rt.target.log_density);
  std::cout << "wrote " << out_svg << "\n";
  return 0;
}

}  // namespace riemlap
