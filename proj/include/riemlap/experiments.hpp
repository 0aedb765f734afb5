#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "riemlap/dataset.hpp"
#include "riemlap/laplace.hpp"
#include "riemlap/mlp.hpp"
#include "riemlap/reference.hpp"
#include "riemlap/target.hpp"

namespace riemlap {

using json = nlohmann::json;

/// A target resolved from a config block, together with the pieces some
/// commands need beyond the TargetModel itself.
struct ResolvedTarget {
  TargetModel target;
  json spec;  // the resolved target block (defaults filled in)
  std::shared_ptr<MlpModel> mlp;        // mlp targets only
  std::shared_ptr<Dataset> train;       // dataset-backed targets
  std::shared_ptr<Dataset> test;        // mlp splits only
  std::function<SampleSet(int, std::uint64_t)> exact_sampler;  // diffeomorphic targets only
};

/// Builds a target from its JSON spec ({"name": ..., parameters...}).
/// Dataset paths are resolved against data_dir when relative.
ResolvedTarget resolve_target(const json& spec, const std::string& data_dir);

/// Reference samples per the config block: {"kind": "exact"|"rwm"|"csv", ...}.
SampleSet resolve_reference(const json& spec, const ResolvedTarget& target, std::uint64_t seed,
                            const std::string& data_dir);

/// MAP + precision + Cholesky for the requested map/precision pairing.
LaplaceFit fit_laplace(const TargetModel& target, MapKind map_kind, PrecisionKind precision,
                       int restarts, std::uint64_t seed);

/// Deterministic stride subsample down to at most n_max rows.
Mat subsample_rows(const Mat& m, int n_max);

/// Writes the documented synthetic stand-in datasets (ripley, pima, heart,
/// australian, german, snelson) into dir. Deterministic.
void write_synthetic_datasets(const std::string& dir);

/// Snelson-style 1D regression data splits.
struct MlpSplit {
  Dataset train;
  Dataset test;
};
MlpSplit split_mlp_dataset(const Dataset& full, const std::string& split_kind);

struct ReproduceOptions {
  std::uint64_t seed = 1;
  int n_repeats = 5;
  int n_samples = 2000;
  int mlp_samples = 500;
  int ref_keep = 20000;
  int ref_warmup = 50000;
  int ref_thin = 10;
  int threads = 1;
  std::string data_dir;
  std::vector<std::string> datasets;  // logreg subset; empty = all five
  IntegratorConfig integrator;
};

json run_banana_experiment(const ReproduceOptions& opts);
json run_squiggle_experiment(const ReproduceOptions& opts);
json run_funnel_experiment(const ReproduceOptions& opts);
json run_logreg_experiment(const ReproduceOptions& opts);
json run_bias_experiment(const ReproduceOptions& opts);
json run_mlp_experiment(const ReproduceOptions& opts);

/// Markdown rendering of a reproduce report (3-decimal [mean, std] cells).
std::string render_report_markdown(const json& report);

/// Command implementations behind the CLI. Each returns the process exit
/// code; per-sample geodesic failures are diagnostics, not errors.
int cmd_sample(const json& config, const std::string& out_dir);
int cmd_map(const json& config, const std::string& out_dir);
int cmd_reproduce(const std::string& experiment, const ReproduceOptions& opts,
                  const std::string& out_dir);
int cmd_evaluate(const std::string& csv_a, const std::string& csv_b, bool first_dim_only,
                 const std::string& out_path);
int cmd_plot(const std::string& samples_csv, const json& target_spec, const std::string& out_svg,
             const std::string& data_dir);

/// Volatile wall-clock numbers are kept out of the deterministic report
/// files; they go into a separate timings JSON.
extern const char* kTimingsNote;

}  // namespace riemlap
