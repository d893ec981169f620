#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sdfpose/baseline.h"
#include "sdfpose/compact.h"
#include "sdfpose/fit.h"

namespace sdfpose {

/// Half-open interval [lo, hi); lo == hi means the fixed value lo.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  double sample(std::mt19937_64& rng) const;
};

struct ScenarioConfig {
  std::string name = "known-axis";
  // Initialization offsets: s0 = s (1 + ds), angles0 = angles + d, t0 = t + dt
  // with |dt| drawn from delta_t_norm in a uniform direction.
  Range delta_s{0.0, 0.3};
  Range delta_psi{0.0, 0.0};
  Range delta_rho{0.0, 0.0};
  Range delta_theta{-kPi / 9.0, kPi / 9.0};
  Range delta_t_norm{0.0, 0.15};
  bool known_axis = true;  // freeze (psi, rho) during the fit
  // Ground-truth sampling.
  Range gt_scale{0.5, 2.0};
  Range gt_angle{-kPi, kPi};
  Range gt_t_norm{0.0, 4.0};
  double code_sigma = 0.01;  // initial code ~ N(0, code_sigma^2)
  int shapes = 5;
  int trials = 10;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on reversed ranges or non-positive counts.
  void validate() const;

  /// Presets: known-axis, unknown-axis, known-axis-wide, unknown-axis-wide.
  static ScenarioConfig preset(const std::string& name);
};

/// INI text with a [scenario] section. Keys: name, preset, delta_s,
/// delta_psi, delta_rho, delta_theta, delta_t (each "lo, hi"), known_axis,
/// gt_scale, gt_angle, gt_t, code_sigma, shapes, trials, seed. Keys absent
/// from the file keep the preset (or known-axis) values.
ScenarioConfig parse_scenario_ini(const std::string& text);
ScenarioConfig load_scenario_ini(const std::string& path);

/// Uniformly random direction on the unit sphere.
Vec3 random_direction(std::mt19937_64& rng);

SimilarityTransform sample_ground_truth(const ScenarioConfig& cfg, std::mt19937_64& rng);

struct ScenarioDraw {
  FitParams truth;
  FitParams init;
};

/// Ground truth with code `truth_code`, and an initialization perturbed per
/// the scenario ranges.
ScenarioDraw sample_scenario(const ScenarioConfig& cfg, std::mt19937_64& rng,
                             const LatentCode& truth_code);

/// Initialization for a given ground truth.
FitParams sample_init(const ScenarioConfig& cfg, const FitParams& truth, std::mt19937_64& rng);

/// Generator seeded from (seed, stream) so that runs do not depend on the
/// order in which work is scheduled.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream);

struct BenchConfig {
  FitConfig fit;                    // frozen mask is set from the scenario
  GridSpec mesh_grid{Vec3::Constant(-1.0), Vec3::Constant(1.0), 48};
  double canonical_radius = 1.0;    // bound on canonical shapes, for sampling regions
  std::size_t near_samples = 20000;
  std::size_t uniform_samples = 5000;
  std::size_t fscore_points = 3000;
  int workers = 1;
  std::vector<LatentCode> shape_codes;  // ground-truth codes; drawn from U[-2, 2] when empty
};

struct BenchmarkRecord {
  std::string case_id;
  std::string scenario;
  int pair = 0;
  int trial = 0;
  FitParams truth;
  FitParams init;
  FitParams final_params;
  double f_score = 0.0;
  double rotation_error = 0.0;
  double seconds = 0.0;  // wall time, not written to CSV
  std::string status = "ok";
};

struct BinStats {
  double lo = 0.0, hi = 0.0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

struct SynthBenchmark {
  std::vector<BenchmarkRecord> records;
  std::vector<BinStats> bins;  // per-bin statistics of per-pair trial counts

  double median_f() const;
};

/// Runs cfg.trials fits for each of cfg.shapes (shape, transform) pairs.
/// Fit failures are recorded in the row status with F = 0.
SynthBenchmark run_synth_benchmark(const LatentSdf& space, const ScenarioConfig& scenario,
                                   const BenchConfig& bench);

/// Bin edges 0, 0.1, ..., 1 (the last bin includes 1). For every bin, the
/// count of trials of each pair falling in it is summarized across pairs.
std::vector<BinStats> bin_f_scores(const std::vector<BenchmarkRecord>& records, int pairs);

std::string records_csv(const std::vector<BenchmarkRecord>& records);
std::string bins_csv(const std::vector<BinStats>& bins);

// ---------------------------------------------------------------------------
// Comparison against the retrieval + registration baseline.

struct ComparisonCase {
  std::string id;
  LatentCode code;
  SimilarityTransform g;
  bool in_library = true;
};

struct ComparisonConfig {
  FitConfig fit;
  ThetaGridConfig theta_grid;
  BaselineConfig baseline;
  GridSpec mesh_grid{Vec3::Constant(-1.0), Vec3::Constant(1.0), 48};
  double canonical_radius = 1.0;
  std::size_t near_samples = 20000;
  std::size_t uniform_samples = 5000;
  std::size_t fscore_points = 3000;
  std::size_t library_points = 3000;
  double surface_band = 0.01;  // |phi| below this marks query surface samples
  std::uint64_t seed = 0;
};

struct ComparisonRow {
  std::string case_id;
  std::string method;  // "jsrte" or "baseline"
  int retrieved_id = -1;
  SimilarityTransform g;
  double f_score = 0.0;
  std::string status = "ok";
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double mean_jsrte = 0.0;
  double mean_baseline = 0.0;
};

/// Per case: the query is the shape `code` moved by g. The joint fit runs
/// over the theta grid about the known axis of g; the baseline retrieves from
/// the canonical meshes of `library_codes` and registers. Both are scored by
/// F-score against the query mesh.
Comparison run_baseline_comparison(const LatentSdf& space,
                                   const std::vector<LatentCode>& library_codes,
                                   const std::vector<ComparisonCase>& cases,
                                   const ComparisonConfig& cfg);

struct ComparisonSuite {
  std::vector<LatentCode> library_codes;
  std::vector<ComparisonCase> cases;  // in-library cases first
};

/// Library = the first library_size codes of `pool`; in-library cases reuse
/// them and out-of-library cases take the remaining pool codes in turn. An
/// empty pool is replaced by library_size + out_cases codes drawn from
/// U[-2, 2]^latent_dim. Transforms follow the ground-truth distribution of
/// `scenario`. Throws std::invalid_argument when the pool has no code left for
/// out-of-library cases.
ComparisonSuite make_comparison_suite(int latent_dim, const std::vector<LatentCode>& pool,
                                      std::size_t library_size, std::size_t in_cases,
                                      std::size_t out_cases, std::uint64_t seed,
                                      const ScenarioConfig& scenario = ScenarioConfig::preset("known-axis"));

/// Header case_id,method,retrieved_id,s,theta,tx,ty,tz,f_score, one row per
/// case and method, then one `mean` row per method when cases exist.
std::string comparison_csv(const Comparison& c);

// ---------------------------------------------------------------------------
// Inputs for the compression experiment.

struct CompressionSuiteConfig {
  std::size_t count = 5;
  FitConfig fit;
  GridSpec mesh_grid{Vec3::Constant(-1.0), Vec3::Constant(1.0), 48};
  GridSpec reference_grid{Vec3::Constant(-1.0), Vec3::Constant(1.0), 64};
  double canonical_radius = 1.0;
  std::size_t near_samples = 20000;
  std::size_t uniform_samples = 5000;
  std::uint64_t seed = 0;
};

/// Per shape: a known-axis fit from a perturbed start (known-axis scenario
/// ranges); the fitted code, transform and mesh are kept, and the reference
/// is the true shape extracted on reference_grid. Codes cycle through `codes`,
/// or are drawn from U[-2, 2]^d when it is empty. Throws std::runtime_error
/// naming the shape when a fit yields no mesh.
std::vector<CompressionInput> build_compression_inputs(const LatentSdf& space,
                                                       const std::vector<LatentCode>& codes,
                                                       const CompressionSuiteConfig& cfg);

}  // namespace sdfpose
