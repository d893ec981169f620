#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdfpose/autodecoder.h"
#include "sdfpose/benchmark.h"
#include "sdfpose/compact.h"
#include "sdfpose/decoder.h"
#include "sdfpose/fit.h"
#include "sdfpose/meshing.h"
#include "sdfpose/metrics.h"

namespace fs = std::filesystem;
using namespace sdfpose;

namespace {

struct Model {
  std::shared_ptr<LatentSdf> space;
  std::vector<LatentCode> codes;  // learned codes of a checkpoint; empty for analytic
};

Model load_model(const std::string& spec) {
  Model m;
  if (spec == "analytic") {
    m.space = std::make_shared<AnalyticFamily>();
    return m;
  }
  DecoderCheckpoint ck = load_checkpoint(spec);
  m.space = std::make_shared<NeuralSdf>(std::make_shared<const MlpDecoder>(std::move(ck.decoder)));
  m.codes = std::move(ck.codes);
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Vec3 to_vec3(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw CLI::ValidationError(what, "expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

SimilarityTransform to_transform(const std::vector<double>& v) {
  if (v.size() != 7)
    throw CLI::ValidationError("--transform", "expected s,psi,rho,theta,tx,ty,tz");
  SimilarityTransform g;
  g.s = v[0];
  g.rot = {v[1], v[2], v[3]};
  g.t = {v[4], v[5], v[6]};
  return g;
}

GridSpec grid_of(int resolution) {
  if (resolution < 2) throw CLI::ValidationError("--resolution", "must be at least 2");
  GridSpec g;
  g.resolution = resolution;
  return g;
}

// The learning rate drops once, halfway through, as with the 800/400 default.
void set_iterations(FitConfig& cfg, int iterations) {
  if (iterations < 0) throw CLI::ValidationError("--iterations", "must be non-negative");
  cfg.iterations = iterations;
  cfg.decay_interval = std::max(1, iterations / 2);
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string out;
  std::size_t shapes = 16;
  std::size_t samples = 8000;
  int epochs = 100;
  int latent_dim = 16;
  std::vector<int> hidden = {128, 128, 128, 128};
  std::size_t batch = 1024;
  double lr = 2e-3;
  std::uint64_t seed = 0;
  std::string loss_csv;
};

int run_train(const TrainArgs& a) {
  const auto shapes = procedural_shapes(a.shapes, a.seed);
  ShapeLibrary lib;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    lib.shapes.push_back({static_cast<int>(i), training_samples(shapes[i], a.samples, a.seed + 100 + i), {}});
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.latent_dim = a.latent_dim;
  cfg.hidden = a.hidden;
  cfg.batch_size = a.batch;
  cfg.weight_lr = cfg.code_lr = a.lr;
  cfg.lr_decay_interval = std::max(1, a.epochs / 3);
  cfg.seed = a.seed;
  const TrainResult r = train_autodecoder(lib, cfg);
  std::vector<LatentCode> codes;
  for (const auto& s : r.library.shapes) codes.push_back(s.code);
  save_checkpoint(a.out, r.decoder, codes);
  if (!a.loss_csv.empty()) {
    std::string csv = "epoch,loss\n";
    char buf[64];
    for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%zu,%.9g\n", e, r.epoch_loss[e]);
      csv += buf;
    }
    write_text(a.loss_csv, csv);
  }
  if (!r.epoch_loss.empty())
    std::printf("trained %zu shapes, loss %.6f -> %.6f\n", lib.shapes.size(), r.epoch_loss.front(),
                r.epoch_loss.back());
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string samples, model = "analytic", out;
  std::vector<double> axis, init;
  double theta_grid = 0.0;
  int iterations = 800;
  std::size_t batch = 8000;
  double lr = 0.05;
  int workers = 1;
  int resolution = 64;
  double band = 0.01;
  double canonical_radius = 1.0;
  std::uint64_t seed = 0;
};

int run_fit(const FitArgs& a) {
  const Model m = load_model(a.model);
  const std::vector<SdfSample> samples = read_samples(a.samples);
  if (samples.empty()) throw std::runtime_error("no samples in " + a.samples);
  FitConfig cfg;
  set_iterations(cfg, a.iterations);
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  cfg.grid = grid_of(a.resolution);
  const int d = m.space->latent_dim();
  const SurfacePointSet surface = surface_proxy(samples, a.band);

  FitResult result;
  if (!a.axis.empty()) {
    const Vec3 axis = to_vec3(a.axis, "--axis");
    if (surface.size() < 10) throw std::runtime_error("fewer than 10 samples within the surface band");
    cfg.frozen = FrozenMask::known_axis();
    const PartialInit init = partial_init_from_query(surface, axis, d, a.seed, a.canonical_radius);
    if (a.theta_grid > 0.0) {
      ThetaGridConfig grid;
      grid.step_degrees = a.theta_grid;
      grid.workers = a.workers;
      grid.score_seed = a.seed;
      const GridFitResult g = fit_with_theta_grid(*m.space, samples, init, cfg, surface, grid);
      std::string scores = "theta0,f_score\n";
      char buf[64];
      for (std::size_t k = 0; k < g.scores.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g,%.6f\n", g.start_thetas[k], g.scores[k]);
        scores += buf;
      }
      write_text(fs::path(a.out) / "grid.csv", scores);
      result = g.best_result();
    } else {
      FitParams p;
      p.s = init.s;
      p.rot = {init.psi, init.rho, 0.0};
      p.t = init.t;
      p.z = init.z;
      result = fit(*m.space, samples, p, cfg);
    }
  } else {
    if (a.init.size() != 7) throw CLI::ValidationError("--init", "required without --axis: s,psi,rho,theta,tx,ty,tz");
    FitParams p;
    p.s = a.init[0];
    p.rot = {a.init[1], a.init[2], a.init[3]};
    p.t = {a.init[4], a.init[5], a.init[6]};
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> n(0.0, 0.01);
    p.z = LatentCode(d);
    for (int i = 0; i < d; ++i) p.z[i] = n(rng);
    result = fit(*m.space, samples, p, cfg);
  }
  dump_fit_result(result, a.out);
  std::printf("final objective %.6g\n", result.final_objective);
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string scenario = "known-axis", model = "analytic", out = ".";
  int trials = 0, shapes = 0, workers = 1, iterations = 800, resolution = 48;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_synth(const SynthArgs& a) {
  const Model m = load_model(a.model);
  ScenarioConfig sc = fs::exists(a.scenario) ? load_scenario_ini(a.scenario)
                                             : ScenarioConfig::preset(a.scenario);
  if (a.trials > 0) sc.trials = a.trials;
  if (a.shapes > 0) sc.shapes = a.shapes;
  if (a.seed_given) sc.seed = a.seed;
  BenchConfig b;
  b.workers = a.workers;
  set_iterations(b.fit, a.iterations);
  b.mesh_grid = grid_of(a.resolution);
  b.shape_codes = m.codes;
  const SynthBenchmark r = run_synth_benchmark(*m.space, sc, b);
  write_text(fs::path(a.out) / "records.csv", records_csv(r.records));
  write_text(fs::path(a.out) / "bins.csv", bins_csv(r.bins));
  std::printf("%s: %zu trials, median F %.4f\n", sc.name.c_str(), r.records.size(), r.median_f());
  return 0;
}

// ---------------------------------------------------------------------------

struct BaselineArgs {
  std::string model = "analytic", out = "baseline.csv";
  std::size_t library = 10, in_cases = 10, out_cases = 10;
  int workers = 1, iterations = 800, resolution = 48;
  double theta_step = 30.0;
  std::uint64_t seed = 0;
};

int run_baseline(const BaselineArgs& a) {
  const Model m = load_model(a.model);
  const ComparisonSuite suite = make_comparison_suite(m.space->latent_dim(), m.codes, a.library,
                                                      a.in_cases, a.out_cases, a.seed);
  ComparisonConfig cfg;
  set_iterations(cfg.fit, a.iterations);
  cfg.mesh_grid = grid_of(a.resolution);
  cfg.theta_grid.step_degrees = a.theta_step;
  cfg.theta_grid.workers = a.workers;
  cfg.seed = a.seed;
  const Comparison c = run_baseline_comparison(*m.space, suite.library_codes, suite.cases, cfg);
  write_text(a.out, comparison_csv(c));
  std::printf("mean F: jsrte %.4f, baseline %.4f\n", c.mean_jsrte, c.mean_baseline);
  return 0;
}

// ---------------------------------------------------------------------------

struct CompressArgs {
  std::string model = "analytic", out = "compression.csv";
  std::size_t count = 5;
  std::vector<double> cells = {0.1, 0.2};
  int iterations = 800;
  std::uint64_t seed = 0;
};

int run_compress(const CompressArgs& a) {
  const Model m = load_model(a.model);
  CompressionSuiteConfig sc;
  sc.count = a.count;
  set_iterations(sc.fit, a.iterations);
  sc.seed = a.seed;
  const auto inputs = build_compression_inputs(*m.space, m.codes, sc);
  CompressionConfig cc;
  cc.cell_fractions = a.cells;
  cc.seed = a.seed;
  const auto rows = run_compression_experiment(inputs, cc);
  write_text(a.out, compression_csv(rows));
  std::fputs(compression_csv(rows).c_str(), stdout);
  return 0;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string model = "analytic", out, compact;
  std::vector<double> code, transform;
  int code_index = -1;
  int resolution = 64;
};

int run_extract(const ExtractArgs& a) {
  const Model m = load_model(a.model);
  const auto d = static_cast<std::size_t>(m.space->latent_dim());
  LatentCode z;
  SimilarityTransform g;
  if (!a.compact.empty()) {
    const CompactShape c = deserialize_compact(read_bytes(a.compact), d);
    z = c.z;
    g = c.g;
  } else {
    if (a.code_index >= 0) {
      if (static_cast<std::size_t>(a.code_index) >= m.codes.size())
        throw CLI::ValidationError("--code-index", "no such code in the checkpoint");
      z = m.codes[static_cast<std::size_t>(a.code_index)];
    } else if (!a.code.empty()) {
      z = Eigen::Map<const Eigen::VectorXd>(a.code.data(), static_cast<Eigen::Index>(a.code.size()));
    } else {
      z = LatentCode::Zero(static_cast<Eigen::Index>(d));
    }
    if (!a.transform.empty()) g = to_transform(a.transform);
  }
  const TriangleMesh mesh = extract_shape(*m.space, z, g, grid_of(a.resolution));
  write_obj(mesh, a.out);
  std::printf("%zu vertices, %zu faces\n", mesh.vertices.size(), mesh.faces.size());
  return 0;
}

// ---------------------------------------------------------------------------

struct FscoreArgs {
  std::string a, b;
  std::size_t points = 3000;
  double eps_fraction = 0.05;
  std::uint64_t seed = 0;
};

int run_fscore(const FscoreArgs& a) {
  const FScoreReport r =
      f_score(read_obj(a.a), read_obj(a.b), a.points, a.eps_fraction, a.seed);
  std::printf("precision=%.3f recall=%.3f f=%.3f epsilon=%.6g\n", r.precision, r.recall, r.f,
              r.epsilon);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint shape and similarity transform estimation from SDF samples"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train an auto-decoder on procedural shapes");
  train->add_option("--out", ta.out, "Checkpoint path")->required();
  train->add_option("--shapes", ta.shapes, "Number of procedural shapes")->capture_default_str();
  train->add_option("--samples-per-shape", ta.samples, "SDF samples per shape")->capture_default_str();
  train->add_option("--epochs", ta.epochs)->capture_default_str();
  train->add_option("--latent-dim", ta.latent_dim)->capture_default_str();
  train->add_option("--hidden", ta.hidden, "Hidden widths, comma separated")->delimiter(',');
  train->add_option("--batch", ta.batch)->capture_default_str();
  train->add_option("--lr", ta.lr)->capture_default_str();
  train->add_option("--loss-csv", ta.loss_csv, "Write per-epoch loss here");
  train->add_option("--seed", ta.seed)->capture_default_str();

  FitArgs fa;
  auto* fitc = app.add_subcommand("fit", "Fit shape and transform to SDF samples");
  fitc->add_option("--samples", fa.samples, "Sample file (CSV x,y,z,phi or binary)")->required();
  fitc->add_option("--model", fa.model, "'analytic' or a checkpoint path")->capture_default_str();
  fitc->add_option("--axis", fa.axis, "Known rotation axis x,y,z")->delimiter(',');
  fitc->add_option("--init", fa.init, "Start s,psi,rho,theta,tx,ty,tz (without --axis)")->delimiter(',');
  fitc->add_option("--theta-grid", fa.theta_grid, "Grid step in degrees; 0 for a single start");
  fitc->add_option("--iterations", fa.iterations)->capture_default_str();
  fitc->add_option("--batch", fa.batch)->capture_default_str();
  fitc->add_option("--lr", fa.lr)->capture_default_str();
  fitc->add_option("--workers", fa.workers)->capture_default_str();
  fitc->add_option("--resolution", fa.resolution)->capture_default_str();
  fitc->add_option("--surface-band", fa.band, "|phi| bound for surface samples")->capture_default_str();
  fitc->add_option("--canonical-radius", fa.canonical_radius)->capture_default_str();
  fitc->add_option("--out", fa.out, "Output directory")->required();
  fitc->add_option("--seed", fa.seed)->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth-bench", "Synthetic recovery benchmark");
  synth->add_option("--scenario", sa.scenario, "Preset name or INI file")->capture_default_str();
  synth->add_option("--model", sa.model)->capture_default_str();
  synth->add_option("--trials", sa.trials, "Trials per pair (overrides the scenario)");
  synth->add_option("--shapes", sa.shapes, "Pairs (overrides the scenario)");
  synth->add_option("--workers", sa.workers)->capture_default_str();
  synth->add_option("--iterations", sa.iterations)->capture_default_str();
  synth->add_option("--resolution", sa.resolution)->capture_default_str();
  synth->add_option("--out", sa.out, "Output directory")->capture_default_str();
  auto* synth_seed = synth->add_option("--seed", sa.seed);

  BaselineArgs ba;
  auto* base = app.add_subcommand("baseline-bench", "Joint fit versus retrieval and registration");
  base->add_option("--model", ba.model)->capture_default_str();
  base->add_option("--library", ba.library, "Library size")->capture_default_str();
  base->add_option("--in-library", ba.in_cases)->capture_default_str();
  base->add_option("--out-of-library", ba.out_cases)->capture_default_str();
  base->add_option("--workers", ba.workers)->capture_default_str();
  base->add_option("--iterations", ba.iterations)->capture_default_str();
  base->add_option("--resolution", ba.resolution)->capture_default_str();
  base->add_option("--theta-grid", ba.theta_step)->capture_default_str();
  base->add_option("--out", ba.out, "CSV path")->capture_default_str();
  base->add_option("--seed", ba.seed)->capture_default_str();

  CompressArgs ca;
  auto* comp = app.add_subcommand("compress", "Compact form versus vertex clustering");
  comp->add_option("--model", ca.model)->capture_default_str();
  comp->add_option("--count", ca.count)->capture_default_str();
  comp->add_option("--cells", ca.cells, "Cell fractions, comma separated")->delimiter(',');
  comp->add_option("--iterations", ca.iterations)->capture_default_str();
  comp->add_option("--out", ca.out, "CSV path")->capture_default_str();
  comp->add_option("--seed", ca.seed)->capture_default_str();

  ExtractArgs ea;
  std::uint64_t extract_seed = 0;
  auto* ext = app.add_subcommand("extract", "Mesh a shape code under a transform");
  ext->add_option("--model", ea.model)->capture_default_str();
  ext->add_option("--code", ea.code, "Code values, comma separated")->delimiter(',');
  ext->add_option("--code-index", ea.code_index, "Code stored in the checkpoint");
  ext->add_option("--transform", ea.transform, "s,psi,rho,theta,tx,ty,tz")->delimiter(',');
  ext->add_option("--compact", ea.compact, "Compact file holding code and transform");
  ext->add_option("--resolution", ea.resolution)->capture_default_str();
  ext->add_option("--out", ea.out, "OBJ path")->required();
  ext->add_option("--seed", extract_seed, "Unused; accepted for uniformity");

  FscoreArgs fs_args;
  auto* fsc = app.add_subcommand("fscore", "F-score between two OBJ meshes");
  fsc->add_option("--a", fs_args.a, "Estimate")->required()->check(CLI::ExistingFile);
  fsc->add_option("--b", fs_args.b, "Reference")->required()->check(CLI::ExistingFile);
  fsc->add_option("--points", fs_args.points)->capture_default_str();
  fsc->add_option("--eps-fraction", fs_args.eps_fraction)->capture_default_str();
  fsc->add_option("--seed", fs_args.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return 1;
  }

  try {
    sa.seed_given = synth_seed->count() > 0;
    if (*train) return run_train(ta);
    if (*fitc) return run_fit(fa);
    if (*synth) return run_synth(sa);
    if (*base) return run_baseline(ba);
    if (*comp) return run_compress(ca);
    if (*ext) return run_extract(ea);
    if (*fsc) return run_fscore(fs_args);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
