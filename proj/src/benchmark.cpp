#include "sdfpose/benchmark.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sdfpose/parallel.h"
#include "sdfpose/metrics.h"

namespace sdfpose {

double Range::sample(std::mt19937_64& rng) const {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

void ScenarioConfig::validate() const {
  const std::pair<const char*, const Range*> ranges[] = {
      {"delta_s", &delta_s},       {"delta_psi", &delta_psi}, {"delta_rho", &delta_rho},
      {"delta_theta", &delta_theta}, {"delta_t", &delta_t_norm}, {"gt_scale", &gt_scale},
      {"gt_angle", &gt_angle},     {"gt_t", &gt_t_norm}};
  for (const auto& [name, r] : ranges) {
    if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || r->lo > r->hi)
      throw std::invalid_argument(std::string("scenario range ") + name + " is not ordered");
  }
  if (delta_s.lo <= -1.0) throw std::invalid_argument("scenario delta_s must stay above -1");
  if (delta_t_norm.lo < 0.0 || gt_t_norm.lo < 0.0)
    throw std::invalid_argument("scenario translation norms must be non-negative");
  if (!(gt_scale.lo > 0.0)) throw std::invalid_argument("scenario gt_scale must be positive");
  if (!(code_sigma >= 0.0)) throw std::invalid_argument("scenario code_sigma must be non-negative");
  if (shapes < 1) throw std::invalid_argument("scenario needs at least one shape");
  if (trials < 1) throw std::invalid_argument("scenario needs at least one trial");
}

ScenarioConfig ScenarioConfig::preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  const Range axis{-kPi / 36.0, kPi / 36.0};
  if (name == "known-axis") {
  } else if (name == "unknown-axis") {
    c.delta_psi = c.delta_rho = axis;
    c.known_axis = false;
  } else if (name == "known-axis-wide") {
    c.delta_s = {0.0, 0.5};
    c.delta_theta = {-2.0 * kPi / 9.0, 2.0 * kPi / 9.0};
    c.delta_t_norm = {0.0, 0.20};
  } else if (name == "unknown-axis-wide") {
    c.delta_s = {0.0, 0.5};
    c.delta_theta = {-2.0 * kPi / 9.0, 2.0 * kPi / 9.0};
    c.delta_t_norm = {0.0, 0.20};
    c.delta_psi = c.delta_rho = axis;
    c.known_axis = false;
  } else {
    throw std::invalid_argument("unknown scenario preset '" + name + "'");
  }
  return c;
}

namespace {

std::string trim(std::string s) {
  auto space = [](unsigned char ch) { return std::isspace(ch) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), space).base(), s.end());
  return s;
}

double parse_plain(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument("scenario key " + key + ": cannot parse '" + text + "'");
  return v;
}

// Numbers, optionally written with pi: "0.3", "-pi/9", "2*pi/9", "pi".
double parse_value(const std::string& raw, const std::string& key) {
  std::string s = trim(raw);
  if (s.empty()) throw std::invalid_argument("scenario key " + key + ": empty value");
  double sign = 1.0;
  if (s[0] == '-' || s[0] == '+') {
    if (s[0] == '-') sign = -1.0;
    s = trim(s.substr(1));
  }
  const auto pi_at = s.find("pi");
  if (pi_at == std::string::npos) return sign * parse_plain(s, key);

  std::string num = trim(s.substr(0, pi_at));
  std::string rest = trim(s.substr(pi_at + 2));
  double factor = 1.0;
  if (!num.empty()) {
    if (num.back() == '*') num = trim(num.substr(0, num.size() - 1));
    factor = parse_plain(num, key);
  }
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw std::invalid_argument("scenario key " + key + ": cannot parse '" + raw + "'");
    divisor = parse_plain(trim(rest.substr(1)), key);
    if (divisor == 0.0) throw std::invalid_argument("scenario key " + key + ": division by zero");
  }
  return sign * factor * kPi / divisor;
}

Range parse_range(const std::string& text, const std::string& key) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    const double v = parse_value(text, key);
    return {v, v};
  }
  return {parse_value(text.substr(0, comma), key), parse_value(text.substr(comma + 1), key)};
}

bool parse_bool(const std::string& text, const std::string& key) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("scenario key " + key + ": expected a boolean, got '" + text + "'");
}

}  // namespace

ScenarioConfig parse_scenario_ini(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("scenario file: ") + e.what());
  }
  const auto section = tree.get_child_optional("scenario");
  if (!section) throw std::invalid_argument("scenario file: missing [scenario] section");
  const pt::ptree& s = *section;

  ScenarioConfig c;
  if (auto p = s.get_optional<std::string>("preset")) c = ScenarioConfig::preset(trim(*p));
  for (const auto& [key, node] : s) {
    const std::string v = node.get_value<std::string>();
    if (key == "preset") continue;
    if (key == "name") c.name = trim(v);
    else if (key == "delta_s") c.delta_s = parse_range(v, key);
    else if (key == "delta_psi") c.delta_psi = parse_range(v, key);
    else if (key == "delta_rho") c.delta_rho = parse_range(v, key);
    else if (key == "delta_theta") c.delta_theta = parse_range(v, key);
    else if (key == "delta_t") c.delta_t_norm = parse_range(v, key);
    else if (key == "known_axis") c.known_axis = parse_bool(v, key);
    else if (key == "gt_scale") c.gt_scale = parse_range(v, key);
    else if (key == "gt_angle") c.gt_angle = parse_range(v, key);
    else if (key == "gt_t") c.gt_t_norm = parse_range(v, key);
    else if (key == "code_sigma") c.code_sigma = parse_value(v, key);
    else if (key == "shapes") c.shapes = static_cast<int>(parse_value(v, key));
    else if (key == "trials") c.trials = static_cast<int>(parse_value(v, key));
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_value(v, key));
    else throw std::invalid_argument("scenario file: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_ini(ss.str());
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-12);
  return v.normalized();
}

SimilarityTransform sample_ground_truth(const ScenarioConfig& cfg, std::mt19937_64& rng) {
  SimilarityTransform g;
  g.s = cfg.gt_scale.sample(rng);
  g.rot.psi = cfg.gt_angle.sample(rng);
  g.rot.rho = cfg.gt_angle.sample(rng);
  g.rot.theta = cfg.gt_angle.sample(rng);
  const double norm = cfg.gt_t_norm.sample(rng);
  g.t = norm * random_direction(rng);
  return g;
}

FitParams sample_init(const ScenarioConfig& cfg, const FitParams& truth, std::mt19937_64& rng) {
  FitParams init = truth;
  init.s = truth.s * (1.0 + cfg.delta_s.sample(rng));
  if (!cfg.known_axis) {
    init.rot.psi = truth.rot.psi + cfg.delta_psi.sample(rng);
    init.rot.rho = truth.rot.rho + cfg.delta_rho.sample(rng);
  }
  init.rot.theta = truth.rot.theta + cfg.delta_theta.sample(rng);
  const double norm = cfg.delta_t_norm.sample(rng);
  init.t = truth.t + norm * random_direction(rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  init.z = LatentCode(truth.z.size());
  for (Eigen::Index i = 0; i < init.z.size(); ++i) init.z[i] = cfg.code_sigma * noise(rng);
  return init;
}

ScenarioDraw sample_scenario(const ScenarioConfig& cfg, std::mt19937_64& rng,
                             const LatentCode& truth_code) {
  cfg.validate();
  ScenarioDraw d;
  const SimilarityTransform g = sample_ground_truth(cfg, rng);
  d.truth.s = g.s;
  d.truth.rot = g.rot;
  d.truth.t = g.t;
  d.truth.z = truth_code;
  d.init = sample_init(cfg, d.truth, rng);
  return d;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------------------

namespace {

std::string pair_trial_id(int pair, int trial) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "pair%03d_trial%03d", pair, trial);
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + frac * (v[i + 1] - v[i]);
}

int f_bin(double f) {
  if (!(f > 0.0)) return 0;
  return std::min(9, static_cast<int>(std::floor(f * 10.0)));
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a) {
  std::mt19937_64 rng = stream_rng(seed, a);
  return rng();
}

}  // namespace

std::vector<BinStats> bin_f_scores(const std::vector<BenchmarkRecord>& records, int pairs) {
  if (pairs < 1) throw std::invalid_argument("bin_f_scores: need at least one pair");
  std::vector<std::vector<double>> counts(10, std::vector<double>(pairs, 0.0));
  for (const auto& r : records) {
    if (r.pair < 0 || r.pair >= pairs) throw std::invalid_argument("bin_f_scores: pair out of range");
    counts[f_bin(r.f_score)][r.pair] += 1.0;
  }
  std::vector<BinStats> out;
  for (int b = 0; b < 10; ++b) {
    BinStats s;
    s.lo = b / 10.0;
    s.hi = (b + 1) / 10.0;
    const auto& c = counts[b];
    s.min = *std::min_element(c.begin(), c.end());
    s.max = *std::max_element(c.begin(), c.end());
    s.q1 = quantile(c, 0.25);
    s.median = quantile(c, 0.5);
    s.q3 = quantile(c, 0.75);
    double sum = 0.0;
    for (double x : c) sum += x;
    s.mean = sum / static_cast<double>(c.size());
    out.push_back(s);
  }
  return out;
}

double SynthBenchmark::median_f() const {
  if (records.empty()) return 0.0;
  std::vector<double> f;
  for (const auto& r : records) f.push_back(r.f_score);
  return quantile(f, 0.5);
}

SynthBenchmark run_synth_benchmark(const LatentSdf& space, const ScenarioConfig& scenario,
                                   const BenchConfig& bench) {
  scenario.validate();
  bench.fit.validate();
  const int d = space.latent_dim();
  for (const auto& z : bench.shape_codes)
    if (z.size() != d) throw std::invalid_argument("run_synth_benchmark: shape code dimension mismatch");

  struct Pair {
    LatentCode code;
    SimilarityTransform g;
    std::vector<SdfSample> samples;
    TriangleMesh reference;
    std::string error;
  };
  const auto n_pairs = static_cast<std::size_t>(scenario.shapes);
  std::vector<Pair> pairs(n_pairs);

  parallel_for(n_pairs, bench.workers, [&](std::size_t p) {
    std::mt19937_64 rng = stream_rng(scenario.seed, p);
    Pair& pr = pairs[p];
    if (!bench.shape_codes.empty()) {
      pr.code = bench.shape_codes[p % bench.shape_codes.size()];
    } else {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      pr.code = LatentCode(d);
      for (int i = 0; i < d; ++i) pr.code[i] = u(rng);
    }
    pr.g = sample_ground_truth(scenario, rng);
    try {
      AnalyticSampleConfig sc;
      sc.near_surface = bench.near_samples;
      sc.uniform = bench.uniform_samples;
      std::tie(sc.region_min, sc.region_max) = region_around(pr.g, bench.canonical_radius, 0.1);
      sc.seed = rng();
      pr.samples = sample_analytic_sdf(space, pr.code, pr.g, sc);
      pr.reference = extract_shape(space, pr.code, pr.g, bench.mesh_grid);
    } catch (const std::exception& e) {
      pr.error = e.what();
    }
  });

  SynthBenchmark out;
  const auto n_trials = static_cast<std::size_t>(scenario.trials);
  out.records.resize(n_pairs * n_trials);
  FitConfig fit_cfg = bench.fit;
  fit_cfg.frozen = scenario.known_axis ? FrozenMask::known_axis() : FrozenMask{};
  fit_cfg.grid = bench.mesh_grid;
  fit_cfg.extract_mesh = true;

  parallel_for(n_pairs * n_trials, bench.workers, [&](std::size_t job) {
    const std::size_t p = job / n_trials;
    const std::size_t t = job % n_trials;
    const Pair& pr = pairs[p];
    BenchmarkRecord& rec = out.records[job];
    rec.case_id = pair_trial_id(static_cast<int>(p), static_cast<int>(t));
    rec.scenario = scenario.name;
    rec.pair = static_cast<int>(p);
    rec.trial = static_cast<int>(t);
    rec.truth.s = pr.g.s;
    rec.truth.rot = pr.g.rot;
    rec.truth.t = pr.g.t;
    rec.truth.z = pr.code;

    std::mt19937_64 rng = stream_rng(scenario.seed, (std::uint64_t{1} << 32) + job);
    rec.init = sample_init(scenario, rec.truth, rng);
    rec.final_params = rec.init;
    if (!pr.error.empty()) {
      rec.status = "error: " + pr.error;
      return;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      FitConfig cfg = fit_cfg;
      cfg.seed = rng();
      const FitResult r = fit(space, pr.samples, rec.init, cfg);
      rec.final_params = r.params;
      rec.rotation_error = rotation_error(r.params.rot.theta, rec.truth.rot.theta);
      if (r.mesh_extracted && surface_area(r.mesh) > 0.0)
        rec.f_score = f_score(r.mesh, pr.reference, bench.fscore_points, 0.05, mix(scenario.seed, job)).f;
      else
        rec.status = "empty mesh";
    } catch (const std::exception& e) {
      rec.status = std::string("error: ") + e.what();
      rec.f_score = 0.0;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  out.bins = bin_f_scores(out.records, scenario.shapes);
  return out;
}

namespace {

void append_params(std::string& out, const FitParams& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", p.s, p.rot.psi, p.rot.rho,
                p.rot.theta, p.t.x(), p.t.y(), p.t.z());
  out += buf;
}

std::string csv_text(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::string records_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out = "case_id,scenario,pair,trial";
  for (const char* prefix : {"gt", "init", "final"})
    for (const char* field : {"s", "psi", "rho", "theta", "tx", "ty", "tz"})
      out += std::string(",") + prefix + "_" + field;
  out += ",f_score,rotation_error,status\n";
  char buf[128];
  for (const auto& r : records) {
    out += r.case_id + "," + csv_text(r.scenario);
    std::snprintf(buf, sizeof buf, ",%d,%d", r.pair, r.trial);
    out += buf;
    append_params(out, r.truth);
    append_params(out, r.init);
    append_params(out, r.final_params);
    std::snprintf(buf, sizeof buf, ",%.6f,%.9g,", r.f_score, r.rotation_error);
    out += buf + csv_text(r.status) + "\n";
  }
  return out;
}

std::string bins_csv(const std::vector<BinStats>& bins) {
  std::string out = "bin_lo,bin_hi,min,q1,median,q3,max,mean\n";
  char buf[192];
  for (const auto& b : bins) {
    std::snprintf(buf, sizeof buf, "%.1f,%.1f,%g,%g,%g,%g,%g,%.6g\n", b.lo, b.hi, b.min, b.q1,
                  b.median, b.q3, b.max, b.mean);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

Comparison run_baseline_comparison(const LatentSdf& space,
                                   const std::vector<LatentCode>& library_codes,
                                   const std::vector<ComparisonCase>& cases,
                                   const ComparisonConfig& cfg) {
  Comparison out;
  if (cases.empty()) return out;
  if (library_codes.empty()) throw std::invalid_argument("run_baseline_comparison: empty library");
  const int d = space.latent_dim();

  std::vector<TriangleMesh> canonical;
  for (const auto& z : library_codes)
    canonical.push_back(extract_shape(space, z, SimilarityTransform::identity(), cfg.mesh_grid));
  const std::vector<LibraryEntry> library = make_library(canonical, cfg.library_points, cfg.seed);

  FitConfig fit_cfg = cfg.fit;
  fit_cfg.frozen = FrozenMask::known_axis();
  fit_cfg.grid = cfg.mesh_grid;

  double sum_j = 0.0, sum_b = 0.0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const ComparisonCase& c = cases[k];
    ComparisonRow jr{c.id, "jsrte", -1, {}, 0.0, "ok"};
    ComparisonRow br{c.id, "baseline", -1, {}, 0.0, "ok"};
    const std::uint64_t case_seed = mix(cfg.seed, k);
    const Vec3 axis = axis_from_spherical(c.g.rot.psi, c.g.rot.rho);

    TriangleMesh query;
    std::vector<SdfSample> samples;
    try {
      if (c.code.size() != d) throw std::invalid_argument("case code dimension mismatch");
      query = extract_shape(space, c.code, c.g, cfg.mesh_grid);
      AnalyticSampleConfig sc;
      sc.near_surface = cfg.near_samples;
      sc.uniform = cfg.uniform_samples;
      std::tie(sc.region_min, sc.region_max) = region_around(c.g, cfg.canonical_radius, 0.1);
      sc.seed = case_seed;
      samples = sample_analytic_sdf(space, c.code, c.g, sc);
    } catch (const std::exception& e) {
      jr.status = br.status = std::string("error: ") + e.what();
      out.rows.push_back(jr);
      out.rows.push_back(br);
      continue;
    }

    try {
      const SurfacePointSet surface = surface_proxy(samples, cfg.surface_band);
      if (surface.size() < 10) throw std::runtime_error("too few query surface samples");
      const PartialInit init =
          partial_init_from_query(surface, axis, d, case_seed + 1, cfg.canonical_radius);
      FitConfig fc = fit_cfg;
      fc.seed = case_seed + 2;
      const GridFitResult grid = fit_with_theta_grid(space, samples, init, fc, surface, cfg.theta_grid);
      const FitResult& best = grid.best_result();
      jr.g = best.params.transform();
      if (best.mesh_extracted && surface_area(best.mesh) > 0.0)
        jr.f_score = f_score(best.mesh, query, cfg.fscore_points, 0.05, case_seed + 3).f;
      else
        jr.status = "empty mesh";
    } catch (const std::exception& e) {
      jr.status = std::string("error: ") + e.what();
    }

    try {
      BaselineConfig bc = cfg.baseline;
      bc.seed = case_seed + 4;
      bc.fscore_points = cfg.fscore_points;
      const BaselineResult b = baseline_pipeline(query, library, axis, bc);
      br.retrieved_id = b.retrieved_id;
      br.g = b.transform;
      br.f_score = b.report.f;
    } catch (const std::exception& e) {
      br.status = std::string("error: ") + e.what();
    }
    sum_j += jr.f_score;
    sum_b += br.f_score;
    out.rows.push_back(jr);
    out.rows.push_back(br);
  }
  out.mean_jsrte = sum_j / static_cast<double>(cases.size());
  out.mean_baseline = sum_b / static_cast<double>(cases.size());
  return out;
}

ComparisonSuite make_comparison_suite(int latent_dim, const std::vector<LatentCode>& pool,
                                      std::size_t library_size, std::size_t in_cases,
                                      std::size_t out_cases, std::uint64_t seed,
                                      const ScenarioConfig& scenario) {
  if (latent_dim < 1) throw std::invalid_argument("make_comparison_suite: bad latent dimension");
  if (library_size == 0) throw std::invalid_argument("make_comparison_suite: empty library");
  std::mt19937_64 rng = stream_rng(seed, 0);
  std::vector<LatentCode> codes = pool;
  if (codes.empty()) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t i = 0; i < library_size + out_cases; ++i) {
      LatentCode z(latent_dim);
      for (int j = 0; j < latent_dim; ++j) z[j] = u(rng);
      codes.push_back(z);
    }
  }
  for (const auto& z : codes)
    if (z.size() != latent_dim) throw std::invalid_argument("make_comparison_suite: code dimension mismatch");
  if (codes.size() < library_size)
    throw std::invalid_argument("make_comparison_suite: pool smaller than the library");
  const std::size_t spare = codes.size() - library_size;
  if (out_cases > 0 && spare == 0)
    throw std::invalid_argument("make_comparison_suite: no codes left for out-of-library cases");

  ComparisonSuite out;
  out.library_codes.assign(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(library_size));
  char id[32];
  for (std::size_t i = 0; i < in_cases + out_cases; ++i) {
    ComparisonCase c;
    c.in_library = i < in_cases;
    c.code = c.in_library ? codes[i % library_size] : codes[library_size + (i - in_cases) % spare];
    std::snprintf(id, sizeof id, "%s%03zu", c.in_library ? "in" : "out", i);
    c.id = id;
    c.g = sample_ground_truth(scenario, rng);
    out.cases.push_back(std::move(c));
  }
  return out;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = "case_id,method,retrieved_id,s,theta,tx,ty,tz,f_score\n";
  char buf[256];
  for (const auto& r : c.rows) {
    std::snprintf(buf, sizeof buf, ",%s,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.6f\n", r.method.c_str(),
                  r.retrieved_id, r.g.s, r.g.rot.theta, r.g.t.x(), r.g.t.y(), r.g.t.z(), r.f_score);
    out += r.case_id + buf;
  }
  if (!c.rows.empty()) {
    std::snprintf(buf, sizeof buf, "mean,jsrte,-1,,,,,,%.6f\nmean,baseline,-1,,,,,,%.6f\n",
                  c.mean_jsrte, c.mean_baseline);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CompressionInput> build_compression_inputs(const LatentSdf& space,
                                                       const std::vector<LatentCode>& codes,
                                                       const CompressionSuiteConfig& cfg) {
  cfg.fit.validate();
  const int d = space.latent_dim();
  const ScenarioConfig scenario = ScenarioConfig::preset("known-axis");
  std::vector<CompressionInput> out;
  for (std::size_t i = 0; i < cfg.count; ++i) {
    std::mt19937_64 rng = stream_rng(cfg.seed, i);
    LatentCode code;
    if (!codes.empty()) {
      code = codes[i % codes.size()];
    } else {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      code = LatentCode(d);
      for (int j = 0; j < d; ++j) code[j] = u(rng);
    }
    if (code.size() != d) throw std::invalid_argument("build_compression_inputs: code dimension mismatch");
    const ScenarioDraw draw = sample_scenario(scenario, rng, code);
    const SimilarityTransform g = draw.truth.transform();

    AnalyticSampleConfig sc;
    sc.near_surface = cfg.near_samples;
    sc.uniform = cfg.uniform_samples;
    std::tie(sc.region_min, sc.region_max) = region_around(g, cfg.canonical_radius, 0.1);
    sc.seed = rng();
    const std::vector<SdfSample> samples = sample_analytic_sdf(space, code, g, sc);

    FitConfig fc = cfg.fit;
    fc.frozen = FrozenMask::known_axis();
    fc.grid = cfg.mesh_grid;
    fc.extract_mesh = true;
    fc.seed = rng();
    const FitResult r = fit(space, samples, draw.init, fc);
    if (!r.mesh_extracted)
      throw std::runtime_error("build_compression_inputs: fit " + std::to_string(i) + " produced no mesh");

    CompressionInput in;
    in.z = r.params.z;
    in.g = r.params.transform();
    in.fitted = r.mesh;
    in.reference = extract_shape(space, code, g, cfg.reference_grid);
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace sdfpose
