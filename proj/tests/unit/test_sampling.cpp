#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.h"
#include "sdfpose/kdtree.h"
#include "sdfpose/latent_sdf.h"
#include "sdfpose/sampling.h"

using namespace sdfpose;
namespace fs = std::filesystem;

TEST_CASE("surface samples of the unit cube") {
  const TriangleMesh cube = unit_cube_mesh();
  const SurfacePointSet s = sample_surface(cube, 6000, 1);
  REQUIRE(s.size() == 6000);
  REQUIRE(s.normals.size() == 6000);
  std::array<int, 6> counts{};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3& p = s.points[i];
    const Vec3& n = s.normals[i];
    CHECK(std::abs(n.norm() - 1.0) < 1e-6);
    CHECK(std::abs(p.cwiseAbs().maxCoeff() - 0.5) < 1e-9);
    CHECK(std::abs(rounded_box_sdf(p, Vec3::Constant(0.5), 0.0).value) < 1e-9);
    int axis;
    const double m = n.cwiseAbs().maxCoeff(&axis);
    CHECK(m == doctest::Approx(1.0));
    CHECK(p[axis] * n[axis] > 0);  // outward
    ++counts[static_cast<std::size_t>(2 * axis + (n[axis] > 0))];
  }
  const double sigma = std::sqrt(6000.0 * (1.0 / 6) * (5.0 / 6));
  for (int c : counts) CHECK(std::abs(c - 1000.0) < 3 * sigma);
  CHECK(sample_surface(cube, 0, 1).empty());
}

TEST_CASE("surface sampling errors and determinism") {
  TriangleMesh flat;
  flat.vertices = {Vec3::Zero(), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  flat.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(sample_surface(flat, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_surface(TriangleMesh{}, 10, 0), std::invalid_argument);
  const TriangleMesh cube = unit_cube_mesh();
  CHECK(sample_surface(cube, 100, 9).points == sample_surface(cube, 100, 9).points);
  CHECK(sample_surface(cube, 100, 9).points != sample_surface(cube, 100, 10).points);
}

TEST_CASE("mesh sdf samples of a sphere") {
  const TriangleMesh sphere = oracle::uv_sphere(0.5, 48, 96);
  double edge = 0.0;
  std::size_t edges = 0;
  for (const auto& f : sphere.faces)
    for (int k = 0; k < 3; ++k) {
      edge += (sphere.vertices[f[k]] - sphere.vertices[f[(k + 1) % 3]]).norm();
      ++edges;
    }
  edge /= edges;
  MeshSdfConfig cfg;
  cfg.near_pairs = 2000;
  cfg.freespace = 3000;
  cfg.dense_points = 50000;
  cfg.seed = 3;
  const MeshSdfSamples out = sample_mesh_sdf(sphere, cfg);
  REQUIRE(out.samples.size() == 2 * cfg.near_pairs + cfg.freespace);
  CHECK(out.negative_freespace == 0);
  CHECK(out.diagnostics.empty());
  for (std::size_t i = 0; i < 2 * cfg.near_pairs; ++i)
    CHECK(std::abs(out.samples[i].phi) == 0.01);
  for (std::size_t i = 2 * cfg.near_pairs; i < out.samples.size(); ++i) {
    const SdfSample& s = out.samples[i];
    const double analytic = s.x.norm() - 0.5;
    CHECK(std::abs(s.phi - analytic) < 2 * edge);
    CHECK(s.phi > 0.07 - 0.01);
    CHECK(s.phi < 0.20 + 0.01);
  }
}

TEST_CASE("freespace sample along the normal") {
  const TriangleMesh sphere = oracle::uv_sphere(0.5, 64, 128);
  MeshSdfConfig cfg;
  cfg.near_pairs = 0;
  cfg.freespace = 500;
  cfg.freespace_min = 0.1;
  cfg.freespace_max = 0.1;
  cfg.dense_points = 100000;
  const MeshSdfSamples out = sample_mesh_sdf(sphere, cfg);
  for (const auto& s : out.samples) CHECK(std::abs(s.phi - 0.1) < 0.01);
}

TEST_CASE("inconsistent winding raises a diagnostic") {
  TriangleMesh sphere = oracle::uv_sphere(0.5, 24, 48);
  std::mt19937_64 rng(8);
  for (auto& f : sphere.faces)
    if (rng() % 2) std::swap(f[1], f[2]);
  MeshSdfConfig cfg;
  cfg.near_pairs = 100;
  cfg.freespace = 500;
  cfg.dense_points = 20000;
  const MeshSdfSamples out = sample_mesh_sdf(sphere, cfg);
  CHECK(out.negative_freespace > 50);
  CHECK(!out.diagnostics.empty());
}

TEST_CASE("analytic samples") {
  AnalyticSampleConfig cfg;
  cfg.near_surface = 4000;
  cfg.uniform = 1000;
  cfg.region_min = Vec3::Constant(-1.5);
  cfg.region_max = Vec3::Constant(1.5);
  cfg.seed = 4;
  SUBCASE("unit sphere at the identity") {
    const AnalyticShape unit = AnalyticShape::sphere(1.0);
    const auto s = sample_analytic_sdf(unit, SimilarityTransform::identity(), cfg);
    REQUIRE(s.size() == 5000);
    for (const auto& x : s) CHECK(std::abs(x.phi - (x.x.norm() - 1.0)) < 1e-12);
    CHECK(transformed_sdf(unit, SimilarityTransform::identity(), Vec3::Zero()) == -1.0);
  }
  SUBCASE("moved shape and the canonical-frame identity") {
    const AnalyticShape box = AnalyticShape::rounded_box(Vec3(0.3, 0.2, 0.1), 0.05);
    const SimilarityTransform g{1.7, {0.7, -0.4, 1.1}, Vec3(0.2, -0.3, 0.1)};
    const auto region = region_around(g, 0.4, 0.1);
    cfg.region_min = region.first;
    cfg.region_max = region.second;
    const auto s = sample_analytic_sdf(box, g, cfg);
    std::size_t near = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double canonical = g.s * analytic_sdf(box, inverse_warp(g, s[i].x));
      CHECK(std::abs(s[i].phi - canonical) < 1e-9);
      if (i < cfg.near_surface) near += std::abs(s[i].phi) < 0.02;
    }
    CHECK(near == cfg.near_surface);
  }
  SUBCASE("latent shape under a transform") {
    const AnalyticFamily fam;
    const LatentCode z = LatentCode::Constant(4, 0.2);
    const SimilarityTransform g{0.6, {1.0, 2.0, 0.5}, Vec3(1, 1, 0)};
    const auto region = region_around(g, 1.0, 0.1);
    cfg.region_min = region.first;
    cfg.region_max = region.second;
    const auto s = sample_analytic_sdf(fam, z, g, cfg);
    for (const auto& x : s) CHECK(std::abs(x.phi - g.s * fam.eval(inverse_warp(g, x.x), z)) < 1e-12);
    CHECK_THROWS_AS(sample_analytic_sdf(fam, LatentCode::Zero(2), g, cfg), std::invalid_argument);
  }
  SUBCASE("region without the shape") {
    cfg.region_min = Vec3::Constant(5.0);
    cfg.region_max = Vec3::Constant(6.0);
    CHECK_THROWS_AS(sample_analytic_sdf(AnalyticShape::sphere(0.5), SimilarityTransform::identity(), cfg),
                    std::runtime_error);
  }
  SUBCASE("determinism") {
    const AnalyticShape s = AnalyticShape::capsule(Vec3(0, 0, -0.3), Vec3(0, 0, 0.3), 0.2);
    const auto a = sample_analytic_sdf(s, SimilarityTransform::identity(), cfg);
    const auto b = sample_analytic_sdf(s, SimilarityTransform::identity(), cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].phi == b[i].phi);
    }
  }
}

TEST_CASE("region around a moved shape contains it") {
  const SimilarityTransform g{2.0, {0.3, 0.1, 2.0}, Vec3(3, -1, 0.5)};
  const auto [lo, hi] = region_around(g, 1.0, 0.1);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = apply_transform(g, oracle::unit_vec(rng));
    CHECK((p.array() > lo.array()).all());
    CHECK((p.array() < hi.array()).all());
  }
}

TEST_CASE("surface proxy keeps the band") {
  const std::vector<SdfSample> s = {{Vec3(1, 0, 0), 0.005}, {Vec3(2, 0, 0), -0.02}, {Vec3(3, 0, 0), -0.01}};
  const SurfacePointSet p = surface_proxy(s, 0.01);
  REQUIRE(p.size() == 2);
  CHECK(p.points[1] == Vec3(3, 0, 0));
}

TEST_CASE("sample files round trip") {
  std::mt19937_64 rng(6);
  std::vector<SdfSample> s;
  for (int i = 0; i < 100; ++i) s.push_back({oracle::uniform_vec(rng, -1, 1), oracle::uniform(rng, -1, 1)});
  const auto dir = fs::temp_directory_path();
  const auto csv = (dir / "sdfpose_samples.csv").string();
  const auto bin = (dir / "sdfpose_samples.bin").string();
  write_samples_csv(s, csv);
  write_samples_binary(s, bin);
  const auto a = read_samples(csv);
  const auto b = read_samples(bin);
  REQUIRE(a.size() == 100);
  REQUIRE(b.size() == 100);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK((a[i].x - s[i].x).norm() < 1e-8);
    CHECK(std::abs(a[i].phi - s[i].phi) < 1e-8);
    CHECK(b[i].x == s[i].x.cast<float>().cast<double>());
    CHECK(b[i].phi == static_cast<double>(static_cast<float>(s[i].phi)));
  }
  CHECK(fs::file_size(bin) == 4 + 8 + 16 * 100);
  {
    std::ofstream bad(csv);
    bad << "x,y,z,phi\n1,2,3\n";
  }
  CHECK_THROWS_AS(read_samples(csv), std::runtime_error);
  CHECK_THROWS_AS(read_samples(csv + ".missing"), std::runtime_error);
  fs::remove(csv);
  fs::remove(bin);
}

TEST_CASE("k-d tree examples") {
  const KdTree one({Vec3(1, 1, 1)});
  const KdTree::Neighbor n = one.nearest(Vec3::Zero());
  CHECK(n.index == 0);
  CHECK(n.distance == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(KdTree().nearest(Vec3::Zero()), std::logic_error);
}

TEST_CASE("k-d tree equals a linear scan") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(oracle::uniform_vec(rng, -1, 1));
    // Duplicates exercise the lowest-index tie rule.
    for (int i = 0; i < 50; ++i) pts.push_back(pts[static_cast<std::size_t>(i * 7)]);
    const KdTree tree(pts);
    for (int q = 0; q < 100; ++q) {
      const Vec3 x = oracle::uniform_vec(rng, -1.2, 1.2);
      const auto a = tree.nearest(x);
      const auto b = brute_force_nearest(pts, x);
      CHECK(a.index == b.index);
      CHECK(a.distance == b.distance);
    }
    for (int q = 0; q < 20; ++q) {
      const std::size_t i = static_cast<std::size_t>(q * 13);
      const auto a = tree.nearest(pts[i]);
      CHECK(a.distance == 0.0);
      CHECK(a.index == brute_force_nearest(pts, pts[i]).index);
    }
  }
}
