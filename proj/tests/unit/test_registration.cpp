#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracles.h"
#include "sdfpose/baseline.h"
#include "sdfpose/meshing.h"
#include "sdfpose/registration.h"

using namespace sdfpose;

namespace {

double brute_force_assignment(const Eigen::MatrixXd& c) {
  std::vector<int> perm(static_cast<std::size_t>(c.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double sum = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) sum += c(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<Vec3> random_cloud(std::mt19937_64& rng, int n, double spread = 1.0) {
  std::vector<Vec3> v;
  for (int i = 0; i < n; ++i) v.push_back(oracle::uniform_vec(rng, -spread, spread));
  return v;
}

SurfacePointSet as_set(std::vector<Vec3> p) {
  SurfacePointSet s;
  s.points = std::move(p);
  return s;
}

SimilarityMatrix random_similarity(std::mt19937_64& rng) {
  SimilarityMatrix m;
  m.s = oracle::uniform(rng, 0.3, 3.0);
  m.r = rotation_matrix({oracle::uniform(rng, 0, kPi), oracle::uniform(rng, -kPi, kPi), oracle::uniform(rng, -kPi, kPi)});
  m.t = oracle::uniform_vec(rng, -2, 2);
  return m;
}

TriangleMesh shape_mesh(const AnalyticShape& s) {
  return marching_cubes([&](const Vec3& x) { return analytic_sdf(s, x); },
                        GridSpec{Vec3::Constant(-1), Vec3::Constant(1), 40});
}

}  // namespace

TEST_CASE("umeyama recovers constructed similarities") {
  SUBCASE("tetrahedron with a known transform") {
    const std::vector<Vec3> src = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    Mat3 rz;
    rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    std::vector<Vec3> dst;
    for (const Vec3& p : src) dst.push_back(3.0 * rz * p + Vec3(1, 1, 1));
    const SimilarityMatrix m = umeyama(src, dst);
    CHECK(std::abs(m.s - 3.0) < 1e-9);
    CHECK((m.r - rz).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((m.t - Vec3(1, 1, 1)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("identity") {
    std::mt19937_64 rng(1);
    const auto src = random_cloud(rng, 10);
    const SimilarityMatrix m = umeyama(src, src);
    CHECK(std::abs(m.s - 1.0) < 1e-12);
    CHECK((m.r - Mat3::Identity()).norm() < 1e-12);
    CHECK(m.t.norm() < 1e-12);
  }
  SUBCASE("random noise-free cases") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
      const auto src = random_cloud(rng, 3 + i % 20);
      const SimilarityMatrix truth = random_similarity(rng);
      std::vector<Vec3> dst;
      for (const Vec3& p : src) dst.push_back(truth.apply(p));
      const SimilarityMatrix m = umeyama(src, dst);
      CHECK(std::abs(m.s - truth.s) < 1e-9);
      CHECK((m.r - truth.r).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((m.t - truth.t).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("reflections give proper rotations") {
    std::mt19937_64 rng(3);
    const auto src = random_cloud(rng, 12);
    std::vector<Vec3> dst;
    for (const Vec3& p : src) dst.push_back(Vec3(-p.x(), p.y(), p.z()));
    const SimilarityMatrix m = umeyama(src, dst);
    CHECK(m.r.determinant() == doctest::Approx(1.0));
    CHECK((m.r.transpose() * m.r - Mat3::Identity()).norm() < 1e-9);
    CHECK(m.s > 0.0);
  }
  SUBCASE("correspondence form and errors") {
    std::mt19937_64 rng(4);
    const auto src = random_cloud(rng, 6);
    const SimilarityMatrix truth = random_similarity(rng);
    std::vector<Vec3> dst(6);
    const Correspondences pairs = {{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 1}, {5, 0}};
    for (const auto& [a, b] : pairs) dst[static_cast<std::size_t>(b)] = truth.apply(src[static_cast<std::size_t>(a)]);
    CHECK(std::abs(umeyama(src, dst, pairs).s - truth.s) < 1e-9);
    CHECK_THROWS_AS(umeyama({Vec3::Zero(), Vec3(1, 0, 0)}, {Vec3::Zero(), Vec3(1, 0, 0)}), std::invalid_argument);
    const std::vector<Vec3> line = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
    CHECK_THROWS_AS(umeyama(line, line), std::invalid_argument);
  }
  SUBCASE("conversion to transform parameters") {
    std::mt19937_64 rng(5);
    const SimilarityMatrix m = random_similarity(rng);
    const SimilarityTransform g = m.to_transform();
    const Vec3 x(0.3, -0.4, 0.5);
    CHECK((apply_transform(g, x) - m.apply(x)).norm() < 1e-9);
    CHECK((SimilarityMatrix::from_transform(g).r - m.r).norm() < 1e-9);
  }
}

TEST_CASE("hungarian assignment") {
  SUBCASE("examples") {
    Eigen::MatrixXd c(2, 2);
    c << 1, 2, 2, 1;
    const Assignment a = hungarian(c);
    CHECK(a.cost == 2.0);
    CHECK(a.pairs == Correspondences{{0, 0}, {1, 1}});
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, 10.0);
    d.diagonal().setConstant(1.0);
    const Assignment b = hungarian(d);
    for (int i = 0; i < 4; ++i) CHECK(b.pairs[static_cast<std::size_t>(i)] == std::pair<int, int>(i, i));
  }
  SUBCASE("exhaustive permutations") {
    std::mt19937_64 rng(6);
    for (int n : {5, 7})
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd c(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) c(i, j) = oracle::uniform(rng, 0, 10);
        if (trial % 4 == 0) c = c.array().round();  // ties
        const Assignment a = hungarian(c);
        CHECK(a.cost == doctest::Approx(brute_force_assignment(c)).epsilon(1e-12));
        double sum = 0.0;
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        for (const auto& [r, col] : a.pairs) {
          sum += c(r, col);
          CHECK_FALSE(used[static_cast<std::size_t>(col)]);
          used[static_cast<std::size_t>(col)] = true;
        }
        CHECK(a.pairs.size() == static_cast<std::size_t>(n));
        CHECK(sum == doctest::Approx(a.cost));
      }
  }
  SUBCASE("rectangular and errors") {
    Eigen::MatrixXd c(2, 3);
    c << 5, 1, 9, 2, 8, 0.5;
    const Assignment a = hungarian(c);
    CHECK(a.pairs == Correspondences{{0, 1}, {1, 2}});
    CHECK(a.cost == doctest::Approx(1.5));
    const Assignment t = hungarian(c.transpose());
    CHECK(t.pairs == Correspondences{{1, 0}, {2, 1}});
    CHECK_THROWS_AS(hungarian(Eigen::MatrixXd(0, 0)), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
    bad(0, 1) = INFINITY;
    CHECK_THROWS_AS(hungarian(bad), std::invalid_argument);
  }
}

TEST_CASE("coarse initialization") {
  std::mt19937_64 rng(7);
  const auto match = random_cloud(rng, 300, 0.5);
  SUBCASE("identical sets") {
    const SimilarityTransform g = coarse_init(as_set(match), as_set(match), Vec3(0, 0, 1));
    CHECK(g.s == doctest::Approx(1.0));
    CHECK(g.t.norm() < 1e-12);
    CHECK(g.rot.theta == 0.0);
  }
  SUBCASE("scaled copy") {
    std::vector<Vec3> big;
    for (const Vec3& p : match) big.push_back(2.0 * p);
    CHECK(coarse_init(as_set(big), as_set(match), Vec3(0, 0, 1)).s == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("rotated by 40 degrees") {
    for (const Vec3& axis : {Vec3(0, 0, 1), Vec3(1, 1, 0).normalized()}) {
      const auto [psi, rho] = spherical_from_axis(axis);
      const Mat3 r = rotation_matrix({psi, rho, 40.0 * kPi / 180});
      std::vector<Vec3> test;
      for (const Vec3& p : match) test.push_back(r * p + Vec3(0.3, -0.2, 1.0));
      const SimilarityTransform g = coarse_init(as_set(test), as_set(match), axis);
      CHECK((rotation_matrix(g.rot) - r).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((g.t - Vec3(0.3, -0.2, 1.0)).norm() < 1e-9);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS(coarse_init(as_set(match), as_set({Vec3(1, 1, 1), Vec3(1, 1, 1)}), Vec3(0, 0, 1)));
    CHECK_THROWS(coarse_init(as_set(match), SurfacePointSet{}, Vec3(0, 0, 1)));
  }
}

TEST_CASE("assignment ICP") {
  SUBCASE("objective never increases") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
      const auto src = random_cloud(rng, 60);
      const SimilarityMatrix truth = random_similarity(rng);
      std::vector<Vec3> dst;
      for (const Vec3& p : src) dst.push_back(truth.apply(p) + 0.05 * oracle::uniform_vec(rng, -1, 1));
      SimilarityMatrix init = truth;
      init.s *= oracle::uniform(rng, 0.7, 1.3);
      init.r = rotation_matrix({0.3, 0.4, oracle::uniform(rng, -0.6, 0.6)}) * init.r;
      init.t += oracle::uniform_vec(rng, -0.3, 0.3);
      IcpConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(trial);
      const IcpResult r = assignment_icp(as_set(src), as_set(dst), init, cfg);
      REQUIRE(!r.objective.empty());
      for (std::size_t i = 1; i < r.objective.size(); ++i)
        CHECK(r.objective[i] <= r.objective[i - 1] + 1e-9);
      CHECK(r.transform.s > 0.1 * truth.s);
    }
  }
  SUBCASE("fixed point") {
    std::mt19937_64 rng(9);
    const auto src = random_cloud(rng, 80);
    const SimilarityMatrix truth = random_similarity(rng);
    std::vector<Vec3> dst;
    for (const Vec3& p : src) dst.push_back(truth.apply(p));
    std::shuffle(dst.begin(), dst.end(), rng);
    const IcpResult r = assignment_icp(as_set(src), as_set(dst), truth);
    CHECK(r.iterations <= 2);
    CHECK(std::abs(r.transform.s - truth.s) < 1e-6);
    CHECK((r.transform.r - truth.r).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((r.transform.t - truth.t).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("recovery from a perturbed start") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
      const auto src = random_cloud(rng, 120);
      const SimilarityMatrix truth = random_similarity(rng);
      std::vector<Vec3> dst;
      for (const Vec3& p : src) dst.push_back(truth.apply(p));
      SimilarityMatrix init = truth;
      init.s *= 1.1;
      init.r = init.r * rotation_matrix({1.0, 0.5, 10.0 * kPi / 180});
      const IcpResult r = assignment_icp(as_set(src), as_set(dst), init);
      CHECK(r.iterations <= 30);
      CHECK(std::abs(r.transform.s / truth.s - 1.0) < 0.01);
      const double angle = rotation_params_from_matrix(r.transform.r.transpose() * truth.r).theta;
      CHECK(angle < kPi / 180);
    }
  }
  SUBCASE("subsampling") {
    std::mt19937_64 rng(11);
    const auto pts = random_cloud(rng, 500);
    CHECK(subsample(pts, 600, 1) == pts);
    const auto s = subsample(pts, 100, 1);
    CHECK(s.size() == 100);
    CHECK(s == subsample(pts, 100, 1));
  }
}

TEST_CASE("retrieval and the baseline pipeline") {
  const std::vector<TriangleMesh> meshes = {
      shape_mesh(AnalyticShape::sphere(0.6)),
      shape_mesh(AnalyticShape::capsule(Vec3(-0.6, 0, 0), Vec3(0.6, 0, 0), 0.15)),
      shape_mesh(AnalyticShape::rounded_box(Vec3(0.5, 0.35, 0.05), 0.03)),
  };
  const std::vector<LibraryEntry> lib = make_library(meshes, 1500, 1);
  REQUIRE(lib.size() == 3);
  CHECK(lib[2].id == 2);
  SUBCASE("retrieval") {
    for (int i = 0; i < 3; ++i) {
      const SurfacePointSet q = sample_surface(meshes[static_cast<std::size_t>(i)], 1000, 50 + i);
      CHECK(retrieve_by_chamfer(q, lib) == i);
      // Moved and rescaled copies: retrieval normalizes by the bounding sphere.
      SurfacePointSet moved = q;
      std::mt19937_64 rng(static_cast<std::uint64_t>(i));
      for (Vec3& p : moved.points) p = 2.5 * p + Vec3(1, 2, 3) + 0.05 * 0.6 * oracle::uniform_vec(rng, -1, 1);
      CHECK(retrieve_by_chamfer(moved, lib) == i);
    }
    CHECK_THROWS(retrieve_by_chamfer(sample_surface(meshes[0], 10, 1), {}));
  }
  SUBCASE("tie goes to the lowest id") {
    std::vector<LibraryEntry> twins = {lib[1], lib[1]};
    twins[1].id = 1;
    twins[0].id = 0;
    CHECK(retrieve_by_chamfer(sample_surface(meshes[1], 500, 3), twins) == 0);
  }
  SUBCASE("end to end on a library member") {
    const SimilarityTransform g{1.5, {0.0, 0.0, 30.0 * kPi / 180}, Vec3(0.5, -1.0, 2.0)};
    const TriangleMesh query = transform_mesh(meshes[2], g);
    BaselineConfig cfg;
    cfg.seed = 4;
    const BaselineResult a = baseline_pipeline(query, lib, Vec3(0, 0, 1), cfg);
    CHECK(a.retrieved_id == 2);
    CHECK(a.report.f >= 0.9);
    CHECK(a.transform.s == doctest::Approx(1.5).epsilon(0.05));
    const BaselineResult b = baseline_pipeline(query, lib, Vec3(0, 0, 1), cfg);
    CHECK(b.transform.t == a.transform.t);
    CHECK(b.report.f == a.report.f);
    CHECK_THROWS(baseline_pipeline(query, {}, Vec3(0, 0, 1), cfg));
  }
  SUBCASE("shape outside the library") {
    const TriangleMesh query = shape_mesh(AnalyticShape::capsule(Vec3(0, 0, -0.5), Vec3(0, 0, 0.5), 0.3));
    const BaselineResult r = baseline_pipeline(query, lib, Vec3(0, 0, 1));
    CHECK(r.retrieved_id >= 0);
    CHECK(r.retrieved_id < 3);
    CHECK(r.report.f >= 0.0);
    CHECK(r.report.f <= 1.0);
  }
}
