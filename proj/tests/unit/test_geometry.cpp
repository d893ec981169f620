#include "doctest.h"
#include "oracles.h"
#include "sdfpose/geometry.h"

using namespace sdfpose;

namespace {

Mat3 exp_series(const Mat3& a) {
  Mat3 sum = Mat3::Identity(), term = Mat3::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * a / k;
    sum += term;
  }
  return sum;
}

RotationParams random_rot(std::mt19937_64& rng) {
  return {oracle::uniform(rng, 0.0, kPi), oracle::uniform(rng, -kPi, kPi),
          oracle::uniform(rng, -kPi, kPi)};
}

}  // namespace

TEST_CASE("axis from spherical angles") {
  CHECK((axis_from_spherical(0.0, 1.234) - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK((axis_from_spherical(kPi / 2, 0.0) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((axis_from_spherical(kPi / 2, kPi / 2) - Vec3(0, 1, 0)).norm() < 1e-15);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = axis_from_spherical(oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10));
    CHECK(std::abs(w.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("spherical angles round trip") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Vec3 w = oracle::unit_vec(rng);
    const auto [psi, rho] = spherical_from_axis(3.0 * w);
    CHECK((axis_from_spherical(psi, rho) - w).norm() < 1e-12);
  }
}

TEST_CASE("rotation matrix examples") {
  CHECK((rotation_matrix({0.3, 0.7, 0.0}) - Mat3::Identity()).norm() < 1e-15);
  Mat3 rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((rotation_matrix({0.0, 0.0, kPi / 2}) - rz).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rotation matrix agrees with the exponential series") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const RotationParams rot = random_rot(rng);
    const Mat3 a = hat(axis_from_spherical(rot.psi, rot.rho)) * rot.theta;
    CHECK((rotation_matrix(rot) - exp_series(a)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("rotation matrices are proper and invert by negating theta") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    RotationParams rot = random_rot(rng);
    const Mat3 r = rotation_matrix(rot);
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
    rot.theta = -rot.theta;
    CHECK((r * rotation_matrix(rot) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("rotation partials") {
  SUBCASE("closed-form values at the identity") {
    const RotationPartials p = rotation_matrix_partials({0.0, 0.0, 0.0});
    Mat3 wz;
    wz << 0, -1, 0, 1, 0, 0, 0, 0, 0;
    CHECK((p.d_theta - wz).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(p.d_psi.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(p.d_rho.cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("central differences") {
    std::mt19937_64 rng(5);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
      const RotationParams rot = random_rot(rng);
      const RotationPartials p = rotation_matrix_partials(rot);
      const Mat3* analytic[3] = {&p.d_psi, &p.d_rho, &p.d_theta};
      for (int k = 0; k < 3; ++k) {
        RotationParams plus = rot, minus = rot;
        double* fp[3] = {&plus.psi, &plus.rho, &plus.theta};
        double* fm[3] = {&minus.psi, &minus.rho, &minus.theta};
        *fp[k] += h;
        *fm[k] -= h;
        const Mat3 fd = (rotation_matrix(plus) - rotation_matrix(minus)) / (2 * h);
        const Mat3 err = (fd - *analytic[k]).cwiseAbs();
        CHECK(err.maxCoeff() < 1e-6);
        for (int e = 0; e < 9; ++e)
          CHECK(err(e) <= std::max(1e-7, 1e-4 * std::abs((*analytic[k])(e))) + 1e-10 / h);
      }
    }
  }
}

TEST_CASE("axis-angle decomposition recovers the matrix") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r = rotation_matrix(random_rot(rng));
    const RotationParams back = rotation_params_from_matrix(r);
    CHECK(back.theta >= 0.0);
    CHECK(back.theta <= kPi + 1e-12);
    CHECK((rotation_matrix(back) - r).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(rotation_params_from_matrix(Mat3::Identity()).theta == 0.0);
}

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
  CHECK(wrap_angle(2 * kPi + 0.5) == doctest::Approx(0.5));
  CHECK(wrap_angle(-3 * kPi + 0.1) == doctest::Approx(-kPi + 0.1));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const double a = oracle::uniform(rng, -50, 50);
    const double w = wrap_angle(a);
    CHECK(w >= -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::remainder(a - w, 2 * kPi)) < 1e-9);
  }
}

TEST_CASE("similarity transform application") {
  const SimilarityTransform g{2.0, {}, Vec3(1, 0, 0)};
  CHECK((apply_transform(g, Vec3(0.5, 0, 0)) - Vec3(2, 0, 0)).norm() < 1e-15);
  CHECK((inverse_warp(g, Vec3(2, 0, 0)) - Vec3(0.5, 0, 0)).norm() < 1e-15);
  const Vec3 x(0.3, -0.2, 0.9);
  CHECK((apply_transform(SimilarityTransform::identity(), x) - x).norm() == 0.0);
  CHECK((inverse_warp(SimilarityTransform::identity(), x) - x).norm() == 0.0);
  const SimilarityTransform rz{1.0, {0.0, 0.0, kPi / 2}, Vec3::Zero()};
  CHECK((apply_transform(rz, Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(inverse_warp({0.0, {}, Vec3::Zero()}, x), std::invalid_argument);
  CHECK_THROWS_AS(inverse_warp({-1.0, {}, Vec3::Zero()}, x), std::invalid_argument);
}

TEST_CASE("inverse warp round trip") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const SimilarityTransform g{oracle::uniform(rng, 0.1, 5.0), random_rot(rng),
                                oracle::uniform_vec(rng, -4, 4)};
    const Vec3 x = oracle::uniform_vec(rng, -3, 3);
    CHECK((apply_transform(g, inverse_warp(g, x)) - x).norm() < 1e-9);
  }
}

TEST_CASE("homogeneous matrix layout") {
  const SimilarityTransform g{1.5, {0.4, -1.0, 0.8}, Vec3(1, 2, 3)};
  const Eigen::Matrix4d m = to_matrix(g);
  CHECK((m.topLeftCorner<3, 3>() - 1.5 * rotation_matrix(g.rot)).norm() < 1e-15);
  CHECK((m.topRightCorner<3, 1>() - g.t).norm() == 0.0);
  CHECK(m(3, 0) == 0.0);
  CHECK(m(3, 3) == 1.0);
}

TEST_CASE("analytic sdf closed forms") {
  const AnalyticShape unit = AnalyticShape::sphere(1.0);
  CHECK(analytic_sdf(unit, Vec3(2, 0, 0)) == doctest::Approx(1.0));
  CHECK(analytic_sdf(unit, Vec3::Zero()) == doctest::Approx(-1.0));
  const AnalyticShape cap = AnalyticShape::capsule(Vec3(0, 0, -1), Vec3(0, 0, 1), 0.5);
  CHECK(analytic_sdf(cap, Vec3(1, 0, 0.5)) == doctest::Approx(0.5));
  CHECK(analytic_sdf(cap, Vec3(0, 0, 2)) == doctest::Approx(0.5));
  CHECK(analytic_sdf(cap, Vec3(0, 0, 0)) == doctest::Approx(-0.5));
  const AnalyticShape both =
      AnalyticShape::union_of(AnalyticShape::sphere(0.5, Vec3(-1, 0, 0)), AnalyticShape::sphere(0.5, Vec3(1, 0, 0)));
  CHECK(analytic_sdf(both, Vec3(0, 0, 0)) == doctest::Approx(0.5));
  CHECK(analytic_sdf(both, Vec3(1, 0, 0)) == doctest::Approx(-0.5));
}

TEST_CASE("rounded box sdf against a dense surface sampling") {
  const Vec3 he(0.2, 0.15, 0.1);
  const double r = 0.05;
  const auto surface = oracle::rounded_box_surface(he, r, 0.002);
  REQUIRE(surface.size() > 100000);
  const AnalyticShape box = AnalyticShape::rounded_box(he, r);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 60; ++i) {
    const Vec3 x = oracle::uniform_vec(rng, -0.4, 0.4);
    const double d = oracle::nearest_distance(surface, x);
    const double expect = oracle::inside_rounded_box(x, he, r) ? -d : d;
    CHECK(std::abs(analytic_sdf(box, x) - expect) < 2e-3);
  }
}

TEST_CASE("transformed sdf against a moved surface sampling") {
  const Vec3 he(0.2, 0.15, 0.1);
  const double r = 0.05;
  const auto canonical = oracle::rounded_box_surface(he, r, 0.0015);
  const AnalyticShape box = AnalyticShape::rounded_box(he, r);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 4; ++k) {
    const SimilarityTransform g{oracle::uniform(rng, 0.7, 1.3),
                                {oracle::uniform(rng, 0, kPi), oracle::uniform(rng, -kPi, kPi),
                                 oracle::uniform(rng, -kPi, kPi)},
                                oracle::uniform_vec(rng, -1, 1)};
    std::vector<Vec3> moved;
    for (const auto& p : canonical) moved.push_back(apply_transform(g, p));
    for (int i = 0; i < 15; ++i) {
      const Vec3 x = g.t + oracle::uniform_vec(rng, -0.45, 0.45);
      const double d = oracle::nearest_distance(moved, x);
      const bool in = oracle::inside_rounded_box(inverse_warp(g, x), he, r);
      CHECK(std::abs(transformed_sdf(box, g, x) - (in ? -d : d)) < 2e-3);
    }
  }
  CHECK(transformed_sdf(AnalyticShape::sphere(1.0), {2.0, {}, Vec3::Zero()}, Vec3(1.5, 0, 0)) ==
        doctest::Approx(-0.5));
  CHECK(transformed_sdf(box, SimilarityTransform::identity(), Vec3(0.3, 0.1, 0)) ==
        analytic_sdf(box, Vec3(0.3, 0.1, 0)));
}

TEST_CASE("sphere sdf is closed under similarity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 c = oracle::uniform_vec(rng, -0.2, 0.2);
    const double radius = oracle::uniform(rng, 0.1, 0.8);
    const SimilarityTransform g{oracle::uniform(rng, 0.2, 4), random_rot(rng), oracle::uniform_vec(rng, -3, 3)};
    const Vec3 x = oracle::uniform_vec(rng, -4, 4);
    const double moved = (x - apply_transform(g, c)).norm() - g.s * radius;
    CHECK(std::abs(transformed_sdf(AnalyticShape::sphere(radius, c), g, x) - moved) < 1e-12 * std::max(1.0, std::abs(moved)) + 1e-12);
  }
}

TEST_CASE("eikonal property outside convex primitives") {
  const AnalyticShape shapes[] = {AnalyticShape::sphere(0.4, Vec3(0.1, 0, 0)),
                                  AnalyticShape::rounded_box(Vec3(0.3, 0.2, 0.1), 0.05),
                                  AnalyticShape::capsule(Vec3(-0.3, 0, 0), Vec3(0.2, 0.2, 0), 0.15)};
  std::mt19937_64 rng(12);
  const double h = 1e-6;
  for (const auto& s : shapes) {
    int tested = 0;
    while (tested < 100) {
      const Vec3 x = oracle::uniform_vec(rng, -1, 1);
      if (analytic_sdf(s, x) < 1e-3) continue;
      Vec3 g;
      for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = h;
        g[k] = (analytic_sdf(s, x + e) - analytic_sdf(s, x - e)) / (2 * h);
      }
      CHECK(std::abs(g.norm() - 1.0) < 1e-6);
      ++tested;
    }
  }
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(validate(AnalyticShape::sphere(-1.0)), std::invalid_argument);
  CHECK_THROWS_AS(validate(AnalyticShape::rounded_box(Vec3(0.1, 0, 0.1), 0.1)), std::invalid_argument);
  CHECK_NOTHROW(validate(AnalyticShape::capsule(Vec3::Zero(), Vec3(0, 0, 0.1), 0.1)));
  AnalyticShape empty;
  empty.geometry = ShapeUnion{};
  CHECK_THROWS_AS(validate(empty), std::invalid_argument);
}

TEST_CASE("rounded box partials") {
  std::mt19937_64 rng(13);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Vec3 he = oracle::uniform_vec(rng, 0.1, 0.4);
    const double r = oracle::uniform(rng, 0.02, 0.1);
    const Vec3 p = oracle::uniform_vec(rng, -0.7, 0.7);
    const RoundedBoxSdf v = rounded_box_sdf(p, he, r);
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = h;
      const double dx = (rounded_box_sdf(p + e, he, r).value - rounded_box_sdf(p - e, he, r).value) / (2 * h);
      const double dh = (rounded_box_sdf(p, he + e, r).value - rounded_box_sdf(p, he - e, r).value) / (2 * h);
      CHECK(std::abs(dx - v.d_x[k]) < 1e-6);
      CHECK(std::abs(dh - v.d_half_extents[k]) < 1e-6);
    }
    const double dr = (rounded_box_sdf(p, he, r + h).value - rounded_box_sdf(p, he, r - h).value) / (2 * h);
    CHECK(std::abs(dr - v.d_radius) < 1e-6);
  }
}
