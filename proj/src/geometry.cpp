#include "sdfpose/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdfpose {

Vec3 axis_from_spherical(double psi, double rho) {
  const double sp = std::sin(psi);
  return {sp * std::cos(rho), sp * std::sin(rho), std::cos(psi)};
}

std::array<double, 2> spherical_from_axis(const Vec3& axis) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("spherical_from_axis: zero axis");
  const Vec3 w = axis / n;
  const double psi = std::acos(std::clamp(w.z(), -1.0, 1.0));
  const double rho = std::atan2(w.y(), w.x());
  return {psi, rho};
}

Mat3 hat(const Vec3& w) {
  Mat3 k;
  k << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return k;
}

Mat3 rotation_matrix(const RotationParams& rot) {
  const Mat3 k = hat(axis_from_spherical(rot.psi, rot.rho));
  return Mat3::Identity() + std::sin(rot.theta) * k +
         (1.0 - std::cos(rot.theta)) * (k * k);
}

RotationPartials rotation_matrix_partials(const RotationParams& rot) {
  const double sp = std::sin(rot.psi), cp = std::cos(rot.psi);
  const double sr = std::sin(rot.rho), cr = std::cos(rot.rho);
  const double st = std::sin(rot.theta), ct = std::cos(rot.theta);

  const Mat3 k = hat(Vec3(sp * cr, sp * sr, cp));
  const Mat3 k_psi = hat(Vec3(cp * cr, cp * sr, -sp));
  const Mat3 k_rho = hat(Vec3(-sp * sr, sp * cr, 0.0));

  RotationPartials out;
  out.d_theta = ct * k + st * (k * k);
  out.d_psi = st * k_psi + (1.0 - ct) * (k_psi * k + k * k_psi);
  out.d_rho = st * k_rho + (1.0 - ct) * (k_rho * k + k * k_rho);
  return out;
}

RotationParams rotation_params_from_matrix(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));

  Vec3 axis;
  if (theta < 1e-12) {
    return {0.0, 0.0, 0.0};
  } else if (theta < kPi / 2) {
    axis = skew / (2.0 * std::sin(theta));
  } else {
    // Near pi the skew part vanishes; recover w w^T from the symmetric part.
    const Mat3 outer = (0.5 * (r + r.transpose()) - c * Mat3::Identity()) / (1.0 - c);
    int col = 0;
    outer.diagonal().maxCoeff(&col);
    axis = outer.col(col);
    if (axis.dot(skew) < 0.0) axis = -axis;
  }
  const auto [psi, rho] = spherical_from_axis(axis);
  return {psi, rho, theta};
}

double wrap_angle(double a) {
  if (a >= -kPi && a <= kPi) return a;
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

Vec3 apply_transform(const SimilarityTransform& g, const Vec3& x) {
  return g.s * (rotation_matrix(g.rot) * x) + g.t;
}

Vec3 inverse_warp(const SimilarityTransform& g, const Vec3& x) {
  if (!(g.s > 0.0)) throw std::invalid_argument("inverse_warp: scale must be positive");
  return rotation_matrix(g.rot).transpose() * (x - g.t) / g.s;
}

Eigen::Matrix4d to_matrix(const SimilarityTransform& g) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = g.s * rotation_matrix(g.rot);
  m.topRightCorner<3, 1>() = g.t;
  return m;
}

// ---------------------------------------------------------------------------

AnalyticShape AnalyticShape::sphere(double radius, const Vec3& center) {
  return {Sphere{center, radius}};
}

AnalyticShape AnalyticShape::rounded_box(const Vec3& half_extents, double corner_radius,
                                         const Vec3& center) {
  return {RoundedBox{center, half_extents, corner_radius}};
}

AnalyticShape AnalyticShape::capsule(const Vec3& a, const Vec3& b, double radius) {
  return {Capsule{a, b, radius}};
}

AnalyticShape AnalyticShape::union_of(AnalyticShape first, AnalyticShape second) {
  ShapeUnion u;
  u.members.push_back(std::move(first));
  u.members.push_back(std::move(second));
  return {std::move(u)};
}

namespace {

struct Validator {
  void operator()(const Sphere& s) const {
    if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  }
  void operator()(const RoundedBox& b) const {
    if (!(b.half_extents.minCoeff() > 0.0) || !(b.corner_radius > 0.0))
      throw std::invalid_argument("rounded box sizes must be positive");
  }
  void operator()(const Capsule& c) const {
    if (!(c.radius > 0.0)) throw std::invalid_argument("capsule radius must be positive");
  }
  void operator()(const ShapeUnion& u) const {
    if (u.members.empty()) throw std::invalid_argument("empty shape union");
    for (const auto& m : u.members) validate(m);
  }
};

struct SdfVisitor {
  const Vec3& x;
  double operator()(const Sphere& s) const { return (x - s.center).norm() - s.radius; }
  double operator()(const RoundedBox& b) const {
    return rounded_box_sdf(x - b.center, b.half_extents, b.corner_radius).value;
  }
  double operator()(const Capsule& c) const {
    const Vec3 pa = x - c.a;
    const Vec3 ba = c.b - c.a;
    const double len2 = ba.squaredNorm();
    const double h = len2 > 0.0 ? std::clamp(pa.dot(ba) / len2, 0.0, 1.0) : 0.0;
    return (pa - h * ba).norm() - c.radius;
  }
  double operator()(const ShapeUnion& u) const {
    double d = analytic_sdf(u.members.front(), x);
    for (std::size_t i = 1; i < u.members.size(); ++i)
      d = std::min(d, analytic_sdf(u.members[i], x));
    return d;
  }
};

}  // namespace

void validate(const AnalyticShape& shape) { std::visit(Validator{}, shape.geometry); }

double analytic_sdf(const AnalyticShape& shape, const Vec3& x) {
  return std::visit(SdfVisitor{x}, shape.geometry);
}

double transformed_sdf(const AnalyticShape& shape, const SimilarityTransform& g,
                       const Vec3& x) {
  return g.s * analytic_sdf(shape, inverse_warp(g, x));
}

RoundedBoxSdf rounded_box_sdf(const Vec3& p, const Vec3& half_extents, double radius) {
  RoundedBoxSdf out{0.0, Vec3::Zero(), Vec3::Zero(), -1.0};
  const Vec3 sign(p.x() < 0.0 ? -1.0 : 1.0, p.y() < 0.0 ? -1.0 : 1.0,
                  p.z() < 0.0 ? -1.0 : 1.0);
  const Vec3 q = p.cwiseAbs() - half_extents;
  int k = 0;
  const double q_max = q.maxCoeff(&k);
  if (q_max > 0.0) {
    const Vec3 qp = q.cwiseMax(0.0);
    const double n = qp.norm();
    out.value = n - radius;
    const Vec3 unit = qp / n;
    out.d_x = unit.cwiseProduct(sign);
    out.d_half_extents = -unit;
  } else {
    out.value = q_max - radius;
    out.d_x[k] = sign[k];
    out.d_half_extents[k] = -1.0;
  }
  return out;
}

}  // namespace sdfpose
