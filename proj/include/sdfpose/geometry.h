#pragma once

// Geometric primitives shared by every other module.
//
// Sign convention: signed distances are negative inside a solid and positive
// outside. Rotations are parameterized by a unit axis in spherical
// coordinates (polar angle psi, azimuth rho) and a rotation angle theta, and
// converted to matrices with Rodrigues' formula.

#include <array>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace sdfpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

struct RotationParams {
  double psi = 0.0;    // polar angle of the axis
  double rho = 0.0;    // azimuthal angle of the axis
  double theta = 0.0;  // rotation angle about the axis
};

struct SimilarityTransform {
  double s = 1.0;
  RotationParams rot;
  Vec3 t = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }
};

/// Unit axis (sin psi cos rho, sin psi sin rho, cos psi).
Vec3 axis_from_spherical(double psi, double rho);

/// Inverse of axis_from_spherical for a non-zero vector; returns (psi, rho)
/// with psi in [0, pi] and rho in (-pi, pi].
std::array<double, 2> spherical_from_axis(const Vec3& axis);

/// Skew-symmetric cross-product matrix of w.
Mat3 hat(const Vec3& w);

Mat3 rotation_matrix(const RotationParams& rot);

/// Partial derivatives of rotation_matrix with respect to psi, rho, theta.
struct RotationPartials {
  Mat3 d_psi;
  Mat3 d_rho;
  Mat3 d_theta;
};
RotationPartials rotation_matrix_partials(const RotationParams& rot);

/// Axis-angle decomposition of a proper rotation matrix. theta is returned in
/// [0, pi]; at theta == 0 the axis defaults to +z.
RotationParams rotation_params_from_matrix(const Mat3& r);

/// Wraps an angle into [-pi, pi].
double wrap_angle(double a);

/// g(x) = s R x + t.
Vec3 apply_transform(const SimilarityTransform& g, const Vec3& x);

/// R^T (x - t) / s. Throws std::invalid_argument when s <= 0.
Vec3 inverse_warp(const SimilarityTransform& g, const Vec3& x);

/// 4x4 homogeneous matrix with top-left block sR and last column t.
Eigen::Matrix4d to_matrix(const SimilarityTransform& g);

// ---------------------------------------------------------------------------
// Analytic shapes, used as ground truth and as training data for decoders.

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.5;
};

/// Box with half extents `half_extents` whose corners and edges are rounded by
/// `corner_radius`; the solid reaches half_extents + corner_radius from the
/// center along each axis.
struct RoundedBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Constant(0.3);
  double corner_radius = 0.05;
};

struct Capsule {
  Vec3 a = Vec3(0, 0, -0.3);
  Vec3 b = Vec3(0, 0, 0.3);
  double radius = 0.2;
};

struct AnalyticShape;

/// Union via min(). The result is exact outside the solid and a lower bound on
/// the depth inside regions where the members overlap.
struct ShapeUnion {
  std::vector<AnalyticShape> members;
};

struct AnalyticShape {
  std::variant<Sphere, RoundedBox, Capsule, ShapeUnion> geometry;

  static AnalyticShape sphere(double radius, const Vec3& center = Vec3::Zero());
  static AnalyticShape rounded_box(const Vec3& half_extents, double corner_radius,
                                   const Vec3& center = Vec3::Zero());
  static AnalyticShape capsule(const Vec3& a, const Vec3& b, double radius);
  static AnalyticShape union_of(AnalyticShape first, AnalyticShape second);
};

/// Throws std::invalid_argument on non-positive sizes or an empty union.
void validate(const AnalyticShape& shape);

double analytic_sdf(const AnalyticShape& shape, const Vec3& x);

/// s * analytic_sdf(shape, g^{-1}(x)), the signed distance to the shape after
/// it has been moved by g.
double transformed_sdf(const AnalyticShape& shape, const SimilarityTransform& g,
                       const Vec3& x);

/// Exact signed distance to a rounded box together with its partial
/// derivatives with respect to the query point, the half extents and the
/// corner radius. Shared by analytic_sdf and the analytic latent family.
struct RoundedBoxSdf {
  double value;
  Vec3 d_x;
  Vec3 d_half_extents;
  double d_radius;
};
RoundedBoxSdf rounded_box_sdf(const Vec3& p, const Vec3& half_extents, double radius);

}  // namespace sdfpose
