#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sdfpose/geometry.h"
#include "sdfpose/sampling.h"

namespace sdfpose {

/// (source index, destination index) pairs, one-to-one.
using Correspondences = std::vector<std::pair<int, int>>;

/// Similarity as scale, rotation matrix and translation.
struct SimilarityMatrix {
  double s = 1.0;
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return s * (r * x) + t; }
  SimilarityTransform to_transform() const;
  static SimilarityMatrix from_transform(const SimilarityTransform& g);
};

/// Least-squares similarity taking src[i] onto dst[i] (closed form with a
/// determinant guard against reflections). Throws std::invalid_argument for
/// fewer than 3 pairs or a degenerate (e.g. collinear) source configuration.
SimilarityMatrix umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);
SimilarityMatrix umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                         const Correspondences& pairs);

struct Assignment {
  Correspondences pairs;  // (row, column), sorted by row
  double cost = 0.0;
};

/// Minimum-cost one-to-one assignment. Rectangular matrices are padded to
/// square with a constant larger than any entry; only real pairs are
/// returned (min(rows, cols) of them). Throws std::invalid_argument for an
/// empty or non-finite matrix.
Assignment hungarian(const Eigen::MatrixXd& cost);

/// Initial alignment of `match` onto `test`: scale from the ratio of
/// bounding-sphere radii, rotation about `axis` chosen on a 20 degree grid to
/// minimize the largest nearest-neighbour distance from the moved match points
/// to the test points, and translation that makes the centers coincide.
SimilarityTransform coarse_init(const SurfacePointSet& test, const SurfacePointSet& match,
                                const Vec3& axis, double step_degrees = 20.0);

struct IcpConfig {
  int iterations = 30;
  std::size_t max_points = 256;  // both sets are subsampled to at most this
  std::uint64_t seed = 0;
};

struct IcpResult {
  SimilarityMatrix transform;
  std::vector<double> objective;  // assignment cost (sum of squared distances) per iteration
  int iterations = 0;
};

/// ICP whose correspondence step is an optimal one-to-one assignment on
/// squared distances followed by a closed-form similarity update. Stops early
/// once the assignment no longer changes.
IcpResult assignment_icp(const SurfacePointSet& src, const SurfacePointSet& dst,
                         const SimilarityMatrix& init, const IcpConfig& cfg = {});

/// Farthest-point subset of at most n points from a seeded start (all points,
/// in order, when n covers the set).
std::vector<Vec3> subsample(const std::vector<Vec3>& points, std::size_t n, std::uint64_t seed);

}  // namespace sdfpose
