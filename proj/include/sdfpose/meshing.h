#pragma once

#include <functional>
#include <span>
#include <stdexcept>

#include "sdfpose/latent_sdf.h"
#include "sdfpose/mesh.h"

namespace sdfpose {

struct GridSpec {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);
  int resolution = 64;  // grid nodes per axis

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (resolution - 1); }
};

/// Evaluates a field at a batch of points.
using BatchField = std::function<void(std::span<const Vec3>, std::span<double>)>;

/// Marching cubes over the node grid. Vertices sit on grid edges whose end
/// values straddle zero (negative counts as inside), placed by linear
/// interpolation and shared between neighbouring cells. Triangles face the
/// positive side. Ambiguous faces always separate the inside corners, so the
/// output is closed wherever the surface does not leave the grid. Returns an
/// empty mesh when the field has no sign change.
TriangleMesh marching_cubes(const BatchField& field, const GridSpec& grid);
TriangleMesh marching_cubes(const std::function<double(const Vec3&)>& field,
                            const GridSpec& grid);

class EmptyExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Marching cubes of f(., z) over the canonical grid, then every vertex mapped
/// through g. Throws EmptyExtractionError when no surface is found.
TriangleMesh extract_shape(const LatentSdf& space, const LatentCode& z,
                           const SimilarityTransform& g, const GridSpec& grid);

/// Vertex-clustering simplification: vertices falling in the same cubic cell
/// (grid anchored at the bounding-box minimum) collapse to their centroid;
/// degenerate and duplicate faces are dropped.
TriangleMesh vertex_clustering(const TriangleMesh& mesh, double cell);

}  // namespace sdfpose
