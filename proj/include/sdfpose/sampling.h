#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdfpose/geometry.h"
#include "sdfpose/latent_sdf.h"
#include "sdfpose/mesh.h"

namespace sdfpose {

struct SdfSample {
  Vec3 x = Vec3::Zero();
  double phi = 0.0;
};

struct SurfacePointSet {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or one unit normal per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Area-weighted uniform samples with face normals. Throws
/// std::invalid_argument when the mesh has no triangle of positive area.
SurfacePointSet sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

struct MeshSdfConfig {
  std::size_t near_pairs = 25000;  // each yields one +offset and one -offset sample
  double near_offset = 0.01;
  std::size_t freespace = 25000;
  double freespace_min = 0.07;
  double freespace_max = 0.20;
  std::size_t dense_points = 100000;  // surface samples indexed by the k-d tree
  std::uint64_t seed = 0;
};

struct MeshSdfSamples {
  std::vector<SdfSample> samples;  // near-surface pairs first, then freespace
  std::size_t negative_freespace = 0;
  std::vector<std::string> diagnostics;
};

/// Near-surface samples at +-near_offset along the face normal (phi assigned
/// as +-near_offset) and freespace samples pushed out along the normal,
/// whose phi is the distance to the nearest dense surface sample, signed by
/// the side of that sample's normal.
MeshSdfSamples sample_mesh_sdf(const TriangleMesh& mesh, const MeshSdfConfig& cfg);

struct AnalyticSampleConfig {
  std::size_t near_surface = 20000;
  std::size_t uniform = 5000;
  double near_band = 0.01;  // offsets along the normal drawn from [-band, band]
  Vec3 region_min = Vec3::Constant(-1.0);
  Vec3 region_max = Vec3::Constant(1.0);
  std::uint64_t seed = 0;
};

/// Exact SDF samples of a field: near-surface points are found by projecting
/// uniform region points onto the zero level set along the gradient and then
/// offsetting them along the normal. Throws std::runtime_error when no
/// surface is found inside the region.
std::vector<SdfSample> sample_sdf_field(const std::function<double(const Vec3&)>& field,
                                        const std::function<Vec3(const Vec3&)>& gradient,
                                        const AnalyticSampleConfig& cfg);

/// Samples of `shape` after it has been moved by g.
std::vector<SdfSample> sample_analytic_sdf(const AnalyticShape& shape,
                                           const SimilarityTransform& g,
                                           const AnalyticSampleConfig& cfg);

/// Samples of s * f(g^{-1}(x), z), the latent shape z moved by g.
std::vector<SdfSample> sample_analytic_sdf(const LatentSdf& space, const LatentCode& z,
                                           const SimilarityTransform& g,
                                           const AnalyticSampleConfig& cfg);

/// Axis-aligned box around a shape of canonical radius `canonical_radius`
/// moved by g, padded by `margin` (relative to the transformed radius).
std::pair<Vec3, Vec3> region_around(const SimilarityTransform& g, double canonical_radius,
                                    double margin);

/// Points whose |phi| is at most `band`; used as a surface proxy for query
/// sample sets.
SurfacePointSet surface_proxy(const std::vector<SdfSample>& samples, double band);

// Sample files: CSV with header `x,y,z,phi`, or binary "SDFS" + u64 count +
// 4 float32 per record. read_samples detects the format from the content.
void write_samples_csv(const std::vector<SdfSample>& samples, const std::string& path);
void write_samples_binary(const std::vector<SdfSample>& samples, const std::string& path);
std::vector<SdfSample> read_samples(const std::string& path);

}  // namespace sdfpose
