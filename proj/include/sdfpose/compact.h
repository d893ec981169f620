#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdfpose/latent_sdf.h"
#include "sdfpose/mesh.h"

namespace sdfpose {

/// Size in bytes of a compact shape with a d-dimensional code.
constexpr std::size_t compact_size(std::size_t d) { return 4 * d + 64; }

/// Little-endian float32: the d code values, then the 4x4 matrix of g
/// (row-major, top-left block sR, last column t, last row 0 0 0 1).
std::vector<std::uint8_t> serialize_compact(const LatentCode& z, const SimilarityTransform& g);

struct CompactShape {
  LatentCode z;
  SimilarityTransform g;
};

/// Throws std::invalid_argument when the length is not 4d + 64, the last row is
/// not 0 0 0 1, or the 3x3 block is not a positive multiple of a rotation
/// (within 1e-3).
CompactShape deserialize_compact(const std::vector<std::uint8_t>& bytes, std::size_t d);

struct CompressionInput {
  LatentCode z;
  SimilarityTransform g;
  TriangleMesh fitted;     // mesh extracted from (z, g)
  TriangleMesh reference;  // mesh the F-scores are measured against
};

struct CompressionRow {
  std::string method;
  double mean_f = 0.0;
  double mean_size_bytes = 0.0;
};

struct CompressionConfig {
  std::vector<double> cell_fractions = {0.1, 0.2};  // of the bounding-sphere radius
  std::size_t fscore_points = 3000;
  std::uint64_t seed = 0;
};

/// One row for the compact form (F of the fitted mesh, size 4d + 64) and one
/// per cell fraction (F of the vertex-clustered fitted mesh, OBJ byte count).
/// Throws when an input has an empty mesh.
std::vector<CompressionRow> run_compression_experiment(const std::vector<CompressionInput>& inputs,
                                                       const CompressionConfig& cfg = {});

/// CSV with header method,mean_f,mean_size_bytes,mean_size_kb.
std::string compression_csv(const std::vector<CompressionRow>& rows);

}  // namespace sdfpose
