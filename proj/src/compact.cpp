#include "sdfpose/compact.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "binary_io.h"
#include "sdfpose/meshing.h"
#include "sdfpose/metrics.h"

namespace sdfpose {

std::vector<std::uint8_t> serialize_compact(const LatentCode& z, const SimilarityTransform& g) {
  if (!z.allFinite()) throw std::invalid_argument("serialize_compact: non-finite code");
  if (!(g.s > 0.0)) throw std::invalid_argument("serialize_compact: scale must be positive");
  detail::ByteWriter w;
  for (Eigen::Index i = 0; i < z.size(); ++i) w.f32(static_cast<float>(z[i]));
  const Eigen::Matrix4d m = to_matrix(g);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) w.f32(static_cast<float>(m(r, c)));
  return w.take();
}

CompactShape deserialize_compact(const std::vector<std::uint8_t>& bytes, std::size_t d) {
  if (bytes.size() != compact_size(d))
    throw std::invalid_argument("compact shape: expected " + std::to_string(compact_size(d)) +
                                " bytes, got " + std::to_string(bytes.size()));
  detail::ByteReader r(bytes);
  CompactShape out;
  out.z.resize(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) out.z[static_cast<Eigen::Index>(i)] = r.f32();
  Eigen::Matrix4d m;
  for (int row = 0; row < 4; ++row)
    for (int c = 0; c < 4; ++c) m(row, c) = r.f32();
  if (!m.allFinite()) throw std::invalid_argument("compact shape: non-finite matrix");
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0)
    throw std::invalid_argument("compact shape: last matrix row must be 0 0 0 1");

  const Mat3 sr = m.topLeftCorner<3, 3>();
  const double det = sr.determinant();
  if (!(det > 0.0)) throw std::invalid_argument("compact shape: matrix block is not a similarity");
  const double s = std::cbrt(det);
  const Mat3 rot = sr / s;
  if ((rot.transpose() * rot - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-3)
    throw std::invalid_argument("compact shape: matrix block is not scale times rotation");
  out.g.s = s;
  out.g.rot = rotation_params_from_matrix(rot);
  out.g.t = m.topRightCorner<3, 1>();
  return out;
}

std::vector<CompressionRow> run_compression_experiment(const std::vector<CompressionInput>& inputs,
                                                       const CompressionConfig& cfg) {
  std::vector<CompressionRow> rows;
  CompressionRow compact{"compact", 0.0, 0.0};
  std::vector<CompressionRow> vc;
  for (double frac : cfg.cell_fractions) {
    char name[32];
    std::snprintf(name, sizeof name, "VC-%g", frac);
    vc.push_back({name, 0.0, 0.0});
  }
  if (inputs.empty()) {
    rows.push_back(compact);
    rows.insert(rows.end(), vc.begin(), vc.end());
    return rows;
  }

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto& in = inputs[k];
    if (in.fitted.empty() || in.reference.empty())
      throw std::invalid_argument("compression input " + std::to_string(k) + " has no mesh");
    const std::uint64_t seed = cfg.seed + 2 * k;
    compact.mean_f += f_score(in.fitted, in.reference, cfg.fscore_points, 0.05, seed).f;
    compact.mean_size_bytes += static_cast<double>(serialize_compact(in.z, in.g).size());
    const double radius = bounding_sphere(in.fitted.vertices).radius;
    for (std::size_t c = 0; c < cfg.cell_fractions.size(); ++c) {
      const TriangleMesh simplified = vertex_clustering(in.fitted, cfg.cell_fractions[c] * radius);
      vc[c].mean_f += simplified.empty() || !(surface_area(simplified) > 0.0)
                          ? 0.0
                          : f_score(simplified, in.reference, cfg.fscore_points, 0.05, seed).f;
      vc[c].mean_size_bytes += static_cast<double>(obj_string(simplified).size());
    }
  }
  const double n = static_cast<double>(inputs.size());
  compact.mean_f /= n;
  compact.mean_size_bytes /= n;
  rows.push_back(compact);
  for (auto& row : vc) {
    row.mean_f /= n;
    row.mean_size_bytes /= n;
    rows.push_back(row);
  }
  return rows;
}

std::string compression_csv(const std::vector<CompressionRow>& rows) {
  std::string out = "method,mean_f,mean_size_bytes,mean_size_kb\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.3f,%.3f\n", r.method.c_str(), r.mean_f,
                  r.mean_size_bytes, r.mean_size_bytes / 1000.0);
    out += buf;
  }
  return out;
}

}  // namespace sdfpose
