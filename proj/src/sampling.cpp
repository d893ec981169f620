#include "sdfpose/sampling.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "binary_io.h"
#include "sdfpose/kdtree.h"

namespace sdfpose {

SurfacePointSet sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  validate(mesh);
  std::vector<double> cumulative;
  cumulative.reserve(mesh.faces.size());
  double total = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    total += 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_surface: mesh has zero area");

  SurfacePointSet out;
  out.points.reserve(n);
  out.normals.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = uni(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto& f = mesh.faces[static_cast<std::size_t>(it - cumulative.begin())];
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const double r1 = std::sqrt(uni(rng));
    const double r2 = uni(rng);
    out.points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
    // Zero-area faces are never picked, so the cross product is non-zero.
    out.normals.push_back((b - a).cross(c - a).normalized());
  }
  return out;
}

MeshSdfSamples sample_mesh_sdf(const TriangleMesh& mesh, const MeshSdfConfig& cfg) {
  if (!(cfg.freespace_min >= 0.0 && cfg.freespace_max >= cfg.freespace_min))
    throw std::invalid_argument("sample_mesh_sdf: bad freespace band");
  if (cfg.freespace > 0 && cfg.dense_points == 0)
    throw std::invalid_argument("sample_mesh_sdf: freespace sampling needs dense points");

  MeshSdfSamples out;
  out.samples.reserve(2 * cfg.near_pairs + cfg.freespace);

  const SurfacePointSet near = sample_surface(mesh, cfg.near_pairs, cfg.seed);
  for (std::size_t i = 0; i < near.size(); ++i) {
    out.samples.push_back({near.points[i] + cfg.near_offset * near.normals[i], cfg.near_offset});
    out.samples.push_back({near.points[i] - cfg.near_offset * near.normals[i], -cfg.near_offset});
  }
  if (cfg.freespace == 0) return out;

  SurfacePointSet dense = sample_surface(mesh, cfg.dense_points, cfg.seed + 1);
  const std::vector<Vec3> dense_normals = std::move(dense.normals);
  const KdTree tree(std::move(dense.points));

  const SurfacePointSet anchors = sample_surface(mesh, cfg.freespace, cfg.seed + 2);
  std::mt19937_64 rng(cfg.seed + 3);
  std::uniform_real_distribution<double> band(cfg.freespace_min, cfg.freespace_max);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const Vec3 q = anchors.points[i] + band(rng) * anchors.normals[i];
    const KdTree::Neighbor nn = tree.nearest(q);
    const bool outside = (q - tree.points()[nn.index]).dot(dense_normals[nn.index]) >= 0.0;
    if (!outside) ++out.negative_freespace;
    out.samples.push_back({q, outside ? nn.distance : -nn.distance});
  }
  if (out.negative_freespace * 10 > cfg.freespace) {
    out.diagnostics.push_back("warning: " + std::to_string(out.negative_freespace) + " of " +
                              std::to_string(cfg.freespace) +
                              " freespace samples were signed negative; mesh winding may be "
                              "inconsistent");
  }
  return out;
}

std::vector<SdfSample> sample_sdf_field(const std::function<double(const Vec3&)>& field,
                                        const std::function<Vec3(const Vec3&)>& gradient,
                                        const AnalyticSampleConfig& cfg) {
  const Vec3 lo = cfg.region_min, hi = cfg.region_max;
  if (!((hi - lo).minCoeff() > 0.0)) throw std::invalid_argument("sampling region is empty");
  if (!(cfg.near_band >= 0.0)) throw std::invalid_argument("near band must be non-negative");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto region_point = [&] {
    const double a = uni(rng), b = uni(rng), c = uni(rng);
    return Vec3(lo.x() + a * (hi.x() - lo.x()), lo.y() + b * (hi.y() - lo.y()),
                lo.z() + c * (hi.z() - lo.z()));
  };
  auto inside_region = [&](const Vec3& p) {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  };
  const double tol = 1e-10 * std::max(1.0, (hi - lo).maxCoeff());

  std::vector<SdfSample> out;
  out.reserve(cfg.near_surface + cfg.uniform);

  const std::size_t max_attempts = 50 * cfg.near_surface + 1000;
  std::size_t attempts = 0;
  while (out.size() < cfg.near_surface) {
    if (++attempts > max_attempts) {
      throw std::runtime_error(out.empty()
                                   ? "no surface found inside the sampling region"
                                   : "surface projection failed too often in sampling region");
    }
    Vec3 p = region_point();
    bool converged = false;
    Vec3 g = Vec3::Zero();
    for (int it = 0; it < 50; ++it) {
      const double phi = field(p);
      g = gradient(p);
      const double g2 = g.squaredNorm();
      if (!(g2 > 1e-12)) break;
      if (std::abs(phi) <= tol) {
        converged = true;
        break;
      }
      p -= (phi / g2) * g;
    }
    if (!converged || !inside_region(p)) continue;
    const Vec3 n = g.normalized();
    const double offset = cfg.near_band * (2.0 * uni(rng) - 1.0);
    const Vec3 q = p + offset * n;
    out.push_back({q, field(q)});
  }
  for (std::size_t i = 0; i < cfg.uniform; ++i) {
    const Vec3 q = region_point();
    out.push_back({q, field(q)});
  }
  return out;
}

std::vector<SdfSample> sample_analytic_sdf(const AnalyticShape& shape,
                                           const SimilarityTransform& g,
                                           const AnalyticSampleConfig& cfg) {
  validate(shape);
  if (!(g.s > 0.0)) throw std::invalid_argument("transform scale must be positive");
  auto field = [&](const Vec3& x) { return transformed_sdf(shape, g, x); };
  const double h = 1e-6 * std::max(1.0, g.s);
  auto gradient = [&](const Vec3& x) {
    Vec3 grad;
    for (int k = 0; k < 3; ++k) {
      Vec3 a = x, b = x;
      a[k] += h;
      b[k] -= h;
      grad[k] = (field(a) - field(b)) / (2.0 * h);
    }
    return grad;
  };
  return sample_sdf_field(field, gradient, cfg);
}

std::vector<SdfSample> sample_analytic_sdf(const LatentSdf& space, const LatentCode& z,
                                           const SimilarityTransform& g,
                                           const AnalyticSampleConfig& cfg) {
  if (z.size() != space.latent_dim()) throw std::invalid_argument("latent code dimension mismatch");
  if (!(g.s > 0.0)) throw std::invalid_argument("transform scale must be positive");
  const Mat3 r = rotation_matrix(g.rot);
  auto field = [&](const Vec3& x) {
    return g.s * space.eval(r.transpose() * (x - g.t) / g.s, z);
  };
  auto gradient = [&](const Vec3& x) {
    return Vec3(r * space.grad(r.transpose() * (x - g.t) / g.s, z).d_x);
  };
  return sample_sdf_field(field, gradient, cfg);
}

std::pair<Vec3, Vec3> region_around(const SimilarityTransform& g, double canonical_radius,
                                    double margin) {
  const double half = g.s * canonical_radius * (1.0 + margin);
  return {g.t - Vec3::Constant(half), g.t + Vec3::Constant(half)};
}

SurfacePointSet surface_proxy(const std::vector<SdfSample>& samples, double band) {
  SurfacePointSet out;
  for (const auto& s : samples)
    if (std::abs(s.phi) <= band) out.points.push_back(s.x);
  return out;
}

// ---------------------------------------------------------------------------

void write_samples_csv(const std::vector<SdfSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,z,phi\n";
  char line[160];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", s.x.x(), s.x.y(), s.x.z(),
                  s.phi);
    out << line;
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_samples_binary(const std::vector<SdfSample>& samples, const std::string& path) {
  detail::ByteWriter w;
  w.magic("SDFS");
  w.u64(samples.size());
  for (const auto& s : samples) {
    w.f32(static_cast<float>(s.x.x()));
    w.f32(static_cast<float>(s.x.y()));
    w.f32(static_cast<float>(s.x.z()));
    w.f32(static_cast<float>(s.phi));
  }
  detail::write_file_bytes(path, w.bytes());
}

namespace {

std::vector<SdfSample> parse_samples_csv(const std::string& text, const std::string& path) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty sample file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z,phi") throw std::runtime_error(path + ": expected header x,y,z,phi");
  std::vector<SdfSample> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    double v[4];
    const char* p = line.c_str();
    for (int k = 0; k < 4; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p) throw std::runtime_error(path + ": malformed line " + std::to_string(line_no));
      p = end;
      if (k < 3) {
        if (*p != ',') throw std::runtime_error(path + ": malformed line " + std::to_string(line_no));
        ++p;
      }
    }
    out.push_back({Vec3(v[0], v[1], v[2]), v[3]});
  }
  return out;
}

}  // namespace

std::vector<SdfSample> read_samples(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes);
  if (bytes.size() >= 4 && r.expect_magic("SDFS")) {
    const std::uint64_t n = r.u64();
    if (r.remaining() != n * 16) throw std::runtime_error(path + ": sample count does not match size");
    std::vector<SdfSample> out(n);
    for (auto& s : out) {
      const double x = r.f32(), y = r.f32(), z = r.f32();
      s.x = Vec3(x, y, z);
      s.phi = r.f32();
    }
    return out;
  }
  return parse_samples_csv(std::string(bytes.begin(), bytes.end()), path);
}

}  // namespace sdfpose
