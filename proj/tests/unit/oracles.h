#pragma once
// Independent reference computations shared by the tests.

#include <cmath>
#include <random>
#include <vector>

#include "sdfpose/geometry.h"
#include "sdfpose/mesh.h"

namespace oracle {

using sdfpose::Vec3;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 uniform_vec(std::mt19937_64& rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline Vec3 unit_vec(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

// Surface of an axis-aligned rounded box centered at the origin: six flat
// faces, twelve quarter cylinders and eight sphere octants, each sampled on a
// regular parameter grid with spacing at most h.
inline std::vector<Vec3> rounded_box_surface(const Vec3& he, double r, double h) {
  std::vector<Vec3> out;
  auto steps = [h](double len) { return std::max(1, static_cast<int>(std::ceil(len / h))); };
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const int nb = steps(2 * he[b]), nc = steps(2 * he[c]);
    for (int sign : {-1, 1})
      for (int i = 0; i <= nb; ++i)
        for (int j = 0; j <= nc; ++j) {
          Vec3 p;
          p[a] = sign * (he[a] + r);
          p[b] = -he[b] + 2 * he[b] * i / nb;
          p[c] = -he[c] + 2 * he[c] * j / nc;
          out.push_back(p);
        }
  }
  const int na = steps(0.5 * M_PI * r);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    const int nl = steps(2 * he[a]);
    for (int sb : {-1, 1})
      for (int sc : {-1, 1})
        for (int i = 0; i <= nl; ++i)
          for (int k = 0; k <= na; ++k) {
            const double phi = 0.5 * M_PI * k / na;
            Vec3 p;
            p[a] = -he[a] + 2 * he[a] * i / nl;
            p[b] = sb * (he[b] + r * std::cos(phi));
            p[c] = sc * (he[c] + r * std::sin(phi));
            out.push_back(p);
          }
  }
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        for (int i = 0; i <= na; ++i)
          for (int k = 0; k <= na; ++k) {
            const double pol = 0.5 * M_PI * i / na, az = 0.5 * M_PI * k / na;
            const Vec3 u(std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol));
            out.push_back(Vec3(sx * (he.x() + r * u.x()), sy * (he.y() + r * u.y()),
                               sz * (he.z() + r * u.z())));
          }
  return out;
}

// Containment for the rounded box: closer than r to the inner box.
inline bool inside_rounded_box(const Vec3& p, const Vec3& he, double r) {
  const Vec3 q = (p.cwiseAbs() - he).cwiseMax(0.0);
  return q.norm() < r;
}

inline double nearest_distance(const std::vector<Vec3>& pts, const Vec3& q) {
  double best = INFINITY;
  for (const auto& p : pts) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

// Icosphere-free UV sphere, outward winding.
inline sdfpose::TriangleMesh uv_sphere(double radius, int stacks, int slices,
                                       const Vec3& center = Vec3::Zero()) {
  sdfpose::TriangleMesh m;
  m.vertices.push_back(center + Vec3(0, 0, radius));
  for (int i = 1; i < stacks; ++i) {
    const double pol = M_PI * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double az = 2 * M_PI * j / slices;
      m.vertices.push_back(center + radius * Vec3(std::sin(pol) * std::cos(az),
                                                  std::sin(pol) * std::sin(az), std::cos(pol)));
    }
  }
  m.vertices.push_back(center + Vec3(0, 0, -radius));
  const int south = static_cast<int>(m.vertices.size()) - 1;
  auto ring = [slices](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < stacks; ++i)
    for (int j = 0; j < slices; ++j) {
      m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  for (int j = 0; j < slices; ++j) m.faces.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  return m;
}

}  // namespace oracle
